#include "lierec/dataset_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lierec/error.hpp"

namespace lierec {

namespace {

using Json = nlohmann::ordered_json;

std::string line_prefix(std::size_t line) { return "line " + std::to_string(line) + ": "; }

template<typename T>
T get_field(const Json & obj, const char * key, const std::string & where)
{
  if (!obj.is_object() || !obj.contains(key)) {
    throw FormatError(where + "missing field '" + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception & e) {
    throw FormatError(where + "field '" + key + "' has the wrong type");
  }
}

std::vector<double> get_numbers(const Json & value, const std::string & where, const char * what)
{
  if (!value.is_array()) { throw FormatError(where + what + " must be an array"); }
  std::vector<double> out;
  out.reserve(value.size());
  for (const auto & v : value) {
    if (!v.is_number()) { throw FormatError(where + what + " must contain numbers"); }
    out.push_back(v.get<double>());
  }
  return out;
}

Json numbers(std::span<const double> values)
{
  Json arr = Json::array();
  for (double v : values) { arr.push_back(v); }
  return arr;
}

Json layer_json(const DenseLayer & l) { return numbers(l.weights); }

}  // namespace

std::string read_text_file(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) { throw Error("cannot open '" + path.string() + "' for reading"); }
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::filesystem::path & path, const std::string & text)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) { throw Error("cannot open '" + path.string() + "' for writing"); }
  out << text;
  if (!out) { throw Error("write to '" + path.string() + "' failed"); }
}

DatasetHeader header_for(const SamplingConfig & config, std::size_t count)
{
  return {config.kind, config.dt, config.steps, config.bound_a, config.noise_sigma, config.seed, count};
}

std::string serialize_dataset(const DatasetHeader & header, const std::vector<Trajectory> & trajs)
{
  if (header.count != trajs.size()) {
    throw DimensionError("dataset header count " + std::to_string(header.count) + " but "
                         + std::to_string(trajs.size()) + " trajectories");
  }
  Json h;
  h["format_version"] = kFormatVersion;
  h["group"] = std::string(to_string(header.group));
  h["dt"] = header.dt;
  h["steps"] = header.steps;
  h["bound_a"] = header.bound_a;
  h["noise_sigma"] = header.noise_sigma;
  h["seed"] = header.seed;
  h["count"] = header.count;

  std::string text = h.dump();
  text += '\n';
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    const Trajectory & t = trajs[i];
    if (t.kind != header.group || t.dt != header.dt || t.steps() != header.steps) {
      throw DimensionError("trajectory " + std::to_string(i)
                           + " differs from the dataset header in group, dt or steps");
    }
    Json rec;
    rec["xi"] = numbers(t.true_xi.coords());
    Json poses = Json::array();
    for (const auto & p : t.poses) { poses.push_back(numbers(p.matrix().entries())); }
    rec["poses"] = std::move(poses);
    Json incs = Json::array();
    for (const auto & inc : to_increments(t).increments) { incs.push_back(numbers(inc.coords())); }
    rec["increments"] = std::move(incs);
    text += rec.dump();
    text += '\n';
  }
  return text;
}

void write_dataset(const std::filesystem::path & path, const DatasetHeader & header,
  const std::vector<Trajectory> & trajs)
{
  write_text_file(path, serialize_dataset(header, trajs));
}

DatasetFile parse_dataset(const std::string & text)
{
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;

  auto parse_line = [&](const std::string & s) {
    try {
      return Json::parse(s);
    } catch (const nlohmann::json::parse_error & e) {
      throw FormatError(line_prefix(lineno) + "malformed JSON: " + e.what());
    }
  };

  DatasetFile file;
  if (!std::getline(in, line)) { throw FormatError("dataset file is empty"); }
  ++lineno;
  const Json h = parse_line(line);
  const std::string where = line_prefix(lineno);
  const int version = get_field<int>(h, "format_version", where);
  if (version != kFormatVersion) {
    throw FormatError(where + "unsupported format_version " + std::to_string(version));
  }
  DatasetHeader & header = file.header;
  try {
    header.group = parse_group_kind(get_field<std::string>(h, "group", where));
  } catch (const DomainError & e) {
    throw FormatError(where + e.what());
  }
  header.dt = get_field<double>(h, "dt", where);
  header.steps = get_field<std::size_t>(h, "steps", where);
  header.bound_a = get_field<double>(h, "bound_a", where);
  header.noise_sigma = get_field<double>(h, "noise_sigma", where);
  header.seed = get_field<std::uint64_t>(h, "seed", where);
  header.count = get_field<std::size_t>(h, "count", where);

  const std::size_t n = ambient_dim(header.group);
  const std::size_t d = algebra_dim(header.group);

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) { continue; }
    const Json rec = parse_line(line);
    const std::string at = line_prefix(lineno);
    const std::size_t index = file.trajectories.size();
    const std::string rec_name = at + "record " + std::to_string(index) + ": ";

    if (!rec.is_object()) { throw FormatError(rec_name + "record must be an object"); }
    for (const char * key : {"xi", "poses", "increments"}) {
      if (!rec.contains(key)) { throw FormatError(rec_name + "missing field '" + key + "'"); }
    }
    const auto xi = get_numbers(rec["xi"], rec_name, "xi");
    if (xi.size() != d) { throw FormatError(rec_name + "xi must have " + std::to_string(d) + " entries"); }

    const Json & poses = rec["poses"];
    const Json & incs = rec["increments"];
    if (!poses.is_array() || poses.size() != header.steps + 1) {
      throw FormatError(rec_name + "expected " + std::to_string(header.steps + 1) + " poses");
    }
    if (!incs.is_array() || incs.size() != header.steps) {
      throw FormatError(rec_name + "expected " + std::to_string(header.steps) + " increments, got "
                        + std::to_string(incs.is_array() ? incs.size() : 0));
    }

    Trajectory t;
    t.kind = header.group;
    t.dt = header.dt;
    t.noise_sigma = header.noise_sigma;
    t.true_xi = AlgebraVector(header.group, xi);
    for (std::size_t k = 0; k < poses.size(); ++k) {
      const auto entries = get_numbers(poses[k], rec_name, "pose");
      if (entries.size() != n * n) {
        throw FormatError(rec_name + "pose " + std::to_string(k) + " must have "
                          + std::to_string(n * n) + " entries");
      }
      const Matrix m = Matrix::from_row_major(n, n, entries);
      if (auto why = membership_violation(header.group, m)) {
        throw DomainError(rec_name + "pose " + std::to_string(k) + ": " + *why);
      }
      t.poses.push_back(GroupElement::unchecked(header.group, m));
    }
    if (frobenius_distance(t.poses.front().matrix(), Matrix::identity(n)) > kMembershipTol) {
      throw DomainError(rec_name + "first pose is not the identity");
    }

    IncrementSequence seq{header.group, header.dt, {}};
    for (const auto & inc : incs) {
      const auto c = get_numbers(inc, rec_name, "increment");
      if (c.size() != d) { throw FormatError(rec_name + "increment must have " + std::to_string(d) + " entries"); }
      seq.increments.emplace_back(header.group, c);
    }
    file.trajectories.push_back(std::move(t));
    file.increments.push_back(std::move(seq));
  }

  if (file.trajectories.size() != header.count) {
    throw FormatError("header count " + std::to_string(header.count) + " but file holds "
                      + std::to_string(file.trajectories.size()) + " records");
  }
  return file;
}

DatasetFile read_dataset(const std::filesystem::path & path)
{
  return parse_dataset(read_text_file(path));
}

std::string serialize_model(const EncoderModel & model)
{
  model.validate();
  Json j;
  j["format_version"] = kFormatVersion;
  j["group"] = std::string(to_string(model.kind));
  j["input_dim"] = model.input_dim();
  j["hidden"] = {model.hidden_dims()[0], model.hidden_dims()[1]};
  j["output_dim"] = model.output_dim();
  for (std::size_t i = 0; i < 3; ++i) {
    j["W" + std::to_string(i + 1)] = layer_json(model.layers[i]);
    j["b" + std::to_string(i + 1)] = numbers(model.layers[i].bias);
  }
  Json stats;
  stats["mean"] = numbers(model.stats.mean);
  stats["sigma"] = model.stats.sigma;
  stats["count"] = model.stats.count;
  j["stats"] = std::move(stats);
  return j.dump() + '\n';
}

void write_model(const std::filesystem::path & path, const EncoderModel & model)
{
  write_text_file(path, serialize_model(model));
}

EncoderModel parse_model(const std::string & text)
{
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error & e) {
    throw FormatError(std::string("model checkpoint: malformed JSON: ") + e.what());
  }
  const std::string where = "model checkpoint: ";
  const int version = get_field<int>(j, "format_version", where);
  if (version != kFormatVersion) {
    throw FormatError(where + "unsupported format_version " + std::to_string(version));
  }
  EncoderModel model;
  try {
    model.kind = parse_group_kind(get_field<std::string>(j, "group", where));
  } catch (const DomainError & e) {
    throw FormatError(where + e.what());
  }
  const auto input_dim = get_field<std::size_t>(j, "input_dim", where);
  const auto hidden = get_field<std::vector<std::size_t>>(j, "hidden", where);
  const auto output_dim = get_field<std::size_t>(j, "output_dim", where);
  if (hidden.size() != 2) { throw FormatError(where + "hidden must list two widths"); }

  const std::array<std::size_t, 4> dims{input_dim, hidden[0], hidden[1], output_dim};
  for (std::size_t i = 0; i < 3; ++i) {
    const std::string wk = "W" + std::to_string(i + 1);
    const std::string bk = "b" + std::to_string(i + 1);
    if (!j.contains(wk) || !j.contains(bk)) { throw FormatError(where + "missing " + wk + " or " + bk); }
    DenseLayer & l = model.layers[i];
    l.in = dims[i];
    l.out = dims[i + 1];
    l.weights = get_numbers(j[wk], where, wk.c_str());
    l.bias = get_numbers(j[bk], where, bk.c_str());
  }
  if (!j.contains("stats")) {
    throw FormatError(where + "missing normalization stats (required for inference)");
  }
  const Json & s = j["stats"];
  model.stats.kind = model.kind;
  model.stats.mean = get_numbers(s.contains("mean") ? s["mean"] : Json(), where, "stats.mean");
  model.stats.sigma = get_field<double>(s, "sigma", where);
  model.stats.count = get_field<std::size_t>(s, "count", where);
  model.validate();
  return model;
}

EncoderModel read_model(const std::filesystem::path & path)
{
  return parse_model(read_text_file(path));
}

}  // namespace lierec
