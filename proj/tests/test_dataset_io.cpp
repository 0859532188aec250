#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "lierec/baseline.hpp"
#include "lierec/dataset_io.hpp"
#include "lierec/error.hpp"
#include "test_support.hpp"

using namespace lierec;
using Json = nlohmann::ordered_json;

namespace {

std::vector<std::string> split_lines(const std::string & text)
{
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) { lines.push_back(l); }
  return lines;
}

std::string join_lines(const std::vector<std::string> & lines)
{
  std::string out;
  for (const auto & l : lines) { out += l + "\n"; }
  return out;
}

bool bitwise_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

struct Fixture
{
  SamplingConfig config;
  std::vector<Trajectory> trajs;
  std::string text;
};

Fixture make_fixture(GroupKind kind, std::size_t count, double sigma = 0.02)
{
  Fixture f;
  f.config.kind = kind;
  f.config.noise_sigma = sigma;
  f.config.steps = 6;
  f.config.seed = 51;
  f.trajs = generate_dataset(f.config, count);
  f.text = serialize_dataset(header_for(f.config, count), f.trajs);
  return f;
}

std::string error_message(const std::string & text)
{
  try {
    parse_dataset(text);
  } catch (const Error & e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("dataset round trip is bit exact")
{
  for (GroupKind kind : test::kAllGroups) {
    const Fixture f = make_fixture(kind, 4);
    const DatasetFile back = parse_dataset(f.text);
    CHECK(back.header.group == kind);
    CHECK(back.header.count == 4);
    CHECK(back.header.steps == 6);
    CHECK(bitwise_equal(back.header.noise_sigma, 0.02));
    REQUIRE(back.trajectories.size() == f.trajs.size());
    for (std::size_t i = 0; i < f.trajs.size(); ++i) {
      const Trajectory & a = f.trajs[i];
      const Trajectory & b = back.trajectories[i];
      CHECK(a.true_xi == b.true_xi);
      REQUIRE(a.poses.size() == b.poses.size());
      for (std::size_t t = 0; t < a.poses.size(); ++t) {
        const auto ea = a.poses[t].matrix().entries();
        const auto eb = b.poses[t].matrix().entries();
        for (std::size_t k = 0; k < ea.size(); ++k) { CHECK(bitwise_equal(ea[k], eb[k])); }
      }
    }
    CHECK(serialize_dataset(back.header, back.trajectories) == f.text);
  }
}

TEST_CASE("stored increments equal re-derived increments")
{
  const Fixture f = make_fixture(GroupKind::SE3, 3);
  const DatasetFile back = parse_dataset(f.text);
  REQUIRE(back.increments.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    const IncrementSequence fresh = to_increments(back.trajectories[i]);
    REQUIRE(fresh.increments.size() == back.increments[i].increments.size());
    for (std::size_t t = 0; t < fresh.increments.size(); ++t) {
      CHECK(fresh.increments[t] == back.increments[i].increments[t]);
    }
  }
}

TEST_CASE("three records read back as three trajectories")
{
  const Fixture f = make_fixture(GroupKind::SO3, 3);
  CHECK(split_lines(f.text).size() == 4);
  CHECK(parse_dataset(f.text).trajectories.size() == 3);
}

TEST_CASE("empty dataset is valid")
{
  const Fixture f = make_fixture(GroupKind::SE2, 0);
  const DatasetFile back = parse_dataset(f.text);
  CHECK(back.trajectories.empty());
  CHECK(back.header.count == 0);
}

TEST_CASE("serialization is deterministic")
{
  const Fixture a = make_fixture(GroupKind::SL2R, 5);
  const Fixture b = make_fixture(GroupKind::SL2R, 5);
  CHECK(a.text == b.text);
}

TEST_CASE("file round trip")
{
  const Fixture f = make_fixture(GroupKind::SE2, 2);
  const auto path = std::filesystem::temp_directory_path() / "lierec_test_dataset.ljd";
  write_dataset(path, header_for(f.config, 2), f.trajs);
  CHECK(read_text_file(path) == f.text);
  CHECK(read_dataset(path).trajectories.size() == 2);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_dataset(path), Error);
}

TEST_CASE("tampered increment count reports the line")
{
  const Fixture f = make_fixture(GroupKind::SE2, 3);
  auto lines = split_lines(f.text);
  Json rec = Json::parse(lines[2]);
  rec["increments"].erase(rec["increments"].size() - 1);
  lines[2] = rec.dump();
  const std::string msg = error_message(join_lines(lines));
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK_THROWS_AS(parse_dataset(join_lines(lines)), FormatError);
}

TEST_CASE("missing header field is rejected")
{
  const Fixture f = make_fixture(GroupKind::SE2, 1);
  for (const char * key : {"format_version", "group", "dt", "steps", "count"}) {
    auto lines = split_lines(f.text);
    Json h = Json::parse(lines[0]);
    h.erase(key);
    lines[0] = h.dump();
    CAPTURE(key);
    CHECK_THROWS_AS(parse_dataset(join_lines(lines)), FormatError);
  }
}

TEST_CASE("version mismatch is rejected")
{
  const Fixture f = make_fixture(GroupKind::SE2, 1);
  auto lines = split_lines(f.text);
  Json h = Json::parse(lines[0]);
  h["format_version"] = kFormatVersion + 1;
  lines[0] = h.dump();
  CHECK(error_message(join_lines(lines)).find("version") != std::string::npos);
}

TEST_CASE("record count must match the header")
{
  const Fixture f = make_fixture(GroupKind::SE2, 3);
  auto lines = split_lines(f.text);
  lines.pop_back();
  CHECK_THROWS_AS(parse_dataset(join_lines(lines)), FormatError);
}

TEST_CASE("malformed JSON reports the line")
{
  const Fixture f = make_fixture(GroupKind::SE2, 2);
  auto lines = split_lines(f.text);
  lines[1] = lines[1].substr(0, lines[1].size() / 2);
  CHECK(error_message(join_lines(lines)).find("line 2") != std::string::npos);
}

TEST_CASE("poses violating group membership are rejected")
{
  const Fixture f = make_fixture(GroupKind::SL2R, 2);
  auto lines = split_lines(f.text);
  Json rec = Json::parse(lines[1]);
  for (auto & v : rec["poses"][3]) { v = v.get<double>() * 1.5; }
  lines[1] = rec.dump();
  CHECK_THROWS_AS(parse_dataset(join_lines(lines)), DomainError);

  lines = split_lines(f.text);
  rec = Json::parse(lines[1]);
  rec["poses"][0][1] = 0.5;
  lines[1] = rec.dump();
  CHECK_THROWS_AS(parse_dataset(join_lines(lines)), DomainError);
}

TEST_CASE("model round trip preserves predictions bitwise")
{
  const Fixture f = make_fixture(GroupKind::SE3, 40, 0.0);
  TrainConfig cfg;
  cfg.hidden = {16, 8};
  cfg.epochs = 2;
  const EncoderModel model = train_encoder(f.trajs, cfg).result.model;
  const std::string text = serialize_model(model);
  const EncoderModel back = parse_model(text);
  CHECK(back.layers == model.layers);
  CHECK(back.stats.mean == model.stats.mean);
  CHECK(bitwise_equal(back.stats.sigma, model.stats.sigma));
  for (const auto & t : f.trajs) { CHECK(predict_generator(back, t) == predict_generator(model, t)); }
  CHECK(serialize_model(back) == text);

  const auto path = std::filesystem::temp_directory_path() / "lierec_test_model.lem";
  write_model(path, model);
  CHECK(read_model(path).layers == model.layers);
  std::filesystem::remove(path);
}

TEST_CASE("malformed model checkpoints are rejected")
{
  const EncoderModel model = init_encoder(GroupKind::SE2, 12, {6, 5},
    NormalizationStats{GroupKind::SE2, {0.1, 0.2, 0.3}, 0.5, 10}, 3);
  const Json good = Json::parse(serialize_model(model));

  Json j = good;
  j["hidden"][0] = 7;
  CHECK_THROWS_AS(parse_model(j.dump()), DimensionError);

  j = good;
  j.erase("stats");
  CHECK_THROWS_AS(parse_model(j.dump()), FormatError);

  j = good;
  j["format_version"] = 99;
  CHECK_THROWS_AS(parse_model(j.dump()), FormatError);

  j = good;
  j["W2"].erase(0);
  CHECK_THROWS_AS(parse_model(j.dump()), DimensionError);
}
