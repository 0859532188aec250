#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "lierec/baseline.hpp"
#include "lierec/dataset_io.hpp"
#include "lierec/error.hpp"
#include "lierec/mlp.hpp"
#include "lierec/svg_plot.hpp"
#include "lierec/trajectory.hpp"

namespace lierec::cli {

namespace {

namespace fs = std::filesystem;

class UsageError : public Error
{
public:
  using Error::Error;
};

std::string fmt(double v)
{
  if (std::isnan(v)) { return "nan"; }
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string join(const std::vector<std::string> & parts, char sep = ',')
{
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) { out += sep; }
    out += parts[i];
  }
  return out;
}

std::string vec_str(std::span<const double> v)
{
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) { s += ", "; }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.5f", v[i]);
    s += buf;
  }
  return s + "]";
}

fs::path sibling_with_suffix(const fs::path & path, const std::string & suffix)
{
  fs::path p = path;
  p.replace_extension();
  return p.string() + suffix;
}

// ---------------------------------------------------------------------------
// CSV reading for the plot command

struct CsvTable
{
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string & name) const
  {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) { throw FormatError("csv: missing column '" + name + "'"); }
    return static_cast<std::size_t>(it - header.begin());
  }
};

std::vector<std::string> split_csv_line(const std::string & line)
{
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) { out.push_back(cell); }
  if (!line.empty() && line.back() == ',') { out.emplace_back(); }
  return out;
}

CsvTable read_csv(const fs::path & path)
{
  std::istringstream in(read_text_file(path));
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) { throw FormatError("csv '" + path.string() + "' is empty"); }
  t.header = split_csv_line(line);
  while (std::getline(in, line)) {
    if (!line.empty()) { t.rows.push_back(split_csv_line(line)); }
  }
  return t;
}

double parse_cell(const std::string & s)
{
  if (s.empty() || s == "nan") { return std::nan(""); }
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw FormatError("csv: '" + s + "' is not a number");
  }
  return v;
}

// ---------------------------------------------------------------------------
// gen

struct GenOptions
{
  std::string group;
  long long n{100};
  long long steps{20};
  double dt{0.1};
  double bound{1.0};
  double sigma{0.0};
  std::uint64_t seed{1};
  std::string out;
};

int cmd_gen(const GenOptions & o, std::ostream & out, std::ostream & err)
{
  SamplingConfig config;
  try {
    config.kind = parse_group_kind(o.group);
  } catch (const DomainError & e) {
    throw UsageError(e.what());
  }
  if (o.n < 0) { throw UsageError("--n must be >= 0"); }
  if (o.steps < 2) { throw UsageError("--steps must be >= 2"); }
  config.steps = static_cast<std::size_t>(o.steps);
  config.dt = o.dt;
  config.bound_a = o.bound;
  config.noise_sigma = o.sigma;
  config.seed = o.seed;
  try {
    config.validate();
  } catch (const DomainError & e) {
    throw UsageError(e.what());
  }
  const auto count = static_cast<std::size_t>(o.n);
  if (count == 0) { err << "lierec gen: warning: --n 0 writes an empty dataset\n"; }

  const auto trajs = generate_dataset(config, count);
  write_dataset(o.out, header_for(config, count), trajs);
  out << "gen: group=" << to_string(config.kind) << " N=" << count << " T=" << config.steps
      << " dt=" << fmt(config.dt) << " sigma=" << fmt(config.noise_sigma) << " -> " << o.out << "\n";
  return kSuccess;
}

// ---------------------------------------------------------------------------
// train

struct TrainOptions
{
  std::string data;
  std::string out;
  std::string loss_out;
  std::string hidden{"64,64"};
  double lr{1e-3};
  long long epochs{50};
  long long batch{64};
  std::uint64_t seed{1};
  std::string optimizer{"adam"};
};

std::array<std::size_t, 2> parse_hidden(const std::string & s)
{
  const auto parts = split_csv_line(s);
  if (parts.size() != 2) { throw UsageError("--hidden expects two comma-separated widths, e.g. 64,64"); }
  std::array<std::size_t, 2> h{};
  for (std::size_t i = 0; i < 2; ++i) {
    std::size_t v = 0;
    const auto res = std::from_chars(parts[i].data(), parts[i].data() + parts[i].size(), v);
    if (res.ec != std::errc{} || res.ptr != parts[i].data() + parts[i].size() || v == 0) {
      throw UsageError("--hidden widths must be positive integers");
    }
    h[i] = v;
  }
  return h;
}

std::string loss_csv(const TrainReport & report)
{
  std::string s = "epoch,train_loss,val_loss\n";
  for (const auto & e : report.epochs) {
    s += std::to_string(e.epoch) + "," + fmt(e.train_loss) + ","
       + (e.val_loss ? fmt(*e.val_loss) : std::string()) + "\n";
  }
  return s;
}

int cmd_train(const TrainOptions & o, std::ostream & out, std::ostream & err)
{
  TrainConfig config;
  config.hidden = parse_hidden(o.hidden);
  if (o.epochs < 0) { throw UsageError("--epochs must be >= 0"); }
  if (o.batch < 1) { throw UsageError("--batch must be >= 1"); }
  config.epochs = static_cast<std::size_t>(o.epochs);
  config.batch_size = static_cast<std::size_t>(o.batch);
  config.learning_rate = o.lr;
  config.seed = o.seed;
  try {
    config.optimizer = parse_optimizer(o.optimizer);
    config.validate();
  } catch (const DomainError & e) {
    throw UsageError(e.what());
  }

  const DatasetFile data = read_dataset(o.data);
  if (data.trajectories.empty()) { throw DomainError("dataset '" + o.data + "' has no trajectories"); }
  if (config.epochs == 0) { err << "lierec train: warning: --epochs 0 writes the initialized model\n"; }

  const EncoderFit fit = train_encoder(data.trajectories, config);
  const EncoderModel & model = fit.result.model;
  write_model(o.out, model);
  const fs::path loss_path = o.loss_out.empty() ? sibling_with_suffix(o.out, ".loss.csv") : fs::path(o.loss_out);
  write_text_file(loss_path, loss_csv(fit.result.report));

  const auto & rep = fit.result.report;
  const double final_train = rep.epochs.empty() ? rep.initial_train_loss : rep.epochs.back().train_loss;
  out << "train: group=" << to_string(model.kind) << " train=" << fit.split.train.size()
      << " val=" << fit.split.validation.size() << " epochs=" << config.epochs
      << " final_train_loss=" << fmt(final_train);

  if (!fit.split.validation.empty()) {
    std::vector<ErrorReport> reports;
    for (const auto & t : fit.split.validation) {
      const AlgebraVector pred = predict_generator(model, t);
      reports.push_back(compare(pred, estimate_mean_increment(t), t.true_xi));
    }
    const ErrorSummary s = summarize(reports);
    out << " final_val_loss=" << fmt(rep.epochs.empty() ? *rep.initial_val_loss : *rep.epochs.back().val_loss)
        << "\ntrain: val per-component mean abs error " << vec_str(s.model_mean)
        << " overall=" << fmt(s.model_mean_overall());
  }
  out << "\ntrain: wrote " << o.out << " and " << loss_path.string() << "\n";
  return kSuccess;
}

// ---------------------------------------------------------------------------
// eval

struct EvalOptions
{
  std::string model;
  std::string data;
  std::string out;
};

int cmd_eval(const EvalOptions & o, std::ostream & out, std::ostream &)
{
  const EncoderModel model = read_model(o.model);
  const DatasetFile data = read_dataset(o.data);
  if (data.header.group != model.kind) {
    throw DomainError("dataset group " + std::string(to_string(data.header.group))
                      + " does not match model group " + std::string(to_string(model.kind)));
  }
  if (data.header.steps * algebra_dim(model.kind) != model.input_dim()) {
    throw DomainError("dataset steps " + std::to_string(data.header.steps)
                      + " do not match the model input dim " + std::to_string(model.input_dim()));
  }
  const std::size_t d = algebra_dim(model.kind);
  const bool regimes = model.kind == GroupKind::SL2R;

  std::vector<std::string> header{"row"};
  for (const char * prefix : {"true_", "mlp_", "base_", "mlp_err_", "base_err_"}) {
    for (std::size_t j = 0; j < d; ++j) { header.push_back(prefix + std::to_string(j)); }
  }
  header.push_back("mlp_euclid");
  header.push_back("base_euclid");
  if (regimes) {
    header.push_back("regime_true");
    header.push_back("regime_pred");
    header.push_back("regime_match");
  }

  std::string csv = join(header) + "\n";
  std::vector<ErrorReport> reports;
  std::size_t matches = 0;
  for (std::size_t i = 0; i < data.trajectories.size(); ++i) {
    const Trajectory & t = data.trajectories[i];
    const ErrorReport r = compare(predict_generator(model, t), estimate_mean_increment(t), t.true_xi);
    std::vector<std::string> row{std::to_string(i)};
    for (const AlgebraVector * v : {&r.truth, &r.model_pred, &r.baseline_pred}) {
      for (std::size_t j = 0; j < d; ++j) { row.push_back(fmt((*v)[j])); }
    }
    for (const auto * e : {&r.model_abs_error, &r.baseline_abs_error}) {
      for (double x : *e) { row.push_back(fmt(x)); }
    }
    row.push_back(fmt(r.model_euclidean));
    row.push_back(fmt(r.baseline_euclidean));
    if (regimes) {
      const Regime rt = classify_regime(r.truth);
      const Regime rp = classify_regime(r.model_pred);
      row.emplace_back(to_string(rt));
      row.emplace_back(to_string(rp));
      row.push_back(rt == rp ? "1" : "0");
      matches += rt == rp ? 1 : 0;
    }
    csv += join(row) + "\n";
    reports.push_back(r);
  }

  const ErrorSummary s = summarize(reports);
  if (!reports.empty()) {
    for (const bool is_mean : {true, false}) {
      std::vector<std::string> row{is_mean ? "mean" : "max"};
      for (std::size_t k = 0; k < 3 * d; ++k) { row.emplace_back(); }
      for (const auto * v : {is_mean ? &s.model_mean : &s.model_max, is_mean ? &s.baseline_mean : &s.baseline_max}) {
        for (double x : *v) { row.push_back(fmt(x)); }
      }
      double me = 0.0, be = 0.0;
      for (const auto & r : reports) {
        me = is_mean ? me + r.model_euclidean : std::max(me, r.model_euclidean);
        be = is_mean ? be + r.baseline_euclidean : std::max(be, r.baseline_euclidean);
      }
      if (is_mean) {
        me /= static_cast<double>(reports.size());
        be /= static_cast<double>(reports.size());
      }
      row.push_back(fmt(me));
      row.push_back(fmt(be));
      if (regimes) {
        row.emplace_back();
        row.emplace_back();
        row.push_back(is_mean ? fmt(static_cast<double>(matches) / static_cast<double>(reports.size())) : std::string());
      }
      csv += join(row) + "\n";
    }
  }
  write_text_file(o.out, csv);

  out << "eval: group=" << to_string(model.kind) << " N=" << reports.size();
  if (!reports.empty()) {
    double base_max = 0.0;
    for (double x : s.baseline_max) { base_max = std::max(base_max, x); }
    out << "\neval: mlp per-component mean abs error " << vec_str(s.model_mean)
        << " overall=" << fmt(s.model_mean_overall())
        << "\neval: baseline max abs error " << fmt(base_max);
    if (regimes) {
      out << "\neval: regime match rate " << fmt(static_cast<double>(matches) / static_cast<double>(reports.size()))
          << " (" << matches << "/" << reports.size() << ")";
    }
  }
  out << "\neval: wrote " << o.out << "\n";
  return kSuccess;
}

// ---------------------------------------------------------------------------
// plot

struct PlotOptions
{
  std::string kind;
  std::string report;
  std::string model;
  std::string data;
  long long index{0};
  std::string out;
};

plot::Figure loss_figure(const CsvTable & t)
{
  plot::Figure fig{"MSE loss", "epoch", "loss", {}, false, 640.0, 480.0};
  const std::size_t ce = t.column("epoch");
  const std::size_t ct = t.column("train_loss");
  const std::size_t cv = t.column("val_loss");
  plot::Series train{"train_loss", {}, {}, plot::palette(0)};
  plot::Series val{"val_loss", {}, {}, plot::palette(1)};
  for (const auto & row : t.rows) {
    if (row.size() < t.header.size() - 1) { throw FormatError("loss csv: short row"); }
    const double e = parse_cell(row[ce]);
    train.x.push_back(e);
    train.y.push_back(parse_cell(row[ct]));
    const double v = cv < row.size() ? parse_cell(row[cv]) : std::nan("");
    if (!std::isnan(v)) {
      val.x.push_back(e);
      val.y.push_back(v);
    }
  }
  fig.series.push_back(std::move(train));
  if (!val.x.empty()) { fig.series.push_back(std::move(val)); }
  return fig;
}

plot::Figure generator_figure(const CsvTable & t)
{
  plot::Figure fig{"Estimated vs true generator", "true component", "estimated component", {}, true, 640.0, 480.0};
  std::size_t d = 0;
  while (std::find(t.header.begin(), t.header.end(), "true_" + std::to_string(d)) != t.header.end()) { ++d; }
  if (d == 0) { throw FormatError("generator plot: report has no true_* columns"); }
  for (std::size_t j = 0; j < d; ++j) {
    plot::Series s{"xi_" + std::to_string(j), {}, {}, plot::palette(j), false, true};
    const std::size_t ct = t.column("true_" + std::to_string(j));
    const std::size_t cm = t.column("mlp_" + std::to_string(j));
    for (const auto & row : t.rows) {
      if (row.empty() || row[0] == "mean" || row[0] == "max") { continue; }
      s.x.push_back(parse_cell(row.at(ct)));
      s.y.push_back(parse_cell(row.at(cm)));
    }
    fig.series.push_back(std::move(s));
  }
  return fig;
}

double rotation_deviation(const Matrix & a, const Matrix & b)
{
  const std::size_t n = a.rows() == 4 ? 3 : a.rows();
  double tr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) { tr += a(k, i) * b(k, i); }
  }
  return std::acos(std::clamp(0.5 * (tr - 1.0), -1.0, 1.0));
}

plot::Figure trajectory_figure(const Trajectory & truth, const Trajectory & pred, std::ostream & out)
{
  plot::Figure fig;
  fig.x_label = "t (s)";
  auto time = [&](std::size_t k) { return static_cast<double>(k) * truth.dt; };
  auto add_pair = [&](const std::string & name, std::size_t color, auto && value) {
    plot::Series st{name + " true", {}, {}, plot::palette(color)};
    plot::Series sp{name + " pred", {}, {}, plot::palette(color)};
    sp.dashed = true;
    for (std::size_t k = 0; k < truth.poses.size(); ++k) {
      st.x.push_back(time(k));
      st.y.push_back(value(truth.poses[k].matrix()));
      sp.x.push_back(time(k));
      sp.y.push_back(value(pred.poses[k].matrix()));
    }
    fig.series.push_back(std::move(st));
    fig.series.push_back(std::move(sp));
  };

  switch (truth.kind) {
    case GroupKind::SE2: {
      fig.title = "Planar path: true vs predicted";
      fig.x_label = "x";
      fig.y_label = "y";
      plot::Series st{"true", {}, {}, plot::palette(0)};
      plot::Series sp{"pred", {}, {}, plot::palette(1)};
      sp.dashed = true;
      for (std::size_t k = 0; k < truth.poses.size(); ++k) {
        st.x.push_back(truth.poses[k].matrix()(0, 2));
        st.y.push_back(truth.poses[k].matrix()(1, 2));
        sp.x.push_back(pred.poses[k].matrix()(0, 2));
        sp.y.push_back(pred.poses[k].matrix()(1, 2));
      }
      fig.series.push_back(std::move(st));
      fig.series.push_back(std::move(sp));
      break;
    }
    case GroupKind::SO3:
    case GroupKind::SE3: {
      fig.title = "Rotated z-axis direction: true vs predicted";
      fig.y_label = "component of R e_z";
      const char * names[] = {"z_x", "z_y", "z_z"};
      for (std::size_t c = 0; c < 3; ++c) {
        add_pair(names[c], c, [c](const Matrix & m) { return m(c, 2); });
      }
      double worst = 0.0;
      for (std::size_t k = 0; k < truth.poses.size(); ++k) {
        worst = std::max(worst, rotation_deviation(truth.poses[k].matrix(), pred.poses[k].matrix()));
      }
      out << "plot: max angular deviation " << fmt(worst) << " rad\n";
      break;
    }
    case GroupKind::SL2R: {
      fig.title = "Matrix flow: true vs predicted";
      fig.y_label = "entry";
      const char * names[] = {"g00", "g01", "g10", "g11"};
      for (std::size_t c = 0; c < 4; ++c) {
        add_pair(names[c], c, [c](const Matrix & m) { return m(c / 2, c % 2); });
      }
      break;
    }
  }
  return fig;
}

int cmd_plot(const PlotOptions & o, std::ostream & out, std::ostream &)
{
  plot::Figure fig;
  if (o.kind == "loss") {
    if (o.report.empty()) { throw UsageError("plot --kind loss needs --report LOSS_CSV"); }
    fig = loss_figure(read_csv(o.report));
  } else if (o.kind == "generator") {
    if (!o.report.empty()) {
      fig = generator_figure(read_csv(o.report));
    } else {
      if (o.model.empty() || o.data.empty()) {
        throw UsageError("plot --kind generator needs --report EVAL_CSV or --model and --data");
      }
      const EncoderModel model = read_model(o.model);
      const DatasetFile data = read_dataset(o.data);
      fig = plot::Figure{"Estimated vs true generator", "true component", "estimated component", {}, true, 640.0, 480.0};
      const std::size_t d = algebra_dim(model.kind);
      for (std::size_t j = 0; j < d; ++j) {
        fig.series.push_back(plot::Series{"xi_" + std::to_string(j), {}, {}, plot::palette(j), false, true});
      }
      for (const auto & t : data.trajectories) {
        const AlgebraVector p = predict_generator(model, t);
        for (std::size_t j = 0; j < d; ++j) {
          fig.series[j].x.push_back(t.true_xi[j]);
          fig.series[j].y.push_back(p[j]);
        }
      }
    }
  } else if (o.kind == "traj") {
    if (o.model.empty() || o.data.empty()) { throw UsageError("plot --kind traj needs --model and --data"); }
    const EncoderModel model = read_model(o.model);
    const DatasetFile data = read_dataset(o.data);
    if (o.index < 0 || static_cast<std::size_t>(o.index) >= data.trajectories.size()) {
      throw UsageError("--index out of range for dataset of " + std::to_string(data.trajectories.size()));
    }
    const Trajectory & truth = data.trajectories[static_cast<std::size_t>(o.index)];
    const AlgebraVector xi_hat = predict_generator(model, truth);
    SamplingConfig cfg;
    cfg.kind = truth.kind;
    cfg.dt = truth.dt;
    cfg.steps = truth.steps();
    cfg.bound_a = 0.0;
    const Trajectory pred = generate_clean(xi_hat, cfg);
    fig = trajectory_figure(truth, pred, out);
  } else {
    throw UsageError("unknown plot kind '" + o.kind + "' (expected loss|traj|generator)");
  }

  const fs::path svg_path = o.out;
  const fs::path csv_path = sibling_with_suffix(svg_path, ".csv");
  write_text_file(svg_path, plot::render_svg(fig));
  write_text_file(csv_path, plot::render_csv(fig));
  out << "plot: wrote " << svg_path.string() << " and " << csv_path.string() << "\n";
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string> & args, std::ostream & out, std::ostream & err)
{
  CLI::App app{"Generator recovery for exponential flows on matrix Lie groups", "lierec"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;

  GenOptions gen;
  auto * g = app.add_subcommand("gen", "Synthesize a trajectory dataset");
  g->add_option("--group", gen.group, "se2|se3|so3|sl2r")->required();
  g->add_option("--n", gen.n, "Number of trajectories")->capture_default_str();
  g->add_option("--steps", gen.steps, "Increments per trajectory (T)")->capture_default_str();
  g->add_option("--dt", gen.dt, "Time step in seconds")->capture_default_str();
  g->add_option("--bound", gen.bound, "Generator coordinate bound a")->capture_default_str();
  g->add_option("--sigma", gen.sigma, "Per-step generator noise std-dev")->capture_default_str();
  g->add_option("--seed", seed, "RNG seed")->envname("LIEREC_SEED")->capture_default_str();
  g->add_option("--out", gen.out, "Output .ljd path")->required();

  TrainOptions tr;
  auto * t = app.add_subcommand("train", "Train the encoder on a dataset");
  t->add_option("--data", tr.data, "Training .ljd path")->required();
  t->add_option("--out", tr.out, "Output .lem checkpoint")->required();
  t->add_option("--loss-out", tr.loss_out, "Loss-curve CSV (default: <out>.loss.csv)");
  t->add_option("--hidden", tr.hidden, "Hidden widths h1,h2")->capture_default_str();
  t->add_option("--lr", tr.lr, "Learning rate")->capture_default_str();
  t->add_option("--epochs", tr.epochs, "Training epochs")->capture_default_str();
  t->add_option("--batch", tr.batch, "Mini-batch size")->capture_default_str();
  t->add_option("--seed", seed, "RNG seed")->envname("LIEREC_SEED")->capture_default_str();
  t->add_option("--optimizer", tr.optimizer, "adam|sgd")->capture_default_str();

  EvalOptions ev;
  auto * e = app.add_subcommand("eval", "Compare encoder and baseline on a dataset");
  e->add_option("--model", ev.model, "Checkpoint .lem")->required();
  e->add_option("--data", ev.data, "Dataset .ljd")->required();
  e->add_option("--out", ev.out, "Report CSV")->required();

  PlotOptions pl;
  auto * p = app.add_subcommand("plot", "Render loss, trajectory, or generator plots");
  p->add_option("--kind", pl.kind, "loss|traj|generator")->required();
  p->add_option("--report", pl.report, "Loss or eval CSV");
  p->add_option("--model", pl.model, "Checkpoint .lem");
  p->add_option("--data", pl.data, "Dataset .ljd");
  p->add_option("--index", pl.index, "Trajectory index for --kind traj")->capture_default_str();
  p->add_option("--out", pl.out, "Output .svg (a .csv is written alongside)")->required();

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError & ex) {
    err << "lierec: " << ex.what() << "\n";
    return kUsage;
  }

  try {
    if (g->parsed()) {
      gen.seed = seed;
      return cmd_gen(gen, out, err);
    }
    if (t->parsed()) {
      tr.seed = seed;
      return cmd_train(tr, out, err);
    }
    if (e->parsed()) { return cmd_eval(ev, out, err); }
    if (p->parsed()) { return cmd_plot(pl, out, err); }
  } catch (const UsageError & ex) {
    err << "lierec: usage error: " << ex.what() << "\n";
    return kUsage;
  } catch (const NumericalError & ex) {
    err << "lierec: numerical failure: " << ex.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception & ex) {
    err << "lierec: error: " << ex.what() << "\n";
    return kDataError;
  }
  return kUsage;
}

}  // namespace lierec::cli
