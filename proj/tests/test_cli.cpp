#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "commands.hpp"
#include "lierec/dataset_io.hpp"

namespace fs = std::filesystem;
using lierec::cli::run;

namespace {

struct Result
{
  int code;
  std::string out;
  std::string err;
};

Result call(const std::vector<std::string> & args)
{
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir
{
  fs::path path;
  explicit TempDir(const std::string & name) : path(fs::temp_directory_path() / ("lierec_cli_" + name))
  {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string & f) const { return (path / f).string(); }
};

std::vector<std::vector<std::string>> read_csv_cells(const std::string & path)
{
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(lierec::read_text_file(path));
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) { cells.push_back(cell); }
    if (!line.empty() && line.back() == ',') { cells.emplace_back(); }
    rows.push_back(cells);
  }
  return rows;
}

std::size_t col(const std::vector<std::string> & header, const std::string & name)
{
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) { return i; }
  }
  FAIL("missing column " << name);
  return 0;
}

}  // namespace

TEST_CASE("gen writes a dataset")
{
  TempDir dir("gen");
  const Result r = call({"gen", "--group", "so3", "--n", "100", "--out", dir / "d.ljd"});
  CHECK(r.code == 0);
  CHECK(r.out.find("N=100") != std::string::npos);
  const auto data = lierec::read_dataset(dir / "d.ljd");
  CHECK(data.trajectories.size() == 100);
  CHECK(data.header.group == lierec::GroupKind::SO3);
}

TEST_CASE("gen argument errors")
{
  TempDir dir("gen_err");
  const Result zero = call({"gen", "--group", "se2", "--n", "0", "--out", dir / "e.ljd"});
  CHECK(zero.code == 0);
  CHECK(zero.err.find("warning") != std::string::npos);
  CHECK(lierec::read_dataset(dir / "e.ljd").trajectories.empty());

  CHECK(call({"gen", "--group", "se2", "--dt", "0", "--out", dir / "x.ljd"}).code == 1);
  CHECK(call({"gen", "--group", "se4", "--out", dir / "x.ljd"}).code == 1);
  CHECK(call({"gen", "--out", dir / "x.ljd"}).code == 1);
  CHECK(call({"gen", "--group", "se2", "--bound", "40", "--out", dir / "x.ljd"}).code == 1);
  CHECK(call({}).code == 1);
  CHECK(call({"frobnicate"}).code == 1);
  CHECK(call({"--help"}).code == 0);
  CHECK_FALSE(fs::exists(dir / "x.ljd"));
}

TEST_CASE("gen, train, eval, plot end to end")
{
  TempDir dir("flow");
  REQUIRE(call({"gen", "--group", "se2", "--n", "200", "--seed", "3", "--out", dir / "train.ljd"}).code == 0);
  REQUIRE(call({"gen", "--group", "se2", "--n", "20", "--seed", "4", "--out", dir / "test.ljd"}).code == 0);

  const Result tr = call({"train", "--data", dir / "train.ljd", "--out", dir / "m.lem", "--hidden", "16,16",
    "--epochs", "50", "--seed", "2"});
  REQUIRE(tr.code == 0);
  CHECK(fs::exists(dir / "m.loss.csv"));
  const auto loss = read_csv_cells(dir / "m.loss.csv");
  REQUIRE(loss.size() == 51);
  CHECK(loss[0] == std::vector<std::string>{"epoch", "train_loss", "val_loss"});

  REQUIRE(call({"eval", "--model", dir / "m.lem", "--data", dir / "test.ljd", "--out", dir / "r.csv"}).code == 0);
  const auto rep = read_csv_cells(dir / "r.csv");
  REQUIRE(rep.size() == 1 + 20 + 2);
  const auto & h = rep[0];
  CHECK(rep[21][0] == "mean");
  CHECK(rep[22][0] == "max");
  double base_worst = 0.0;
  for (std::size_t i = 1; i <= 20; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      const double be = std::stod(rep[i][col(h, "base_err_" + std::to_string(j))]);
      base_worst = std::max(base_worst, be);
      CHECK(be <= std::stod(rep[i][col(h, "mlp_err_" + std::to_string(j))]) + 1e-12);
    }
  }
  CHECK(base_worst < 1e-8);

  const Result pl = call({"plot", "--kind", "loss", "--report", dir / "m.loss.csv", "--out", dir / "loss.svg"});
  CHECK(pl.code == 0);
  const std::string svg = lierec::read_text_file(dir / "loss.svg");
  const auto start = svg.find("points=\"");
  REQUIRE(start != std::string::npos);
  const std::string pts = svg.substr(start + 8, svg.find('"', start + 8) - start - 8);
  std::istringstream ps(pts);
  std::size_t n = 0;
  for (std::string p; ps >> p;) { ++n; }
  CHECK(n == 50);
  CHECK(fs::exists(dir / "loss.csv"));

  CHECK(call({"plot", "--kind", "traj", "--model", dir / "m.lem", "--data", dir / "test.ljd", "--index", "3",
          "--out", dir / "traj.svg"}).code == 0);
  CHECK(call({"plot", "--kind", "traj", "--model", dir / "m.lem", "--data", dir / "test.ljd", "--index", "20",
          "--out", dir / "traj.svg"}).code == 1);
  CHECK(call({"plot", "--kind", "generator", "--report", dir / "r.csv", "--out", dir / "gen.svg"}).code == 0);
  CHECK(call({"plot", "--kind", "generator", "--model", dir / "m.lem", "--data", dir / "test.ljd",
          "--out", dir / "gen2.svg"}).code == 0);
  CHECK(call({"plot", "--kind", "histogram", "--report", dir / "r.csv", "--out", dir / "h.svg"}).code == 1);
}

TEST_CASE("generator scatter of perfect predictions lies on the diagonal")
{
  TempDir dir("diag");
  // A report whose predictions equal the truth, laid out like an eval report.
  lierec::write_text_file(dir / "r.csv",
    "row,true_0,mlp_0\n0,0.5,0.5\n1,-0.25,-0.25\n2,0.75,0.75\nmean,,0\nmax,,0\n");
  REQUIRE(call({"plot", "--kind", "generator", "--report", dir / "r.csv", "--out", dir / "g.svg"}).code == 0);
  CHECK(lierec::read_text_file(dir / "g.csv") == "series,x,y\nxi_0,0.5,0.5\nxi_0,-0.25,-0.25\nxi_0,0.75,0.75\n");
}

TEST_CASE("train and eval errors")
{
  TempDir dir("errs");
  REQUIRE(call({"gen", "--group", "so3", "--n", "30", "--out", dir / "so3.ljd"}).code == 0);
  REQUIRE(call({"gen", "--group", "se2", "--n", "30", "--out", dir / "se2.ljd"}).code == 0);

  const Result zero = call({"train", "--data", dir / "so3.ljd", "--out", dir / "m0.lem", "--epochs", "0"});
  CHECK(zero.code == 0);
  CHECK(zero.err.find("warning") != std::string::npos);
  CHECK(read_csv_cells(dir / "m0.loss.csv").size() == 1);

  CHECK(call({"eval", "--model", dir / "m0.lem", "--data", dir / "se2.ljd", "--out", dir / "r.csv"}).code == 2);
  CHECK(call({"train", "--data", dir / "missing.ljd", "--out", dir / "m.lem"}).code == 2);
  CHECK(call({"train", "--data", dir / "so3.ljd", "--out", dir / "m.lem", "--hidden", "8"}).code == 1);
  CHECK(call({"train", "--data", dir / "so3.ljd", "--out", dir / "m.lem", "--optimizer", "lbfgs"}).code == 1);
  CHECK(call({"train", "--data", dir / "so3.ljd", "--out", dir / "m.lem", "--optimizer", "sgd", "--lr", "1e7",
          "--epochs", "20"}).code == 3);
}

TEST_CASE("reruns produce identical bytes")
{
  TempDir dir("repro");
  for (const char * tag : {"a", "b"}) {
    const std::string t(tag);
    REQUIRE(call({"gen", "--group", "sl2r", "--n", "60", "--sigma", "0.01", "--out", dir / (t + ".ljd")}).code == 0);
    REQUIRE(call({"train", "--data", dir / (t + ".ljd"), "--out", dir / (t + ".lem"), "--hidden", "8,8",
              "--epochs", "3"}).code == 0);
    REQUIRE(call({"eval", "--model", dir / (t + ".lem"), "--data", dir / (t + ".ljd"), "--out", dir / (t + ".csv")}).code == 0);
  }
  for (const char * ext : {".ljd", ".lem", ".loss.csv", ".csv"}) {
    CAPTURE(ext);
    CHECK(lierec::read_text_file(dir / (std::string("a") + ext)) == lierec::read_text_file(dir / (std::string("b") + ext)));
  }
  const auto rep = read_csv_cells(dir / "a.csv");
  CHECK(rep[0].back() == "regime_match");
}

TEST_CASE("LIEREC_SEED sets the default seed")
{
  TempDir dir("env");
  REQUIRE(call({"gen", "--group", "se3", "--n", "5", "--seed", "7", "--out", dir / "explicit.ljd"}).code == 0);
  REQUIRE(call({"gen", "--group", "se3", "--n", "5", "--out", dir / "default.ljd"}).code == 0);
  ::setenv("LIEREC_SEED", "7", 1);
  const int code = call({"gen", "--group", "se3", "--n", "5", "--out", dir / "env.ljd"}).code;
  ::unsetenv("LIEREC_SEED");
  REQUIRE(code == 0);
  CHECK(lierec::read_text_file(dir / "env.ljd") == lierec::read_text_file(dir / "explicit.ljd"));
  CHECK(lierec::read_text_file(dir / "env.ljd") != lierec::read_text_file(dir / "default.ljd"));
}
