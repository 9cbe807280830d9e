// End-to-end checks of the command-line surface. The binary under test is
// located via the FUNKERNEL_CLI environment variable (set by ctest).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string cli_path() {
  const char* p = std::getenv("FUNKERNEL_CLI");
  REQUIRE_MESSAGE(p != nullptr, "FUNKERNEL_CLI must point at the CLI binary");
  return p;
}

int run(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("funkernel_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  out << j.dump(2);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json synth_section(int n, double noise, unsigned seed) {
  return {{"n", n},
          {"p", 1},
          {"scalar_discrete", 1},
          {"categories", 2},
          {"category_amplitude", 0.5},
          {"s_grid", {{"a", 0.0}, {"b", 1.0}, {"points", 31}}},
          {"t_grid", {{"a", 0.0}, {"b", 1.0}, {"points", 9}}},
          {"betas",
           json::array({{{"type", "gaussian_bump"},
                         {"center_s", 0.5},
                         {"center_t", 0.5},
                         {"scale", 0.2},
                         {"amplitude", 2.0}}})},
          {"noise_sigma", noise},
          {"seed", seed}};
}

json base_config(const TempDir& dir) {
  return {{"kernel",
           {{"sigma_d", 2.0},
            {"functional", "gaussian"},
            {"sigma_c", 1.0},
            {"sigma_y", 0.3},
            {"operator", "integral"}}},
          {"seed", 5},
          {"categorical_columns", json::array({"group"})},
          {"paths",
           {{"covariates", dir.file("covariates.csv")},
            {"discrete", dir.file("discrete.csv")},
            {"response", dir.file("response.csv")},
            {"truth", dir.file("truth.csv")},
            {"model", dir.file("model.fk")},
            {"predictions", dir.file("pred.csv")},
            {"report", dir.file("report.json")},
            {"score_table", dir.file("cv.csv")},
            {"plot_data", dir.file("plot.csv")},
            {"out_dir", dir.path.string()}}}};
}

}  // namespace

TEST_CASE("synth, fit, predict, eval pipeline") {
  TempDir dir;
  json cfg = base_config(dir);
  cfg["synthetic"] = synth_section(8, 0.05, 3);
  cfg["lambda"] = 1e-3;
  write_json(dir.file("cfg.json"), cfg);

  CHECK(run("synth --config " + dir.file("cfg.json")) == 0);
  for (const char* f : {"covariates.csv", "discrete.csv", "response.csv", "truth.csv"}) {
    CHECK(fs::exists(dir.file(f)));
  }

  CHECK(run("fit --config " + dir.file("cfg.json")) == 0);
  CHECK(fs::exists(dir.file("model.fk")));
  const json report = json::parse(read_file(dir.file("report.json")));
  CHECK(report.at("n") == 8);
  CHECK(report.at("p") == 1);
  CHECK(report.at("relative_residual").get<double>() <= 1e-8);

  CHECK(run("predict --config " + dir.file("cfg.json")) == 0);
  CHECK(fs::exists(dir.file("pred.csv")));

  // Evaluate predictions against the noiseless truth.
  CHECK(run("eval --config " + dir.file("cfg.json")) == 0);
  const json eval_report = json::parse(read_file(dir.file("report.json")));
  CHECK(eval_report.at("mean_ise").get<double>() >= 0.0);
  CHECK(std::isfinite(eval_report.at("mean_ise").get<double>()));
  CHECK(read_file(dir.file("plot.csv")).rfind("t,mse", 0) == 0);
}

TEST_CASE("reruns are byte-identical") {
  TempDir dir;
  json cfg = base_config(dir);
  cfg["synthetic"] = synth_section(6, 0.1, 7);
  cfg["lambda"] = 1e-2;
  write_json(dir.file("cfg.json"), cfg);

  REQUIRE(run("synth --config " + dir.file("cfg.json")) == 0);
  const std::string cov1 = read_file(dir.file("covariates.csv"));
  REQUIRE(run("fit --config " + dir.file("cfg.json")) == 0);
  const std::string model1 = read_file(dir.file("model.fk"));
  REQUIRE(run("predict --config " + dir.file("cfg.json")) == 0);
  const std::string pred1 = read_file(dir.file("pred.csv"));

  REQUIRE(run("synth --config " + dir.file("cfg.json")) == 0);
  CHECK(read_file(dir.file("covariates.csv")) == cov1);
  REQUIRE(run("fit --config " + dir.file("cfg.json")) == 0);
  CHECK(read_file(dir.file("model.fk")) == model1);
  REQUIRE(run("predict --config " + dir.file("cfg.json")) == 0);
  CHECK(read_file(dir.file("pred.csv")) == pred1);
}

TEST_CASE("exit code contract") {
  TempDir dir;
  SUBCASE("missing output directory is an I/O error") {
    json cfg = base_config(dir);
    cfg["synthetic"] = synth_section(4, 0.0, 1);
    cfg["paths"]["out_dir"] = (dir.path / "does_not_exist").string();
    write_json(dir.file("cfg.json"), cfg);
    CHECK(run("synth --config " + dir.file("cfg.json")) == 3);
  }
  SUBCASE("n = 0 is a config error") {
    json cfg = base_config(dir);
    cfg["synthetic"] = synth_section(0, 0.0, 1);
    write_json(dir.file("cfg.json"), cfg);
    CHECK(run("synth --config " + dir.file("cfg.json")) == 2);
  }
  SUBCASE("non-positive lambda is a config error") {
    json cfg = base_config(dir);
    cfg["synthetic"] = synth_section(4, 0.0, 1);
    write_json(dir.file("cfg.json"), cfg);
    REQUIRE(run("synth --config " + dir.file("cfg.json")) == 0);
    cfg["lambda"] = -1.0;
    write_json(dir.file("cfg.json"), cfg);
    CHECK(run("fit --config " + dir.file("cfg.json")) == 2);
  }
  SUBCASE("folds exceeding n is a config error") {
    json cfg = base_config(dir);
    cfg["synthetic"] = synth_section(3, 0.0, 1);
    cfg["lambda_grid"] = {1e-3, 1e-2};
    cfg["cv_folds"] = 5;
    write_json(dir.file("cfg.json"), cfg);
    REQUIRE(run("synth --config " + dir.file("cfg.json")) == 0);
    CHECK(run("cv --config " + dir.file("cfg.json")) == 2);
  }
  SUBCASE("missing config file") {
    CHECK(run("fit --config " + dir.file("nope.json")) == 3);
  }
}

TEST_CASE("cv writes a flagged score table deterministically") {
  TempDir dir;
  json cfg = base_config(dir);
  cfg["synthetic"] = synth_section(8, 0.1, 11);
  cfg["lambda_grid"] = {1e-3, 1e-1};
  cfg["cv_folds"] = 4;
  write_json(dir.file("cfg.json"), cfg);
  REQUIRE(run("synth --config " + dir.file("cfg.json")) == 0);
  REQUIRE(run("cv --config " + dir.file("cfg.json")) == 0);
  const std::string table1 = read_file(dir.file("cv.csv"));
  CHECK(table1.rfind("fold,lambda,sigma_d,sigma_c,sigma_y,ise,chosen", 0) == 0);
  // 2 candidates x 4 folds of data rows, plus header and trailing newline.
  CHECK(std::count(table1.begin(), table1.end(), '\n') == 9);
  REQUIRE(run("cv --config " + dir.file("cfg.json")) == 0);
  CHECK(read_file(dir.file("cv.csv")) == table1);
}

TEST_CASE("predict edge cases") {
  TempDir dir;
  json cfg = base_config(dir);
  cfg["synthetic"] = synth_section(5, 0.05, 13);
  cfg["lambda"] = 1e-3;
  write_json(dir.file("cfg.json"), cfg);
  REQUIRE(run("synth --config " + dir.file("cfg.json")) == 0);
  REQUIRE(run("fit --config " + dir.file("cfg.json")) == 0);

  SUBCASE("empty prediction set yields a header-only CSV") {
    std::ofstream(dir.file("empty.csv")) << "sample_id,variable,s,value\n";
    json cfg2 = cfg;
    cfg2["paths"]["covariates"] = dir.file("empty.csv");
    write_json(dir.file("cfg2.json"), cfg2);
    CHECK(run("predict --config " + dir.file("cfg2.json")) == 0);
    CHECK(read_file(dir.file("pred.csv")) == "sample_id,t,value\n");
  }
  SUBCASE("mismatched s-grid is a data error") {
    std::ofstream out(dir.file("bad.csv"));
    out << "sample_id,variable,s,value\n";
    for (double s : {0.0, 0.5, 1.0}) {
      out << "z,x01," << s << ",0.0\n";
    }
    out.close();
    json cfg2 = cfg;
    cfg2["paths"]["covariates"] = dir.file("bad.csv");
    cfg2["paths"]["discrete"] = "";
    write_json(dir.file("cfg2.json"), cfg2);
    CHECK(run("predict --config " + dir.file("cfg2.json")) == 4);
  }
}
