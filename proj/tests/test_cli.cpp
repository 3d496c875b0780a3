#include "pcsft/cli.hpp"
#include "pcsft/errors.hpp"
#include "pcsft/io.hpp"
#include "test_support.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace pcsft {
namespace {

using namespace pcsft::testing;
using nlohmann::json;
namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "pcsft");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("pcsft_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string state_file(const BipartiteState& psi, const std::string& name) {
    const fs::path p = dir_ / name;
    io::save_state(psi, p);
    return p.string();
  }

  std::string config_file(const json& j) {
    const fs::path p = dir_ / "config.json";
    io::write_file(p, j.dump(2));
    return p.string();
  }

  std::vector<std::vector<std::string>> csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(io::read_file(p));
    std::string line;
    while (std::getline(in, line)) {
      std::vector<std::string> cells;
      std::istringstream ls(line);
      std::string cell;
      while (std::getline(ls, cell, ',')) cells.push_back(cell);
      if (!line.empty() && line.back() == ',') cells.emplace_back();
      rows.push_back(cells);
    }
    return rows;
  }

  fs::path dir_;
};

BipartiteState alpha_08_06() {
  Vector a(2);
  a << 0.8, 0.6;
  return state_from_schmidt(a, Matrix::Identity(2, 2), Matrix::Identity(2, 2));
}

TEST_F(CliTest, VerifyBellDefaults) {
  const auto r = run({"verify", "--state", state_file(bell(), "bell.json"), "--out", (dir_ / "out").string()});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  const auto rows = csv(dir_ / "out" / "verify_summary.csv");
  std::set<std::string> ids;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    ids.insert(rows[i][1]);
    EXPECT_EQ(rows[i].back(), "pass");
  }
  for (const char* id : {"Q1", "T4", "YY1", "YY2", "CROSS", "ALG_ZUZU", "ALG_T00", "ALG_Q1"})
    EXPECT_TRUE(ids.count(id)) << id;
  EXPECT_FALSE(ids.count("T3"));

  const json summary = json::parse(io::read_file(dir_ / "out" / "verify_report.json"));
  EXPECT_NEAR(summary.at("epsilon").get<double>(), 0.20710678118654752 + 0.05, 1e-12);
  EXPECT_EQ(summary.at("config").at("n_samples"), 200000);
  for (const auto& rep : summary.at("reports")) {
    EXPECT_EQ(rep.at("config_hash"), summary.at("config_hash"));
    EXPECT_EQ(rep.at("seed"), summary.at("seed"));
    EXPECT_EQ(rep.at("epsilon"), summary.at("epsilon"));
  }
  EXPECT_FALSE(fs::is_empty(dir_ / "out" / "reports"));
}

TEST_F(CliTest, VerifyFactorizableHasT3Row) {
  const auto psi = tensor_product(random_unit_vector(2, 1), random_unit_vector(3, 2));
  const std::string cfg = config_file({{"state", {{"file", "product.json"}}},
                                       {"observables", {"random", {{"name", "Z"}, {"side", 1}, {"matrix", {{1, 0}, {0, -1}}}}}},
                                       {"n_samples", 50000},
                                       {"seed", 3},
                                       {"output_dir", (dir_ / "out").string()}});
  state_file(psi, "product.json");
  const auto r = run({"verify", "--config", cfg});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  bool saw_t3 = false;
  for (const auto& row : csv(dir_ / "out" / "verify_summary.csv"))
    if (row[1] == "T3") {
      saw_t3 = true;
      EXPECT_LE(std::abs(std::stod(row[6])), 1e-12);
    }
  EXPECT_TRUE(saw_t3);
}

TEST_F(CliTest, VerifyBelowEpsStarFails) {
  const auto r = run({"verify", "--state", state_file(bell(), "bell.json"), "--epsilon", "0.1", "--n", "1000",
                      "--out", (dir_ / "out").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("NotPositiveSemidefinite"), std::string::npos);
}

TEST_F(CliTest, VerifyWithGeneratorConfig) {
  const std::string cfg = config_file({{"state", {{"generator", {{"dims", {3, 2}}, {"seed", 4}, {"schmidt_rank", 2}}}}},
                                       {"n_samples", 20000},
                                       {"epsilon", "auto"},
                                       {"output_dir", (dir_ / "gen").string()}});
  EXPECT_EQ(run({"verify", "--config", cfg}).code, 0);
}

TEST_F(CliTest, EntangleTestVerdicts) {
  auto r = run({"entangle-test", "--state", state_file(bell(), "bell.json"), "--out", dir_.string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, 10), "entangled\n");
  const json j = json::parse(io::read_file(dir_ / "entangle_test.json"));
  EXPECT_NEAR(j.at("eps_star").get<double>(), 0.20711, 1e-5);

  r = run({"entangle-test", "--state", state_file(tensor_product(basis_vector(2, 0), basis_vector(3, 2)), "p.json")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, 10), "separable\n");
  EXPECT_NE(r.out.find("eps_star: 0\n"), std::string::npos);

  r = run({"entangle-test", "--state", state_file(alpha_08_06(), "a.json")});
  EXPECT_EQ(r.out.substr(0, 10), "entangled\n");
  EXPECT_NE(r.out.find("eps_star: 0.24"), std::string::npos);
}

TEST_F(CliTest, EntangleTestMalformedFile) {
  io::write_file(dir_ / "bad.json", R"({"dims": [2, 2], "coeffs": [1, 2]})");
  EXPECT_EQ(run({"entangle-test", "--state", (dir_ / "bad.json").string()}).code, 2);
  EXPECT_EQ(run({"entangle-test", "--state", (dir_ / "missing.json").string()}).code, 2);
  EXPECT_EQ(run({"entangle-test", "--state", state_file(bell(), "b.json"), "--tol", "0.1"}).code, 2);
}

TEST_F(CliTest, MinEpsPrintsReport) {
  const auto r = run({"min-eps", "--state", state_file(alpha_08_06(), "a.json")});
  EXPECT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_NEAR(j.at("eps_star").get<double>(), 0.24, 1e-12);
  EXPECT_NEAR(j.at("eps_star_closed_form").get<double>(), 0.24, 1e-12);
}

TEST_F(CliTest, SampleWritesReproducibleBatch) {
  const std::string state = state_file(bell(), "bell.json");
  auto r = run({"sample", "--state", state, "--n", "1000", "--seed", "42", "--out", (dir_ / "a").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  r = run({"sample", "--state", state, "--n", "1000", "--seed", "42", "--out", (dir_ / "b").string()});
  EXPECT_EQ(r.code, 0);
  const auto rows = csv(dir_ / "a" / "batch.csv");
  EXPECT_EQ(rows.size(), 1001u);
  EXPECT_EQ(rows[0].size(), 5u);
  EXPECT_EQ(io::read_file(dir_ / "a" / "batch.csv"), io::read_file(dir_ / "b" / "batch.csv"));
  const json meta = json::parse(io::read_file(dir_ / "a" / "batch.json"));
  EXPECT_EQ(meta.at("seed"), 42);
  EXPECT_EQ(meta.at("n"), 1000);
  EXPECT_NEAR(meta.at("epsilon").get<double>(), 0.20710678118654752 + 0.05, 1e-12);
  EXPECT_TRUE(meta.contains("covariance_id"));
  EXPECT_TRUE(meta.contains("config_hash"));
}

TEST_F(CliTest, SweepFeasibleGrid) {
  const auto r = run({"sweep-eps", "--state", state_file(bell(), "bell.json"), "--grid", "0.25,0.5,1.0",
                      "--n", "50000", "--out", dir_.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto rows = csv(dir_ / "sweep_eps.csv");
  ASSERT_EQ(rows.size(), 4u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i][1], "true");
    EXPECT_LE(std::stod(rows[i][9]), 5.0);  // calibrated error within 5 SE at every epsilon
  }
}

TEST_F(CliTest, SweepInfeasiblePoint) {
  const auto r = run({"sweep-eps", "--state", state_file(bell(), "bell.json"), "--grid", "0.1", "--out", dir_.string()});
  EXPECT_EQ(r.code, 1);
  const auto rows = csv(dir_ / "sweep_eps.csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1][1], "false");
}

TEST_F(CliTest, MixedGridSamplesOnlyFeasiblePoints) {
  const auto r = run({"sweep-eps", "--state", state_file(bell(), "bell.json"), "--grid", "0.1,0.3",
                      "--n", "10000", "--out", dir_.string()});
  EXPECT_EQ(r.code, 0);
  const auto rows = csv(dir_ / "sweep_eps.csv");
  EXPECT_EQ(rows[1][1], "false");
  EXPECT_EQ(rows[2][1], "true");
}

TEST_F(CliTest, ConfigErrorsExitTwo) {
  EXPECT_EQ(run({"verify", "--config", config_file({{"bogus", 1}})}).code, 2);
  EXPECT_EQ(run({"verify", "--config", config_file({{"n_samples", 50}})}).code, 2);
  EXPECT_EQ(run({"verify", "--config", config_file({{"epsilon", -1.0}})}).code, 2);
  EXPECT_EQ(run({"verify", "--config", config_file({{"observables", {{{"side", 3}, {"builtin", "diag"}}}}})}).code, 2);
  EXPECT_EQ(run({"verify", "--state", state_file(bell(), "b.json"), "--epsilon", "abc"}).code, 2);
  EXPECT_EQ(run({"verify", "--state", state_file(bell(), "b.json"), "--n", "10"}).code, 2);
  io::write_file(dir_ / "broken.json", "{");
  EXPECT_EQ(run({"verify", "--config", (dir_ / "broken.json").string()}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"min-eps"}).code, 2);
  EXPECT_EQ(run({"sweep-eps", "--state", state_file(bell(), "b.json")}).code, 2);
}

TEST_F(CliTest, ObservableDimensionMismatchExitsTwo) {
  const std::string cfg = config_file({{"state", {{"file", state_file(bell(), "b.json")}}},
                                       {"observables", {{{"side", 1}, {"matrix", {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}}}},
                                       {"n_samples", 1000}});
  EXPECT_EQ(run({"verify", "--config", cfg, "--out", dir_.string()}).code, 2);
}

TEST(ConfigParsing, RoundTripsThroughJson) {
  const json j = {{"state", {{"generator", {{"dims", {2, 3}}, {"seed", 5}, {"schmidt_rank", 2}}}}},
                  {"observables", {"diag", {{"name", "r"}, {"side", 2}, {"builtin", "random"}, {"seed", 9}}}},
                  {"epsilon", 0.4},
                  {"n_samples", 1000},
                  {"seed", 11},
                  {"output_dir", "x"},
                  {"eps_grid", {0.3, 0.5}}};
  const auto cfg = cli::parse_config(j);
  EXPECT_EQ(cfg.observables.size(), 3u);
  EXPECT_EQ(*cfg.epsilon, 0.4);
  const auto again = cli::parse_config(cfg.to_json());
  EXPECT_EQ(again.to_json(), cfg.to_json());
  EXPECT_EQ(again.hash(), cfg.hash());
  auto other = cfg;
  other.seed = 12;
  EXPECT_NE(other.hash(), cfg.hash());
  other = cfg;
  other.output_dir = "elsewhere";
  EXPECT_EQ(other.hash(), cfg.hash());
}

TEST(ConfigParsing, AutoEpsilonResolvesToMargin) {
  const auto cfg = cli::parse_config({{"epsilon", "auto"}});
  EXPECT_FALSE(cfg.epsilon.has_value());
  EXPECT_NEAR(cli::resolve_epsilon(cfg, bell()), 1.0 / std::sqrt(2.0) - 0.5 + 0.05, 1e-12);
}

TEST(ConfigParsing, BuiltinObservables) {
  cli::ObservableSpec diag{"d", Side::first, "diag", {}, std::nullopt};
  Vector expected(3);
  expected << 1, -1, 1;
  EXPECT_EQ(max_abs(cli::resolve_observable(diag, 3, 0).matrix() - Matrix(expected.asDiagonal())), 0.0);
  cli::ObservableSpec rnd{"r", Side::second, "random", {}, 5};
  EXPECT_EQ(max_abs(cli::resolve_observable(rnd, 3, 0).matrix() - random_observable(3, 5).matrix()), 0.0);
}

}  // namespace
}  // namespace pcsft
