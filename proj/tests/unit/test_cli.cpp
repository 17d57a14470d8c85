#include "run.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using effeq::cli::main_entry;
using nlohmann::json;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("effeq_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const std::string& name, const json& j) {
    const auto p = dir_ / name;
    std::ofstream(p) << j.dump(2);
    return p;
  }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "effeq");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    out_.str("");
    err_.str("");
    return main_entry(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static json manifest(const fs::path& run_dir) { return json::parse(slurp(run_dir / "manifest.json")); }

  fs::path dir_;
  std::ostringstream out_, err_;
};

json small_simulation() {
  return {{"model", {{"type", "nls"}, {"dim", 2}, {"delta", 0.5}}},
          {"numeric",
           {{"cutoff", 1}, {"forcing_switch", 1}, {"damping", {{"scale", 1.0}}}, {"forcing", {{"scale", 0.5}}}}},
          {"simulate", {{"dt", 0.01}, {"t_final", 0.2}, {"record_stride", 5}, {"trajectories", 20}}}};
}

}  // namespace

TEST(Hash, GitBlobIdsMatchGit) {
  EXPECT_EQ(effeq::cli::git_blob_sha1("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
  EXPECT_EQ(effeq::cli::git_blob_sha1(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

TEST_F(CliTest, SchemaViolationExitsTwoWithFieldPath) {
  const auto cfg = write_config("bad.json", {{"numeric", {{"cutoff", "three"}}}});
  const auto out = dir_ / "run";
  EXPECT_EQ(run({"resonances", "--config", cfg.string(), "--out", out.string()}), 2);
  EXPECT_NE(err_.str().find("/numeric/cutoff"), std::string::npos) << err_.str();
  const auto m = manifest(out);
  EXPECT_EQ(m["status"], "config-error");
  EXPECT_EQ(m["error_path"], "/numeric/cutoff");
}

TEST_F(CliTest, UnknownFieldAndBadJsonAreRejected) {
  const auto cfg = write_config("bad.json", {{"model", {{"type", "nls"}, {"colour", "red"}}}});
  EXPECT_EQ(run({"clusters", "--config", cfg.string(), "--out", (dir_ / "a").string()}), 2);
  EXPECT_NE(err_.str().find("/model/colour"), std::string::npos);
  std::ofstream(dir_ / "broken.json") << "{ not json";
  EXPECT_EQ(run({"clusters", "--config", (dir_ / "broken.json").string(), "--out", (dir_ / "b").string()}), 2);
  const auto wrong = write_config("wrong.json", {{"subcommand", "kinetic"}});
  EXPECT_EQ(run({"clusters", "--config", wrong.string(), "--out", (dir_ / "c").string()}), 2);
  EXPECT_NE(err_.str().find("/subcommand"), std::string::npos);
  EXPECT_EQ(run({"no-such-command"}), 2);
}

TEST_F(CliTest, OneDimensionalResonancesAreEmpty) {
  const auto cfg = write_config("r.json", {{"model", {{"type", "nls"}, {"dim", 1}}}, {"numeric", {{"cutoff", 32}}}});
  const auto out = dir_ / "run";
  ASSERT_EQ(run({"resonances", "--config", cfg.string(), "--out", out.string()}), 0) << err_.str();
  EXPECT_EQ(slurp(out / "tuples.jsonl"), "");
  const auto m = manifest(out);
  EXPECT_EQ(m["status"], "ok");
  EXPECT_EQ(m["results"]["count"], 0);
  EXPECT_EQ(m["outputs"][0]["path"], "tuples.jsonl");
  EXPECT_EQ(m["outputs"][0]["sha1"], "da39a3ee5e6b4b0d3255bfef95601890afd80709");  // SHA-1 of ""
}

TEST_F(CliTest, ManifestEchoesEveryDefault) {
  const auto out = dir_ / "run";
  ASSERT_EQ(run({"resonances", "--out", out.string()}), 0) << err_.str();
  const auto m = manifest(out);
  const auto& c = m["config"];
  for (const char* block : {"model", "numeric", "resonances", "simulate", "chm_oracle", "kinetic", "moments"})
    EXPECT_TRUE(c.contains(block)) << block;
  EXPECT_EQ(c["kinetic"]["samples"], 1000000);
  EXPECT_EQ(c["numeric"]["damping"]["scale"], 1.0);
  EXPECT_EQ(c["simulate"]["scheme"], "exponential-euler");
  EXPECT_EQ(m["inputs"][0]["name"], "resolved-config");
  EXPECT_EQ(m["results"]["count"], 520);  // d = 2, K = 2 (brute-force oracle)
}

TEST_F(CliTest, SameSeedGivesByteIdenticalArtifacts) {
  const auto cfg = write_config("s.json", small_simulation());
  const auto a = dir_ / "a", b = dir_ / "b", c = dir_ / "c";
  ASSERT_EQ(run({"simulate", "--config", cfg.string(), "--seed", "7", "--out", a.string()}), 0) << err_.str();
  ASSERT_EQ(run({"simulate", "--config", cfg.string(), "--seed", "7", "--workers", "3", "--out", b.string()}), 0);
  ASSERT_EQ(run({"simulate", "--config", cfg.string(), "--seed", "8", "--out", c.string()}), 0);
  EXPECT_EQ(slurp(a / "actions.csv"), slurp(b / "actions.csv"));
  EXPECT_EQ(slurp(a / "raw_actions.csv"), slurp(b / "raw_actions.csv"));
  EXPECT_NE(slurp(a / "actions.csv"), slurp(c / "actions.csv"));
  EXPECT_EQ(manifest(a)["config"]["numeric"]["seed"], 7);
}

TEST_F(CliTest, EnvironmentOverridesConfigAndFlagsOverrideEnvironment) {
  const auto cfg = write_config("s.json", small_simulation());
  const auto out = dir_ / "env";
  ::setenv("EFFEQ_SEED", "41", 1);
  ::setenv("EFFEQ_OUT", out.string().c_str(), 1);
  const int code_env = run({"resonances", "--config", cfg.string()});
  const auto seed_env = manifest(out)["config"]["numeric"]["seed"];
  const int code_flag = run({"resonances", "--config", cfg.string(), "--seed", "3"});
  const auto seed_flag = manifest(out)["config"]["numeric"]["seed"];
  ::unsetenv("EFFEQ_SEED");
  ::unsetenv("EFFEQ_OUT");
  EXPECT_EQ(code_env, 0);
  EXPECT_EQ(seed_env, 41);
  EXPECT_EQ(code_flag, 0);
  EXPECT_EQ(seed_flag, 3);
}

TEST_F(CliTest, ReportRecomputesActionsFromRawTrajectories) {
  const auto cfg = write_config("s.json", small_simulation());
  const auto out = dir_ / "run";
  ASSERT_EQ(run({"simulate", "--config", cfg.string(), "--out", out.string()}), 0) << err_.str();
  ASSERT_EQ(run({"report", out.string()}), 0) << err_.str();
  std::ifstream sim(out / "actions.csv"), rep(out / "action_summary.csv");
  std::string a, b;
  std::getline(sim, a);
  std::getline(rep, b);
  std::size_t rows = 0;
  while (std::getline(sim, a) && std::getline(rep, b)) {
    auto split = [](const std::string& s) {
      std::vector<std::string> v;
      std::stringstream ss(s);
      std::string c;
      while (std::getline(ss, c, ',')) v.push_back(c);
      return v;
    };
    const auto x = split(a), y = split(b);
    // actions.csv: record,tau,mode,k0,k1,mean,stderr; summary: record,tau,mode,mean,stderr,samples
    ASSERT_EQ(x[0], y[0]);
    ASSERT_EQ(x[2], y[2]);
    EXPECT_NEAR(std::stod(x[5]), std::stod(y[3]), 1e-12 * (1.0 + std::abs(std::stod(x[5]))));
    EXPECT_NEAR(std::stod(x[6]), std::stod(y[4]), 1e-9 * (1.0 + std::abs(std::stod(x[6]))));
    EXPECT_EQ(y[5], "20");
    ++rows;
  }
  EXPECT_EQ(rows, 5u * 9u);
}

TEST_F(CliTest, ReportSortsScanTableAndRejectsEmptyDirectory) {
  EXPECT_EQ(run({"report", (dir_ / "missing").string()}), 2);
  fs::create_directories(dir_ / "empty");
  EXPECT_EQ(run({"report", (dir_ / "empty").string()}), 2);
  fs::create_directories(dir_ / "scan");
  std::ofstream(dir_ / "scan" / "scan.csv") << "exponent,estimate,stderr\n-1,2,0.1\n-3,-1,0.1\n-2,0.05,0.1\n";
  ASSERT_EQ(run({"report", (dir_ / "scan").string()}), 0) << err_.str();
  EXPECT_EQ(slurp(dir_ / "scan" / "scan_table.csv"),
            "exponent,estimate,stderr,sign\n-3,-1,0.1,-1\n-2,0.05,0.1,0\n-1,2,0.1,1\n");
}

TEST_F(CliTest, NumericFailureExitsThreeAndKeepsManifest) {
  auto j = small_simulation();
  j["numeric"]["forcing_switch"] = 0;
  j["numeric"]["damping"]["scale"] = 0.1;
  j["simulate"]["initial"] = {{"kind", "random"}, {"scale", 1e6}};
  j["simulate"]["dt"] = 0.1;
  j["simulate"]["t_final"] = 10.0;
  j["simulate"]["trajectories"] = 1;
  const auto cfg = write_config("blow.json", j);
  const auto out = dir_ / "run";
  EXPECT_EQ(run({"simulate", "--config", cfg.string(), "--out", out.string()}), 3);
  const auto m = manifest(out);
  EXPECT_EQ(m["status"], "numeric-error");
  EXPECT_TRUE(fs::exists(out / "failure_state.json"));
}

TEST_F(CliTest, ChmOracleMatchesClosedForm) {
  const auto cfg = write_config("o.json", {{"model", {{"type", "chm"}, {"rho", "1"}}}, {"numeric", {{"cutoff", 2}}}});
  const auto out = dir_ / "run";
  ASSERT_EQ(run({"chm-oracle", "--config", cfg.string(), "--out", out.string()}), 0) << err_.str();
  const auto m = manifest(out);
  EXPECT_LT(m["results"]["sup_error"].get<double>(), 1e-6);
  EXPECT_LT(m["results"]["pair_invariant_drift"].get<double>(), 1e-10);
  const auto nls = write_config("n.json", {{"model", {{"type", "nls"}}}});
  EXPECT_EQ(run({"chm-oracle", "--config", nls.string(), "--out", (dir_ / "x").string()}), 2);
}

TEST_F(CliTest, KineticTasksWriteTheirTables) {
  const auto col = write_config("c.json", {{"kinetic", {{"task", "collision"}, {"samples", 3000}}}});
  ASSERT_EQ(run({"kinetic", "--config", col.string(), "--out", (dir_ / "c").string()}), 0) << err_.str();
  EXPECT_TRUE(fs::exists(dir_ / "c" / "collision.csv"));

  const auto evo = write_config("e.json", {{"kinetic",
                                            {{"task", "evolve"},
                                             {"samples", 500},
                                             {"coupling", 0.1},
                                             {"k_min", 0.5},
                                             {"k_max", 2.0},
                                             {"grid_points", 3},
                                             {"t_final", 0.05},
                                             {"dt", 0.01},
                                             {"record_stride", 1}}}});
  ASSERT_EQ(run({"kinetic", "--config", evo.string(), "--out", (dir_ / "e").string()}), 0) << err_.str();
  ASSERT_EQ(run({"report", (dir_ / "e").string()}), 0) << err_.str();
  EXPECT_TRUE(fs::exists(dir_ / "e" / "spectrum_table.csv"));

  const auto narrow = write_config("n.json", {{"kinetic", {{"task", "scan"}, {"k_min", 1.0}, {"k_max", 5.0}}}});
  EXPECT_EQ(run({"kinetic", "--config", narrow.string(), "--out", (dir_ / "n").string()}), 2);
}

TEST_F(CliTest, MomentsWriteSecondMomentsAndChainResiduals) {
  auto j = small_simulation();
  j["simulate"]["raw_actions"] = false;
  const auto cfg = write_config("m.json", j);
  const auto out = dir_ / "run";
  ASSERT_EQ(run({"moments", "--config", cfg.string(), "--out", out.string()}), 0) << err_.str();
  EXPECT_TRUE(fs::exists(out / "moments.csv"));
  EXPECT_TRUE(fs::exists(out / "chain2.csv"));
  EXPECT_EQ(manifest(out)["results"]["chain2"], "checked");
}
