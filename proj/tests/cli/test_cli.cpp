#include <cmath>
#include <filesystem>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "nvnmr/io/csv.hpp"
#include "nvnmr/io/files.hpp"
#include "nvnmr/model/contrast.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace nvnmr;
using namespace nvnmr::cli;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, Console{out, err});
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("nvnmr_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write_config(const std::string& name, json j) {
    if (!j.contains("schema_version")) j["schema_version"] = 1;
    io::write_file_atomic(dir_ / name, j.dump(2));
    return path(name);
  }

  io::CsvTable read_table(const std::string& p) const { return io::read_csv_file(p, false); }
  json read_json(const std::string& p) const { return json::parse(io::read_file(p)); }

  fs::path dir_;
};

json sim_config(double depth_nm, std::uint64_t seed = 1, double noise = 0.0) {
  return json{{"seed", seed},
              {"nv", {{"depth_nm", depth_nm}}},
              {"sequence", {{"n_pulses", 32}, {"b0_gauss", 197.0}, {"tau_ns", {{"start", 480}, {"stop", 710}, {"points", 120}}}}},
              {"simulate", {{"noise", noise}, {"id", "t"}, {"sample_id", "S"}, {"nv_id", "nv1"}}}};
}

}  // namespace

TEST_F(CliTest, HelpAndVersion) {
  EXPECT_EQ(invoke({"--help"}).code, kExitOk);
  const auto v = invoke({"--version"});
  EXPECT_EQ(v.code, kExitOk);
  EXPECT_NE(v.out.find(kToolVersion), std::string::npos);
}

TEST_F(CliTest, BadArgumentsAreConfigErrors) {
  EXPECT_EQ(invoke({}).code, kExitConfig);
  EXPECT_EQ(invoke({"frobnicate"}).code, kExitConfig);
  EXPECT_EQ(invoke({"simulate", "--t2n-mode", "sometimes"}).code, kExitConfig);
  EXPECT_EQ(invoke({"--config", path("missing.json"), "simulate"}).code, kExitConfig);
  io::write_file_atomic(dir_ / "bad.json", "{\"schema_version\": 1, \"nv\": {\"depht\": 3}}");
  const auto r = invoke({"--config", path("bad.json"), "simulate", "-o", path("x.csv")});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_NE(r.err.find("nv.depht"), std::string::npos) << r.err;
  io::write_file_atomic(dir_ / "syntax.json", "{\"schema_version\": 1,");
  EXPECT_EQ(invoke({"--config", path("syntax.json"), "simulate"}).code, kExitConfig);
}

TEST_F(CliTest, SimulateMatchesForwardModel) {
  const auto cfg_path = write_config("c.json", sim_config(10.0));
  const auto out = path("sim.csv");
  ASSERT_EQ(invoke({"--config", cfg_path, "simulate", "-o", out}).code, kExitOk);
  const auto table = read_table(out);
  EXPECT_EQ(table.columns.at(1), "contrast");
  EXPECT_FALSE(table.column("sigma").has_value());
  const RunConfig cfg = load_config(cfg_path);
  EXPECT_EQ(table.header.get("config_hash"), config_hash(cfg));
  EXPECT_EQ(table.header.get("seed"), "1");
  EXPECT_EQ(table.header.get("tool_version"), kToolVersion);
  EXPECT_EQ(table.header.get("N"), "32");
  const model::ContrastModelParams p{cfg.nv_center(), cfg.nuclear_sample(), PulseFamily::XY8, 32,
                                     larmor_frequency(cfg.nuclear_sample(), cfg.field())};
  ASSERT_EQ(table.rows.size(), 120u);
  for (const auto& row : table.rows) EXPECT_EQ(row[1], model::contrast(p, row[0]));
}

TEST_F(CliTest, SimulateIsByteIdenticalForFixedSeed) {
  const auto cfg_path = write_config("c.json", sim_config(10.0, 42, 0.01));
  ASSERT_EQ(invoke({"--config", cfg_path, "simulate", "-o", path("a.csv")}).code, kExitOk);
  ASSERT_EQ(invoke({"--config", cfg_path, "simulate", "-o", path("b.csv")}).code, kExitOk);
  ASSERT_EQ(invoke({"--config", cfg_path, "--seed", "43", "simulate", "-o", path("c.csv")}).code, kExitOk);
  EXPECT_EQ(io::read_file(path("a.csv")), io::read_file(path("b.csv")));
  EXPECT_NE(io::read_file(path("a.csv")), io::read_file(path("c.csv")));
  EXPECT_TRUE(read_table(path("a.csv")).column("sigma").has_value());
}

TEST_F(CliTest, ShallowerNvHasDeeperDip) {
  ASSERT_EQ(invoke({"--config", write_config("a.json", sim_config(5.0)), "simulate", "-o", path("a.csv")}).code, 0);
  ASSERT_EQ(invoke({"--config", write_config("b.json", sim_config(12.0)), "simulate", "-o", path("b.csv")}).code, 0);
  auto min_of = [&](const std::string& p) {
    double m = 1.0;
    for (const auto& row : read_table(p).rows) m = std::min(m, row[1]);
    return m;
  };
  EXPECT_LT(min_of(path("a.csv")), min_of(path("b.csv")));
}

TEST_F(CliTest, RawSimulationRoundTripThroughFit) {
  json j = sim_config(10.4, 7);
  j["simulate"]["raw"] = {{"enabled", true}, {"counts", 4e6}};
  j["sequence"]["tau_ns"] = {{"start", 400}, {"stop", 800}, {"points", 200}};
  const auto cfg = write_config("raw.json", j);
  ASSERT_EQ(invoke({"--config", cfg, "simulate", "-o", path("raw.csv")}).code, kExitOk);
  EXPECT_EQ(read_table(path("raw.csv")).columns.at(1), "f0");

  const auto r = invoke({"--config", cfg, "fit", path("raw.csv"), "-o", path("fit")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json fit = read_json(path("fit/t.fit.json"));
  const double d = fit["result"]["depth_nm"].get<double>();
  const double s = fit["result"]["depth_sigma_nm"].get<double>();
  EXPECT_GT(s, 0.0);
  // sigma covers counting noise only; the background extrapolation under the
  // dip adds a systematic of a few tenths of a percent.
  EXPECT_LE(std::abs(d - 10.4), 2.0 * s + 0.01 * 10.4) << d << " +/- " << s;
  EXPECT_EQ(fit["config_hash"], config_hash(load_config(cfg)));
  EXPECT_EQ(fit["inputs"][0]["sha256"], io::sha256_hex(io::read_file(path("raw.csv"))));
  EXPECT_TRUE(fit["traces"][0].contains("background"));
  EXPECT_EQ(fit["traces"][0]["residuals"].size(), fit["traces"][0]["tau_ns"].size());
  EXPECT_TRUE(fs::exists(path("fit/report.json")));
  EXPECT_TRUE(fs::exists(path("fit/report.txt")));

  ASSERT_EQ(invoke({"--config", cfg, "normalize", path("raw.csv"), "-o", path("norm")}).code, kExitOk);
  const auto norm = read_table(path("norm/raw.normalized.csv"));
  EXPECT_EQ(norm.header.get("kind"), "normalized");
  EXPECT_TRUE(fs::exists(path("norm/normalize_summary.json")));
}

TEST_F(CliTest, MalformedRowNamesFileAndLine) {
  io::write_file_atomic(dir_ / "bad.csv",
                        "# nvnmr_csv_version=1.0\n# N=32\n# B0_G=197\ntau_ns,contrast\n590,0.9\n595,oops\n");
  const auto r = invoke({"fit", path("bad.csv"), "-o", path("out")});
  EXPECT_EQ(r.code, kExitParse);
  EXPECT_NE(r.err.find("bad.csv:6"), std::string::npos) << r.err;
  io::write_file_atomic(dir_ / "v2.csv", "# nvnmr_csv_version=2.0\n# N=32\n# B0_G=197\ntau_ns,contrast\n590,0.9\n");
  EXPECT_EQ(invoke({"fit", path("v2.csv"), "-o", path("out")}).code, kExitParse);
}

TEST_F(CliTest, FitFailureSetsExitCode) {
  const auto cfg = write_config("deep.json", sim_config(80.0, 3, 0.01));
  ASSERT_EQ(invoke({"--config", cfg, "simulate", "-o", path("deep.csv")}).code, kExitOk);
  const auto r = invoke({"--config", cfg, "fit", path("deep.csv"), "-o", path("fit")});
  EXPECT_EQ(r.code, kExitFit);
  const json report = read_json(path("fit/report.json"));
  EXPECT_FALSE(report["rows"][0]["failures"].empty());
}

TEST_F(CliTest, CohortStatisticsFromBatchFit) {
  const std::vector<double> depths{10.4, 13.2, 14.8, 8.5, 9.0, 15.3, 8.9, 8.3, 6.4, 10.7, 10.0};
  std::vector<std::string> files;
  for (std::size_t i = 0; i < depths.size(); ++i) {
    json j = sim_config(depths[i]);
    j["simulate"]["nv_id"] = "nv" + std::to_string(i);
    j["simulate"]["sample_id"] = "A";
    const auto c = write_config("c" + std::to_string(i) + ".json", j);
    files.push_back(path("t" + std::to_string(i) + ".csv"));
    ASSERT_EQ(invoke({"--config", c, "simulate", "-o", files.back()}).code, kExitOk);
  }
  std::vector<std::string> args{"--jobs", "2", "--t2n-mode", "infinite", "fit"};
  args.insert(args.end(), files.begin(), files.end());
  args.insert(args.end(), {"-o", path("fit")});
  const auto r = invoke(args);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json report = read_json(path("fit/report.json"));
  ASSERT_EQ(report["rows"].size(), 11u);
  const auto& cohort = report["cohorts"][0];
  EXPECT_EQ(cohort["sample_id"], "A");
  EXPECT_EQ(cohort["mean_nm_rounded"], "10.5");
  EXPECT_EQ(cohort["std_nm_rounded"], "2.8");
  EXPECT_NE(r.out.find("10.4"), std::string::npos);

  const auto s = invoke({"stats", path("fit/report.json"), "-o", path("stats.json")});
  ASSERT_EQ(s.code, kExitOk) << s.err;
  const json st = read_json(path("stats.json"));
  EXPECT_EQ(st["cohort"]["n"], 11);
  EXPECT_EQ(st["cohort"]["mean_nm_rounded"], "10.5");
}

TEST_F(CliTest, JointFitAcrossPulseCounts) {
  std::vector<std::string> files;
  for (long n : {16L, 32L, 64L}) {
    json j = sim_config(9.0, static_cast<std::uint64_t>(n), 0.01);
    j["sequence"]["n_pulses"] = n;
    j["simulate"]["id"] = "N" + std::to_string(n);
    const auto c = write_config("c" + std::to_string(n) + ".json", j);
    files.push_back(path("N" + std::to_string(n) + ".csv"));
    ASSERT_EQ(invoke({"--config", c, "simulate", "-o", files.back()}).code, kExitOk);
  }
  const auto cfg = write_config("joint.json", json{{"fit", {{"joint", true}, {"t2n_mode", "infinite"}}}});
  std::vector<std::string> args{"--config", cfg, "fit"};
  args.insert(args.end(), files.begin(), files.end());
  args.insert(args.end(), {"-o", path("fit")});
  const auto r = invoke(args);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json report = read_json(path("fit/report.json"));
  EXPECT_EQ(report["fit_kind"], "joint");
  ASSERT_EQ(report["rows"].size(), 1u);
  EXPECT_EQ(report["rows"][0]["method"], "joint");
  EXPECT_NEAR(report["rows"][0]["depth_nm"].get<double>(), 9.0,
              3.0 * report["rows"][0]["depth_sigma_nm"].get<double>());
}

TEST_F(CliTest, OracleDefaultPassesAndIsDeterministic) {
  const auto cfg = write_config(
      "o.json", json{{"seed", 5}, {"oracle", {{"depth_nm", 5.0}, {"pseudospin_cases", 2}, {"pseudospin_spins", 5e4}}}});
  const auto a = invoke({"--config", cfg, "oracle", "-o", path("a.json")});
  ASSERT_EQ(a.code, kExitOk) << a.out << a.err;
  const json j = read_json(path("a.json"));
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_LT(std::abs(j["checks"][0]["relative_deviation"].get<double>()), 0.01);
  EXPECT_GE(j["checks"][0]["spins"].get<double>(), 1e7);
  ASSERT_EQ(invoke({"--config", cfg, "--jobs", "2", "oracle", "-o", path("b.json")}).code, kExitOk);
  EXPECT_EQ(io::read_file(path("a.json")), io::read_file(path("b.json")));
}

TEST_F(CliTest, OracleTinyRadiusFails) {
  const auto cfg = write_config(
      "o.json", json{{"oracle", {{"depth_nm", 5.0}, {"r_max_nm", 10.0}, {"pseudospin_cases", 0}}}});
  const auto r = invoke({"--config", cfg, "oracle", "-o", path("o.json.out")});
  EXPECT_EQ(r.code, kExitOracle);
  const json j = read_json(path("o.json.out"));
  EXPECT_FALSE(j["pass"].get<bool>());
  EXPECT_TRUE(j["checks"][0].contains("error"));
}

TEST_F(CliTest, LinewidthTable) {
  const auto cfg = write_config("lw.json", json{{"linewidth", {{"diffusion_m2_per_s", 5e-13},
                                                               {"kinematic_viscosity_cst", nullptr},
                                                               {"mass_density_kg_per_m3", nullptr}}}});
  ASSERT_EQ(invoke({"--config", cfg, "linewidth", "-o", path("paper.csv")}).code, kExitOk);
  ASSERT_EQ(invoke({"--config", cfg, "--linewidth-convention", "angular", "linewidth", "-o", path("ang.csv")}).code,
            kExitOk);
  const auto paper = read_table(path("paper.csv"));
  const auto ang = read_table(path("ang.csv"));
  const auto d = *paper.column("depth_nm");
  const auto khz = *paper.column("fwhm_khz");
  bool saw10 = false, saw4 = false;
  for (std::size_t i = 0; i < paper.rows.size(); ++i) {
    const auto& row = paper.rows[i];
    if (std::abs(row[d] - 10.0) < 1e-9) {
      saw10 = true;
      EXPECT_NEAR(row[khz], 5.0, 0.5);
    }
    if (std::abs(row[d] - 4.0) < 1e-9) {
      saw4 = true;
      EXPECT_NEAR(row[khz], 31.0, 3.1);
    }
    EXPECT_NEAR(row[khz] / ang.rows[i][khz], 2.0 * std::numbers::pi, 1e-9);
    if (i > 0) {
      const auto& prev = paper.rows[i - 1];
      EXPECT_NEAR(std::log(row[khz] / prev[khz]) / std::log(row[d] / prev[d]), -2.0, 1e-9);
    }
  }
  EXPECT_TRUE(saw10);
  EXPECT_TRUE(saw4);
}

TEST_F(CliTest, LinewidthDefaultOilPreset) {
  const auto r = invoke({"linewidth", "-o", path("lw.csv")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto t = read_table(path("lw.csv"));
  EXPECT_NEAR(std::stod(*t.header.get("diffusion_m2_per_s")) / 5e-13, 1.0, 0.1);
}

TEST_F(CliTest, StatsFromDepthCsv) {
  io::write_file_atomic(dir_ / "d.csv", "depth_nm,sigma_nm\n8,1\n13.3,1\n9.4,1\n4.9,1\n4.7,1\n7.4,1\n7.5,1\n9.4,1\n"
                                        "12,1\n8.6,1\n4.6,1\n9.7,1\n11,1\n");
  ASSERT_EQ(invoke({"stats", path("d.csv"), "-o", path("s.json")}).code, kExitOk);
  const json j = read_json(path("s.json"));
  EXPECT_EQ(j["cohort"]["n"], 13);
  EXPECT_NEAR(j["cohort"]["mean_nm"].get<double>(), 8.5, 1e-12);
  EXPECT_LE(j["cohort"]["histogram"][0]["lo_nm"].get<double>(), 4.6);
  io::write_file_atomic(dir_ / "one.csv", "depth_nm\n8\n");
  EXPECT_EQ(invoke({"stats", path("one.csv"), "-o", path("s2.json")}).code, kExitConfig);
}
