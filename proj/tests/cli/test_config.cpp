#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "config.hpp"
#include "nvnmr/core/constants.hpp"
#include "nvnmr/core/error.hpp"

using nlohmann::json;
using namespace nvnmr;
using namespace nvnmr::cli;

namespace {

std::string config_error(const json& j) {
  try {
    config_from_json(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

json minimal() { return json{{"schema_version", 1}}; }

}  // namespace

TEST(Config, DefaultsRoundTrip) {
  const RunConfig c = config_from_json(minimal());
  EXPECT_EQ(c.seed, 0u);
  EXPECT_EQ(c.sequence.n_pulses, 64);
  EXPECT_DOUBLE_EQ(c.sample.rho_per_nm3, 68.0);
  const RunConfig again = config_from_json(config_to_json(c));
  EXPECT_EQ(config_to_json(again), config_to_json(c));
  EXPECT_EQ(config_hash(again), config_hash(c));
  EXPECT_EQ(config_hash(c).size(), 64u);
}

TEST(Config, HashChangesWithContent) {
  json j = minimal();
  const auto h0 = config_hash(config_from_json(j));
  j["nv"] = {{"depth_nm", 11.0}};
  EXPECT_NE(config_hash(config_from_json(j)), h0);
}

TEST(Config, SchemaVersionRequired) {
  EXPECT_NE(config_error(json::object()).find("schema_version"), std::string::npos);
  EXPECT_NE(config_error(json{{"schema_version", 2}}).find("schema_version"), std::string::npos);
}

TEST(Config, UnknownKeysRejectedWithPath) {
  json j = minimal();
  j["nv"] = {{"depth_nm", 10.0}, {"depht", 3}};
  EXPECT_NE(config_error(j).find("nv.depht"), std::string::npos) << config_error(j);
  j = minimal();
  j["bogus"] = 1;
  EXPECT_NE(config_error(j).find("bogus"), std::string::npos);
  j = minimal();
  j["sequence"] = {{"tau_ns", {{"start", 500}, {"step", 1}}}};
  EXPECT_NE(config_error(j).find("sequence.tau_ns.step"), std::string::npos) << config_error(j);
}

TEST(Config, WrongTypesRejectedWithPath) {
  json j = minimal();
  j["sample"] = {{"rho_per_nm3", "68"}};
  EXPECT_NE(config_error(j).find("sample.rho_per_nm3"), std::string::npos) << config_error(j);
  j = minimal();
  j["sequence"] = {{"n_pulses", 64.5}};
  EXPECT_NE(config_error(j).find("sequence.n_pulses"), std::string::npos) << config_error(j);
  j = minimal();
  j["fit"] = {{"joint", "yes"}};
  EXPECT_NE(config_error(j).find("fit.joint"), std::string::npos) << config_error(j);
  j = minimal();
  j["nv"] = 3;
  EXPECT_NE(config_error(j).find("nv"), std::string::npos);
}

TEST(Config, EnumerationsValidated) {
  json j = minimal();
  j["fit"] = {{"t2n_mode", "sometimes"}};
  EXPECT_NE(config_error(j).find("fit.t2n_mode"), std::string::npos) << config_error(j);
  j = minimal();
  j["linewidth"] = {{"convention", "hz"}};
  EXPECT_NE(config_error(j).find("linewidth.convention"), std::string::npos) << config_error(j);
  j = minimal();
  j["sequence"] = {{"family", "hahn"}};
  EXPECT_FALSE(config_error(j).empty());
}

TEST(Config, DomainInvariantsSurfaceAsConfigErrors) {
  json j = minimal();
  j["nv"] = {{"depth_nm", -1.0}};
  EXPECT_FALSE(config_error(j).empty());
  j = minimal();
  j["sequence"] = {{"n_pulses", 12}};
  EXPECT_FALSE(config_error(j).empty());
  j["sequence"]["validation"] = "warn";
  EXPECT_TRUE(config_error(j).empty()) << config_error(j);
  j = minimal();
  j["sample"] = {{"geometry", {{"type", "slab"}, {"z1_nm", 3.0}, {"z2_nm", 1.0}}}};
  EXPECT_FALSE(config_error(j).empty());
}

TEST(Config, BuildersApplyUnits) {
  json j = minimal();
  j["nv"] = {{"depth_nm", 7.5}, {"alpha_deg", 0.0}};
  j["sample"] = {{"t2n_us", 20.0}, {"rho_per_nm3", 50.0}};
  j["sequence"] = {{"b0_gauss", 1609.0}, {"tau_ns", {{"start", 60.0}, {"stop", 80.0}, {"points", 21}}}};
  const RunConfig c = config_from_json(j);
  EXPECT_DOUBLE_EQ(c.nv_center().depth(), 7.5e-9);
  EXPECT_DOUBLE_EQ(c.alpha_rad(), 0.0);
  EXPECT_DOUBLE_EQ(c.nuclear_sample().rho(), 50e27);
  EXPECT_DOUBLE_EQ(c.nuclear_sample().t2n_star().seconds(), 20e-6);
  EXPECT_DOUBLE_EQ(c.field().tesla(), 0.1609);
  const auto grid = c.tau_grid();
  ASSERT_EQ(grid.size(), 21u);
  EXPECT_NEAR(grid.front(), 60e-9, 1e-21);
  EXPECT_NEAR(grid.back(), 80e-9, 1e-21);
  EXPECT_DOUBLE_EQ(config_from_json(minimal()).alpha_rad(), kAlpha100);
}

TEST(Config, ExplicitTauListOverridesRange) {
  json j = minimal();
  j["sequence"] = {{"tau_ns", {{"list", {590.0, 595.0, 600.0}}}}};
  const auto grid = config_from_json(j).tau_grid();
  ASSERT_EQ(grid.size(), 3u);
  EXPECT_NEAR(grid[1], 595e-9, 1e-21);
  j["sequence"]["tau_ns"]["list"] = {600.0, 590.0};
  EXPECT_FALSE(config_error(j).empty());
}

TEST(Config, NullOptionalsAccepted) {
  json j = minimal();
  j["sample"] = {{"t2n_us", nullptr}};
  j["nv"] = {{"alpha_deg", nullptr}};
  EXPECT_TRUE(config_error(j).empty()) << config_error(j);
  EXPECT_TRUE(config_from_json(j).nuclear_sample().t2n_star().is_infinite());
}

TEST(Config, FitConfigMapping) {
  json j = minimal();
  j["fit"] = {{"t2n_mode", "finite"}, {"omega", "fixed"}, {"depth_grid", 21}};
  j["sample"] = {{"rho_sigma_per_nm3", 5.0}};
  const auto f = config_from_json(j).fit_config();
  EXPECT_EQ(f.t2n_mode, pipeline::T2nMode::Finite);
  EXPECT_FALSE(f.omega_free);
  EXPECT_EQ(f.depth_grid, 21);
  ASSERT_TRUE(f.rho_sigma.has_value());
  EXPECT_DOUBLE_EQ(*f.rho_sigma, 5e27);
}
