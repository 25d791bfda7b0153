#include "cvol/config.hpp"

#include <stdexcept>
#include <string>

#include <gtest/gtest.h>

#include "cvol/intensity.hpp"
#include "cvol/run.hpp"

namespace {

using namespace cvol;

const char* kMinimalYaml = R"(
model: {sigma0: 0.2, rate: 0.02, spot: 100}
grid: {lower: 50, upper: 200, count: 20, stretch_lower: 5, stretch_upper: 5}
matching:
  C: 40
  schemes:
    - {k: 1, alpha: 0.002}
payoffs:
  maturities: [1.0]
  kinds: [variance_swap]
)";

std::string message_of(const std::string& yaml) {
    try {
        parse_config(yaml);
    } catch (const std::runtime_error& e) {
        return e.what();
    }
    return "";
}

TEST(ParseConfig, MinimalDocumentGetsTheDocumentedDefaults) {
    const RunConfig cfg = parse_config(kMinimalYaml);
    EXPECT_EQ(cfg.description, "");
    EXPECT_DOUBLE_EQ(cfg.model.beta, 1.0);
    EXPECT_TRUE(cfg.model.drift_auto);
    EXPECT_FALSE(cfg.model.clock.has_value());
    EXPECT_DOUBLE_EQ(cfg.grid.s, 100.0);  // anchor defaults to the spot
    EXPECT_FALSE(cfg.corridor.has_value());
    EXPECT_DOUBLE_EQ(cfg.matching.circle_multiple, 3.0);
    EXPECT_DOUBLE_EQ(cfg.matching.tail_guard, 1e-4);
    EXPECT_TRUE(cfg.matching.region.automatic);
    EXPECT_DOUBLE_EQ(cfg.matching.region.mass_tol, 1e-6);
    ASSERT_EQ(cfg.matching.schemes.size(), 1u);
    EXPECT_EQ(cfg.matching.schemes[0].policy, AlphaPolicy::fixed);
    EXPECT_FALSE(cfg.matching.schemes[0].strict);
    ASSERT_EQ(cfg.payoffs.call_moneyness.size(), 3u);
    EXPECT_DOUBLE_EQ(cfg.payoffs.call_moneyness[0], 0.8);
    EXPECT_DOUBLE_EQ(cfg.payoffs.discount_rate, 0.0);
    EXPECT_FALSE(cfg.vanillas.has_value());
    EXPECT_FALSE(cfg.mc.has_value());
}

TEST(ParseConfig, CollectsEveryFieldErrorIntoOneMessage) {
    const std::string yaml = R"(
model: {rate: 0.02, spot: 100}
grid: {lower: 50, upper: 200, count: 21, stretch_lower: 5, stretch_upper: 5}
corridor: {lower: 130, upper: 70}
matching:
  C: 40
  schemes:
    - {k: 5, alpha: 0.002}
payoffs:
  maturities: [-1.0]
  kinds: [variance_swap]
)";
    const std::string msg = message_of(yaml);
    ASSERT_FALSE(msg.empty());
    EXPECT_NE(msg.find("configuration errors:"), std::string::npos);
    EXPECT_NE(msg.find("model.sigma0"), std::string::npos);
    EXPECT_NE(msg.find("grid.count"), std::string::npos);
    EXPECT_NE(msg.find("corridor"), std::string::npos);
    EXPECT_NE(msg.find("matching.schemes[0].k"), std::string::npos);
    EXPECT_NE(msg.find("payoffs.maturities"), std::string::npos);
}

TEST(ParseConfig, ThirdMomentSchemeNeedsAWiderSecondTier) {
    const std::string yaml = R"(
model: {sigma0: 0.2, rate: 0.02, spot: 100}
grid: {lower: 50, upper: 200, count: 20, stretch_lower: 5, stretch_upper: 5}
matching:
  C: 40
  schemes:
    - {k: 3, n: 10, m: 10, alpha: 0.002}
payoffs:
  maturities: [1.0]
  kinds: [variance_swap]
)";
    const std::string msg = message_of(yaml);
    EXPECT_NE(msg.find("matching.schemes[0].m"), std::string::npos);
    EXPECT_NE(msg.find("must exceed n"), std::string::npos);
}

TEST(ParseConfig, RejectsUnknownPayoffKindsAndBadGuards) {
    const std::string yaml = R"(
model: {sigma0: 0.2, rate: 0.02, spot: 100}
grid: {lower: 50, upper: 200, count: 20, stretch_lower: 5, stretch_upper: 5}
matching:
  C: 40
  tail_guard: -0.5
  schemes: []
payoffs:
  maturities: [1.0]
  kinds: [varswap]
)";
    const std::string msg = message_of(yaml);
    EXPECT_NE(msg.find("matching.tail_guard"), std::string::npos);
    EXPECT_NE(msg.find("matching.schemes"), std::string::npos);
    EXPECT_NE(msg.find("unknown payoff kind 'varswap'"), std::string::npos);
}

TEST(ParseConfig, SurfacesInvalidYamlDirectly) {
    EXPECT_THROW(parse_config("model: {["), std::runtime_error);
    const std::string msg = message_of("model: {[");
    EXPECT_NE(msg.find("not valid YAML"), std::string::npos);
}

TEST(LoadConfig, MissingFileIsReportedByPath) {
    try {
        load_config("/nonexistent/cfg.yaml");
        FAIL() << "expected a throw";
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("cannot open configuration file"),
                  std::string::npos);
    }
}

TEST(ResolvedDrift, FollowsTheRateTheClockOrTheExplicitValue) {
    ModelConfig plain;
    plain.rate = 0.02;
    EXPECT_DOUBLE_EQ(resolved_drift(plain), 0.02);

    ModelConfig clocked = plain;
    clocked.clock = BernsteinSpec{1.0, 0.05};
    EXPECT_DOUBLE_EQ(resolved_drift(clocked), 0.019990003332499562);

    ModelConfig pinned = plain;
    pinned.drift_auto = false;
    pinned.drift = -0.02;
    EXPECT_DOUBLE_EQ(resolved_drift(pinned), -0.02);
}

TEST(EchoConfig, RoundTripsThroughTheParserWithFullPrecision) {
    const std::string yaml = R"(
description: round trip
model:
  sigma0: 0.17801476927854395
  beta: 0.7
  rate: 0.02
  spot: 100
  clock: {mu: 1.0, nu: 0.05}
grid: {lower: 20, upper: 500, count: 30, stretch_lower: 5, stretch_upper: 5}
corridor: {lower: 70, upper: 130}
matching:
  C: 60
  tail_guard: 0.005
  schemes:
    - {k: 2, n: 30, alpha: 0.002, strict: true}
payoffs:
  maturities: [0.5, 1, 2]
  kinds: [variance_swap, volatility_swap, variance_call]
mc: {paths: 5000, steps_per_year: 128, seed: 9}
)";
    const RunConfig first = parse_config(yaml);
    const RunConfig second = parse_config(echo_config(first));

    EXPECT_EQ(second.description, "round trip");
    EXPECT_DOUBLE_EQ(second.model.sigma0, first.model.sigma0);
    EXPECT_DOUBLE_EQ(second.model.beta, first.model.beta);
    ASSERT_TRUE(second.model.clock.has_value());
    EXPECT_DOUBLE_EQ(second.model.clock->nu, 0.05);
    // The echo pins the resolved drift as a literal number.
    EXPECT_FALSE(second.model.drift_auto);
    EXPECT_DOUBLE_EQ(resolved_drift(second.model), resolved_drift(first.model));
    EXPECT_EQ(second.grid.N, 30);
    ASSERT_TRUE(second.corridor.has_value());
    EXPECT_DOUBLE_EQ(second.corridor->upper, 130.0);
    EXPECT_EQ(second.matching.C, 60);
    EXPECT_DOUBLE_EQ(second.matching.tail_guard, 0.005);
    ASSERT_EQ(second.matching.schemes.size(), 1u);
    EXPECT_EQ(second.matching.schemes[0].k, 2);
    EXPECT_EQ(second.matching.schemes[0].n, 30);
    EXPECT_TRUE(second.matching.schemes[0].strict);
    EXPECT_DOUBLE_EQ(second.matching.schemes[0].alpha, 0.002);
    ASSERT_EQ(second.payoffs.maturities.size(), 3u);
    EXPECT_EQ(second.payoffs.kinds.size(), 3u);
    ASSERT_TRUE(second.mc.has_value());
    EXPECT_EQ(second.mc->paths, 5000);
    EXPECT_EQ(second.mc->seed, 9u);
}

TEST(BundledConfigs, AllParseCleanly) {
    const char* names[] = {
        "table2_cev_vanilla.yaml", "table3_vg_vanilla.yaml", "table5_cev.yaml",
        "table6_vg.yaml",          "table8_corridor.yaml",
    };
    for (const char* name : names) {
        SCOPED_TRACE(name);
        const RunConfig cfg =
            load_config(std::string(CVOL_SOURCE_DIR) + "/configs/" + name);
        EXPECT_FALSE(cfg.description.empty());
        EXPECT_FALSE(cfg.matching.schemes.empty());
    }
    const RunConfig corridor_run =
        load_config(std::string(CVOL_SOURCE_DIR) + "/configs/table8_corridor.yaml");
    ASSERT_TRUE(corridor_run.corridor.has_value());
    EXPECT_DOUBLE_EQ(corridor_run.corridor->lower, 70.0);
    EXPECT_DOUBLE_EQ(corridor_run.corridor->upper, 130.0);
}

TEST(BuildPipeline, StrictSchemeRefusesAPitchThatDegrades) {
    const std::string yaml = R"(
model: {sigma0: 0.2, rate: 0.02, spot: 100}
grid: {lower: 50, upper: 200, count: 20, stretch_lower: 5, stretch_upper: 5}
matching:
  C: 40
  schemes:
    - {k: 2, n: 5, alpha: 0.5, strict: true}
payoffs:
  maturities: [1.0]
  kinds: [variance_swap]
)";
    RunConfig cfg = parse_config(yaml);
    EXPECT_THROW(build_pipeline(cfg), FeasibilityError);

    cfg.matching.schemes[0].strict = false;
    const Pipeline pipe = build_pipeline(cfg);
    ASSERT_EQ(pipe.schemes.size(), 1u);
    EXPECT_GT(pipe.schemes[0].profile.degraded_count() +
                  pipe.schemes[0].profile.quiet_count(),
              0);
}

}  // namespace
