#ifndef CVOL_CONFIG_HPP
#define CVOL_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cvol/corridor.hpp"
#include "cvol/generator.hpp"
#include "cvol/grid.hpp"
#include "cvol/payoff.hpp"

namespace cvol {

struct ModelConfig {
    double sigma0 = 0.0;
    double beta = 1.0;
    double rate = 0.0;
    double spot = 0.0;
    bool drift_auto = true;  // rate for a diffusion, risk-neutral solve with a clock
    double drift = 0.0;      // used when drift_auto is false
    std::optional<BernsteinSpec> clock;
};

/** How the lattice pitch of one matching scheme is chosen. */
enum class AlphaPolicy { fixed, automatic, min_feasible };

struct SchemeConfig {
    int k = 1;
    int n = 0;
    int m = 0;
    AlphaPolicy policy = AlphaPolicy::automatic;
    double alpha = 0.0;   // for AlphaPolicy::fixed
    bool strict = false;  // refuse pitches that degrade the order anywhere
};

struct RegionConfig {
    bool automatic = true;  // states with transition mass above mass_tol
    double lower = 0.0;     // explicit price bounds otherwise
    double upper = 0.0;
    double mass_tol = 1e-6;
};

struct MatchingConfig {
    int C = 0;
    double circle_multiple = 3.0;
    double tail_guard = 1e-4;  // mass allowed to reach the lattice top
    RegionConfig region;
    std::vector<SchemeConfig> schemes;
};

struct PayoffConfig {
    std::vector<double> maturities;
    std::vector<PayoffKind> kinds;
    std::vector<double> call_moneyness{0.8, 1.0, 1.2};
    double discount_rate = 0.0;
};

struct VanillaConfig {
    std::vector<double> strikes;
    std::vector<double> maturities;
    bool grow_strikes = true;  // strike K is quoted at T as K * exp(rate * T)
};

struct McBlock {
    long paths = 100000;
    int steps_per_year = 252;
    std::uint64_t seed = 1;
};

struct RunConfig {
    std::string description;
    ModelConfig model;
    GridSpec grid{};
    std::optional<Corridor> corridor;
    MatchingConfig matching;
    PayoffConfig payoffs;
    std::optional<VanillaConfig> vanillas;
    std::optional<McBlock> mc;
};

/**
 * Parse and validate a YAML run configuration.  All field errors are
 * collected and reported together in the exception message, prefixed by
 * their key paths.
 */
RunConfig parse_config(const std::string& yaml_text);
RunConfig load_config(const std::string& path);

/** Drift the pipeline will use: explicit, or resolved from the rate. */
double resolved_drift(const ModelConfig& model);

/** Serialized view of the configuration after defaults are applied. */
std::string echo_config(const RunConfig& cfg);

} // namespace cvol

#endif // CVOL_CONFIG_HPP
