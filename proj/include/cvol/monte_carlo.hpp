#ifndef CVOL_MONTE_CARLO_HPP
#define CVOL_MONTE_CARLO_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "cvol/corridor.hpp"
#include "cvol/generator.hpp"
#include "cvol/payoff.hpp"

namespace cvol {

/**
 * Path simulation setup.  Paths start at spot and are monitored on an
 * equidistant calendar grid of steps_per_year points per year; when a
 * clock is present the asset diffuses in gamma-distributed business
 * time between monitoring dates.  Each path draws from its own RNG
 * stream derived from (seed, path index), so results do not depend on
 * scheduling and are reproducible for a fixed seed.
 */
struct McConfig {
    long paths = 100000;
    int steps_per_year = 252;
    std::uint64_t seed = 1;
    double spot = 100.0;
    DiffusionSpec diffusion{};
    std::optional<BernsteinSpec> clock;
};

struct McEstimate {
    double value = 0.0;          // quoted number (swap quote or option price)
    double std_error = 0.0;      // absolute standard error of value
    double mean_level = 0.0;     // E[accumulated variance / T]
    double mean_level_se = 0.0;  // standard error of mean_level
    long paths = 0;
};

/** SplitMix64 bit-mixer used to derive independent per-path seeds. */
std::uint64_t splitmix64(std::uint64_t x);

/** Engine for one path's stream. */
std::mt19937_64 path_engine(std::uint64_t seed, long path);

/**
 * One Euler path of the diffusion, monitored at every step.  Paths that
 * fall to 1e-4 * spot are absorbed there (the spot process hits zero in
 * finite time for sub-linear volatility exponents).
 */
std::vector<double> simulate_diffusion_path(std::mt19937_64& eng,
                                            const McConfig& cfg, double T);

/**
 * Gamma-subordinator increments over steps intervals of calendar length
 * dt: independent draws with mean mu*dt and variance nu*dt.
 */
std::vector<double> subordinator_increments(std::mt19937_64& eng,
                                            const BernsteinSpec& clock,
                                            double dt, int steps);

/**
 * One path of the time-changed diffusion: per calendar step, draw the
 * business-time increment and advance the diffusion through it with
 * Euler sub-steps no longer than the calendar step.
 */
std::vector<double> simulate_subordinated_path(std::mt19937_64& eng,
                                               const McConfig& cfg, double T);

/**
 * Corridor-realized variance of a monitored path: the sum of squared
 * clamped log increments, with increments that jump across the whole
 * corridor contributing nothing (matching the functional the chain's
 * accumulator approximates).
 */
double realized_variance(const std::vector<double>& path,
                         const Corridor& corridor);

/** Per-path accumulated variances and terminal levels. */
struct McSample {
    std::vector<double> accumulated;
    std::vector<double> terminal;
};
McSample simulate(const McConfig& cfg, double T, const Corridor& corridor);

/** Compensated sequential sum (order-insensitive up to round-off). */
double kahan_sum(const std::vector<double>& values);

/** Evaluate one claim against an already-simulated sample. */
McEstimate estimate_from_sample(const McSample& sample, const PayoffSpec& payoff);

McEstimate estimate(const McConfig& cfg, const PayoffSpec& payoff,
                    const Corridor& corridor);

/** Discounted vanilla call on the terminal level. */
McEstimate estimate_vanilla_call(const McConfig& cfg, double strike, double rate,
                                 double T);

} // namespace cvol

#endif // CVOL_MONTE_CARLO_HPP
