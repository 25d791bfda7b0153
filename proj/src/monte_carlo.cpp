#include "cvol/monte_carlo.hpp"

#include <cmath>
#include <stdexcept>

namespace cvol {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

std::mt19937_64 path_engine(std::uint64_t seed, long path) {
    return std::mt19937_64(
        splitmix64(seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(path) + 1)));
}

namespace {

int step_count(const McConfig& cfg, double T) {
    if (!(T > 0.0))
        throw std::invalid_argument("simulate: maturity must be positive");
    if (cfg.steps_per_year < 1)
        throw std::invalid_argument("simulate: need at least one step per year");
    return static_cast<int>(std::ceil(T * cfg.steps_per_year - 1e-9));
}

/** Euler increments over business duration `span`, sub-stepped so no
 *  single step exceeds `cap`.  Absorbs at the floor. */
double advance_euler(std::mt19937_64& eng, std::normal_distribution<double>& normal,
                     const DiffusionSpec& spec, double s, double span, double cap,
                     double floor) {
    if (s <= floor) return floor;
    const int nsub = std::max(1, static_cast<int>(std::ceil(span / cap - 1e-12)));
    const double h = span / nsub;
    const double sqrth = std::sqrt(h);
    for (int i = 0; i < nsub; ++i) {
        s += spec.gamma * s * h + spec.vol(s) * s * sqrth * normal(eng);
        if (s <= floor) return floor;
    }
    return s;
}

} // namespace

std::vector<double> simulate_diffusion_path(std::mt19937_64& eng,
                                            const McConfig& cfg, double T) {
    const int steps = step_count(cfg, T);
    const double dt = T / steps;
    const double sqrtdt = std::sqrt(dt);
    const double floor = 1e-4 * cfg.spot;
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<double> path(steps + 1);
    double s = cfg.spot;
    path[0] = s;
    for (int i = 1; i <= steps; ++i) {
        if (s > floor) {
            s += cfg.diffusion.gamma * s * dt +
                 cfg.diffusion.vol(s) * s * sqrtdt * normal(eng);
            if (s <= floor) s = floor;
        }
        path[i] = s;
    }
    return path;
}

std::vector<double> subordinator_increments(std::mt19937_64& eng,
                                            const BernsteinSpec& clock,
                                            double dt, int steps) {
    if (clock.nu == 0.0) return std::vector<double>(steps, clock.mu * dt);
    const double shape = dt * clock.mu * clock.mu / clock.nu;
    const double scale = clock.nu / clock.mu;
    std::gamma_distribution<double> gamma(shape, scale);
    std::vector<double> inc(steps);
    for (int i = 0; i < steps; ++i) inc[i] = gamma(eng);
    return inc;
}

std::vector<double> simulate_subordinated_path(std::mt19937_64& eng,
                                               const McConfig& cfg, double T) {
    if (!cfg.clock)
        throw std::invalid_argument("simulate_subordinated_path: no clock given");
    const int steps = step_count(cfg, T);
    const double dt = T / steps;
    const double floor = 1e-4 * cfg.spot;
    std::normal_distribution<double> normal(0.0, 1.0);

    const double shape = dt * cfg.clock->mu * cfg.clock->mu / cfg.clock->nu;
    const double scale = cfg.clock->nu / cfg.clock->mu;
    std::gamma_distribution<double> gamma(shape, scale);

    std::vector<double> path(steps + 1);
    double s = cfg.spot;
    path[0] = s;
    for (int i = 1; i <= steps; ++i) {
        const double span = cfg.clock->nu == 0.0 ? cfg.clock->mu * dt : gamma(eng);
        if (span > 0.0) s = advance_euler(eng, normal, cfg.diffusion, s, span, dt, floor);
        path[i] = s;
    }
    return path;
}

double realized_variance(const std::vector<double>& path,
                         const Corridor& corridor) {
    if (path.size() < 2)
        throw std::invalid_argument("realized_variance: need at least two points");
    const bool two_sided = corridor.has_lower() && corridor.has_upper();
    const double span2 =
        two_sided ? std::pow(std::log(corridor.upper / corridor.lower), 2) : 0.0;
    double acc = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) {
        const double a = path[i - 1], b = path[i];
        const double w = std::log(corridor.clamp(b) / corridor.clamp(a));
        acc += w * w;
        if (two_sided && ((a < corridor.lower && b > corridor.upper) ||
                          (b < corridor.lower && a > corridor.upper)))
            acc -= span2;
    }
    return acc;
}

McSample simulate(const McConfig& cfg, double T, const Corridor& corridor) {
    if (cfg.paths < 1)
        throw std::invalid_argument("simulate: need at least one path");
    McSample sample;
    sample.accumulated.resize(cfg.paths);
    sample.terminal.resize(cfg.paths);
    for (long p = 0; p < cfg.paths; ++p) {
        std::mt19937_64 eng = path_engine(cfg.seed, p);
        const std::vector<double> path =
            cfg.clock ? simulate_subordinated_path(eng, cfg, T)
                      : simulate_diffusion_path(eng, cfg, T);
        sample.accumulated[p] = realized_variance(path, corridor);
        sample.terminal[p] = path.back();
    }
    return sample;
}

double kahan_sum(const std::vector<double>& values) {
    double sum = 0.0, carry = 0.0;
    for (double v : values) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    return sum;
}

namespace {

struct MeanSe {
    double mean;
    double se;
};

MeanSe mean_and_se(const std::vector<double>& values) {
    const double n = static_cast<double>(values.size());
    const double mean = kahan_sum(values) / n;
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double d = values[i] - mean;
        sq[i] = d * d;
    }
    const double var = kahan_sum(sq) / (n - 1.0);
    return {mean, std::sqrt(var / n)};
}

} // namespace

McEstimate estimate_from_sample(const McSample& sample, const PayoffSpec& payoff) {
    const double T = payoff.maturity;
    std::vector<double> level(sample.accumulated.size());
    for (std::size_t i = 0; i < level.size(); ++i)
        level[i] = sample.accumulated[i] / T;
    const MeanSe lvl = mean_and_se(level);

    McEstimate est;
    est.paths = static_cast<long>(sample.accumulated.size());
    est.mean_level = lvl.mean;
    est.mean_level_se = lvl.se;

    switch (payoff.kind) {
        case PayoffKind::variance_swap:
            est.value = std::sqrt(lvl.mean);
            est.std_error = lvl.se / (2.0 * est.value);
            return est;
        case PayoffKind::volatility_swap: {
            std::vector<double> root(level.size());
            for (std::size_t i = 0; i < level.size(); ++i)
                root[i] = std::sqrt(level[i]);
            const MeanSe r = mean_and_se(root);
            est.value = r.mean;
            est.std_error = r.se;
            return est;
        }
        case PayoffKind::variance_call: {
            const double k0 = payoff.moneyness * std::sqrt(lvl.mean);
            const double strike = k0 * k0;
            std::vector<double> pay(level.size());
            for (std::size_t i = 0; i < level.size(); ++i)
                pay[i] = std::max(level[i] - strike, 0.0);
            const MeanSe p = mean_and_se(pay);
            const double disc = std::exp(-payoff.rate * T);
            est.value = disc * p.mean;
            est.std_error = disc * p.se;
            return est;
        }
    }
    throw std::logic_error("estimate: unknown payoff kind");
}

McEstimate estimate(const McConfig& cfg, const PayoffSpec& payoff,
                    const Corridor& corridor) {
    return estimate_from_sample(simulate(cfg, payoff.maturity, corridor), payoff);
}

McEstimate estimate_vanilla_call(const McConfig& cfg, double strike, double rate,
                                 double T) {
    const McSample sample = simulate(cfg, T, Corridor::full());
    const double disc = std::exp(-rate * T);
    std::vector<double> pay(sample.terminal.size());
    for (std::size_t i = 0; i < pay.size(); ++i)
        pay[i] = disc * std::max(sample.terminal[i] - strike, 0.0);
    const MeanSe p = mean_and_se(pay);

    McEstimate est;
    est.paths = cfg.paths;
    est.value = p.mean;
    est.std_error = p.se;
    return est;
}

} // namespace cvol
