// Acceptance harness for the pricing library.  Each criterion below
// rebuilds one of the bundled benchmark configurations, recomputes the
// published table values this project commits to reproduce, and prints
// a single PASS/FAIL line with the measured numbers.  The process exit
// code is the number of failed criteria, so a clean run exits 0.
//
// Run from the repository root (the bundled configurations are loaded
// by relative path).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cvol/black_scholes.hpp"
#include "cvol/circulant.hpp"
#include "cvol/config.hpp"
#include "cvol/intensity.hpp"
#include "cvol/linalg.hpp"
#include "cvol/monte_carlo.hpp"
#include "cvol/run.hpp"
#include "cvol/spectral.hpp"

namespace {

using namespace cvol;
using Clock = std::chrono::steady_clock;

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    if (!pass) ++g_failures;
    std::ostringstream line;
    line << (pass ? "[PASS]" : "[FAIL]") << " criterion " << id << " — " << name
         << ": " << detail;
    std::cout << line.str() << std::endl;
}

void run_criterion(int id, const std::string& name,
                   const std::function<std::pair<bool, std::string>()>& body) {
    try {
        const auto [pass, detail] = body();
        report(id, name, pass, detail);
    } catch (const std::exception& e) {
        report(id, name, false, std::string("threw: ") + e.what());
    }
}

std::string fmt(double v, int prec = 6) {
    std::ostringstream out;
    out << std::setprecision(prec) << v;
    return out.str();
}

bool same_3sf(double a, double b) {
    char x[40], y[40];
    std::snprintf(x, sizeof x, "%.3g", a);
    std::snprintf(y, sizeof y, "%.3g", b);
    return std::strcmp(x, y) == 0;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

/** Lazily built pipelines shared between criteria. */
struct Context {
    std::optional<Pipeline> t3, t5, t6, t8;
    std::vector<PriceRow> rows5, rows6, rows8;
    double secs_table6 = 0.0;

    Pipeline& table3() {
        if (!t3) t3 = build_pipeline(load_config("configs/table3_vg_vanilla.yaml"));
        return *t3;
    }
    Pipeline& table5() {
        if (!t5) {
            t5 = build_pipeline(load_config("configs/table5_cev.yaml"));
            rows5 = spectral_prices(*t5);
        }
        return *t5;
    }
    Pipeline& table6() {
        if (!t6) {
            const auto t0 = Clock::now();
            t6 = build_pipeline(load_config("configs/table6_vg.yaml"));
            rows6 = spectral_prices(*t6);
            secs_table6 = seconds_since(t0);
        }
        return *t6;
    }
    Pipeline& table8() {
        if (!t8) {
            t8 = build_pipeline(load_config("configs/table8_corridor.yaml"));
            rows8 = spectral_prices(*t8);
        }
        return *t8;
    }
};

double vanilla_iv_pct(const std::vector<VanillaRow>& rows, double strike, double T) {
    for (const VanillaRow& r : rows)
        if (std::abs(r.strike - strike) < 1e-9 && std::abs(r.maturity - T) < 1e-9)
            return 100.0 * r.implied_vol;
    throw std::runtime_error("vanilla cell not produced: K=" + fmt(strike) +
                             " T=" + fmt(T));
}

double spectral_pct(const std::vector<PriceRow>& rows, PayoffKind kind, int k,
                    double T) {
    for (const PriceRow& r : rows)
        if (r.kind == kind && r.k == k && std::abs(r.maturity - T) < 1e-9)
            return 100.0 * r.spectral;
    throw std::runtime_error("price cell not produced: k=" + fmt(k) +
                             " T=" + fmt(T));
}

struct VanillaCell {
    double strike, maturity, iv_pct;
};

/** Shared body of the two vanilla-table criteria. */
std::pair<bool, std::string> check_vanilla_table(const char* config_path,
                                                 const VanillaCell* cells,
                                                 std::size_t count,
                                                 double* out_seconds) {
    const auto t0 = Clock::now();
    const Pipeline pipe = build_pipeline(load_config(config_path));
    const std::vector<VanillaRow> rows = vanilla_table(pipe);
    const double secs = seconds_since(t0);
    if (out_seconds) *out_seconds = secs;

    double worst = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const double got = vanilla_iv_pct(rows, cells[i].strike, cells[i].maturity);
        worst = std::max(worst, std::abs(got - cells[i].iv_pct));
    }
    const double worst_bp = 100.0 * worst;
    std::ostringstream detail;
    detail << count << " cells, max |IV error| " << fmt(worst_bp, 3)
           << " bp (limit 15); table built and priced in " << fmt(secs, 3) << " s";
    return {worst_bp <= 15.0, detail.str()};
}

const VanillaCell kTable2[] = {
    {80, 0.5, 21.44}, {80, 1, 21.42},  {80, 2, 21.30},  {90, 0.5, 20.55},
    {90, 1, 20.57},   {90, 2, 20.46},  {100, 0.5, 19.93}, {100, 1, 19.90},
    {100, 2, 19.71},  {110, 0.5, 19.37}, {110, 1, 19.19}, {110, 2, 19.11},
    {120, 0.5, 18.76}, {120, 1, 18.66}, {120, 2, 18.53},
};

const VanillaCell kTable3[] = {
    {80, 0.5, 20.43}, {80, 1, 20.07},  {80, 2, 19.98},  {90, 0.5, 19.91},
    {90, 1, 19.89},   {90, 2, 19.93},  {100, 0.5, 19.69}, {100, 1, 19.84},
    {100, 2, 19.92},  {110, 0.5, 19.85}, {110, 1, 19.89}, {110, 2, 19.93},
    {120, 0.5, 20.16}, {120, 1, 19.92}, {120, 2, 19.94},
};

/** One random small chain + accumulator instance for the brute-force check. */
double lift_law_gap(std::mt19937_64& rng, int instance) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const int N = 2 + static_cast<int>(rng() % 4);   // 2..5 states
    const int C = 3 + static_cast<int>(rng() % 18);  // 3..20 lattice arcs
    const int k = 1 + instance % 3;

    StateGrid grid;
    grid.states.resize(N);
    double level = 30.0 + 50.0 * unit(rng);
    for (int i = 0; i < N; ++i) {
        grid.states[i] = level;
        level *= std::exp(0.08 + 0.27 * unit(rng));
    }
    grid.spot_index = rng() % N;

    GeneratorMatrix gen;
    gen.grid = grid;
    gen.entries = Eigen::MatrixXd::Zero(N, N);
    for (int x = 0; x < N; ++x) {
        for (int y = 0; y < N; ++y)
            if (y != x) gen.entries(x, y) = 0.05 + 1.15 * unit(rng);
        gen.entries(x, x) = -gen.entries.row(x).sum();
    }

    Corridor corridor = Corridor::full();
    if (instance % 3 == 0 && N >= 4)
        corridor = Corridor{grid.states[1] * 0.99, grid.states[N - 2] * 1.01};

    const MomentTable moments = corridor_moments(gen, corridor, k);
    const Region region{0, N - 1};
    const double alpha = 0.004 * std::pow(20.0, unit(rng));  // 0.004 .. 0.08

    IntensityProfile prof;
    if (k == 1) {
        prof = match_k1(moments, alpha, C, region);
    } else if (k == 2) {
        const int n = 2 + instance % 4;  // 2..5 <= 2C
        prof = match_k2(moments, alpha, n, C, region);
    } else {
        const int n = 2 + instance % 3;                       // 2..4
        const int m = std::min(n + 1 + instance % 4, 2 * C);  // n+1..n+4
        prof = match_k3(moments, alpha, n, m, C, region);
    }

    const int circle = prof.circle();
    const Eigen::Index x0 = static_cast<Eigen::Index>(rng() % N);
    const double t = 0.05 + 0.45 * unit(rng);

    const SpectralCache cache(gen, prof);
    const JointLaw law = cache.joint_law(x0, t, /*tail_guard=*/1.1);

    const Eigen::MatrixXd lift = materialize_lift(gen, prof);
    const Eigen::MatrixXd flow = expm(lift, t);
    const Eigen::RowVectorXd brute = flow.row(x0 * circle);

    double gap = 0.0;
    for (int y = 0; y < N; ++y)
        for (int d = 0; d < circle; ++d)
            gap = std::max(gap, std::abs(law.masses(y, d) - brute(y * circle + d)));
    return gap;
}

std::pair<bool, std::string> criterion_spectral_equivalence() {
    std::mt19937_64 rng(20260814);
    const int instances = 60;
    double worst = 0.0;
    for (int i = 0; i < instances; ++i) worst = std::max(worst, lift_law_gap(rng, i));
    std::ostringstream detail;
    detail << instances
           << " random chain/lattice instances (N<=5, C<=20, k<=3): max "
              "|spectral law - brute-force matrix exponential| = "
           << fmt(worst, 3) << " (limit 1e-8)";
    return {worst <= 1e-8, detail.str()};
}

std::pair<bool, std::string> criterion_moment_reconstruction(Context& ctx) {
    struct Case {
        const char* name;
        Pipeline* pipe;
    };
    ctx.table5();
    ctx.table6();
    ctx.table8();
    const Case cases[] = {{"table 5", &*ctx.t5}, {"table 6", &*ctx.t6},
                          {"table 8", &*ctx.t8}};
    double worst = 0.0;
    long checks = 0, beyond_first = 0;
    for (const Case& c : cases) {
        for (const SchemeArtifacts& art : c.pipe->schemes) {
            const IntensityProfile& prof = art.profile;
            for (Eigen::Index x = prof.region.first; x <= prof.region.last; ++x) {
                for (int j = 1; j <= prof.matched[x]; ++j) {
                    const double want = c.pipe->moments.moment(x, j);
                    const double got = prof.reconstructed_moment(x, j);
                    worst = std::max(worst, std::abs(got - want) /
                                                std::max(std::abs(want), 1e-300));
                    ++checks;
                    if (j >= 2) ++beyond_first;
                }
            }
        }
    }
    std::ostringstream detail;
    detail << checks << " matched moments across all bundled schemes ("
           << beyond_first << " of order >= 2): max relative residual "
           << fmt(worst, 3) << " (limit 1e-9)";
    return {checks > 0 && beyond_first > 0 && worst <= 1e-9, detail.str()};
}

std::pair<bool, std::string> criterion_feasibility_diagnostics(Context& ctx) {
    // Published diagnostics for the table-5 chain: the extremes of the
    // moment ratio M2/M1 over prices in [20, 250] are quoted as 0.000563
    // and roughly 0.019, and the (n=5, m=30) tier bound as 13.48, each to
    // be reproduced to three significant figures.
    const Pipeline& t5 = ctx.table5();
    const Region reg5 = region_from_bounds(t5.grid, 20.0, 250.0);
    double min_ratio = std::numeric_limits<double>::infinity();
    double max_ratio = 0.0;
    for (Eigen::Index x = reg5.first; x <= reg5.last; ++x) {
        const double ratio = t5.moments.moment(x, 2) / t5.moments.moment(x, 1);
        min_ratio = std::min(min_ratio, ratio);
        max_ratio = std::max(max_ratio, ratio);
    }
    const double b1 = tier_power_sum(1, 0, 50);
    const double b2 = tier_power_sum(2, 0, 50);
    const double window_lo = max_ratio * b1 / b2;

    const double c1 = tier_power_sum(1, 5, 30);
    const double c2 = tier_power_sum(2, 5, 30);
    const double c3 = tier_power_sum(3, 5, 30);
    const double tier_lhs = (c3 - c1) * (c3 - c1) / ((c3 - c2) * (c2 - c1));

    // Closest quantity we could construct to the quoted 13.48: the largest
    // value of 4*M1*M3/M2^2 over the same price window on the jump-model
    // chain of table 6.
    const Pipeline& t6 = ctx.table6();
    const Region reg6 = region_from_bounds(t6.grid, 20.0, 250.0);
    double variant = 0.0;
    for (Eigen::Index x = reg6.first; x <= reg6.last; ++x) {
        const double m1 = t6.moments.moment(x, 1);
        const double m2 = t6.moments.moment(x, 2);
        const double m3 = t6.moments.moment(x, 3);
        if (m2 > 0.0) variant = std::max(variant, 4.0 * m1 * m3 / (m2 * m2));
    }

    const bool ratios_ok =
        same_3sf(min_ratio, 0.000563) && same_3sf(max_ratio, 0.019);
    const bool tier_ok = same_3sf(tier_lhs, 13.48);

    std::ostringstream detail;
    detail << "computed M2/M1 extremes " << fmt(min_ratio, 6) << " / "
           << fmt(max_ratio, 6) << " on prices in [20, 250] (published 0.000563 / "
              "~0.019; neither matches to 3 s.f.)"
           << "; implied k=2 pitch window [" << fmt(window_lo, 3) << ", "
           << fmt(min_ratio, 3) << "] is empty"
           << "; tier bound (n=5, m=30): computed " << fmt(tier_lhs, 6)
           << " (published 13.48)"
           << "; closest variant max 4*M1*M3/M2^2 = " << fmt(variant, 6)
           << " — the published diagnostics are not reproducible from this "
              "construction";
    return {ratios_ok && tier_ok, detail.str()};
}

std::pair<bool, std::string> criterion_mc_calibration(Context& ctx) {
    const Pipeline& t5 = ctx.table5();
    const McConfig mc = mc_config(t5);
    std::ostringstream detail;
    bool pass = true;

    detail << "var-swap relative s.e. at " << mc.paths << " paths:";
    for (double T : {0.5, 1.0, 2.0}) {
        const McSample sample = simulate(mc, T, t5.corridor);
        const McEstimate est = estimate_from_sample(
            sample, PayoffSpec{PayoffKind::variance_swap, T, 1.0, 0.0});
        const double rel_pct = 100.0 * est.mean_level_se / est.mean_level;
        detail << " T=" << fmt(T, 2) << ": " << fmt(rel_pct, 3) << "%";
        if (!(rel_pct >= 0.03 && rel_pct <= 0.08)) pass = false;
    }
    detail << " (band [0.03%, 0.08%])";

    McConfig gbm;
    gbm.paths = 20000;
    gbm.steps_per_year = 252;
    gbm.seed = 2718;
    gbm.spot = 100.0;
    gbm.diffusion = DiffusionSpec{0.2, 1.0, 0.02, 100.0};
    double worst_z = 0.0;
    for (double strike : {90.0, 100.0, 110.0}) {
        const McEstimate est = estimate_vanilla_call(gbm, strike, 0.02, 1.0);
        const double exact = bs_call_price(100.0, strike, 0.02, 1.0, 0.2);
        worst_z = std::max(worst_z, std::abs(est.value - exact) / est.std_error);
    }
    detail << "; constant-vol special case vs closed form: max |error| "
           << fmt(worst_z, 3) << " s.e. (limit 3)";
    if (worst_z > 3.0) pass = false;
    return {pass, detail.str()};
}

}  // namespace

int main() {
    std::cout << "acceptance checks (bundled configurations, fixed seeds)\n"
              << std::string(70, '-') << std::endl;

    run_criterion(1, "vanilla reproduction, table 2 (CEV chain)", [&] {
        double secs = 0.0;
        auto res = check_vanilla_table("configs/table2_cev_vanilla.yaml", kTable2,
                                       std::size(kTable2), &secs);
        res.first = res.first && secs < 5.0;
        res.second += " (limit 5 s)";
        return res;
    });

    Context ctx;

    run_criterion(2, "vanilla reproduction, table 3 (VG chain)", [&] {
        return check_vanilla_table("configs/table3_vg_vanilla.yaml", kTable3,
                                   std::size(kTable3), nullptr);
    });

    run_criterion(3, "variance-swap exactness, tables 5-6", [&] {
        ctx.table5();
        ctx.table6();
        struct Cell {
            const std::vector<PriceRow>* rows;
            int k;
            double T, pct;
        };
        const std::vector<Cell> cells = {
            {&ctx.rows5, 1, 0.5, 20.07}, {&ctx.rows5, 1, 1, 20.19},
            {&ctx.rows5, 1, 2, 20.43},   {&ctx.rows5, 2, 0.5, 20.07},
            {&ctx.rows5, 2, 1, 20.19},   {&ctx.rows5, 2, 2, 20.42},
            {&ctx.rows6, 1, 0.5, 20.01}, {&ctx.rows6, 1, 1, 20.01},
            {&ctx.rows6, 1, 2, 20.02},   {&ctx.rows6, 2, 0.5, 20.01},
            {&ctx.rows6, 2, 1, 20.01},   {&ctx.rows6, 2, 2, 20.02},
            {&ctx.rows6, 3, 0.5, 20.01}, {&ctx.rows6, 3, 1, 20.01},
            {&ctx.rows6, 3, 2, 20.02},
        };
        double worst_bp = 0.0;
        for (const Cell& c : cells) {
            const double got =
                spectral_pct(*c.rows, PayoffKind::variance_swap, c.k, c.T);
            worst_bp = std::max(worst_bp, 100.0 * std::abs(got - c.pct));
        }
        std::ostringstream detail;
        detail << cells.size() << " var-swap cells across all k and T: max error "
               << fmt(worst_bp, 3) << " bp (limit 5)";
        return std::pair{worst_bp <= 5.0, detail.str()};
    });

    run_criterion(4, "vol-swap convergence in k, table 6 (VG, T=1)", [&] {
        const Pipeline& t6 = ctx.table6();
        const McSample sample = simulate(mc_config(t6), 1.0, t6.corridor);
        const McEstimate mc = estimate_from_sample(
            sample, PayoffSpec{PayoffKind::volatility_swap, 1.0, 1.0, 0.0});
        double err[4] = {0, 0, 0, 0};
        for (int k = 1; k <= 3; ++k)
            err[k] = std::abs(
                spectral_pct(ctx.rows6, PayoffKind::volatility_swap, k, 1.0) / 100.0 -
                mc.value);
        std::ostringstream detail;
        detail << "spectral-vs-MC vol-swap errors: k=1 " << fmt(1e4 * err[1], 3)
               << " bp, k=2 " << fmt(1e4 * err[2], 3) << " bp, k=3 "
               << fmt(1e4 * err[3], 3) << " bp; MC s.e. "
               << fmt(1e4 * mc.std_error, 3)
               << " bp (need monotone decrease and k=3 within 3 s.e.)";
        const bool pass =
            err[3] <= err[2] && err[2] <= err[1] && err[3] <= 3.0 * mc.std_error;
        return std::pair{pass, detail.str()};
    });

    run_criterion(5, "corridor pricing, table 8", [&] {
        ctx.table8();
        const double var1 = spectral_pct(ctx.rows8, PayoffKind::variance_swap, 1, 1);
        const double var2 = spectral_pct(ctx.rows8, PayoffKind::variance_swap, 1, 2);
        const double vol1 =
            spectral_pct(ctx.rows8, PayoffKind::volatility_swap, 3, 1);
        const double vol2 =
            spectral_pct(ctx.rows8, PayoffKind::volatility_swap, 3, 2);
        const double var_bp =
            100.0 * std::max(std::abs(var1 - 19.40), std::abs(var2 - 18.50));
        const double vol_bp =
            100.0 * std::max(std::abs(vol1 - 18.93), std::abs(vol2 - 18.08));
        std::ostringstream detail;
        detail << "corr-var swap k=1: " << fmt(var1, 4) << "% / " << fmt(var2, 4)
               << "% vs 19.40/18.50, max error " << fmt(var_bp, 3)
               << " bp (limit 5); corr-vol swap k=3: " << fmt(vol1, 4) << "% / "
               << fmt(vol2, 4) << "% vs 18.93/18.08, max error " << fmt(vol_bp, 3)
               << " bp (limit 10)";
        return std::pair{var_bp <= 5.0 && vol_bp <= 10.0, detail.str()};
    });

    run_criterion(6, "spectral law equals brute-force lifted exponential",
                  criterion_spectral_equivalence);

    run_criterion(7, "marginal consistency of the joint law", [&] {
        const Pipeline& t6 = ctx.table6();
        const SchemeArtifacts* k3 = nullptr;
        for (const SchemeArtifacts& art : t6.schemes)
            if (art.scheme.k == 3) k3 = &art;
        if (!k3) throw std::runtime_error("no k=3 scheme in table 6");
        const Eigen::Index x0 = static_cast<Eigen::Index>(t6.grid.spot_index);
        const JointLaw law =
            k3->cache->joint_law(x0, 1.0, t6.config.matching.tail_guard);
        const Eigen::VectorXd marginal = law.state_marginal();
        const Eigen::MatrixXd flow = semigroup(t6.gen, 1.0);
        const double gap =
            (marginal - flow.row(x0).transpose()).cwiseAbs().maxCoeff();
        std::ostringstream detail;
        detail << "summing the accumulator out of the joint law reproduces the "
                  "chain row (checked inside every law evaluation); explicit "
                  "recheck on the table-6 k=3 cache at T=1: max gap "
               << fmt(gap, 3) << " (limit 1e-8)";
        return std::pair{gap <= 1e-8, detail.str()};
    });

    run_criterion(8, "moment reconstruction on every profile",
                  [&] { return criterion_moment_reconstruction(ctx); });

    run_criterion(9, "published feasibility diagnostics",
                  [&] { return criterion_feasibility_diagnostics(ctx); });

    run_criterion(10, "Monte Carlo oracle calibration",
                  [&] { return criterion_mc_calibration(ctx); });

    run_criterion(11, "desk-scale runtime, table 6 spectral pass", [&] {
        ctx.table6();  // timed on first build
        std::ostringstream detail;
        detail << "build + all schemes/maturities priced in "
               << fmt(ctx.secs_table6, 3) << " s (limit 60)";
        return std::pair{ctx.secs_table6 < 60.0, detail.str()};
    });

    std::cout << std::string(70, '-') << "\n"
              << (g_failures == 0 ? "all criteria passed"
                                  : fmt(g_failures, 2) + " criterion(s) failed")
              << std::endl;
    return g_failures;
}
