#include "cvol/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "cvol/black_scholes.hpp"

namespace cvol {

namespace {

const char* kind_name(PayoffKind kind) {
    switch (kind) {
        case PayoffKind::variance_swap: return "variance_swap";
        case PayoffKind::volatility_swap: return "volatility_swap";
        case PayoffKind::variance_call: return "variance_call";
    }
    return "?";
}

Region resolve_region(const RunConfig& cfg, const StateGrid& grid,
                      const GeneratorMatrix& gen) {
    const RegionConfig& rc = cfg.matching.region;
    if (!rc.automatic) return region_from_bounds(grid, rc.lower, rc.upper);
    const double horizon = *std::max_element(cfg.payoffs.maturities.begin(),
                                             cfg.payoffs.maturities.end());
    return region_from_mass(gen, static_cast<Eigen::Index>(grid.spot_index),
                            horizon, rc.mass_tol);
}

FeasibilityReport scheme_feasibility(const SchemeConfig& s,
                                     const MomentTable& moments,
                                     const Region& region) {
    return s.k == 2 ? feasibility_k2(moments, s.n, region)
                    : feasibility_k3(moments, s.n, s.m, region);
}

double resolve_alpha(const SchemeConfig& s,
                     const std::optional<FeasibilityReport>& rep) {
    switch (s.policy) {
        case AlphaPolicy::fixed: return s.alpha;
        case AlphaPolicy::automatic: return rep->suggest();
        case AlphaPolicy::min_feasible: return rep->min_feasible();
    }
    throw std::logic_error("resolve_alpha: unknown policy");
}

IntensityProfile match_scheme(const SchemeConfig& s, const MomentTable& moments,
                              double alpha, int C, const Region& region) {
    switch (s.k) {
        case 1: return match_k1(moments, alpha, C, region);
        case 2: return match_k2(moments, alpha, s.n, C, region);
        case 3: return match_k3(moments, alpha, s.n, s.m, C, region);
    }
    throw std::logic_error("match_scheme: unknown order");
}

std::string format_maturity(double t) {
    std::ostringstream out;
    out << t;
    std::string s = out.str();
    std::replace(s.begin(), s.end(), '.', 'p');
    return s;
}

} // namespace

Pipeline build_pipeline(const RunConfig& cfg) {
    Pipeline pipe;
    pipe.config = cfg;
    pipe.grid = build_grid(cfg.grid);
    pipe.diffusion = DiffusionSpec{cfg.model.sigma0, cfg.model.beta,
                                   resolved_drift(cfg.model), cfg.model.spot};
    pipe.gen = build_diffusion_generator(pipe.grid, pipe.diffusion);
    if (cfg.model.clock && !cfg.model.clock->is_identity())
        pipe.gen = subordinate(pipe.gen, *cfg.model.clock);
    pipe.corridor = cfg.corridor.value_or(Corridor::full());

    int max_k = 1;
    for (const auto& s : cfg.matching.schemes) max_k = std::max(max_k, s.k);
    pipe.moments = corridor_moments(pipe.gen, pipe.corridor, max_k);
    pipe.region = resolve_region(cfg, pipe.grid, pipe.gen);

    for (const auto& s : cfg.matching.schemes) {
        SchemeArtifacts art;
        art.scheme = s;
        if (s.k >= 2)
            art.feasibility = scheme_feasibility(s, pipe.moments, pipe.region);
        art.alpha = resolve_alpha(s, art.feasibility);
        art.profile =
            match_scheme(s, pipe.moments, art.alpha, cfg.matching.C, pipe.region);
        if (s.strict && art.profile.degraded_count() > 0) {
            std::ostringstream msg;
            msg << "scheme k=" << s.k << ": pitch " << art.alpha
                << " degrades the matched order at " << art.profile.degraded_count()
                << " of " << pipe.region.size()
                << " region states and the scheme is marked strict";
            if (art.feasibility) {
                msg << "; uniformly admissible pitches:";
                if (art.feasibility->admissible.empty()) msg << " (none)";
                for (const auto& [lo, hi] : art.feasibility->admissible)
                    msg << " [" << lo << ", " << hi << "]";
            }
            throw FeasibilityError(msg.str(),
                                   art.feasibility.value_or(FeasibilityReport{}));
        }
        art.cache = std::make_unique<SpectralCache>(pipe.gen, art.profile);
        pipe.schemes.push_back(std::move(art));
    }
    return pipe;
}

McConfig mc_config(const Pipeline& pipe) {
    McConfig mc;
    if (pipe.config.mc) {
        mc.paths = pipe.config.mc->paths;
        mc.steps_per_year = pipe.config.mc->steps_per_year;
        mc.seed = pipe.config.mc->seed;
    }
    mc.spot = pipe.config.model.spot;
    mc.diffusion = pipe.diffusion;
    mc.clock = pipe.config.model.clock;
    return mc;
}

std::vector<PriceRow> spectral_prices(const Pipeline& pipe) {
    const PayoffConfig& pc = pipe.config.payoffs;
    const Eigen::Index spot = static_cast<Eigen::Index>(pipe.grid.spot_index);
    std::vector<PriceRow> rows;
    for (const auto& art : pipe.schemes) {
        for (double t : pc.maturities) {
            const JointLaw law =
                art.cache->joint_law(spot, t, pipe.config.matching.tail_guard);
            const Eigen::VectorXd marginal = law.accumulator_marginal();
            for (PayoffKind kind : pc.kinds) {
                PayoffSpec payoff{kind, t, 1.0, pc.discount_rate};
                if (kind == PayoffKind::variance_call) {
                    for (double q : pc.call_moneyness) {
                        payoff.moneyness = q;
                        rows.push_back(PriceRow{kind, t, art.scheme.k, q,
                                                price(marginal, art.alpha, payoff),
                                                std::nullopt});
                    }
                } else {
                    rows.push_back(PriceRow{kind, t, art.scheme.k, 0.0,
                                            price(marginal, art.alpha, payoff),
                                            std::nullopt});
                }
            }
        }
    }
    return rows;
}

void attach_mc(const Pipeline& pipe, std::vector<PriceRow>& rows) {
    const McConfig mc = mc_config(pipe);
    const PayoffConfig& pc = pipe.config.payoffs;
    std::vector<double> maturities = pc.maturities;
    std::sort(maturities.begin(), maturities.end());
    maturities.erase(std::unique(maturities.begin(), maturities.end()),
                     maturities.end());
    for (double t : maturities) {
        const McSample sample = simulate(mc, t, pipe.corridor);
        for (PriceRow& row : rows) {
            if (row.maturity != t) continue;
            PayoffSpec payoff{row.kind, t,
                              row.kind == PayoffKind::variance_call ? row.moneyness
                                                                    : 1.0,
                              pc.discount_rate};
            row.mc = estimate_from_sample(sample, payoff);
        }
    }
}

std::vector<PriceRow> mc_prices(const Pipeline& pipe) {
    const PayoffConfig& pc = pipe.config.payoffs;
    const McConfig mc = mc_config(pipe);
    std::vector<PriceRow> rows;
    for (double t : pc.maturities) {
        const McSample sample = simulate(mc, t, pipe.corridor);
        for (PayoffKind kind : pc.kinds) {
            PayoffSpec payoff{kind, t, 1.0, pc.discount_rate};
            if (kind == PayoffKind::variance_call) {
                for (double q : pc.call_moneyness) {
                    payoff.moneyness = q;
                    PriceRow row{kind, t, 0, q, 0.0,
                                 estimate_from_sample(sample, payoff)};
                    rows.push_back(row);
                }
            } else {
                PriceRow row{kind, t, 0, 0.0, 0.0,
                             estimate_from_sample(sample, payoff)};
                rows.push_back(row);
            }
        }
    }
    return rows;
}

std::vector<VanillaRow> vanilla_table(const Pipeline& pipe) {
    if (!pipe.config.vanillas) return {};
    const VanillaConfig& vc = *pipe.config.vanillas;
    const double rate = pipe.config.model.rate;
    const double spot = pipe.config.model.spot;
    const Eigen::Index spot_idx = static_cast<Eigen::Index>(pipe.grid.spot_index);

    // The chain mean grows at gamma (or -phi(-gamma) once subordinated).
    // Pricing is under the mean-correcting martingale measure: the asset
    // is exp(makeup * t) times the chain, so discounted vanilla prices
    // honor E[S_T] = spot * e^{rT} for any configured drift.  makeup = 0
    // whenever the drift already makes the discounted chain a martingale.
    double mean_growth = pipe.diffusion.gamma;
    if (pipe.config.model.clock && !pipe.config.model.clock->is_identity())
        mean_growth = -pipe.config.model.clock->phi(-pipe.diffusion.gamma);
    const double makeup = rate - mean_growth;

    std::vector<VanillaRow> rows;
    for (double t : vc.maturities) {
        const Eigen::MatrixXd P = semigroup(pipe.gen, t);
        const double factor = std::exp(makeup * t);
        for (double strike : vc.strikes) {
            const double grown =
                vc.grow_strikes ? strike * std::exp(rate * t) : strike;
            const double effective = grown / factor;
            double value = 0.0;
            for (Eigen::Index y = 0; y < pipe.gen.size(); ++y)
                value += P(spot_idx, y) *
                         std::max(
                             pipe.grid[static_cast<std::size_t>(y)] - effective,
                             0.0);
            value *= factor * std::exp(-rate * t);
            const double iv = implied_vol(value, spot, grown, rate, t);
            rows.push_back(VanillaRow{strike, grown, t, value, iv});
        }
    }
    return rows;
}

void write_prices_csv(const std::string& path, const std::vector<PriceRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << std::setprecision(12);
    out << "payoff,T,k,spectral_price,mc_price,mc_stderr,abs_diff\n";
    for (const auto& row : rows) {
        out << kind_name(row.kind);
        if (row.kind == PayoffKind::variance_call) out << '@' << row.moneyness;
        out << ',' << row.maturity << ',';
        if (row.k > 0) out << row.k;
        out << ',';
        if (row.k > 0) out << row.spectral;
        out << ',';
        if (row.mc) out << row.mc->value << ',' << row.mc->std_error << ',';
        else out << ",,";
        if (row.mc && row.k > 0) out << std::abs(row.spectral - row.mc->value);
        out << '\n';
    }
}

void write_vanillas_csv(const std::string& path,
                        const std::vector<VanillaRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << std::setprecision(12);
    out << "strike,grown_strike,maturity,price,implied_vol\n";
    for (const auto& row : rows)
        out << row.strike << ',' << row.grown_strike << ',' << row.maturity << ','
            << row.price << ',' << row.implied_vol << '\n';
}

void write_feasibility_csv(const std::string& path, const Pipeline& pipe) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << std::setprecision(12);
    out << "k,n,m,alpha,region_first,region_last,degraded_states,admissible\n";
    for (const auto& art : pipe.schemes) {
        out << art.scheme.k << ',' << art.scheme.n << ',' << art.scheme.m << ','
            << art.alpha << ',' << pipe.region.first << ',' << pipe.region.last
            << ',' << art.profile.degraded_count() << ',';
        if (art.feasibility) {
            bool first = true;
            for (const auto& [lo, hi] : art.feasibility->admissible) {
                if (!first) out << '|';
                out << lo << ':' << hi;
                first = false;
            }
        }
        out << '\n';
    }
}

void write_law_csvs(const std::string& outdir, const Pipeline& pipe) {
    const Eigen::Index spot = static_cast<Eigen::Index>(pipe.grid.spot_index);
    for (const auto& art : pipe.schemes) {
        for (double t : pipe.config.payoffs.maturities) {
            const JointLaw law =
                art.cache->joint_law(spot, t, pipe.config.matching.tail_guard);
            const Eigen::VectorXd marginal = law.accumulator_marginal();
            std::ostringstream name;
            name << outdir << "/law_k" << art.scheme.k << "_T"
                 << format_maturity(t) << ".csv";
            std::ofstream out(name.str());
            if (!out) throw std::runtime_error("cannot write " + name.str());
            out << std::setprecision(12);
            out << "position,accumulated,annualized,probability\n";
            for (Eigen::Index d = 0; d < marginal.size(); ++d) {
                const double acc = art.alpha * static_cast<double>(d);
                out << d << ',' << acc << ',' << acc / t << ',' << marginal[d]
                    << '\n';
            }
        }
    }
}

int cmd_validate(const RunConfig& cfg, long pilot_paths, std::ostream& out) {
    out << "drift: " << resolved_drift(cfg.model) << "\n";
    const StateGrid grid = build_grid(cfg.grid);
    const DiffusionSpec diffusion{cfg.model.sigma0, cfg.model.beta,
                                  resolved_drift(cfg.model), cfg.model.spot};
    GeneratorMatrix gen = build_diffusion_generator(grid, diffusion);
    if (cfg.model.clock && !cfg.model.clock->is_identity())
        gen = subordinate(gen, *cfg.model.clock);
    out << "grid: " << grid.size() << " states on [" << grid[0] << ", "
        << grid[grid.size() - 1] << "], anchor index " << grid.spot_index << "\n";

    int max_k = 1;
    for (const auto& s : cfg.matching.schemes) max_k = std::max(max_k, s.k);
    const Corridor corridor = cfg.corridor.value_or(Corridor::full());
    const MomentTable moments = corridor_moments(gen, corridor, max_k);
    const Region region = resolve_region(cfg, grid, gen);
    out << "region: states " << region.first << ".." << region.last << " ("
        << grid[static_cast<std::size_t>(region.first)] << ".."
        << grid[static_cast<std::size_t>(region.last)] << ")\n";

    double mean_accumulated = -1.0;
    if (cfg.mc) {
        McConfig mc;
        mc.paths = std::min(pilot_paths, cfg.mc->paths);
        mc.steps_per_year = cfg.mc->steps_per_year;
        mc.seed = cfg.mc->seed;
        mc.spot = cfg.model.spot;
        mc.diffusion = diffusion;
        mc.clock = cfg.model.clock;
        const double horizon = *std::max_element(cfg.payoffs.maturities.begin(),
                                                 cfg.payoffs.maturities.end());
        const McSample sample = simulate(mc, horizon, corridor);
        mean_accumulated =
            kahan_sum(sample.accumulated) / static_cast<double>(mc.paths);
        out << "pilot mean accumulated variance at T=" << horizon << ": "
            << mean_accumulated << " (" << mc.paths << " paths)\n";
    }

    bool ok = true;
    for (const auto& s : cfg.matching.schemes) {
        out << "scheme k=" << s.k;
        if (s.k >= 2) out << " n=" << s.n;
        if (s.k == 3) out << " m=" << s.m;
        try {
            std::optional<FeasibilityReport> rep;
            if (s.k >= 2) {
                rep = scheme_feasibility(s, moments, region);
                out << " admissible:";
                if (rep->admissible.empty()) out << " (none)";
                for (const auto& [lo, hi] : rep->admissible)
                    out << " [" << lo << ", " << hi << "]";
            }
            const double alpha = resolve_alpha(s, rep);
            out << " alpha=" << alpha;
            const IntensityProfile prof =
                match_scheme(s, moments, alpha, cfg.matching.C, region);
            if (const Eigen::Index deg = prof.degraded_count(); deg > 0) {
                out << " (order degrades at " << deg << "/" << region.size()
                    << " region states)";
                if (s.strict) ok = false;
            }
            if (const Eigen::Index quiet = prof.quiet_count(); quiet > 0)
                out << " (" << quiet << " region states carry no jump mass)";
            if (mean_accumulated >= 0.0) {
                validate_circle(alpha, cfg.matching.C, mean_accumulated,
                                cfg.matching.circle_multiple);
                out << " lattice span " << 2 * cfg.matching.C * alpha
                    << " covers " << cfg.matching.circle_multiple
                    << "x pilot mean";
            }
            out << "\n";
        } catch (const std::exception& e) {
            out << " ERROR: " << e.what() << "\n";
            ok = false;
        }
    }
    out << (ok ? "configuration is consistent\n"
               : "configuration has problems (see above)\n");
    return ok ? 0 : 1;
}

namespace {

void print_price_summary(const std::vector<PriceRow>& rows, std::ostream& out) {
    out << std::fixed << std::setprecision(4);
    for (const auto& row : rows) {
        out << std::left << std::setw(16) << kind_name(row.kind) << " T="
            << row.maturity;
        if (row.k > 0) out << " k=" << row.k;
        if (row.kind == PayoffKind::variance_call)
            out << " q=" << row.moneyness;
        if (row.k > 0) out << "  value=" << 100.0 * row.spectral << "%";
        if (row.mc)
            out << "  mc=" << 100.0 * row.mc->value << "% (se "
                << 100.0 * row.mc->std_error << "%)";
        out << "\n";
    }
    out.unsetf(std::ios::fixed);
    out << std::setprecision(6);
}

} // namespace

int cmd_run(const RunConfig& cfg, const std::string& outdir, bool with_mc,
            std::ostream& out) {
    namespace fs = std::filesystem;
    fs::create_directories(outdir);

    const auto t0 = std::chrono::steady_clock::now();
    Pipeline pipe = build_pipeline(cfg);
    const auto t1 = std::chrono::steady_clock::now();
    std::vector<PriceRow> rows = spectral_prices(pipe);
    const auto t2 = std::chrono::steady_clock::now();
    if (with_mc && cfg.mc) attach_mc(pipe, rows);
    const auto t3 = std::chrono::steady_clock::now();

    write_prices_csv(outdir + "/prices.csv", rows);
    write_feasibility_csv(outdir + "/feasibility.csv", pipe);
    write_law_csvs(outdir, pipe);
    const std::vector<VanillaRow> vans = vanilla_table(pipe);
    if (!vans.empty()) write_vanillas_csv(outdir + "/vanilla_iv.csv", vans);
    {
        // Echo the config with every "auto" field pinned to its resolved
        // value so a rerun from this file reproduces the CSVs bit for bit.
        RunConfig resolved = cfg;
        resolved.model.drift_auto = false;
        resolved.model.drift = pipe.diffusion.gamma;
        resolved.matching.region.automatic = false;
        resolved.matching.region.lower =
            pipe.grid[static_cast<std::size_t>(pipe.region.first)];
        resolved.matching.region.upper =
            pipe.grid[static_cast<std::size_t>(pipe.region.last)];
        for (std::size_t i = 0; i < resolved.matching.schemes.size(); ++i) {
            resolved.matching.schemes[i].policy = AlphaPolicy::fixed;
            resolved.matching.schemes[i].alpha = pipe.schemes[i].alpha;
        }
        std::ofstream echo(outdir + "/resolved_config.yaml");
        echo << echo_config(resolved);
    }

    print_price_summary(rows, out);
    using ms = std::chrono::milliseconds;
    out << "setup " << std::chrono::duration_cast<ms>(t1 - t0).count()
        << " ms, spectral pricing "
        << std::chrono::duration_cast<ms>(t2 - t1).count() << " ms";
    if (with_mc && cfg.mc)
        out << ", Monte Carlo "
            << std::chrono::duration_cast<ms>(t3 - t2).count() << " ms";
    out << "\nresults in " << outdir << "\n";
    return 0;
}

int cmd_mc(const RunConfig& cfg, const std::string& outdir, std::ostream& out) {
    namespace fs = std::filesystem;
    if (!cfg.mc)
        throw std::runtime_error("configuration has no mc block");
    fs::create_directories(outdir);
    Pipeline pipe;
    pipe.config = cfg;
    pipe.grid = build_grid(cfg.grid);
    pipe.diffusion = DiffusionSpec{cfg.model.sigma0, cfg.model.beta,
                                   resolved_drift(cfg.model), cfg.model.spot};
    pipe.corridor = cfg.corridor.value_or(Corridor::full());
    const std::vector<PriceRow> rows = mc_prices(pipe);
    write_prices_csv(outdir + "/mc_prices.csv", rows);
    print_price_summary(rows, out);
    out << "results in " << outdir << "\n";
    return 0;
}

} // namespace cvol
