#ifndef CVOL_RUN_HPP
#define CVOL_RUN_HPP

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cvol/config.hpp"
#include "cvol/intensity.hpp"
#include "cvol/monte_carlo.hpp"
#include "cvol/spectral.hpp"

namespace cvol {

/** One matching scheme, resolved and ready to price. */
struct SchemeArtifacts {
    SchemeConfig scheme;
    double alpha = 0.0;  // resolved pitch
    std::optional<FeasibilityReport> feasibility;
    IntensityProfile profile;
    std::unique_ptr<SpectralCache> cache;
};

/** Everything assembled from a configuration, up to the pricing caches. */
struct Pipeline {
    RunConfig config;
    StateGrid grid;
    DiffusionSpec diffusion{};
    GeneratorMatrix gen;
    Corridor corridor;
    Region region;
    MomentTable moments;
    std::vector<SchemeArtifacts> schemes;
};

Pipeline build_pipeline(const RunConfig& cfg);

/** Monte Carlo setup mirroring the pipeline's model block. */
McConfig mc_config(const Pipeline& pipe);

struct PriceRow {
    PayoffKind kind = PayoffKind::variance_swap;
    double maturity = 0.0;
    int k = 0;
    double moneyness = 0.0;  // only meaningful for calls
    double spectral = 0.0;
    std::optional<McEstimate> mc;
};

/** Spectral prices for every configured (payoff, scheme, maturity) cell. */
std::vector<PriceRow> spectral_prices(const Pipeline& pipe);

/** Fill in the Monte Carlo columns (one simulation per maturity). */
void attach_mc(const Pipeline& pipe, std::vector<PriceRow>& rows);

/** Monte Carlo-only price rows (no spectral column). */
std::vector<PriceRow> mc_prices(const Pipeline& pipe);

struct VanillaRow {
    double strike = 0.0;        // quoted strike
    double grown_strike = 0.0;  // strike actually paid at maturity
    double maturity = 0.0;
    double price = 0.0;
    double implied_vol = 0.0;
};

std::vector<VanillaRow> vanilla_table(const Pipeline& pipe);

void write_prices_csv(const std::string& path, const std::vector<PriceRow>& rows);
void write_vanillas_csv(const std::string& path,
                        const std::vector<VanillaRow>& rows);
void write_feasibility_csv(const std::string& path, const Pipeline& pipe);
void write_law_csvs(const std::string& outdir, const Pipeline& pipe);

/**
 * Resolve the configuration, report grid/region/feasibility choices and
 * check the variance lattice against a pilot simulation.  Returns a
 * process exit code.
 */
int cmd_validate(const RunConfig& cfg, long pilot_paths, std::ostream& out);

/** Price spectrally (and with Monte Carlo when with_mc), writing CSVs. */
int cmd_run(const RunConfig& cfg, const std::string& outdir, bool with_mc,
            std::ostream& out);

/** Monte Carlo only. */
int cmd_mc(const RunConfig& cfg, const std::string& outdir, std::ostream& out);

} // namespace cvol

#endif // CVOL_RUN_HPP
