#ifndef CVOL_INTENSITY_HPP
#define CVOL_INTENSITY_HPP

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cvol/corridor.hpp"
#include "cvol/grid.hpp"

namespace cvol {

/**
 * Sum of l^j for l = from+1 .. to (tier convention: a tier labelled
 * (a, c] contains the jump sizes a+1 through c).  Exact closed forms.
 */
double tier_power_sum(int j, int from, int to);

/** Contiguous index range [first, last] of states where moments are matched. */
struct Region {
    Eigen::Index first = 0;
    Eigen::Index last = 0;

    bool contains(Eigen::Index i) const { return i >= first && i <= last; }
    Eigen::Index size() const { return last - first + 1; }
    /** Index of the nearest in-region state (used for constant extension). */
    Eigen::Index nearest(Eigen::Index i) const {
        return i < first ? first : (i > last ? last : i);
    }
};

/** States whose price lies inside [lo, hi]. */
Region region_from_bounds(const StateGrid& grid, double lo, double hi);

/**
 * States the chain actually visits: those carrying transition mass above
 * mass_tol in the row of exp(horizon * L) started from x0.
 */
Region region_from_mass(const GeneratorMatrix& gen, Eigen::Index x0,
                        double horizon, double mass_tol = 1e-6);

/**
 * Admissible lattice pitches for a tiered intensity profile.  For two
 * matched moments the per-state constraints intersect to a single
 * interval; for three they form a union of disjoint closed intervals.
 */
struct FeasibilityReport {
    int k = 0;
    int n = 0;
    int m = 0;
    Region region;
    std::vector<std::pair<double, double>> admissible;  // sorted, disjoint
    Eigen::Index binding_low = -1;   // state fixing the lower endpoint (k = 2)
    Eigen::Index binding_high = -1;  // state fixing the upper endpoint (k = 2)

    bool feasible() const { return !admissible.empty(); }
    bool allows(double alpha) const;
    /**
     * Default pitch: geometric mean of the interval when two moments are
     * matched, midpoint of the widest interval when three are.
     */
    double suggest() const;
    /** Smallest admissible pitch (finest variance resolution). */
    double min_feasible() const;
};

struct FeasibilityError : std::runtime_error {
    FeasibilityReport report;
    FeasibilityError(const std::string& what, FeasibilityReport rep)
        : std::runtime_error(what), report(std::move(rep)) {}
};

FeasibilityReport feasibility_k2(const MomentTable& moments, int n,
                                 const Region& region);
FeasibilityReport feasibility_k3(const MomentTable& moments, int n, int m,
                                 const Region& region);

/**
 * Per-state jump intensities of the compound-Poisson variance
 * accumulator on the lattice {0, alpha, ..., 2C alpha}.  Jumps of size 1
 * arrive at rate lambda1; each size in {2..n} at rate lambdaN; each size
 * in {n+1..m} at rate lambdaM (unused tiers are zero).  `matched[x]`
 * records how many conditional moments are reproduced exactly at state
 * x: the nominal order k where the pitch is admissible there, fewer at
 * states where nonnegativity forces a lower order, and 0 at quiet
 * states — those whose first moment sits so far below the region's
 * largest (1e-10 relative) that it is numerical noise; such states get
 * zero intensities and constrain nothing.
 */
struct IntensityProfile {
    double alpha = 0.0;
    int C = 0;
    int k = 0;
    int n = 0;
    int m = 0;
    Region region;
    Eigen::VectorXd lambda1, lambdaN, lambdaM;
    Eigen::VectorXi matched;

    int circle() const { return 2 * C + 1; }
    int max_jump() const { return k == 1 ? 1 : (k == 2 ? n : m); }
    double intensity(Eigen::Index state, int size) const;
    double total_rate(Eigen::Index state) const;
    /** alpha^j * sum_d d^j * lambda_d(state): the moment the profile encodes. */
    double reconstructed_moment(Eigen::Index state, int j) const;
    /** In-region states where fewer than k moments could be matched
     *  (excluding quiet states, which have nothing to match). */
    std::vector<Eigen::Index> degraded_states() const;
    Eigen::Index degraded_count() const;
    /** In-region states carrying no resolvable jump mass (matched == 0). */
    Eigen::Index quiet_count() const;
};

/**
 * Moment-matched profiles.  Inside the region the stated number of
 * conditional moments is reproduced exactly (relative residual below
 * 1e-9, enforced) wherever the pitch is admissible for that state; at
 * states where the exact solve turns an intensity negative, the order
 * degrades (k -> k-1 -> ... -> 1; one moment is always matchable) and
 * `matched` records the order achieved.  Quiet states (first moment
 * below 1e-10 of the region's largest) are left jump-free with
 * matched = 0 for k >= 2, since moment ratios there are dominated by
 * round-off.  Outside the region, intensities extend constantly from
 * the nearest in-region state.
 */
IntensityProfile match_k1(const MomentTable& moments, double alpha, int C,
                          const Region& region);
IntensityProfile match_k2(const MomentTable& moments, double alpha, int n, int C,
                          const Region& region);
IntensityProfile match_k3(const MomentTable& moments, double alpha, int n, int m,
                          int C, const Region& region);

/**
 * Check that the variance lattice spans the mass of the accumulated
 * variance: requires 2*C*alpha > multiple * mean_accumulated_variance.
 * Throws std::runtime_error with the implied minimal C otherwise.
 */
void validate_circle(double alpha, int C, double mean_accumulated_variance,
                     double multiple = 3.0);

} // namespace cvol

#endif // CVOL_INTENSITY_HPP
