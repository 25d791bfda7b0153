#ifndef CVOL_SPECTRAL_HPP
#define CVOL_SPECTRAL_HPP

#include <vector>

#include <Eigen/Dense>

#include "cvol/circulant.hpp"
#include "cvol/linalg.hpp"
#include "cvol/payoff.hpp"

namespace cvol {

/**
 * Joint distribution of (chain state, accumulated variance) at one
 * horizon: masses(y, d) = P(X_t = y, I_t = alpha * d | X_0 = x0).
 */
struct JointLaw {
    Eigen::MatrixXd masses;  // states x lattice positions
    double alpha = 0.0;
    double t = 0.0;
    Eigen::Index x0 = 0;

    Eigen::VectorXd state_marginal() const { return masses.rowwise().sum(); }
    Eigen::VectorXd accumulator_marginal() const { return masses.colwise().sum(); }
    double mean_accumulated() const;
};

/**
 * Pricing engine for claims on the accumulated variance.  Construction
 * eigendecomposes the C+1 independent Fourier slices of the lifted
 * generator (the remaining C are their conjugates); each subsequent law
 * or price is then a matter of scaling eigenvalues.
 */
/** Default cap on the accumulator mass allowed to reach the lattice top. */
inline constexpr double kTailGuard = 1e-4;

class SpectralCache {
  public:
    SpectralCache(GeneratorMatrix gen, IntensityProfile prof,
                  double cond_cap = kExpmCondCap);

    const GeneratorMatrix& generator() const { return gen_; }
    const IntensityProfile& profile() const { return prof_; }
    int circle() const { return prof_.circle(); }
    double alpha() const { return prof_.alpha; }

    /**
     * Full joint law at horizon t.  Checks that the law is a probability
     * distribution (entries >= -1e-10, clipped; total mass 1 within
     * 1e-8), that summing out the accumulator reproduces the chain's own
     * transition row (1e-8), and that the top max_jump+1 lattice
     * positions carry at most tail_guard mass, so the accumulator has
     * not wrapped around the circle materially; wrapping demands a
     * larger C.  The default guard tolerates the tiny boundary-absorbed
     * mass that fat-tailed models push past any practical span; it is
     * far below the level that would move a quote by a basis point.
     */
    JointLaw joint_law(Eigen::Index x0, double t, double tail_guard = kTailGuard) const;

    /**
     * Law of the accumulator alone, one row per initial state.  Same
     * mass and tail checks as joint_law, applied per row.
     */
    Eigen::MatrixXd accumulator_laws(double t, double tail_guard = kTailGuard) const;

    /** Accumulator law for a single initial state. */
    Eigen::VectorXd accumulator_law(Eigen::Index x0, double t,
                                    double tail_guard = kTailGuard) const;

    double price(const PayoffSpec& payoff, Eigen::Index x0,
                 double tail_guard = kTailGuard) const;
    Eigen::VectorXd price_per_state(const PayoffSpec& payoff,
                                    double tail_guard = kTailGuard) const;

  private:
    GeneratorMatrix gen_;
    IntensityProfile prof_;
    std::vector<EigDecomp> slices_;  // j = 0..C
};

/** Value of the claim against an explicit accumulator law. */
double price(const Eigen::VectorXd& accumulator_law, double alpha,
             const PayoffSpec& payoff);
double price(const JointLaw& law, const PayoffSpec& payoff);

/**
 * First and second derivatives of a per-state value vector with respect
 * to the (non-uniformly spaced) state coordinate: three-point stencils
 * that are exact on quadratics, one-sided at the edges.
 */
struct Greeks {
    Eigen::VectorXd delta;
    Eigen::VectorXd gamma;
};
Greeks greeks(const Eigen::VectorXd& values, const StateGrid& grid);

} // namespace cvol

#endif // CVOL_SPECTRAL_HPP
