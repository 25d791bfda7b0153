#ifndef CVOL_GENERATOR_HPP
#define CVOL_GENERATOR_HPP

#include <Eigen/Dense>

#include "cvol/grid.hpp"

namespace cvol {

/**
 * Intensity matrix of the approximating chain over a state grid.
 * Row sums are zero and off-diagonal entries are nonnegative; both are
 * enforced at construction time by the builders below.
 */
struct GeneratorMatrix {
    Eigen::MatrixXd entries;
    StateGrid grid;

    Eigen::Index size() const { return entries.rows(); }
};

/**
 * Local-volatility diffusion dS/S = gamma dt + sigma(S/s0) dW with the
 * power-law volatility sigma(s) = sigma0 * s^(beta-1).  beta = 1 gives a
 * constant-volatility (lognormal) diffusion.
 */
struct DiffusionSpec {
    double sigma0;
    double beta;
    double gamma;  // drift rate; equals the risk-free rate under pricing
    double s0;     // normalizing level inside the volatility argument

    double vol(double x) const;        // sigma0 * (x/s0)^(beta-1)
    double variance_rate(double x) const;  // vol(x)^2 * x^2
};

/**
 * Laplace exponent of a gamma subordinator with mean rate mu and
 * variance rate nu: phi(lambda) = (mu^2/nu) * log(1 + lambda*nu/mu),
 * defined on (-mu/nu, infinity).  nu = 0 is accepted as the
 * deterministic-time limit phi(lambda) = mu*lambda.
 */
struct BernsteinSpec {
    double mu = 1.0;
    double nu = 0.0;

    double phi(double lambda) const;
    std::complex<double> phi(std::complex<double> lambda) const;
    bool is_identity() const { return nu == 0.0 && mu == 1.0; }
};

/**
 * Build the tridiagonal generator whose rows match, state by state, the
 * instantaneous drift gamma*x and variance sigma(x/s0)^2*x^2 of the
 * diffusion.  Interior rows solve the 2x2 system on the two neighbors;
 * boundary rows match the drift alone with their single neighbor when
 * that is possible with a nonnegative intensity, and are left absorbing
 * when the drift points out of the grid.
 *
 * Throws std::runtime_error naming the offending state if an interior
 * solve produces a negative intensity (drift-dominated spacing: refine
 * the grid).
 */
GeneratorMatrix build_diffusion_generator(const StateGrid& grid,
                                          const DiffusionSpec& spec);

/**
 * Subordinate a chain by an independent gamma time change: the new
 * generator is -U phi(-Lambda) U^{-1} over the eigendecomposition
 * L = U Lambda U^{-1}.  Off-diagonal entries in (-1e-10, 0) produced by
 * round-off are clipped to zero and the diagonal recomputed; anything
 * more negative is an error, as is an eigenvector basis with condition
 * number above cond_cap or an eigenvalue falling outside the domain of
 * phi.
 */
GeneratorMatrix subordinate(const GeneratorMatrix& gen,
                            const BernsteinSpec& bern,
                            double cond_cap = 1e8);

/**
 * Drift that makes the subordinated process a martingale after
 * discounting: solves r = -phi(-gamma), which for the gamma subordinator
 * gives gamma = (mu/nu) * (1 - exp(-r*nu/mu^2)).
 */
double risk_neutral_drift(const BernsteinSpec& bern, double r);

/** Transition matrix exp(t L); rows are probability distributions. */
Eigen::MatrixXd semigroup(const GeneratorMatrix& gen, double t);

enum class OptionKind { call, put };

/**
 * Discounted vanilla price per initial state:
 * e^{-r t} * sum_y exp(tL)(x,y) * payoff(y).
 */
Eigen::VectorXd price_vanilla(const GeneratorMatrix& gen, double t,
                              double strike, double rate, OptionKind kind);

} // namespace cvol

#endif // CVOL_GENERATOR_HPP
