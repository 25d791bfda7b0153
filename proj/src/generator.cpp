#include "cvol/generator.hpp"

#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

#include "cvol/linalg.hpp"

namespace cvol {

double DiffusionSpec::vol(double x) const {
    return sigma0 * std::pow(x / s0, beta - 1.0);
}

double DiffusionSpec::variance_rate(double x) const {
    const double v = vol(x);
    return v * v * x * x;
}

double BernsteinSpec::phi(double lambda) const {
    if (nu == 0.0) return mu * lambda;
    if (lambda <= -mu / nu)
        throw std::domain_error("BernsteinSpec::phi: argument " +
                                std::to_string(lambda) +
                                " at or below the domain boundary " +
                                std::to_string(-mu / nu));
    return mu * mu / nu * std::log1p(lambda * nu / mu);
}

std::complex<double> BernsteinSpec::phi(std::complex<double> lambda) const {
    if (nu == 0.0) return mu * lambda;
    const std::complex<double> w = 1.0 + lambda * (nu / mu);
    if (w.real() <= 0.0 && w.imag() == 0.0)
        throw std::domain_error(
            "BernsteinSpec::phi: eigenvalue maps onto the branch cut "
            "(real part " + std::to_string(lambda.real()) + ")");
    return mu * mu / nu * std::log(w);
}

GeneratorMatrix build_diffusion_generator(const StateGrid& grid,
                                          const DiffusionSpec& spec) {
    const Eigen::Index n = static_cast<Eigen::Index>(grid.size());
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);

    for (Eigen::Index i = 1; i + 1 < n; ++i) {
        const double x = grid[i];
        const double hm = grid[i - 1] - x;  // negative
        const double hp = grid[i + 1] - x;  // positive
        const double drift = spec.gamma * x;
        const double var = spec.variance_rate(x);
        // Two-by-two solve of  a*hm + b*hp = drift,  a*hm^2 + b*hp^2 = var.
        const double denom_m = hm * (hp - hm);
        const double denom_p = hp * (hp - hm);
        const double a = (drift * hp - var) / denom_m;
        const double b = (var - drift * hm) / denom_p;
        const double tol = 1e-14 * (std::abs(drift * hp) + var) /
                           std::min(std::abs(denom_m), denom_p);
        for (auto [val, j] : {std::pair{a, i - 1}, std::pair{b, i + 1}}) {
            if (val < -tol) {
                std::ostringstream msg;
                msg << "build_diffusion_generator: negative intensity "
                    << val << " toward neighbor " << j << " at state " << i
                    << " (x = " << x << "); the drift dominates the local "
                    << "variance at this spacing, refine the grid";
                throw std::runtime_error(msg.str());
            }
            L(i, j) = std::max(val, 0.0);
        }
        L(i, i) = -(L(i, i - 1) + L(i, i + 1));
    }

    // Boundary rows carry the drift toward the single interior neighbor
    // when the sign allows; otherwise the state is absorbing.
    const double b0 = spec.gamma * grid[0] / (grid[1] - grid[0]);
    if (b0 > 0.0) {
        L(0, 1) = b0;
        L(0, 0) = -b0;
    }
    const double an = spec.gamma * grid[n - 1] / (grid[n - 2] - grid[n - 1]);
    if (an > 0.0) {
        L(n - 1, n - 2) = an;
        L(n - 1, n - 1) = -an;
    }

    return GeneratorMatrix{std::move(L), grid};
}

GeneratorMatrix subordinate(const GeneratorMatrix& gen,
                            const BernsteinSpec& bern, double cond_cap) {
    if (bern.is_identity()) return gen;

    const EigDecomp ed = eig(gen.entries.cast<std::complex<double>>());
    if (ed.cond > cond_cap)
        throw std::runtime_error(
            "subordinate: eigenvector basis condition number " +
            std::to_string(ed.cond) + " exceeds " + std::to_string(cond_cap) +
            "; the generator is too close to defective");

    Eigen::VectorXcd mapped(ed.values.size());
    for (Eigen::Index i = 0; i < ed.values.size(); ++i)
        mapped[i] = -bern.phi(-ed.values[i]);

    const Eigen::MatrixXd raw =
        (ed.vectors * mapped.asDiagonal() * ed.vectors_inv).real();

    const Eigen::Index n = raw.rows();
    Eigen::MatrixXd out = raw;
    for (Eigen::Index i = 0; i < n; ++i) {
        double off_sum = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            double v = out(i, j);
            if (v < 0.0) {
                if (v <= -1e-10) {
                    std::ostringstream msg;
                    msg << "subordinate: off-diagonal entry " << v
                        << " at (" << i << ", " << j
                        << ") is too negative to be round-off";
                    throw std::runtime_error(msg.str());
                }
                v = 0.0;
                out(i, j) = 0.0;
            }
            off_sum += v;
        }
        out(i, i) = -off_sum;
    }
    return GeneratorMatrix{std::move(out), gen.grid};
}

double risk_neutral_drift(const BernsteinSpec& bern, double r) {
    if (bern.nu == 0.0) return r / bern.mu;
    return -(bern.mu / bern.nu) * std::expm1(-r * bern.nu / (bern.mu * bern.mu));
}

Eigen::MatrixXd semigroup(const GeneratorMatrix& gen, double t) {
    return expm(gen.entries, t);
}

Eigen::VectorXd price_vanilla(const GeneratorMatrix& gen, double t,
                              double strike, double rate, OptionKind kind) {
    const Eigen::Index n = gen.size();
    Eigen::VectorXd payoff(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double s = gen.grid[static_cast<std::size_t>(i)];
        payoff[i] = kind == OptionKind::call ? std::max(s - strike, 0.0)
                                             : std::max(strike - s, 0.0);
    }
    return std::exp(-rate * t) * (semigroup(gen, t) * payoff);
}

} // namespace cvol
