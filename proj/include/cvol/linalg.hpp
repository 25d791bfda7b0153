#ifndef CVOL_LINALG_HPP
#define CVOL_LINALG_HPP

#include <Eigen/Dense>

namespace cvol {

/**
 * Eigendecomposition M = V diag(values) V^{-1} together with a cheap
 * 1-norm estimate of the eigenvector condition number.  The inverse is
 * stored explicitly because callers reuse the same basis many times
 * (semigroups at several maturities, Bernstein transforms, spectral
 * caches), which turns repeated solves into matrix products.
 */
struct EigDecomp {
    Eigen::VectorXcd values;
    Eigen::MatrixXcd vectors;
    Eigen::MatrixXcd vectors_inv;
    double cond = 0.0;  // ||V||_1 * ||V^{-1}||_1

    /** exp(t M) reassembled from the cached basis. */
    Eigen::MatrixXcd exp(double t) const;

    /** Row x of exp(t M); costs two matrix-vector products. */
    Eigen::RowVectorXcd exp_row(Eigen::Index x, double t) const;

    /** exp(t M) * v. */
    Eigen::VectorXcd exp_apply(const Eigen::VectorXcd& v, double t) const;
};

/** Dense complex eigendecomposition; throws std::runtime_error on failure. */
EigDecomp eig(const Eigen::MatrixXcd& M);

/** Default eigenvector conditioning cap before expm falls back to Padé. */
inline constexpr double kExpmCondCap = 1e8;

/**
 * Matrix exponential exp(t M).
 *
 * Uses the eigendecomposition when the eigenvector basis is well
 * conditioned (cond below the cap) so that the same code path as the
 * production pricer is exercised; otherwise falls back to
 * scaling-and-squaring with Pade approximants, which is backward stable
 * for any square matrix.
 */
Eigen::MatrixXd expm(const Eigen::MatrixXd& M, double t,
                     double cond_cap = kExpmCondCap);
Eigen::MatrixXcd expm(const Eigen::MatrixXcd& M, double t,
                      double cond_cap = kExpmCondCap);

/** Scaling-and-squaring Pade exponential, no eigendecomposition involved. */
Eigen::MatrixXd expm_pade(const Eigen::MatrixXd& M);
Eigen::MatrixXcd expm_pade(const Eigen::MatrixXcd& M);

} // namespace cvol

#endif // CVOL_LINALG_HPP
