#ifndef CVOL_CIRCULANT_HPP
#define CVOL_CIRCULANT_HPP

#include <Eigen/Dense>

#include "cvol/generator.hpp"
#include "cvol/intensity.hpp"

namespace cvol {

/**
 * Eigenvalues of the circulant matrix with given first row:
 * lambda_r = sum_k c_k exp(-i 2 pi r k / n), r = 0..n-1.
 */
Eigen::VectorXcd circulant_eigenvalues(const Eigen::VectorXd& first_row);

/**
 * Unitary eigenvector basis shared by all n x n circulants: column r is
 * y_r(j) = exp(-i 2 pi r j / n) / sqrt(n).
 */
Eigen::MatrixXcd circulant_eigenvectors(int n);

/** Dense circulant built from its first row. */
Eigen::MatrixXd circulant_materialize(const Eigen::VectorXd& first_row);

/**
 * First row of the variance accumulator's generator on the circular
 * lattice of size 2C+1 for one chain state: entry i holds the rate of
 * lattice jumps of size i, the head holds minus the total rate.
 */
Eigen::VectorXd accumulator_first_row(const IntensityProfile& prof,
                                      Eigen::Index state);

/**
 * Generator of the joint process (chain state, accumulator position) on
 * the product space, laid out with the accumulator index fastest:
 * row x * (2C+1) + c describes (state x, position c).  Diagnostic and
 * test use only; the product dimension is capped at 500.
 */
Eigen::MatrixXd materialize_lift(const GeneratorMatrix& gen,
                                 const IntensityProfile& prof);

/**
 * Fourier slice j of the lifted generator:
 * L_j = L + diag_x( sum_i (exp(-i p_j i) - 1) lambda_i(x) ),
 * with p_j = 2 pi j / (2C+1).  The slices for j and 2C+1-j are complex
 * conjugates.
 */
Eigen::MatrixXcd twisted_generator(const GeneratorMatrix& gen,
                                   const IntensityProfile& prof, int j);

} // namespace cvol

#endif // CVOL_CIRCULANT_HPP
