#include "cvol/linalg.hpp"

#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace cvol {

Eigen::MatrixXcd EigDecomp::exp(double t) const {
    const Eigen::VectorXcd scale = (t * values.array()).exp();
    return vectors * scale.asDiagonal() * vectors_inv;
}

Eigen::RowVectorXcd EigDecomp::exp_row(Eigen::Index x, double t) const {
    const Eigen::VectorXcd scale = (t * values.array()).exp();
    Eigen::RowVectorXcd w = vectors.row(x);
    w = w.cwiseProduct(scale.transpose());
    return w * vectors_inv;
}

Eigen::VectorXcd EigDecomp::exp_apply(const Eigen::VectorXcd& v, double t) const {
    const Eigen::VectorXcd scale = (t * values.array()).exp();
    Eigen::VectorXcd w = vectors_inv * v;
    w = w.cwiseProduct(scale);
    return vectors * w;
}

EigDecomp eig(const Eigen::MatrixXcd& M) {
    if (M.rows() != M.cols())
        throw std::invalid_argument("eig: matrix must be square");
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(M, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eig: complex eigensolver failed to converge");

    EigDecomp d;
    d.values = solver.eigenvalues();
    d.vectors = solver.eigenvectors();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(d.vectors);
    d.vectors_inv = lu.inverse();
    d.cond = d.vectors.cwiseAbs().colwise().sum().maxCoeff() *
             d.vectors_inv.cwiseAbs().colwise().sum().maxCoeff();
    return d;
}

Eigen::MatrixXcd expm_pade(const Eigen::MatrixXcd& M) {
    return M.exp();
}

Eigen::MatrixXd expm_pade(const Eigen::MatrixXd& M) {
    return M.exp();
}

Eigen::MatrixXcd expm(const Eigen::MatrixXcd& M, double t, double cond_cap) {
    if (t < 0.0)
        throw std::invalid_argument("expm: negative time");
    if (t == 0.0)
        return Eigen::MatrixXcd::Identity(M.rows(), M.cols());
    const EigDecomp d = eig(M);
    if (d.cond > cond_cap || !std::isfinite(d.cond))
        return expm_pade(Eigen::MatrixXcd(t * M));
    return d.exp(t);
}

Eigen::MatrixXd expm(const Eigen::MatrixXd& M, double t, double cond_cap) {
    if (t < 0.0)
        throw std::invalid_argument("expm: negative time");
    if (t == 0.0)
        return Eigen::MatrixXd::Identity(M.rows(), M.cols());
    const EigDecomp d = eig(M.cast<std::complex<double>>());
    if (d.cond > cond_cap || !std::isfinite(d.cond))
        return expm_pade(Eigen::MatrixXd(t * M));
    return d.exp(t).real();
}

} // namespace cvol
