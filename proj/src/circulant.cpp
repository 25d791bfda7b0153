#include "cvol/circulant.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace cvol {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

Eigen::VectorXcd circulant_eigenvalues(const Eigen::VectorXd& first_row) {
    const Eigen::Index n = first_row.size();
    Eigen::VectorXcd values = Eigen::VectorXcd::Zero(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const std::complex<double> step =
            std::polar(1.0, -kTwoPi * static_cast<double>(r) / static_cast<double>(n));
        std::complex<double> w = 1.0;
        std::complex<double> acc = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
            acc += first_row[k] * w;
            w *= step;
        }
        values[r] = acc;
    }
    return values;
}

Eigen::MatrixXcd circulant_eigenvectors(int n) {
    if (n < 1) throw std::invalid_argument("circulant_eigenvectors: need n >= 1");
    Eigen::MatrixXcd basis(n, n);
    const double norm = 1.0 / std::sqrt(static_cast<double>(n));
    for (int r = 0; r < n; ++r)
        for (int j = 0; j < n; ++j)
            basis(j, r) = norm * std::polar(1.0, -kTwoPi * static_cast<double>(r) *
                                                     static_cast<double>(j) /
                                                     static_cast<double>(n));
    return basis;
}

Eigen::MatrixXd circulant_materialize(const Eigen::VectorXd& first_row) {
    const Eigen::Index n = first_row.size();
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            out(i, j) = first_row[(j - i + n) % n];
    return out;
}

Eigen::VectorXd accumulator_first_row(const IntensityProfile& prof,
                                      Eigen::Index state) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(prof.circle());
    for (int i = 1; i <= prof.max_jump(); ++i)
        row[i] = prof.intensity(state, i);
    row[0] = -row.sum();
    return row;
}

Eigen::MatrixXd materialize_lift(const GeneratorMatrix& gen,
                                 const IntensityProfile& prof) {
    const Eigen::Index nstates = gen.size();
    const Eigen::Index circle = prof.circle();
    const Eigen::Index dim = nstates * circle;
    if (dim > 500)
        throw std::invalid_argument(
            "materialize_lift: product dimension " + std::to_string(dim) +
            " exceeds the diagnostic cap of 500");

    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index x = 0; x < nstates; ++x) {
        const Eigen::VectorXd row = accumulator_first_row(prof, x);
        for (Eigen::Index c = 0; c < circle; ++c) {
            const Eigen::Index from = x * circle + c;
            for (Eigen::Index y = 0; y < nstates; ++y)
                G(from, y * circle + c) += gen.entries(x, y);
            for (Eigen::Index d = 0; d < circle; ++d)
                G(from, x * circle + d) += row[(d - c + circle) % circle];
        }
    }
    return G;
}

Eigen::MatrixXcd twisted_generator(const GeneratorMatrix& gen,
                                   const IntensityProfile& prof, int j) {
    const int circle = prof.circle();
    if (j < 0 || j >= circle)
        throw std::invalid_argument("twisted_generator: slice index out of range");
    const double p = kTwoPi * j / circle;

    Eigen::MatrixXcd L = gen.entries.cast<std::complex<double>>();
    for (Eigen::Index x = 0; x < gen.size(); ++x) {
        std::complex<double> twist = 0.0;
        for (int i = 1; i <= prof.max_jump(); ++i)
            twist += prof.intensity(x, i) *
                     (std::polar(1.0, -p * i) - std::complex<double>(1.0));
        L(x, x) += twist;
    }
    return L;
}

} // namespace cvol
