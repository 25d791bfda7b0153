#include "cvol/spectral.hpp"

#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

namespace cvol {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kNegativityTol = 1e-10;
constexpr double kMassTol = 1e-8;
}

double JointLaw::mean_accumulated() const {
    const Eigen::VectorXd marginal = accumulator_marginal();
    double mean = 0.0;
    for (Eigen::Index d = 0; d < marginal.size(); ++d)
        mean += alpha * static_cast<double>(d) * marginal[d];
    return mean;
}

SpectralCache::SpectralCache(GeneratorMatrix gen, IntensityProfile prof,
                             double cond_cap)
    : gen_(std::move(gen)), prof_(std::move(prof)) {
    if (prof_.lambda1.size() != gen_.size())
        throw std::invalid_argument(
            "SpectralCache: intensity profile and generator disagree on the "
            "number of states");
    slices_.reserve(prof_.C + 1);
    for (int j = 0; j <= prof_.C; ++j) {
        EigDecomp d = eig(twisted_generator(gen_, prof_, j));
        if (d.cond > cond_cap)
            throw std::runtime_error(
                "SpectralCache: Fourier slice " + std::to_string(j) +
                " has eigenvector condition number " + std::to_string(d.cond) +
                ", too close to defective for spectral evolution");
        slices_.push_back(std::move(d));
    }
}

namespace {

/**
 * Turn the complex slice aggregates for one initial state into the real
 * law over lattice positions: row_j = <slice j contribution>, law_d =
 * (1/M) (row_0 + 2 Re sum_{j>=1} row_j e^{i 2 pi j d / M}).
 */
Eigen::VectorXd assemble_law(const Eigen::RowVectorXcd& rows, int M) {
    const int C = static_cast<int>(rows.size()) - 1;
    Eigen::VectorXd law(M);
    for (int d = 0; d < M; ++d) {
        std::complex<double> acc = 0.0;
        for (int j = 1; j <= C; ++j)
            acc += rows[j] * std::polar(1.0, kTwoPi * j * d / M);
        law[d] = (rows[0].real() + 2.0 * acc.real()) / M;
    }
    return law;
}

void validate_law(Eigen::VectorXd& law, int max_jump, double tail_guard,
                  const char* context) {
    double min_entry = 0.0;
    for (Eigen::Index d = 0; d < law.size(); ++d) {
        min_entry = std::min(min_entry, law[d]);
        if (law[d] < 0.0) law[d] = 0.0;
    }
    if (min_entry < -kNegativityTol)
        throw std::runtime_error(std::string(context) +
                                 ": law entry below tolerance: " +
                                 std::to_string(min_entry));
    const double mass = law.sum();
    if (std::abs(mass - 1.0) > kMassTol)
        throw std::runtime_error(std::string(context) +
                                 ": law mass deviates from one by " +
                                 std::to_string(mass - 1.0));
    double tail = 0.0;
    for (Eigen::Index d = law.size() - 1 - max_jump; d < law.size(); ++d)
        tail += law[d];
    if (tail > tail_guard) {
        std::ostringstream msg;
        msg << context << ": mass " << tail
            << " has reached the top of the variance lattice; the "
               "accumulator is about to wrap, increase C";
        throw std::runtime_error(msg.str());
    }
}

} // namespace

JointLaw SpectralCache::joint_law(Eigen::Index x0, double t,
                                  double tail_guard) const {
    const int M = circle();
    const int C = prof_.C;
    const Eigen::Index n = gen_.size();
    if (x0 < 0 || x0 >= n)
        throw std::invalid_argument("joint_law: initial state out of range");

    Eigen::MatrixXcd rows(C + 1, n);
    for (int j = 0; j <= C; ++j) rows.row(j) = slices_[j].exp_row(x0, t);

    Eigen::MatrixXd masses(n, M);
    Eigen::VectorXcd phases(C + 1);
    for (int d = 0; d < M; ++d) {
        for (int j = 1; j <= C; ++j)
            phases[j] = std::polar(1.0, kTwoPi * j * d / M);
        for (Eigen::Index y = 0; y < n; ++y) {
            std::complex<double> acc = 0.0;
            for (int j = 1; j <= C; ++j) acc += rows(j, y) * phases[j];
            masses(y, d) = (rows(0, y).real() + 2.0 * acc.real()) / M;
        }
    }

    // The chain's own transition probabilities must reappear when the
    // accumulator is summed out.
    const Eigen::VectorXd marginal = masses.rowwise().sum();
    const Eigen::VectorXd expected = rows.row(0).real().transpose();
    const double marginal_err = (marginal - expected).cwiseAbs().maxCoeff();
    if (marginal_err > kMassTol)
        throw std::runtime_error(
            "joint_law: summing out the accumulator misses the chain "
            "transition row by " + std::to_string(marginal_err));

    double min_entry = masses.minCoeff();
    if (min_entry < -kNegativityTol)
        throw std::runtime_error("joint_law: law entry below tolerance: " +
                                 std::to_string(min_entry));
    masses = masses.cwiseMax(0.0);
    const double mass = masses.sum();
    if (std::abs(mass - 1.0) > kMassTol)
        throw std::runtime_error("joint_law: law mass deviates from one by " +
                                 std::to_string(mass - 1.0));
    const int guard_width = prof_.max_jump() + 1;
    const double tail = masses.rightCols(guard_width).sum();
    if (tail > tail_guard) {
        std::ostringstream msg;
        msg << "joint_law: mass " << tail
            << " has reached the top of the variance lattice; the "
               "accumulator is about to wrap, increase C";
        throw std::runtime_error(msg.str());
    }

    JointLaw law;
    law.masses = std::move(masses);
    law.alpha = prof_.alpha;
    law.t = t;
    law.x0 = x0;
    return law;
}

Eigen::MatrixXd SpectralCache::accumulator_laws(double t,
                                                double tail_guard) const {
    const int M = circle();
    const int C = prof_.C;
    const Eigen::Index n = gen_.size();
    const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(n);

    Eigen::MatrixXcd agg(n, C + 1);
    for (int j = 0; j <= C; ++j) agg.col(j) = slices_[j].exp_apply(ones, t);

    Eigen::MatrixXd laws(n, M);
    for (Eigen::Index x = 0; x < n; ++x) {
        Eigen::VectorXd law = assemble_law(agg.row(x), M);
        validate_law(law, prof_.max_jump(), tail_guard, "accumulator_laws");
        laws.row(x) = law.transpose();
    }
    return laws;
}

Eigen::VectorXd SpectralCache::accumulator_law(Eigen::Index x0, double t,
                                               double tail_guard) const {
    const Eigen::Index n = gen_.size();
    if (x0 < 0 || x0 >= n)
        throw std::invalid_argument("accumulator_law: initial state out of range");
    const int C = prof_.C;
    const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(n);
    Eigen::RowVectorXcd agg(C + 1);
    for (int j = 0; j <= C; ++j) agg[j] = slices_[j].exp_apply(ones, t)[x0];
    Eigen::VectorXd law = assemble_law(agg, circle());
    validate_law(law, prof_.max_jump(), tail_guard, "accumulator_law");
    return law;
}

double SpectralCache::price(const PayoffSpec& payoff, Eigen::Index x0,
                            double tail_guard) const {
    return cvol::price(accumulator_law(x0, payoff.maturity, tail_guard),
                       prof_.alpha, payoff);
}

Eigen::VectorXd SpectralCache::price_per_state(const PayoffSpec& payoff,
                                               double tail_guard) const {
    const Eigen::MatrixXd laws = accumulator_laws(payoff.maturity, tail_guard);
    Eigen::VectorXd values(laws.rows());
    for (Eigen::Index x = 0; x < laws.rows(); ++x)
        values[x] = cvol::price(laws.row(x).transpose(), prof_.alpha, payoff);
    return values;
}

double price(const Eigen::VectorXd& accumulator_law, double alpha,
             const PayoffSpec& payoff) {
    const double T = payoff.maturity;
    if (!(T > 0.0)) throw std::invalid_argument("price: maturity must be positive");

    double mean_rate = 0.0;
    for (Eigen::Index d = 0; d < accumulator_law.size(); ++d)
        mean_rate += accumulator_law[d] * (alpha * d / T);

    switch (payoff.kind) {
        case PayoffKind::variance_swap:
            return std::sqrt(mean_rate);
        case PayoffKind::volatility_swap: {
            double v = 0.0;
            for (Eigen::Index d = 0; d < accumulator_law.size(); ++d)
                v += accumulator_law[d] * std::sqrt(alpha * d / T);
            return v;
        }
        case PayoffKind::variance_call: {
            const double level = payoff.moneyness * std::sqrt(mean_rate);
            const double strike = level * level;
            double v = 0.0;
            for (Eigen::Index d = 0; d < accumulator_law.size(); ++d)
                v += accumulator_law[d] * std::max(alpha * d / T - strike, 0.0);
            return std::exp(-payoff.rate * T) * v;
        }
    }
    throw std::logic_error("price: unknown payoff kind");
}

double price(const JointLaw& law, const PayoffSpec& payoff) {
    return price(law.accumulator_marginal(), law.alpha, payoff);
}

Greeks greeks(const Eigen::VectorXd& values, const StateGrid& grid) {
    const Eigen::Index n = values.size();
    if (static_cast<std::size_t>(n) != grid.size() || n < 3)
        throw std::invalid_argument(
            "greeks: need at least three states matching the grid");
    Greeks out;
    out.delta.resize(n);
    out.gamma.resize(n);

    for (Eigen::Index i = 1; i + 1 < n; ++i) {
        const double h1 = grid[i] - grid[i - 1];
        const double h2 = grid[i + 1] - grid[i];
        out.delta[i] = -h2 / (h1 * (h1 + h2)) * values[i - 1] +
                       (h2 - h1) / (h1 * h2) * values[i] +
                       h1 / (h2 * (h1 + h2)) * values[i + 1];
        out.gamma[i] = 2.0 * (values[i - 1] / (h1 * (h1 + h2)) -
                              values[i] / (h1 * h2) +
                              values[i + 1] / (h2 * (h1 + h2)));
    }
    {
        const double h1 = grid[1] - grid[0];
        const double h2 = grid[2] - grid[1];
        out.delta[0] = -(2 * h1 + h2) / (h1 * (h1 + h2)) * values[0] +
                       (h1 + h2) / (h1 * h2) * values[1] -
                       h1 / (h2 * (h1 + h2)) * values[2];
        out.gamma[0] = 2.0 * (h2 * values[0] - (h1 + h2) * values[1] +
                              h1 * values[2]) /
                       (h1 * h2 * (h1 + h2));
    }
    {
        const std::size_t n1 = grid.size() - 1;
        const double g1 = grid[n1] - grid[n1 - 1];
        const double g2 = grid[n1 - 1] - grid[n1 - 2];
        out.delta[n - 1] = (2 * g1 + g2) / (g1 * (g1 + g2)) * values[n - 1] -
                           (g1 + g2) / (g1 * g2) * values[n - 2] +
                           g1 / (g2 * (g1 + g2)) * values[n - 3];
        out.gamma[n - 1] = 2.0 * (g2 * values[n - 1] - (g1 + g2) * values[n - 2] +
                                  g1 * values[n - 3]) /
                          (g1 * g2 * (g1 + g2));
    }
    return out;
}

} // namespace cvol
