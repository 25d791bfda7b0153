#include "cvol/corridor.hpp"

#include <cmath>
#include <stdexcept>

namespace cvol {

double Corridor::clamp(double x) const {
    if (x < lower) return lower;
    if (x > upper) return upper;
    return x;
}

MomentTable corridor_moments(const GeneratorMatrix& gen, const Corridor& corridor,
                             int k) {
    if (k < 1 || k > 3)
        throw std::invalid_argument("corridor_moments: order must be 1, 2 or 3");
    if (corridor.lower < 0.0 || !(corridor.lower < corridor.upper))
        throw std::invalid_argument("corridor_moments: need 0 <= lower < upper");

    const bool two_sided = corridor.has_lower() && corridor.has_upper();
    const double span = two_sided ? std::log(corridor.upper / corridor.lower) : 0.0;

    const Eigen::Index n = gen.size();
    Eigen::MatrixXd values = Eigen::MatrixXd::Zero(n, k);

    for (Eigen::Index x = 0; x < n; ++x) {
        const double sx = gen.grid[static_cast<std::size_t>(x)];
        const double cx = corridor.clamp(sx);
        for (Eigen::Index y = 0; y < n; ++y) {
            if (y == x) continue;
            const double rate = gen.entries(x, y);
            if (rate == 0.0) continue;
            const double sy = gen.grid[static_cast<std::size_t>(y)];
            const double w = std::log(corridor.clamp(sy) / cx);
            const bool straddles =
                two_sided && ((sx < corridor.lower && sy > corridor.upper) ||
                              (sy < corridor.lower && sx > corridor.upper));
            double w2j = 1.0;
            double span2j = 1.0;
            for (int j = 0; j < k; ++j) {
                w2j *= w * w;
                span2j *= span * span;
                values(x, j) += rate * (w2j - (straddles ? span2j : 0.0));
            }
        }
    }
    return MomentTable{std::move(values), corridor};
}

} // namespace cvol
