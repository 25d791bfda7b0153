#include "cvol/grid.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cvol {

StateGrid build_grid(const GridSpec& spec) {
    if (!(spec.l < spec.s && spec.s < spec.u))
        throw std::invalid_argument("build_grid: need l < s < u");
    if (spec.N < 4 || spec.N % 2 != 0)
        throw std::invalid_argument("build_grid: N must be even and >= 4");
    if (!(spec.g_l > 0.0) || !(spec.g_u > 0.0))
        throw std::invalid_argument("build_grid: granularities must be positive");

    const int N_l = (spec.N + 1) / 2;        // ceil(N/2)
    const int N_u = spec.N - (N_l + 1);
    const double c1 = std::asinh((spec.l - spec.s) / spec.g_l);
    const double c2 = std::asinh((spec.u - spec.s) / spec.g_u);

    std::vector<double> x(static_cast<std::size_t>(spec.N));
    for (int k = 0; k <= N_l; ++k)
        x[k] = spec.s + spec.g_l * std::sinh(c1 * (1.0 - double(k) / N_l));
    for (int k = 0; k <= N_u; ++k)
        x[N_l + k] = spec.s + spec.g_u * std::sinh(c2 * double(k) / N_u);

    // The construction hits the three anchors up to the rounding of
    // sinh(arcsinh(.)); snap them so downstream code can rely on equality.
    x.front() = spec.l;
    x[N_l] = spec.s;
    x.back() = spec.u;

    for (std::size_t i = 1; i < x.size(); ++i) {
        const double scale = std::max(std::abs(x[i - 1]), std::abs(x[i]));
        if (x[i] - x[i - 1] <= 1e-12 * scale) {
            std::ostringstream msg;
            msg << "build_grid: states " << i - 1 << " and " << i
                << " collide (" << x[i - 1] << " vs " << x[i]
                << "); grid parameters are degenerate";
            throw std::runtime_error(msg.str());
        }
    }

    return StateGrid{std::move(x), static_cast<std::size_t>(N_l)};
}

} // namespace cvol
