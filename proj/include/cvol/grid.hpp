#ifndef CVOL_GRID_HPP
#define CVOL_GRID_HPP

#include <cstddef>
#include <vector>

namespace cvol {

/**
 * Parameters of the sinh-stretched state grid.
 *
 * The grid spans [l, u] with the anchor s (the spot) placed at index
 * ceil(N/2).  g_l and g_u control how uniform the spacing is below and
 * above the anchor: larger values give a more uniform lattice, smaller
 * values cluster points around s.
 */
struct GridSpec {
    double l;         // lower bound, must satisfy l < s
    double s;         // anchor (spot level)
    double u;         // upper bound, must satisfy s < u
    int    N;         // number of states, even and >= 4
    double g_l;       // lower granularity, > 0
    double g_u;       // upper granularity, > 0
};

/** Ordered state set of the approximating chain. */
struct StateGrid {
    std::vector<double> states;      // strictly increasing, states[0]=l, back()=u
    std::size_t         spot_index;  // index of the anchor s

    std::size_t size() const { return states.size(); }
    double operator[](std::size_t i) const { return states[i]; }
    double spot() const { return states[spot_index]; }
};

/**
 * Build the non-uniform grid by sinh stretching.
 *
 * With c1 = arcsinh((l-s)/g_l), c2 = arcsinh((u-s)/g_u), N_l = ceil(N/2)
 * and N_u = N - (N_l + 1), the points are
 *
 *   x_k       = s + g_l * sinh(c1 * (1 - k/N_l)),   k = 0..N_l,
 *   x_{N_l+k} = s + g_u * sinh(c2 * k/N_u),         k = 0..N_u,
 *
 * so that x_0 = l, x_{N_l} = s and x_{N-1} = u exactly (the three anchor
 * points are snapped to remove the last-ulp rounding of sinh(arcsinh(.))).
 *
 * Throws std::invalid_argument on parameter violations and
 * std::runtime_error if rounding ever produced a non-increasing pair
 * (adjacent points closer than 1e-12 relative are treated as collisions
 * rather than silently deduplicated).
 */
StateGrid build_grid(const GridSpec& spec);

} // namespace cvol

#endif // CVOL_GRID_HPP
