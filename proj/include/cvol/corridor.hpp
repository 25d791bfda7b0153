#ifndef CVOL_CORRIDOR_HPP
#define CVOL_CORRIDOR_HPP

#include <limits>

#include <Eigen/Dense>

#include "cvol/generator.hpp"

namespace cvol {

/**
 * Price band [lower, upper] inside which squared log-increments accrue.
 * lower = 0 and upper = +infinity switch the respective barrier off;
 * full() accrues everywhere and recovers the ordinary quadratic
 * variation.
 */
struct Corridor {
    double lower = 0.0;
    double upper = std::numeric_limits<double>::infinity();

    bool has_lower() const { return lower > 0.0; }
    bool has_upper() const { return upper < std::numeric_limits<double>::infinity(); }
    static Corridor full() { return {}; }

    /** Projection of x onto [lower, upper]. */
    double clamp(double x) const;
};

/**
 * Conditional moments of the corridor-variance increments accumulated by
 * the chain.  Column j-1 holds, per state x,
 *
 *   M_j(x) = sum_{y != x} L(x, y) * [ log(clamp(y)/clamp(x))^(2j)
 *              - log(upper/lower)^(2j) * 1{x, y on opposite sides} ],
 *
 * where the indicator fires only when one of x, y lies strictly below the
 * lower barrier and the other strictly above the upper one (a straddling
 * jump contributes the censored overshoot, which the bracket removes).
 * Every summand is nonnegative, so each M_j is nonnegative; for nested
 * moments M_{j+1} <= M_j * max_jump^2 elementwise.
 */
struct MomentTable {
    Eigen::MatrixXd values;  // one row per state, one column per moment
    Corridor corridor;

    int order() const { return static_cast<int>(values.cols()); }
    double moment(Eigen::Index state, int j) const { return values(state, j - 1); }
};

/** Moments M_1..M_k of the corridor-variance increments, per state. */
MomentTable corridor_moments(const GeneratorMatrix& gen, const Corridor& corridor,
                             int k);

} // namespace cvol

#endif // CVOL_CORRIDOR_HPP
