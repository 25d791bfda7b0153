#include "cvol/intensity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cvol/linalg.hpp"

namespace cvol {

namespace {

double power_sum_to(int j, int n) {
    const double x = n;
    switch (j) {
        case 1: return x * (x + 1) / 2;
        case 2: return x * (x + 1) * (2 * x + 1) / 6;
        case 3: { const double s = x * (x + 1) / 2; return s * s; }
        default:
            throw std::invalid_argument("tier_power_sum: order must be 1..3");
    }
}

} // namespace

double tier_power_sum(int j, int from, int to) {
    if (from < 0 || to < from)
        throw std::invalid_argument("tier_power_sum: need 0 <= from <= to");
    return power_sum_to(j, to) - power_sum_to(j, from);
}

Region region_from_bounds(const StateGrid& grid, double lo, double hi) {
    if (!(lo < hi))
        throw std::invalid_argument("region_from_bounds: need lo < hi");
    const Eigen::Index n = static_cast<Eigen::Index>(grid.size());
    Eigen::Index first = -1, last = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = grid[static_cast<std::size_t>(i)];
        if (x >= lo && x <= hi) {
            if (first < 0) first = i;
            last = i;
        }
    }
    if (first < 0)
        throw std::invalid_argument("region_from_bounds: no state inside [" +
                                    std::to_string(lo) + ", " +
                                    std::to_string(hi) + "]");
    return Region{first, last};
}

Region region_from_mass(const GeneratorMatrix& gen, Eigen::Index x0,
                        double horizon, double mass_tol) {
    const Eigen::MatrixXd P = semigroup(gen, horizon);
    const Eigen::Index n = P.rows();
    Eigen::Index first = -1, last = -1;
    for (Eigen::Index y = 0; y < n; ++y) {
        if (P(x0, y) > mass_tol) {
            if (first < 0) first = y;
            last = y;
        }
    }
    if (first < 0)
        throw std::runtime_error(
            "region_from_mass: no state carries the requested mass");
    return Region{first, last};
}

namespace {

using Intervals = std::vector<std::pair<double, double>>;

Intervals intersect_window(const Intervals& set, double lo, double hi) {
    Intervals out;
    for (const auto& [a, b] : set) {
        const double l = std::max(a, lo), r = std::min(b, hi);
        if (l <= r) out.emplace_back(l, r);
    }
    return out;
}

Intervals subtract_open(const Intervals& set, double lo, double hi) {
    if (!(lo < hi)) return set;
    Intervals out;
    for (const auto& [a, b] : set) {
        if (b <= lo || a >= hi) {
            out.emplace_back(a, b);
            continue;
        }
        if (a <= lo) out.emplace_back(a, lo);
        if (b >= hi) out.emplace_back(hi, b);
    }
    return out;
}

/** Real roots of qa x^2 + qb x + qc, via the numerically stable split. */
bool quadratic_roots(double qa, double qb, double qc, double& r1, double& r2) {
    const double disc = qb * qb - 4 * qa * qc;
    if (disc < 0) return false;
    const double s = std::sqrt(disc);
    const double q = -0.5 * (qb + std::copysign(s, qb));
    if (q == 0.0) {
        r1 = r2 = 0.0;
        return true;
    }
    r1 = q / qa;
    r2 = qc / q;
    if (r1 > r2) std::swap(r1, r2);
    return true;
}

/**
 * Restrict the admissible set to { alpha >= 0 : sign * Q(alpha) >= 0 }
 * for the quadratic Q = qa a^2 + qb a + qc.
 */
void apply_sign_constraint(Intervals& set, double qa, double qb, double qc,
                           double sign) {
    const double pa = sign * qa, pb = sign * qb, pc = sign * qc;
    if (pa == 0.0) {
        if (pb == 0.0) {
            if (pc < 0.0) set.clear();
        } else if (pb > 0.0) {
            set = intersect_window(set, -pc / pb, std::numeric_limits<double>::max());
        } else {
            set = intersect_window(set, 0.0, -pc / pb);
        }
        return;
    }
    double r1, r2;
    const bool real_roots = quadratic_roots(qa, qb, qc, r1, r2);
    if (pa > 0.0) {
        if (real_roots) set = subtract_open(set, r1, r2);
        // no real roots: the parabola is positive everywhere
    } else {
        if (real_roots)
            set = intersect_window(set, r1, r2);
        else
            set.clear();
    }
}

constexpr double kZeroMoment = 1e-300;

/**
 * States whose first conditional moment sits this far below the
 * region's largest carry no resolvable jump mass: their moments are
 * assembled from transition rates at the eigendecomposition noise
 * floor, so moment ratios there are meaningless.  Such states are left
 * unconstrained and jump-free.
 */
constexpr double kQuietRelative = 1e-10;

double moment_floor(const MomentTable& moments, const Region& region) {
    double peak = 0.0;
    for (Eigen::Index x = region.first; x <= region.last; ++x)
        peak = std::max(peak, moments.moment(x, 1));
    return std::max(peak * kQuietRelative, kZeroMoment);
}

} // namespace

bool FeasibilityReport::allows(double alpha) const {
    for (const auto& [lo, hi] : admissible)
        if (alpha >= lo && alpha <= hi) return true;
    return false;
}

double FeasibilityReport::suggest() const {
    if (!feasible())
        throw std::runtime_error("FeasibilityReport: no admissible pitch");
    if (k == 2) {
        const auto& [lo, hi] = admissible.front();
        return lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * hi;
    }
    auto widest = std::max_element(
        admissible.begin(), admissible.end(), [](const auto& a, const auto& b) {
            return a.second - a.first < b.second - b.first;
        });
    return 0.5 * (widest->first + widest->second);
}

double FeasibilityReport::min_feasible() const {
    if (!feasible())
        throw std::runtime_error("FeasibilityReport: no admissible pitch");
    return admissible.front().first;
}

FeasibilityReport feasibility_k2(const MomentTable& moments, int n,
                                 const Region& region) {
    if (n < 2) throw std::invalid_argument("feasibility_k2: need n >= 2");
    if (moments.order() < 2)
        throw std::invalid_argument("feasibility_k2: need two moments");
    const double t1 = tier_power_sum(1, 1, n);
    const double t2 = tier_power_sum(2, 1, n);

    FeasibilityReport rep;
    rep.k = 2;
    rep.n = n;
    rep.region = region;
    const double floor = moment_floor(moments, region);
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    for (Eigen::Index x = region.first; x <= region.last; ++x) {
        const double m1 = moments.moment(x, 1);
        if (m1 <= floor) continue;  // no resolvable jumps: no constraint
        const double ratio = moments.moment(x, 2) / m1;
        const double state_lo = ratio * t1 / t2;
        if (state_lo > lo) {
            lo = state_lo;
            rep.binding_low = x;
        }
        if (ratio < hi) {
            hi = ratio;
            rep.binding_high = x;
        }
    }
    if (rep.binding_low < 0)
        throw std::invalid_argument(
            "feasibility_k2: no state in the region produces jumps");
    if (lo <= hi) rep.admissible.emplace_back(lo, hi);
    return rep;
}

FeasibilityReport feasibility_k3(const MomentTable& moments, int n, int m,
                                 const Region& region) {
    if (n < 2 || m <= n)
        throw std::invalid_argument("feasibility_k3: need 2 <= n < m");
    if (moments.order() < 3)
        throw std::invalid_argument("feasibility_k3: need three moments");

    const double t11 = tier_power_sum(1, 1, n), t21 = tier_power_sum(1, n, m);
    const double t12 = tier_power_sum(2, 1, n), t22 = tier_power_sum(2, n, m);
    const double t13 = tier_power_sum(3, 1, n), t23 = tier_power_sum(3, n, m);
    const double A = t12 * t21 - t11 * t22;
    const double B = t13 * t21 - t11 * t23;
    const double den1 = (t21 - t23) * A - (t21 - t22) * B;
    const double denn = (t22 - t21) * (t13 - t11) - (t23 - t21) * (t12 - t11);
    const double denm = (t23 - t21) * (t12 - t11) - (t22 - t21) * (t13 - t11);
    if (den1 == 0.0 || denn == 0.0 || denm == 0.0)
        throw std::invalid_argument("feasibility_k3: singular tier system");

    FeasibilityReport rep;
    rep.k = 3;
    rep.n = n;
    rep.m = m;
    rep.region = region;

    Intervals set{{0.0, std::numeric_limits<double>::max()}};
    const double floor = moment_floor(moments, region);
    bool constrained = false;
    for (Eigen::Index x = region.first; x <= region.last && !set.empty(); ++x) {
        const double m1 = moments.moment(x, 1);
        if (m1 <= floor) continue;
        constrained = true;
        const double m2 = moments.moment(x, 2);
        const double m3 = moments.moment(x, 3);
        apply_sign_constraint(set, m1 * (t22 * B - t23 * A), -m2 * t21 * B,
                              m3 * t21 * A, den1 > 0 ? 1.0 : -1.0);
        apply_sign_constraint(set, m1 * (t23 - t22), -m2 * (t23 - t21),
                              m3 * (t22 - t21), denn > 0 ? 1.0 : -1.0);
        apply_sign_constraint(set, m1 * (t13 - t12), -m2 * (t13 - t11),
                              m3 * (t12 - t11), denm > 0 ? 1.0 : -1.0);
    }
    if (!constrained)
        throw std::invalid_argument(
            "feasibility_k3: no state in the region produces jumps");
    rep.admissible = std::move(set);
    return rep;
}

double IntensityProfile::intensity(Eigen::Index state, int size) const {
    if (size == 1) return lambda1[state];
    if (k >= 2 && size >= 2 && size <= n) return lambdaN[state];
    if (k == 3 && size > n && size <= m) return lambdaM[state];
    return 0.0;
}

double IntensityProfile::total_rate(Eigen::Index state) const {
    double rate = lambda1[state];
    if (k >= 2) rate += (n - 1) * lambdaN[state];
    if (k == 3) rate += (m - n) * lambdaM[state];
    return rate;
}

double IntensityProfile::reconstructed_moment(Eigen::Index state, int j) const {
    double s = lambda1[state];
    if (k >= 2) s += lambdaN[state] * tier_power_sum(j, 1, n);
    if (k == 3) s += lambdaM[state] * tier_power_sum(j, n, m);
    return std::pow(alpha, j) * s;
}

std::vector<Eigen::Index> IntensityProfile::degraded_states() const {
    std::vector<Eigen::Index> out;
    for (Eigen::Index x = region.first; x <= region.last; ++x)
        if (matched[x] > 0 && matched[x] < k) out.push_back(x);
    return out;
}

Eigen::Index IntensityProfile::degraded_count() const {
    Eigen::Index count = 0;
    for (Eigen::Index x = region.first; x <= region.last; ++x)
        if (matched[x] > 0 && matched[x] < k) ++count;
    return count;
}

Eigen::Index IntensityProfile::quiet_count() const {
    Eigen::Index count = 0;
    for (Eigen::Index x = region.first; x <= region.last; ++x)
        if (matched[x] == 0) ++count;
    return count;
}

namespace {

void check_profile_inputs(const MomentTable& moments, double alpha, int C,
                          const Region& region, int max_jump) {
    if (!(alpha > 0.0))
        throw std::invalid_argument("intensity matching: pitch must be positive");
    if (C < 1) throw std::invalid_argument("intensity matching: need C >= 1");
    if (max_jump > 2 * C)
        throw std::invalid_argument(
            "intensity matching: largest jump size " + std::to_string(max_jump) +
            " exceeds the variance lattice span 2C = " + std::to_string(2 * C));
    const Eigen::Index nstates = moments.values.rows();
    if (region.first < 0 || region.last >= nstates || region.first > region.last)
        throw std::invalid_argument("intensity matching: region out of range");
}

/** Constant extension of the in-region intensities to the whole grid. */
template <typename Vector>
void extend(Vector& v, const Region& region) {
    for (Eigen::Index i = 0; i < region.first; ++i) v[i] = v[region.first];
    for (Eigen::Index i = region.last + 1; i < v.size(); ++i) v[i] = v[region.last];
}

/**
 * Clamp round-off negatives to zero; anything materially negative marks
 * the state as infeasible at this pitch.
 */
bool clamp_nonnegative(double& lambda, double scale) {
    if (lambda >= 0.0) return true;
    if (lambda >= -1e-12 * scale) {
        lambda = 0.0;
        return true;
    }
    return false;
}

void check_residuals(const IntensityProfile& prof, const MomentTable& moments) {
    for (Eigen::Index x = prof.region.first; x <= prof.region.last; ++x) {
        for (int j = 1; j <= prof.matched[x]; ++j) {
            const double target = moments.moment(x, j);
            const double got = prof.reconstructed_moment(x, j);
            const double err = std::abs(got - target);
            if (err > 1e-9 * std::max(std::abs(target), kZeroMoment))
                throw std::runtime_error(
                    "intensity matching: moment residual " + std::to_string(err) +
                    " at state " + std::to_string(x) + ", order " +
                    std::to_string(j));
        }
    }
}

} // namespace

IntensityProfile match_k1(const MomentTable& moments, double alpha, int C,
                          const Region& region) {
    check_profile_inputs(moments, alpha, C, region, 1);
    const Eigen::Index nstates = moments.values.rows();
    IntensityProfile prof;
    prof.alpha = alpha;
    prof.C = C;
    prof.k = 1;
    prof.region = region;
    prof.lambda1 = Eigen::VectorXd::Zero(nstates);
    prof.lambdaN = Eigen::VectorXd::Zero(nstates);
    prof.lambdaM = Eigen::VectorXd::Zero(nstates);
    prof.matched = Eigen::VectorXi::Ones(nstates);
    for (Eigen::Index x = region.first; x <= region.last; ++x)
        prof.lambda1[x] = moments.moment(x, 1) / alpha;
    extend(prof.lambda1, region);
    check_residuals(prof, moments);
    return prof;
}

IntensityProfile match_k2(const MomentTable& moments, double alpha, int n, int C,
                          const Region& region) {
    if (n < 2) throw std::invalid_argument("match_k2: need n >= 2");
    check_profile_inputs(moments, alpha, C, region, n);
    const double t1 = tier_power_sum(1, 1, n);
    const double t2 = tier_power_sum(2, 1, n);
    const double spread = t2 - t1;

    const Eigen::Index nstates = moments.values.rows();
    IntensityProfile prof;
    prof.alpha = alpha;
    prof.C = C;
    prof.k = 2;
    prof.n = n;
    prof.region = region;
    prof.lambda1 = Eigen::VectorXd::Zero(nstates);
    prof.lambdaN = Eigen::VectorXd::Zero(nstates);
    prof.lambdaM = Eigen::VectorXd::Zero(nstates);

    const double floor = moment_floor(moments, region);
    prof.matched = Eigen::VectorXi::Constant(nstates, 2);
    for (Eigen::Index x = region.first; x <= region.last; ++x) {
        const double m1 = moments.moment(x, 1);
        if (m1 <= floor) {
            prof.matched[x] = 0;  // no resolvable jump mass at this state
            continue;
        }
        const double m2 = moments.moment(x, 2);
        double l1 = (alpha * m1 * t2 - m2 * t1) / (alpha * alpha * spread);
        double ln = (m2 - alpha * m1) / (alpha * alpha * spread);
        const double scale = m1 / alpha;
        if (clamp_nonnegative(l1, scale) && clamp_nonnegative(ln, scale)) {
            prof.lambda1[x] = l1;
            prof.lambdaN[x] = ln;
        } else {
            prof.lambda1[x] = m1 / alpha;
            prof.matched[x] = 1;
        }
    }
    extend(prof.lambda1, region);
    extend(prof.lambdaN, region);
    extend(prof.matched, region);
    check_residuals(prof, moments);
    return prof;
}

IntensityProfile match_k3(const MomentTable& moments, double alpha, int n, int m,
                          int C, const Region& region) {
    if (n < 2 || m <= n)
        throw std::invalid_argument("match_k3: need 2 <= n < m");
    check_profile_inputs(moments, alpha, C, region, m);

    const double t11 = tier_power_sum(1, 1, n), t21 = tier_power_sum(1, n, m);
    const double t12 = tier_power_sum(2, 1, n), t22 = tier_power_sum(2, n, m);
    const double t13 = tier_power_sum(3, 1, n), t23 = tier_power_sum(3, n, m);
    const double A = t12 * t21 - t11 * t22;
    const double B = t13 * t21 - t11 * t23;
    const double den1 = (t21 - t23) * A - (t21 - t22) * B;
    const double denn = (t22 - t21) * (t13 - t11) - (t23 - t21) * (t12 - t11);
    const double denm = (t23 - t21) * (t12 - t11) - (t22 - t21) * (t13 - t11);
    if (den1 == 0.0 || denn == 0.0 || denm == 0.0)
        throw std::invalid_argument("match_k3: singular tier system");
    const double a3 = alpha * alpha * alpha;

    const Eigen::Index nstates = moments.values.rows();
    IntensityProfile prof;
    prof.alpha = alpha;
    prof.C = C;
    prof.k = 3;
    prof.n = n;
    prof.m = m;
    prof.region = region;
    prof.lambda1 = Eigen::VectorXd::Zero(nstates);
    prof.lambdaN = Eigen::VectorXd::Zero(nstates);
    prof.lambdaM = Eigen::VectorXd::Zero(nstates);

    const double t1 = tier_power_sum(1, 1, n);
    const double t2 = tier_power_sum(2, 1, n);
    const double spread2 = t2 - t1;

    const double floor = moment_floor(moments, region);
    prof.matched = Eigen::VectorXi::Constant(nstates, 3);
    for (Eigen::Index x = region.first; x <= region.last; ++x) {
        const double m1 = moments.moment(x, 1);
        if (m1 <= floor) {
            prof.matched[x] = 0;  // no resolvable jump mass at this state
            continue;
        }
        const double m2 = moments.moment(x, 2);
        const double m3 = moments.moment(x, 3);
        double l1 = (m1 * (t22 * B - t23 * A) * alpha * alpha -
                     m2 * t21 * B * alpha + m3 * t21 * A) /
                    (a3 * den1);
        double ln = (m1 * (t23 - t22) * alpha * alpha - m2 * (t23 - t21) * alpha +
                     m3 * (t22 - t21)) /
                    (a3 * denn);
        double lm = (m1 * (t13 - t12) * alpha * alpha - m2 * (t13 - t11) * alpha +
                     m3 * (t12 - t11)) /
                    (a3 * denm);
        const double scale = m1 / alpha;
        if (clamp_nonnegative(l1, scale) && clamp_nonnegative(ln, scale) &&
            clamp_nonnegative(lm, scale)) {
            prof.lambda1[x] = l1;
            prof.lambdaN[x] = ln;
            prof.lambdaM[x] = lm;
            continue;
        }
        l1 = (alpha * m1 * t2 - m2 * t1) / (alpha * alpha * spread2);
        ln = (m2 - alpha * m1) / (alpha * alpha * spread2);
        if (clamp_nonnegative(l1, scale) && clamp_nonnegative(ln, scale)) {
            prof.lambda1[x] = l1;
            prof.lambdaN[x] = ln;
            prof.matched[x] = 2;
        } else {
            prof.lambda1[x] = m1 / alpha;
            prof.matched[x] = 1;
        }
    }
    extend(prof.lambda1, region);
    extend(prof.lambdaN, region);
    extend(prof.lambdaM, region);
    extend(prof.matched, region);
    check_residuals(prof, moments);
    return prof;
}

void validate_circle(double alpha, int C, double mean_accumulated_variance,
                     double multiple) {
    if (2 * C * alpha > multiple * mean_accumulated_variance) return;
    const int needed = static_cast<int>(
        std::ceil(multiple * mean_accumulated_variance / (2 * alpha))) + 1;
    std::ostringstream msg;
    msg << "validate_circle: lattice span 2*C*alpha = " << 2 * C * alpha
        << " does not exceed " << multiple << " x mean accumulated variance ("
        << mean_accumulated_variance << "); increase C to at least " << needed;
    throw std::runtime_error(msg.str());
}

} // namespace cvol
