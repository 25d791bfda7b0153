#include "cvol/black_scholes.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cvol {

double norm_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double bs_call_price(double spot, double strike, double rate, double t,
                     double vol) {
    if (t <= 0.0 || vol <= 0.0)
        return std::max(spot - strike * std::exp(-rate * t), 0.0);
    const double sq = vol * std::sqrt(t);
    const double d1 = (std::log(spot / strike) + (rate + 0.5 * vol * vol) * t) / sq;
    const double d2 = d1 - sq;
    return spot * norm_cdf(d1) - strike * std::exp(-rate * t) * norm_cdf(d2);
}

double implied_vol(double price, double spot, double strike, double rate,
                   double t) {
    const double intrinsic = std::max(spot - strike * std::exp(-rate * t), 0.0);
    if (!(price > intrinsic) || price >= spot) {
        std::ostringstream msg;
        msg << "implied_vol: price " << price << " outside (" << intrinsic
            << ", " << spot << "); volatility not identifiable";
        throw std::domain_error(msg.str());
    }

    double lo = 1e-9, hi = 10.0;
    double vol = 0.2;  // starting guess; refined immediately
    for (int it = 0; it < 200; ++it) {
        const double p = bs_call_price(spot, strike, rate, t, vol);
        const double diff = p - price;
        if (std::abs(diff) < 1e-14 * spot)
            break;
        (diff > 0.0 ? hi : lo) = vol;
        // Newton step using vega, clamped into the live bracket.
        const double sq = vol * std::sqrt(t);
        const double d1 =
            (std::log(spot / strike) + (rate + 0.5 * vol * vol) * t) / sq;
        const double vega =
            spot * std::sqrt(t) * std::exp(-0.5 * d1 * d1) / std::sqrt(2.0 * M_PI);
        double next = vol - diff / vega;
        if (!(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        if (std::abs(next - vol) < 1e-12)
            return next;
        vol = next;
        if (hi - lo < 1e-12)
            break;
    }
    return vol;
}

} // namespace cvol
