#ifndef CVOL_BLACK_SCHOLES_HPP
#define CVOL_BLACK_SCHOLES_HPP

namespace cvol {

/** Standard normal cumulative distribution function. */
double norm_cdf(double x);

/** Black-Scholes price of a European call. */
double bs_call_price(double spot, double strike, double rate, double t,
                     double vol);

/**
 * Implied Black-Scholes volatility of a European call.
 *
 * Newton iteration on vega with a bisection safeguard, bracketed on
 * [1e-9, 10]; converges to 1e-10 absolute in vol.  Throws
 * std::domain_error when the price violates the no-arbitrage bounds
 * (including a price exactly at intrinsic value, where the volatility is
 * not identifiable).
 */
double implied_vol(double price, double spot, double strike, double rate,
                   double t);

} // namespace cvol

#endif // CVOL_BLACK_SCHOLES_HPP
