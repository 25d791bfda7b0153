#ifndef CVOL_PAYOFF_HPP
#define CVOL_PAYOFF_HPP

namespace cvol {

/**
 * Claims on the accumulated (corridor) variance I_T:
 *  - variance_swap: fair volatility quote sqrt(E[I_T / T]),
 *  - volatility_swap: E[sqrt(I_T / T)],
 *  - variance_call: e^{-rT} E[(I_T/T - (moneyness * K0)^2)^+] with the
 *    at-the-money level K0 = sqrt(E[I_T / T]) taken from the same law.
 */
enum class PayoffKind { variance_swap, volatility_swap, variance_call };

struct PayoffSpec {
    PayoffKind kind = PayoffKind::variance_swap;
    double maturity = 1.0;
    double moneyness = 1.0;  // call strike as a fraction of K0
    double rate = 0.0;       // discount rate applied to calls
};

} // namespace cvol

#endif // CVOL_PAYOFF_HPP
