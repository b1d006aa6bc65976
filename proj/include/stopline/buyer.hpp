#ifndef STOPLINE_BUYER_HPP
#define STOPLINE_BUYER_HPP

#include "stopline/seller.hpp"

namespace stopline {

/// Solution of the buyer's free boundary problem on top of a seller solve.
/// The buy region is [a, b] in the positive regime; beyond b the value is
/// tail_coeff * phi+(x).
struct BuyerSolution {
    double a;
    double b;
    double tail_coeff;          // g(b,+) / phi+(b), with phi+(H) = 1
    double k_at_H;              // boundary value v_p(H,-)
    GridFunction vp_pos;        // curve on [L, a]
    GridFunction vp_neg;        // curve on [0, H]
    GridFunction phi_plus;      // carried for tail evaluation past b
    double pasting_residual_a;
    double root_residual_b;     // g(b) phi'(b) - g'(b) phi(b) at the root
    double continuity_residual_L;
    double continuity_residual_H;
};

/// Buyer gains g(x, f) = V(x, f) - u(x); zero on the seller stopping set.
double gains_g(const SellerSolution& sol, const PowerUtility& util,
               double x, Regime f);

/// d/dx of the gains in the positive regime (left derivative at B).
double gains_g_deriv(const SellerSolution& sol, const PowerUtility& util,
                     double x, Regime f);

/// Root b of rho(x) = g(x,+) phi'(x) - g'(x,+) phi(x) on (L, A], bracketed
/// then bisected to 1e-6. rho is 1-homogeneous in phi, so any positive
/// rescaling of phi yields the same b.
double find_b(const SellerSolution& sol, const PowerUtility& util,
              const FundamentalSolution& phi, double A);

/// Computes phi+ with the configured (or automatic) truncation, retrying
/// with doubled x_max when the decay check fails.
FundamentalSolution make_phi_plus(const ModelSpec& model, double A,
                                  const Numerics& num);

/// Full buyer solve; computes phi+ internally.
BuyerSolution solve_buyer(const ModelSpec& model, const PowerUtility& util,
                          const SellerSolution& seller,
                          const Numerics& num = {});

/// As above, with a caller-supplied fundamental solution.
BuyerSolution solve_buyer(const ModelSpec& model, const PowerUtility& util,
                          const SellerSolution& seller,
                          const FundamentalSolution& phi,
                          const Numerics& num);

/// Piecewise evaluation of V_p on the state space: vp curves on the
/// continuation sets, g on [a, b], the phi-tail beyond b.
double buyer_value_at(const BuyerSolution& sol, const SellerSolution& seller,
                      const PowerUtility& util, double x, Regime f);

} // namespace stopline

#endif
