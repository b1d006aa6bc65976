#ifndef STOPLINE_SELLER_HPP
#define STOPLINE_SELLER_HPP

#include <functional>
#include <utility>

#include "stopline/odesolve.hpp"

namespace stopline {

/// Shared numerical settings for the free boundary solvers.
struct Numerics {
    int grid_per_unit = 4096;     // FD cells per unit of price
    double tol_pasting = 1e-6;    // boundary bisection tolerance / early accept
    double tol_continuity = 1e-6; // |v(H,+) - v(H,-)| target in stage 2
    double x_max = 0.0;           // phi+ truncation; 0 = auto (10 max(H, A))
    double b_max = 0.0;           // sell-boundary search cap; 0 = auto
};

enum class SellerCase { MAboveL, MBelowL, MZero };

const char* to_string(SellerCase c);

/// Solution of the seller's linked free boundary problem.
struct SellerSolution {
    double B;                  // sell boundary, positive regime (B >= A)
    double m;                  // sell boundary, negative regime (0 <= m < H)
    SellerCase seller_case;
    GridFunction v_pos;        // continuation curve on [L, B]
    GridFunction v_neg;        // continuation curve on [max(m,0), H]
    double pasting_residual_B;
    double pasting_residual_m; // 0 when m = 0 (condition waived)
    double continuity_residual_H;
    double A;                  // threshold used for the search
    double value_at_L;         // v(L,+) = v(L,-) coupling value
};

/// Stage solvers, exposed for direct use and tests. The positive stage
/// searches B in [A, b_max] for |v'(B-) - u'(B)| pasting given v(L,+);
/// the negative stage searches m in [0, H) given v(H,-).
std::pair<double, GridFunction> solve_positive_stage(
    const ModelSpec& model, const PowerUtility& util,
    double v_at_L, double A, const Numerics& num);

std::pair<double, GridFunction> solve_negative_stage(
    const ModelSpec& model, const PowerUtility& util,
    double v_at_H, const Numerics& num);

/// Reward-generic negative stage (the utility overload forwards here); the
/// reward and its derivative are evaluated on [0, H).
std::pair<double, GridFunction> solve_negative_stage(
    const ModelSpec& model, const std::function<double(double)>& reward,
    const std::function<double(double)>& reward_deriv, double v_at_H,
    const Numerics& num);

/// Full seller solve: stage 1 assumes m >= L; otherwise an outer iteration
/// couples the regimes through the shared value at L.
SellerSolution solve_seller(const ModelSpec& model, const PowerUtility& util,
                            const Numerics& num = {});

/// Piecewise evaluation of the seller value function V on the state space.
double seller_value_at(const SellerSolution& sol, const PowerUtility& util,
                       double x, Regime f);

/// Derivative of V in x (left derivative at B).
double seller_deriv_at(const SellerSolution& sol, const PowerUtility& util,
                       double x, Regime f);

} // namespace stopline

#endif
