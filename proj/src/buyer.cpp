#include "stopline/buyer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace stopline {

namespace {

constexpr int kScanPoints = 512;
constexpr double kBoundaryTol = 1e-6;

} // namespace

double gains_g(const SellerSolution& sol, const PowerUtility& util,
               double x, Regime f) {
    return seller_value_at(sol, util, x, f) - util.value(x);
}

double gains_g_deriv(const SellerSolution& sol, const PowerUtility& util,
                     double x, Regime f) {
    return seller_deriv_at(sol, util, x, f) - util.deriv(x);
}

FundamentalSolution make_phi_plus(const ModelSpec& model, double A,
                                  const Numerics& num) {
    // Dirichlet-zero truncation of a power-law tail contaminates phi by
    // O(x_max^-3); 200 max(H, A) keeps phi on [L, 2A] stable to ~1e-6 under
    // doubling (the contract floor is 10 max(H, A)).
    double x_max = num.x_max > 0.0
                       ? num.x_max
                       : 200.0 * std::max(model.H, A);
    for (int attempt = 0; attempt < 6; ++attempt) {
        const int n = grid_cells(model.L, x_max, num.grid_per_unit);
        try {
            return fundamental_phi_plus(model, x_max, n);
        } catch (const NumericalError&) {
            x_max *= 2.0;  // truncation too small
        }
    }
    throw NumericalError("phi+ failed to become monotone after retries");
}

double find_b(const SellerSolution& sol, const PowerUtility& util,
              const FundamentalSolution& phi, double A) {
    const double L = sol.v_pos.lo();
    const GridFunction& f = phi.phi_plus;
    const double hi = std::min(A, f.hi());
    auto rho = [&](double x) {
        return gains_g(sol, util, x, Regime::Positive) * f.derivative_at(x) -
               gains_g_deriv(sol, util, x, Regime::Positive) * f.value_at(x);
    };
    std::vector<double> cands;
    for (int i = 1; i <= kScanPoints; ++i) {
        cands.push_back(L + (hi - L) * i / kScanPoints);
    }
    double prev_c = cands.front();
    double prev_r = rho(prev_c);
    double blo = 0.0, bhi = 0.0, rlo = 0.0;
    bool found = false;
    std::ostringstream diag;
    diag << "(" << prev_c << ", " << prev_r << ")";
    for (std::size_t i = 1; i < cands.size() && !found; ++i) {
        const double rr = rho(cands[i]);
        if (i < 8) diag << ", (" << cands[i] << ", " << rr << ")";
        if ((rr <= 0.0) != (prev_r <= 0.0)) {
            blo = prev_c;
            bhi = cands[i];
            rlo = prev_r;
            found = true;
        }
        prev_c = cands[i];
        prev_r = rr;
    }
    if (!found) {
        throw NoBracketError(
            "find_b: rho = g phi' - g' phi has no sign change on (L, A]; "
            "samples: " + diag.str() + ", ..., (" + std::to_string(prev_c) +
            ", " + std::to_string(prev_r) + ")");
    }
    while (bhi - blo > kBoundaryTol) {
        const double mid = 0.5 * (blo + bhi);
        const double rm = rho(mid);
        if ((rm <= 0.0) == (rlo <= 0.0)) {
            blo = mid;
            rlo = rm;
        } else {
            bhi = mid;
        }
    }
    return 0.5 * (blo + bhi);
}

BuyerSolution solve_buyer(const ModelSpec& model, const PowerUtility& util,
                          const SellerSolution& seller, const Numerics& num) {
    FundamentalSolution phi = make_phi_plus(model, seller.A, num);
    return solve_buyer(model, util, seller, phi, num);
}

BuyerSolution solve_buyer(const ModelSpec& model, const PowerUtility& util,
                          const SellerSolution& seller,
                          const FundamentalSolution& phi,
                          const Numerics& num) {
    const double L = model.L, H = model.H;
    const double b = find_b(seller, util, phi, seller.A);
    const double gb = gains_g(seller, util, b, Regime::Positive);
    if (!(gb > 0.0)) {
        throw InvalidShapeError("buyer: gains vanish at b=" + std::to_string(b));
    }
    const double tail_coeff = gb / phi.phi_plus.value_at(b);

    // Boundary value at H for the negative-regime problem. The H <= a case
    // would make it self-referential; detected after a is solved.
    const double k = H <= b
                         ? gains_g(seller, util, H, Regime::Positive)
                         : tail_coeff * phi.phi_plus.value_at(H);

    const int n_neg = grid_cells(0.0, H, num.grid_per_unit);
    GridFunction vp_neg =
        solve_linear_bvp(model.negative, model.r, 0.0, H, 0.0, k, n_neg);
    const double w = vp_neg.value_at(L);

    // Positive stage: find a in (L, b) with value matching to g and
    // derivative pasting, given the shared value w at L.
    auto curve_for = [&](double a) {
        const int n = grid_cells(L, a, num.grid_per_unit);
        return solve_linear_bvp(model.positive, model.r, L, a, w,
                                gains_g(seller, util, a, Regime::Positive), n);
    };
    auto resid = [&](double a) {
        return curve_for(a).derivative_at(a) -
               gains_g_deriv(seller, util, a, Regime::Positive);
    };
    std::vector<double> cands;
    for (int i = 1; i <= kScanPoints; ++i) {
        cands.push_back(L + (b - L) * i / (kScanPoints + 1));
    }
    double prev_c = cands.front();
    double prev_r = resid(prev_c);
    double alo = 0.0, ahi = 0.0, rlo = 0.0;
    bool found = false;
    for (std::size_t i = 1; i < cands.size() && !found; ++i) {
        const double rr = resid(cands[i]);
        if ((rr <= 0.0) != (prev_r <= 0.0)) {
            alo = prev_c;
            ahi = cands[i];
            rlo = prev_r;
            found = true;
        }
        prev_c = cands[i];
        prev_r = rr;
    }
    if (!found) {
        throw NoBracketError(
            "buyer: pasting residual at a has no sign change on (L, b)");
    }
    while (ahi - alo > kBoundaryTol) {
        const double mid = 0.5 * (alo + ahi);
        const double rm = resid(mid);
        if ((rm <= 0.0) == (rlo <= 0.0)) {
            alo = mid;
            rlo = rm;
        } else {
            ahi = mid;
        }
    }
    const double a = 0.5 * (alo + ahi);
    if (!(L < a && a < b)) {
        throw InvalidShapeError("buyer: solved a=" + std::to_string(a) +
                                " violates L < a < b");
    }
    if (H <= a) {
        throw InvalidShapeError(
            "buyer: H <= a makes v_p(H,-) self-referential; this regime is "
            "unsupported (a=" + std::to_string(a) + ", H=" + std::to_string(H) +
            ")");
    }

    GridFunction vp_pos = curve_for(a);
    auto rho_at = [&](double x) {
        return gains_g(seller, util, x, Regime::Positive) *
                   phi.phi_plus.derivative_at(x) -
               gains_g_deriv(seller, util, x, Regime::Positive) *
                   phi.phi_plus.value_at(x);
    };
    const double past_a =
        vp_pos.derivative_at(a) - gains_g_deriv(seller, util, a, Regime::Positive);
    const double cont_H = std::abs(vp_neg.values().back() - k);
    return BuyerSolution{a,
                         b,
                         tail_coeff,
                         k,
                         std::move(vp_pos),
                         std::move(vp_neg),
                         phi.phi_plus,
                         past_a,
                         rho_at(b),
                         0.0,  // v_p(L,+) = w by construction
                         cont_H};
}

double buyer_value_at(const BuyerSolution& sol, const SellerSolution& seller,
                      const PowerUtility& util, double x, Regime f) {
    if (f == Regime::Negative) {
        if (x < 0.0 || x > sol.vp_neg.hi()) {
            throw DomainError("negative regime is defined on 0 <= x <= H");
        }
        return sol.vp_neg.value_at(x);
    }
    if (x < sol.vp_pos.lo()) {
        throw DomainError("positive regime is defined on x >= L");
    }
    if (x < sol.a) return sol.vp_pos.value_at(x);
    if (x <= sol.b) return gains_g(seller, util, x, Regime::Positive);
    // Tail branch tail_coeff * phi(x); beyond the phi truncation the decay
    // has been cut to zero, which is what the far-field condition asserts.
    if (x > sol.phi_plus.hi()) return 0.0;
    return sol.tail_coeff * sol.phi_plus.value_at(x);
}

} // namespace stopline
