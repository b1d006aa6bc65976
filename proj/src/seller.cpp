#include "stopline/seller.hpp"

#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

namespace stopline {

const char* to_string(SellerCase c) {
    switch (c) {
        case SellerCase::MAboveL: return "MAboveL";
        case SellerCase::MBelowL: return "MBelowL";
        case SellerCase::MZero:   return "MZero";
    }
    return "?";
}

namespace {

constexpr int kScanPoints = 64;
constexpr int kMaxBisect = 200;

struct Bracket {
    double lo, hi;
    double res_lo, res_hi;
};

// Scans candidates in order, returns the first adjacent sign change.
template <typename F>
bool scan_bracket(F&& resid, const std::vector<double>& cands, Bracket* out,
                  std::vector<std::pair<double, double>>* samples = nullptr) {
    double prev_c = cands.front();
    double prev_r = resid(prev_c);
    if (samples) samples->emplace_back(prev_c, prev_r);
    for (std::size_t i = 1; i < cands.size(); ++i) {
        const double c = cands[i];
        const double rr = resid(c);
        if (samples) samples->emplace_back(c, rr);
        if ((rr <= 0.0) != (prev_r <= 0.0)) {
            *out = {std::min(prev_c, c), std::max(prev_c, c), 0.0, 0.0};
            out->res_lo = prev_c < c ? prev_r : rr;
            out->res_hi = prev_c < c ? rr : prev_r;
            return true;
        }
        prev_c = c;
        prev_r = rr;
    }
    return false;
}

// Bisects the bracket down to |interval| <= tol.
template <typename F>
double bisect(F&& resid, Bracket br, double tol) {
    for (int it = 0; it < kMaxBisect && br.hi - br.lo > tol; ++it) {
        const double mid = 0.5 * (br.lo + br.hi);
        const double rm = resid(mid);
        if ((rm <= 0.0) == (br.res_lo <= 0.0)) {
            br.lo = mid;
            br.res_lo = rm;
        } else {
            br.hi = mid;
            br.res_hi = rm;
        }
    }
    return 0.5 * (br.lo + br.hi);
}

std::string format_samples(const std::vector<std::pair<double, double>>& s) {
    std::ostringstream os;
    const std::size_t take = std::min<std::size_t>(s.size(), 12);
    for (std::size_t i = 0; i < take; ++i) {
        os << (i ? ", " : "") << "(" << s[i].first << ", " << s[i].second << ")";
    }
    if (s.size() > take) os << ", ...";
    return os.str();
}

struct NegStageResult {
    double m;
    GridFunction curve;
    double pasting_residual;  // 0 when waived (m = 0)
};

// Negative-regime stage with Dirichlet data at H. Searches m downward from
// H so that the first bracket is the largest pasting point.
NegStageResult negative_stage_dirichlet(
    const ModelSpec& model, const std::function<double(double)>& u,
    const std::function<double(double)>& up, double v_at_H,
    const Numerics& num) {
    const double H = model.H;
    auto curve_for = [&](double m) {
        const int n = grid_cells(m, H, num.grid_per_unit);
        return solve_linear_bvp(model.negative, model.r, m, H, u(m), v_at_H, n);
    };
    auto resid = [&](double m) {
        return curve_for(m).derivative_at(m) - up(m);
    };

    // Descend from just inside H so a pasting point in the top cell is not
    // stepped over; the first bracket found is the largest root.
    std::vector<double> cands;
    cands.push_back(H * (1.0 - 1e-9));
    for (int i = 1; i <= kScanPoints; ++i) {
        const double m = H * (1.0 - static_cast<double>(i) / kScanPoints);
        cands.push_back(std::max(m, H * 1e-9));
    }
    std::vector<std::pair<double, double>> samples;
    Bracket br;
    const bool found = scan_bracket(resid, cands, &br, &samples);
    if (!samples.empty() && samples.front().second < 0.0) {
        throw InvalidShapeError(
            "negative stage: pasting residual already negative at m=H-step "
            "(no stopping region in the negative regime); v(H,-)=" +
            std::to_string(v_at_H));
    }
    if (!found) {
        // No m > 0 pastes; stop set collapses to the absorbing point.
        const int n = grid_cells(0.0, H, num.grid_per_unit);
        return {0.0,
                solve_linear_bvp(model.negative, model.r, 0.0, H, u(0.0),
                                 v_at_H, n),
                0.0};
    }
    const double m = bisect(resid, br, num.tol_pasting);
    GridFunction curve = curve_for(m);
    const double res = curve.derivative_at(m) - up(m);
    return {m, std::move(curve), res};
}

// Negative-regime stage anchored by the coupling value w = v(L,-). Used when
// m < L: the curve extends below L and H carries no Dirichlet data, so the
// solution is assembled from the basis pair y1 (1 at m, 0 at H) and
// y2 (0 at m, 1 at H) with v(L) = w.
NegStageResult negative_stage_anchored(
    const ModelSpec& model, const std::function<double(double)>& u,
    const std::function<double(double)>& up, double w, const Numerics& num) {
    const double L = model.L, H = model.H;
    struct Pieces {
        GridFunction curve;
        double c2;
    };
    auto solve_for = [&](double m) {
        const int n = grid_cells(m, H, num.grid_per_unit);
        GridFunction y1 = solve_linear_bvp(model.negative, model.r, m, H, 1.0, 0.0, n);
        GridFunction y2 = solve_linear_bvp(model.negative, model.r, m, H, 0.0, 1.0, n);
        const double um = u(m);
        const double c2 = (w - um * y1.value_at(L)) / y2.value_at(L);
        std::vector<double> vals(y1.values().size());
        for (std::size_t i = 0; i < vals.size(); ++i) {
            vals[i] = um * y1.values()[i] + c2 * y2.values()[i];
        }
        return Pieces{GridFunction(m, H, std::move(vals)), c2};
    };
    auto resid = [&](double m) {
        return solve_for(m).curve.derivative_at(m) - up(m);
    };

    std::vector<double> cands;
    cands.push_back(L * (1.0 - 1e-9));
    for (int i = 1; i <= kScanPoints; ++i) {
        const double m = L * (1.0 - static_cast<double>(i) / kScanPoints);
        cands.push_back(std::max(m, L * 1e-9));
    }
    std::vector<std::pair<double, double>> samples;
    Bracket br;
    if (!scan_bracket(resid, cands, &br, &samples)) {
        Pieces p = solve_for(0.0);
        return {0.0, std::move(p.curve), 0.0};
    }
    const double m = bisect(resid, br, num.tol_pasting);
    Pieces p = solve_for(m);
    const double res = p.curve.derivative_at(m) - up(m);
    return {m, std::move(p.curve), res};
}

double positive_value_at_H(const ModelSpec& model, const PowerUtility& util,
                           double B, const GridFunction& v_pos) {
    return B >= model.H ? v_pos.value_at(model.H) : util.value(model.H);
}

} // namespace

std::pair<double, GridFunction> solve_positive_stage(
    const ModelSpec& model, const PowerUtility& util,
    double v_at_L, double A, const Numerics& num) {
    const double L = model.L;
    if (A <= L) throw ParameterError("positive stage needs A > L");
    const double B_max =
        num.b_max > 0.0 ? num.b_max : std::max(10.0 * A, 2.0 * model.H);

    auto curve_for = [&](double B) {
        const int n = grid_cells(L, B, num.grid_per_unit);
        return solve_linear_bvp(model.positive, model.r, L, B, v_at_L,
                                util.value(B), n);
    };
    auto resid = [&](double B) {
        return curve_for(B).derivative_at(B) - util.deriv(B);
    };

    // First candidate is B = A; a degenerate tolerance accepts it outright.
    if (std::abs(resid(A)) <= num.tol_pasting) {
        return {A, curve_for(A)};
    }
    std::vector<double> cands;
    for (int i = 0; i <= kScanPoints; ++i) {
        cands.push_back(A + (B_max - A) * i / kScanPoints);
    }
    std::vector<std::pair<double, double>> samples;
    Bracket br;
    if (!scan_bracket(resid, cands, &br, &samples)) {
        throw NoBracketError(
            "positive stage: pasting residual has no sign change on [A, B_max]"
            " = [" + std::to_string(A) + ", " + std::to_string(B_max) +
            "]; samples: " + format_samples(samples));
    }
    const double B = bisect(resid, br, num.tol_pasting);
    return {B, curve_for(B)};
}

std::pair<double, GridFunction> solve_negative_stage(
    const ModelSpec& model, const PowerUtility& util,
    double v_at_H, const Numerics& num) {
    auto u = [&](double x) { return util.value(x); };
    auto up = [&](double x) { return util.deriv(x); };
    NegStageResult res = negative_stage_dirichlet(model, u, up, v_at_H, num);
    return {res.m, std::move(res.curve)};
}

std::pair<double, GridFunction> solve_negative_stage(
    const ModelSpec& model, const std::function<double(double)>& reward,
    const std::function<double(double)>& reward_deriv, double v_at_H,
    const Numerics& num) {
    NegStageResult res =
        negative_stage_dirichlet(model, reward, reward_deriv, v_at_H, num);
    return {res.m, std::move(res.curve)};
}

SellerSolution solve_seller(const ModelSpec& model, const PowerUtility& util,
                            const Numerics& num) {
    const double L = model.L, H = model.H;
    const double A = find_A(model, util);
    auto u = [&](double x) { return util.value(x); };
    auto up = [&](double x) { return util.deriv(x); };

    // Stage 1: assume m >= L, so v(L,+) = u(L) and the positive stage
    // decouples; the negative stage then takes v(H,-) = v(H,+).
    auto [B1, vpos1] = solve_positive_stage(model, util, u(L), A, num);
    const double vH1 = positive_value_at_H(model, util, B1, vpos1);
    NegStageResult neg1 = negative_stage_dirichlet(model, u, up, vH1, num);
    if (neg1.m >= L) {
        const double contH = std::abs(vH1 - neg1.curve.values().back());
        const double pastB = vpos1.derivative_at(B1) - util.deriv(B1);
        return SellerSolution{B1,
                              neg1.m,
                              SellerCase::MAboveL,
                              std::move(vpos1),
                              std::move(neg1.curve),
                              pastB,
                              neg1.pasting_residual,
                              contH,
                              A,
                              u(L)};
    }

    // Stage 2: m < L. Couple through w = v(L,+) = v(L,-); drive the
    // continuity residual at H to zero. The root typically sits just above
    // u(L), so candidates walk a geometric ladder toward it.
    struct Full {
        double B;
        GridFunction v_pos;
        NegStageResult neg;
        double residual;
    };
    auto evaluate = [&](double w) {
        auto [B, vp] = solve_positive_stage(model, util, w, A, num);
        NegStageResult ng = negative_stage_anchored(model, u, up, w, num);
        const double res =
            positive_value_at_H(model, util, B, vp) - ng.curve.values().back();
        return Full{B, std::move(vp), std::move(ng), res};
    };

    double span = 10.0 * (u(H) - u(L));
    Bracket br;
    bool found = false;
    std::vector<std::pair<double, double>> samples;
    for (int widen = 0; widen < 4 && !found; ++widen, span *= 2.0) {
        samples.clear();
        double prev_w = u(L) + span;
        double prev_r = evaluate(prev_w).residual;
        samples.emplace_back(prev_w, prev_r);
        for (int i = 1; i < 48; ++i) {
            const double w = u(L) + span * std::pow(0.5, i);
            const double rr = evaluate(w).residual;
            samples.emplace_back(w, rr);
            if ((rr <= 0.0) != (prev_r <= 0.0)) {
                br = {w, prev_w, rr, prev_r};
                found = true;
                break;
            }
            prev_w = w;
            prev_r = rr;
        }
    }
    if (!found) {
        throw NoBracketError(
            "stage 2: continuity residual v(H,+)-v(H,-) has no sign change on "
            "the w ladder above u(L); samples (w, residual): " +
            format_samples(samples));
    }

    double w = 0.5 * (br.lo + br.hi);
    Full best = evaluate(w);
    for (int it = 0; it < kMaxBisect; ++it) {
        if (std::abs(best.residual) <= num.tol_continuity ||
            br.hi - br.lo < 1e-15 * (1.0 + std::abs(br.hi))) {
            break;
        }
        if ((best.residual <= 0.0) == (br.res_lo <= 0.0)) {
            br.lo = w;
            br.res_lo = best.residual;
        } else {
            br.hi = w;
            br.res_hi = best.residual;
        }
        w = 0.5 * (br.lo + br.hi);
        best = evaluate(w);
    }
    if (std::abs(best.residual) > num.tol_continuity) {
        throw NoBracketError(
            "stage 2: continuity residual stalled at " +
            std::to_string(best.residual) + " (tolerance " +
            std::to_string(num.tol_continuity) + "); ladder: " +
            format_samples(samples));
    }

    SellerSolution sol{best.B,
                       best.neg.m,
                       best.neg.m == 0.0 ? SellerCase::MZero : SellerCase::MBelowL,
                       std::move(best.v_pos),
                       std::move(best.neg.curve),
                       0.0,
                       best.neg.pasting_residual,
                       std::abs(best.residual),
                       A,
                       w};
    sol.pasting_residual_B = sol.v_pos.derivative_at(sol.B) - util.deriv(sol.B);
    return sol;
}

double seller_value_at(const SellerSolution& sol, const PowerUtility& util,
                       double x, Regime f) {
    if (f == Regime::Positive) {
        if (x < sol.v_pos.lo()) {
            throw DomainError("positive regime is defined on x >= L");
        }
        if (x >= sol.B) return util.value(x);
        return sol.v_pos.value_at(x);
    }
    if (x < 0.0 || x > sol.v_neg.hi()) {
        throw DomainError("negative regime is defined on 0 <= x <= H");
    }
    if (x <= sol.m) return util.value(x);
    return sol.v_neg.value_at(x);
}

double seller_deriv_at(const SellerSolution& sol, const PowerUtility& util,
                       double x, Regime f) {
    if (f == Regime::Positive) {
        if (x < sol.v_pos.lo()) {
            throw DomainError("positive regime is defined on x >= L");
        }
        if (x > sol.B) return util.deriv(x);
        return sol.v_pos.derivative_at(x);  // left derivative at B
    }
    if (x < 0.0 || x > sol.v_neg.hi()) {
        throw DomainError("negative regime is defined on 0 <= x <= H");
    }
    if (x < sol.m) return util.deriv(x);
    return sol.v_neg.derivative_at(x);
}

} // namespace stopline
