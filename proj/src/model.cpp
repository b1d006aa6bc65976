#include "stopline/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace stopline {

namespace {

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) {
        throw ParameterError(std::string(name) + " must be finite");
    }
}

} // namespace

const char* to_string(DynKind k) {
    switch (k) {
        case DynKind::Affine:    return "affine";
        case DynKind::Gbm:       return "gbm";
        case DynKind::Vasicek:   return "vasicek";
        case DynKind::Cir:       return "cir";
        case DynKind::Tabulated: return "tabulated";
    }
    return "?";
}

RegimeDynamics::RegimeDynamics(DynKind kind, double mu, double c, double sigma2)
    : kind_(kind), mu_(mu), c_(c), sigma2_(sigma2) {
    require_finite(mu, "mu");
    require_finite(c, "c");
    require_finite(sigma2, "sigma2");
    if (sigma2 <= 0.0) {
        throw ParameterError("sigma2 must be strictly positive");
    }
}

RegimeDynamics::RegimeDynamics(std::vector<TablePoint> table)
    : kind_(DynKind::Tabulated), table_(std::move(table)) {
    if (table_.size() < 2) {
        throw ParameterError("tabulated dynamics need at least two points");
    }
    for (std::size_t i = 0; i < table_.size(); ++i) {
        require_finite(table_[i].x, "table x");
        require_finite(table_[i].mu, "table mu");
        require_finite(table_[i].sigma, "table sigma");
        if (table_[i].sigma <= 0.0) {
            throw ParameterError("table sigma must be strictly positive");
        }
        if (i > 0 && table_[i].x <= table_[i - 1].x) {
            throw ParameterError("table abscissae must be strictly increasing");
        }
    }
}

RegimeDynamics RegimeDynamics::affine(double mu, double c, double sigma2) {
    return RegimeDynamics(DynKind::Affine, mu, c, sigma2);
}

RegimeDynamics RegimeDynamics::gbm(double mu, double sigma2) {
    return RegimeDynamics(DynKind::Gbm, mu, 0.0, sigma2);
}

RegimeDynamics RegimeDynamics::vasicek(double c, double mu, double sigma2) {
    return RegimeDynamics(DynKind::Vasicek, mu, c, sigma2);
}

RegimeDynamics RegimeDynamics::cir(double c, double mu, double sigma2) {
    return RegimeDynamics(DynKind::Cir, mu, c, sigma2);
}

RegimeDynamics RegimeDynamics::tabulated(std::vector<TablePoint> table) {
    return RegimeDynamics(std::move(table));
}

namespace {

// Piecewise-linear lookup; clamps only floating slack, rejects true outsiders.
const TablePoint* table_bracket(const std::vector<TablePoint>& t, double x,
                                double* frac) {
    const double slack = 1e-9 * (t.back().x - t.front().x);
    if (x < t.front().x - slack || x > t.back().x + slack) {
        throw DomainError("x outside tabulated dynamics range");
    }
    x = std::clamp(x, t.front().x, t.back().x);
    auto it = std::upper_bound(t.begin(), t.end(), x,
                               [](double v, const TablePoint& p) { return v < p.x; });
    std::size_t hi = std::min<std::size_t>(t.size() - 1,
                                           static_cast<std::size_t>(it - t.begin()));
    if (hi == 0) hi = 1;
    const TablePoint* lo = &t[hi - 1];
    *frac = (x - lo->x) / (t[hi].x - lo->x);
    return lo;
}

} // namespace

double RegimeDynamics::drift(double x) const {
    double out = 0.0;
    switch (kind_) {
        case DynKind::Affine:  out = c_ + mu_ * x; break;
        case DynKind::Gbm:     out = mu_ * x; break;
        case DynKind::Vasicek:
        case DynKind::Cir:     out = c_ - mu_ * x; break;
        case DynKind::Tabulated: {
            double frac = 0.0;
            const TablePoint* lo = table_bracket(table_, x, &frac);
            out = lo->mu + frac * ((lo + 1)->mu - lo->mu);
            break;
        }
    }
    if (!std::isfinite(out)) {
        throw ParameterError("drift evaluated to a non-finite value");
    }
    return out;
}

double RegimeDynamics::vol(double x) const {
    double out = 0.0;
    switch (kind_) {
        case DynKind::Affine:
        case DynKind::Gbm:     out = std::sqrt(sigma2_) * x; break;
        case DynKind::Vasicek: out = std::sqrt(sigma2_); break;
        case DynKind::Cir:
            if (x < 0.0) throw DomainError("CIR volatility needs x >= 0");
            out = std::sqrt(sigma2_ * x);
            break;
        case DynKind::Tabulated: {
            double frac = 0.0;
            const TablePoint* lo = table_bracket(table_, x, &frac);
            out = lo->sigma + frac * ((lo + 1)->sigma - lo->sigma);
            break;
        }
    }
    if (!std::isfinite(out) || out <= 0.0) {
        throw NumericalError("volatility is not strictly positive at x=" +
                             std::to_string(x));
    }
    return out;
}

double RegimeDynamics::vol2(double x) const {
    const double s = vol(x);
    return s * s;
}

ModelSpec::ModelSpec(RegimeDynamics pos, RegimeDynamics neg,
                     double L_, double H_, double r_)
    : positive(std::move(pos)), negative(std::move(neg)), L(L_), H(H_), r(r_) {
    require_finite(L, "L");
    require_finite(H, "H");
    require_finite(r, "r");
    if (!(0.0 < L && L < H)) {
        throw ParameterError("thresholds must satisfy 0 < L < H");
    }
    if (r <= 0.0) {
        throw ParameterError("discount rate r must be positive");
    }
}

PowerUtility::PowerUtility(double gamma) : gamma_(gamma) {
    require_finite(gamma, "gamma");
    if (gamma <= 0.0) {
        throw ParameterError("utility exponent gamma must be positive");
    }
}

double PowerUtility::value(double x) const {
    if (x < 0.0) throw DomainError("utility defined on x >= 0");
    return std::pow(x, gamma_);
}

double PowerUtility::deriv(double x) const {
    if (x < 0.0) throw DomainError("utility defined on x >= 0");
    return gamma_ * std::pow(x, gamma_ - 1.0);
}

double PowerUtility::deriv2(double x) const {
    if (x < 0.0) throw DomainError("utility defined on x >= 0");
    return gamma_ * (gamma_ - 1.0) * std::pow(x, gamma_ - 2.0);
}

double apply_generator(const RegimeDynamics& dyn, double r,
                       double h, double h1, double h2, double x) {
    if (!std::isfinite(h) || !std::isfinite(h1) || !std::isfinite(h2)) {
        throw ParameterError("apply_generator needs finite h, h', h''");
    }
    const double out = dyn.drift(x) * h1 + 0.5 * dyn.vol2(x) * h2 - r * h;
    if (!std::isfinite(out)) {
        throw NumericalError("generator evaluated to a non-finite value");
    }
    return out;
}

namespace {

// Sign with a dead band: |v| < 1e-12 counts as zero so float noise at the
// root does not register as a sign violation.
int dead_band_sign(double v) {
    if (std::abs(v) < 1e-12) return 0;
    return v > 0.0 ? 1 : -1;
}

double generator_on_utility(const RegimeDynamics& dyn, double r,
                            const PowerUtility& u, double x) {
    return apply_generator(dyn, r, u.value(x), u.deriv(x), u.deriv2(x), x);
}

} // namespace

double find_A(const ModelSpec& model, const PowerUtility& util,
              double search_hi, double scan_step) {
    const double L = model.L;
    if (search_hi <= 0.0) search_hi = std::max(100.0, 50.0 * model.H);
    if (search_hi <= L) throw ParameterError("find_A: search_hi must exceed L");
    if (scan_step <= 0.0) scan_step = (search_hi - L) / 8192.0;

    auto f = [&](double x) {
        return generator_on_utility(model.positive, model.r, util, x);
    };

    // Scan for the single + -> - transition.
    double prev_x = 0.0;
    int prev_sign = 0;
    int transitions = 0;
    double blo = 0.0, bhi = 0.0;
    bool seen_positive = false;
    for (double x = L + scan_step; x <= search_hi + 0.5 * scan_step;
         x += scan_step) {
        const double xc = std::min(x, search_hi);
        const int s = dead_band_sign(f(xc));
        if (s != 0) {
            if (prev_sign != 0 && s != prev_sign) {
                ++transitions;
                if (prev_sign > 0 && s < 0) { blo = prev_x; bhi = xc; }
            }
            if (s > 0) seen_positive = true;
            prev_sign = s;
            prev_x = xc;
        }
        if (xc >= search_hi) break;
    }
    if (transitions > 1) {
        throw AssumptionViolation(
            "find_A: generator sign is non-monotone on the scan grid");
    }
    if (transitions == 0 || !seen_positive || blo == 0.0) {
        throw AssumptionViolation(
            "find_A: no sign change of L+u - ru on (L, " +
            std::to_string(search_hi) + "]");
    }

    // Bisect within the bracketing cell.
    double lo = blo, hi = bhi;
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

AssumptionReport verify_assumptions(const ModelSpec& model,
                                    const PowerUtility& util) {
    AssumptionReport rep;
    std::ostringstream detail;

    // Negative regime: L-u - ru < 0 sampled on (eps, H), step 1e-3.
    rep.negative_sign_ok = true;
    const double eps = 1e-6;
    for (double x = eps; x < model.H; x += 1e-3) {
        const double v = generator_on_utility(model.negative, model.r, util, x);
        if (dead_band_sign(v) > 0) {
            rep.negative_sign_ok = false;
            detail << "L-u - ru > 0 at x=" << x << "; ";
            break;
        }
    }

    // Positive regime: locate A, then check + before and - after on (L, 10A).
    try {
        rep.A = find_A(model, util);
    } catch (const AssumptionViolation& e) {
        rep.positive_pattern_ok = false;
        detail << e.what();
        rep.detail = detail.str();
        return rep;
    }
    rep.positive_pattern_ok = true;
    for (double x = model.L + 1e-3; x < 10.0 * rep.A; x += 1e-3) {
        const double v = generator_on_utility(model.positive, model.r, util, x);
        const int s = dead_band_sign(v);
        if ((x < rep.A && s < 0) || (x > rep.A && s > 0)) {
            rep.positive_pattern_ok = false;
            detail << "L+u - ru has wrong sign at x=" << x << "; ";
            break;
        }
    }
    rep.detail = detail.str();
    return rep;
}

} // namespace stopline
