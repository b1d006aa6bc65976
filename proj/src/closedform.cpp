#include "stopline/closedform.hpp"

#include <cmath>

namespace stopline {

namespace {

double E1(double x) { return (x - 1.0) * std::exp(2.0 / x); }
double E1p(double x) {
    return std::exp(2.0 / x) * (x * x - 2.0 * x + 2.0) / (x * x);
}
double E2(double x) { return x + 1.0; }

double u(double x) { return std::pow(x, ExampleOracle::gamma); }
double up(double x) {
    return ExampleOracle::gamma * std::pow(x, ExampleOracle::gamma - 1.0);
}

constexpr double kPhiNorm = 3.0 - 2.718281828459045235;  // E2(2) - E1(2)

} // namespace

ExampleOracle::ExampleOracle() {
    // Buyer constants consistent with the boundary conditions:
    //   k = g(H,+) because a* < H <= b*; vp(0,-)=0 kills the x^-3 branch.
    const double gH = C1 * E1(H) + C2 * E2(H) - u(H);
    c4_ = gH / (H * H);
    beta_ = c4_ * L * L / E2(L);     // vp(L,+) = vp(L,-) and E1(L) = 0
    const double ga = C1 * E1(a_star) + C2 * E2(a_star) - u(a_star);
    alpha_ = (ga - beta_ * E2(a_star)) / E1(a_star);
    const double gb = C1 * E1(b_star) + C2 * E2(b_star) - u(b_star);
    tail_ = gb / phi(b_star);
}

double ExampleOracle::phi(double x) const {
    return (E2(x) - E1(x)) / kPhiNorm;
}

double ExampleOracle::seller_value(double x, Regime f) const {
    if (f == Regime::Positive) {
        if (x < L) throw DomainError("positive regime needs x >= L");
        if (x >= B_star) return u(x);
        return C1 * E1(x) + C2 * E2(x);
    }
    if (x < 0.0 || x > H) throw DomainError("negative regime needs 0 <= x <= H");
    if (x <= m_star) return u(x);
    return C3 * std::pow(x, -3.0) + C4 * x * x;
}

double ExampleOracle::seller_deriv(double x, Regime f) const {
    if (f == Regime::Positive) {
        if (x < L) throw DomainError("positive regime needs x >= L");
        if (x >= B_star) return up(x);
        return C1 * E1p(x) + C2;
    }
    if (x < 0.0 || x > H) throw DomainError("negative regime needs 0 <= x <= H");
    if (x <= m_star) return up(x);
    return -3.0 * C3 * std::pow(x, -4.0) + 2.0 * C4 * x;
}

double ExampleOracle::gains(double x, Regime f) const {
    return seller_value(x, f) - u(x);
}

double ExampleOracle::buyer_value(double x, Regime f) const {
    if (f == Regime::Negative) {
        if (x < 0.0 || x > H) throw DomainError("negative regime needs 0 <= x <= H");
        return c4_ * x * x;
    }
    if (x < L) throw DomainError("positive regime needs x >= L");
    if (x < a_star) return alpha_ * E1(x) + beta_ * E2(x);
    if (x <= b_star) return gains(x, Regime::Positive);
    return tail_ * phi(x);
}

ModelSpec ExampleOracle::model() const {
    return ModelSpec(RegimeDynamics::affine(c, c, c),
                     RegimeDynamics::gbm(mu_minus, sigma2_minus), L, H, r);
}

std::pair<double, double> negative_regime_exponents(double mu, double sigma2,
                                                    double r) {
    if (sigma2 <= 0.0) throw ParameterError("sigma2 must be positive");
    const double a = 0.5 * sigma2;
    const double b = mu - 0.5 * sigma2;
    const double disc = b * b + 4.0 * a * r;  // -(-r) product: always >= b^2
    const double root = std::sqrt(disc);
    // Stable quadratic formula; order as (positive-or-zero, negative-or-zero).
    const double q = -0.5 * (b + (b >= 0.0 ? root : -root));
    double y1 = q / a;
    double y2 = (q != 0.0) ? -r / q : 0.0;
    if (y1 < y2) std::swap(y1, y2);
    return {y1, y2};
}

} // namespace stopline
