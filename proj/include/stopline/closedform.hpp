#ifndef STOPLINE_CLOSEDFORM_HPP
#define STOPLINE_CLOSEDFORM_HPP

#include <utility>

#include "stopline/model.hpp"

namespace stopline {

/// The analytically solvable configuration: affine positive regime with
/// mu+ = sigma+^2 = r = c = 0.1, GBM negative regime with mu- = sigma-^2 =
/// 1/30, u(x) = x^0.8, L = 1, H = 2. Both regime ODEs have elementary
/// general solutions
///     v(x,+) = C1 (x-1) e^{2/x} + C2 (x+1)
///     v(x,-) = C3 x^{-3} + C4 x^2
/// so every boundary and value curve is available in closed form for use as
/// a solver oracle.
class ExampleOracle {
public:
    ExampleOracle();

    // Reported constants, at the precision they were reported.
    static constexpr double gamma = 0.8;
    static constexpr double mu_minus = 1.0 / 30.0;
    static constexpr double sigma2_minus = 1.0 / 30.0;
    static constexpr double r = 0.1;
    static constexpr double c = 0.1;
    static constexpr double L = 1.0;
    static constexpr double H = 2.0;
    static constexpr double A_exact = 20.0 / 7.0;
    static constexpr double B_star = 3.839282;
    static constexpr double m_star = 1.775502;
    static constexpr double a_star = 1.1632;
    static constexpr double b_star = 2.1686;
    static constexpr double C1 = 0.1075171;
    static constexpr double C2 = 0.5;
    static constexpr double C3 = 2.126333;
    static constexpr double C4 = 0.3816175;
    // Buyer coefficients as originally reported. alpha and the tail
    // coefficient check out against the buyer boundary conditions;
    // beta_reported and c4_reported do not (they imply a = 1.2448, not the
    // reported 1.1632), so the evaluation below recomputes the consistent
    // values from the seller closed form. See buyer_beta()/buyer_c4() for
    // what is actually used.
    static constexpr double alpha_reported = 0.0408;
    static constexpr double beta_reported = 0.0138;
    static constexpr double tail_reported = 0.1858;  // unnormalized basis
    static constexpr double c4_reported = 0.0277;

    /// Seller value function V(x, f): the closed-form continuation curves on
    /// (L, B*) x {+} and (m*, H) x {-}, u(x) on the stopping branches.
    double seller_value(double x, Regime f) const;
    double seller_deriv(double x, Regime f) const;

    /// Buyer gains g(x, f) = V(x, f) - u(x).
    double gains(double x, Regime f) const;

    /// Buyer value function V_p(x, f), four branches.
    double buyer_value(double x, Regime f) const;

    /// phi+ normalized to phi(H) = 1 (proportional to (x+1) - (x-1)e^{2/x}).
    double phi(double x) const;

    // Derived buyer constants actually used by buyer_value.
    double buyer_alpha() const { return alpha_; }
    double buyer_beta() const { return beta_; }
    double buyer_c4() const { return c4_; }
    double tail_coeff() const { return tail_; }  // multiplies phi (phi(H)=1)

    ModelSpec model() const;
    PowerUtility utility() const { return PowerUtility(gamma); }

private:
    double alpha_;
    double beta_;
    double c4_;
    double tail_;
};

/// Real roots (alpha, beta), alpha > 0 > beta, of the indicial equation
/// (1/2) sigma2 y^2 + (mu - sigma2/2) y - r = 0 for the GBM regime, so that
/// v(x,-) = C alpha-power + D beta-power solves L- v - r v = 0.
std::pair<double, double> negative_regime_exponents(double mu, double sigma2,
                                                    double r);

} // namespace stopline

#endif
