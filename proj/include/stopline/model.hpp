#ifndef STOPLINE_MODEL_HPP
#define STOPLINE_MODEL_HPP

#include <string>
#include <vector>

#include "stopline/errors.hpp"

namespace stopline {

/// Market regime flag of the two-state price process.
enum class Regime { Positive, Negative };

inline const char* to_string(Regime f) {
    return f == Regime::Positive ? "+" : "-";
}

enum class DynKind { Affine, Gbm, Vasicek, Cir, Tabulated };

const char* to_string(DynKind k);

/// One row of a tabulated dynamics specification.
struct TablePoint {
    double x;
    double mu;
    double sigma;
};

/// Drift/volatility specification of one regime.
///
/// Closed-form kinds:
///   Affine:   mu(x) = c + mu*x        sigma(x) = sigma*x
///   Gbm:      mu(x) = mu*x            sigma(x) = sigma*x
///   Vasicek:  mu(x) = c - mu*x        sigma(x) = sigma
///   Cir:      mu(x) = c - mu*x        sigma(x) = sigma*sqrt(x)
/// Tabulated dynamics interpolate (mu, sigma) piecewise-linearly between
/// the given abscissae and are only defined on [x_front, x_back].
class RegimeDynamics {
public:
    static RegimeDynamics affine(double mu, double c, double sigma2);
    static RegimeDynamics gbm(double mu, double sigma2);
    static RegimeDynamics vasicek(double c, double mu, double sigma2);
    static RegimeDynamics cir(double c, double mu, double sigma2);
    static RegimeDynamics tabulated(std::vector<TablePoint> table);

    DynKind kind() const { return kind_; }
    double mu_param() const { return mu_; }
    double c_param() const { return c_; }
    double sigma2_param() const { return sigma2_; }
    const std::vector<TablePoint>& table() const { return table_; }

    double drift(double x) const;
    /// sigma(x); throws NumericalError if the local volatility is not
    /// strictly positive (ellipticity violation).
    double vol(double x) const;
    double vol2(double x) const;

private:
    RegimeDynamics(DynKind kind, double mu, double c, double sigma2);
    explicit RegimeDynamics(std::vector<TablePoint> table);

    DynKind kind_;
    double mu_ = 0.0;
    double c_ = 0.0;
    double sigma2_ = 0.0;
    std::vector<TablePoint> table_;
};

/// The two-regime model: dynamics pair, thresholds 0 < L < H, discount r > 0.
struct ModelSpec {
    ModelSpec(RegimeDynamics positive, RegimeDynamics negative,
              double L, double H, double r);

    RegimeDynamics positive;
    RegimeDynamics negative;
    double L;
    double H;
    double r;

    const RegimeDynamics& dyn(Regime f) const {
        return f == Regime::Positive ? positive : negative;
    }
};

/// Power utility u(x) = x^gamma, gamma > 0 (gamma > 1 permitted).
class PowerUtility {
public:
    explicit PowerUtility(double gamma);

    double gamma() const { return gamma_; }
    double value(double x) const;
    double deriv(double x) const;
    double deriv2(double x) const;

private:
    double gamma_;
};

/// Result of checking the generator sign conditions that the solvers rely on.
struct AssumptionReport {
    double A = 0.0;                  // sign-change point of L+u - ru, if found
    bool negative_sign_ok = false;   // L-u - ru < 0 on (0, H)
    bool positive_pattern_ok = false;// + on (L, A), - on (A, 10A), single change
    std::string detail;              // human-readable failure note

    bool ok() const { return negative_sign_ok && positive_pattern_ok; }
};

/// Lf h - r h = mu_f h' + (1/2) sigma_f^2 h'' - r h evaluated at x.
double apply_generator(const RegimeDynamics& dyn, double r,
                       double h, double h1, double h2, double x);

/// Unique root A of x -> L+u(x) - r u(x) on (L, search_hi], located by a
/// sign scan followed by bisection to 1e-10. search_hi <= 0 selects the
/// default max(100, 50 H). scan_step <= 0 selects (search_hi - L)/8192.
double find_A(const ModelSpec& model, const PowerUtility& util,
              double search_hi = 0.0, double scan_step = 0.0);

/// Samples the generator sign pattern for both regimes on fine grids.
/// Violations set report flags false; they do not throw.
AssumptionReport verify_assumptions(const ModelSpec& model,
                                    const PowerUtility& util);

} // namespace stopline

#endif
