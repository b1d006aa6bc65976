#include "stopline/odesolve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace stopline {

GridFunction::GridFunction(double lo, double hi, std::vector<double> values)
    : lo_(lo), hi_(hi), values_(std::move(values)) {
    if (!(lo < hi)) throw ParameterError("GridFunction needs lo < hi");
    if (values_.size() < 17) throw ParameterError("GridFunction needs n >= 16");
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw NumericalError("GridFunction holds a non-finite value");
        }
    }
}

int GridFunction::locate(double x) const {
    const double slack = 1e-9 * (hi_ - lo_);
    if (x < lo_ - slack || x > hi_ + slack) {
        throw DomainError("x=" + std::to_string(x) + " outside grid [" +
                          std::to_string(lo_) + ", " + std::to_string(hi_) + "]");
    }
    const double h = step();
    int i = static_cast<int>(std::floor((x - lo_) / h));
    return std::clamp(i, 0, cells() - 1);
}

double GridFunction::value_at(double x) const {
    const int i = locate(x);
    const double h = step();
    const double t = (x - node(i)) / h;
    return values_[i] + t * (values_[i + 1] - values_[i]);
}

double GridFunction::node_derivative(int i) const {
    const double h = step();
    const int n = cells();
    if (i == 0) return (-3.0 * values_[0] + 4.0 * values_[1] - values_[2]) / (2.0 * h);
    if (i == n) return (3.0 * values_[n] - 4.0 * values_[n - 1] + values_[n - 2]) / (2.0 * h);
    return (values_[i + 1] - values_[i - 1]) / (2.0 * h);
}

double GridFunction::derivative_at(double x) const {
    const int i = locate(x);
    const double h = step();
    const double t = (x - node(i)) / h;
    const double d0 = node_derivative(i);
    const double d1 = node_derivative(i + 1);
    return d0 + t * (d1 - d0);
}

double resample(const GridFunction& g, double x) { return g.value_at(x); }
double derivative_at(const GridFunction& g, double x) { return g.derivative_at(x); }

int grid_cells(double lo, double hi, int cells_per_unit) {
    const double want = (hi - lo) * cells_per_unit;
    return std::max(16, static_cast<int>(std::ceil(want - 1e-9)));
}

GridFunction solve_linear_bvp(const RegimeDynamics& dyn, double r,
                              double lo, double hi,
                              double v_lo, double v_hi, int n) {
    if (!(lo < hi)) throw ParameterError("solve_linear_bvp needs lo < hi");
    if (n < 16) throw ParameterError("solve_linear_bvp needs n >= 16");
    const double h = (hi - lo) / n;

    // Interior rows of  mu v' + sig2/2 v'' - r v = 0 with central differences.
    std::vector<double> sub(n - 1), dia(n - 1), sup(n - 1), rhs(n - 1, 0.0);
    for (int j = 1; j < n; ++j) {
        const double x = lo + h * j;
        const double mu = dyn.drift(x);
        const double s2 = dyn.vol2(x);
        sub[j - 1] = s2 / (2.0 * h * h) - mu / (2.0 * h);
        dia[j - 1] = -s2 / (h * h) - r;
        sup[j - 1] = s2 / (2.0 * h * h) + mu / (2.0 * h);
    }
    rhs[0] -= sub[0] * v_lo;
    rhs[n - 2] -= sup[n - 2] * v_hi;

    // Thomas algorithm.
    for (int j = 1; j < n - 1; ++j) {
        if (dia[j - 1] == 0.0) {
            throw NumericalError("singular tridiagonal pivot in BVP solve");
        }
        const double w = sub[j] / dia[j - 1];
        dia[j] -= w * sup[j - 1];
        rhs[j] -= w * rhs[j - 1];
    }
    std::vector<double> v(n + 1);
    v[0] = v_lo;
    v[n] = v_hi;
    if (dia[n - 2] == 0.0) {
        throw NumericalError("singular tridiagonal pivot in BVP solve");
    }
    v[n - 1] = rhs[n - 2] / dia[n - 2];
    for (int j = n - 2; j >= 1; --j) {
        v[j] = (rhs[j - 1] - sup[j - 1] * v[j + 1]) / dia[j - 1];
    }
    return GridFunction(lo, hi, std::move(v));
}

FundamentalSolution fundamental_phi_plus(const ModelSpec& model,
                                         double x_max, int n) {
    if (x_max <= model.H) {
        throw ParameterError("fundamental_phi_plus needs x_max > H");
    }
    GridFunction raw = solve_linear_bvp(model.positive, model.r,
                                        model.L, x_max, 1.0, 0.0, n);
    const double at_H = raw.value_at(model.H);
    if (!(at_H > 0.0)) {
        throw NumericalError("phi+ vanished at H; truncation too small");
    }
    std::vector<double> scaled(raw.values().begin(), raw.values().end());
    for (double& v : scaled) v /= at_H;

    // Strictly decreasing and positive, except that the far tail is allowed
    // to sit flat once the true decay underflows double precision.
    for (std::size_t i = 0; i + 1 < scaled.size(); ++i) {
        const bool underflowed = scaled[i] <= 1e-250 && scaled[i + 1] <= 1e-250;
        if (scaled[i + 1] < 0.0 || (!underflowed && scaled[i + 1] >= scaled[i])) {
            throw NumericalError(
                "phi+ is not strictly decreasing; retry with larger x_max");
        }
    }
    return FundamentalSolution{GridFunction(model.L, x_max, std::move(scaled))};
}

} // namespace stopline
