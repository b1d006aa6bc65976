#ifndef STOPLINE_ODESOLVE_HPP
#define STOPLINE_ODESOLVE_HPP

#include <span>
#include <vector>

#include "stopline/model.hpp"

namespace stopline {

/// A function sampled on a uniform grid over [lo, hi] with n cells
/// (n+1 nodes). Carrier for all value curves and the fundamental solution.
class GridFunction {
public:
    GridFunction(double lo, double hi, std::vector<double> values);

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    int cells() const { return static_cast<int>(values_.size()) - 1; }
    double step() const { return (hi_ - lo_) / cells(); }
    std::span<const double> values() const { return values_; }
    double node(int i) const { return lo_ + step() * i; }

    /// Linear interpolation between neighbouring nodes; DomainError outside.
    double value_at(double x) const;
    double operator()(double x) const { return value_at(x); }

    /// Second-order derivative: central differences at interior nodes,
    /// one-sided stencils at the endpoints, linear interpolation of the
    /// node derivatives for off-node x.
    double derivative_at(double x) const;

private:
    int locate(double x) const;  // clamped cell index; throws outside [lo,hi]
    double node_derivative(int i) const;

    double lo_;
    double hi_;
    std::vector<double> values_;
};

/// The decreasing positive solution of L+ v - r v = 0, normalized so that
/// phi(H) = 1. Defined on [L, x_max]; the Dirichlet-zero far-field condition
/// at x_max truncates the decay.
struct FundamentalSolution {
    GridFunction phi_plus;
    double x_max() const { return phi_plus.hi(); }
};

/// Finite-difference solution of  mu_f v' + (1/2) sigma_f^2 v'' - r v = 0
/// on [lo, hi] with Dirichlet data, via central second-order differences and
/// a tridiagonal solve. Error O(step^2).
GridFunction solve_linear_bvp(const RegimeDynamics& dyn, double r,
                              double lo, double hi,
                              double v_lo, double v_hi, int n);

/// Convenience free functions mirroring the member operations.
double resample(const GridFunction& g, double x);
double derivative_at(const GridFunction& g, double x);

/// Computes phi+ on [L, x_max] with n cells. Throws NumericalError when the
/// result is not decreasing (truncation too small); the caller retries with
/// a doubled x_max. A flat tail at values below 1e-250 is accepted as
/// underflow of the true decay, not non-monotonicity.
FundamentalSolution fundamental_phi_plus(const ModelSpec& model,
                                         double x_max, int n);

/// Grid sizing used across the solvers: cells_per_unit cells per unit
/// length, at least 16 cells.
int grid_cells(double lo, double hi, int cells_per_unit);

} // namespace stopline

#endif
