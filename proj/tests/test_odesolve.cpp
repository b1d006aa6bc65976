#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "stopline/odesolve.hpp"

using namespace stopline;

namespace {

// Closed-form continuation curves of the analytically solvable model.
double vpos_exact(double x) {
    return 0.1075171 * (x - 1.0) * std::exp(2.0 / x) + 0.5 * (x + 1.0);
}
double vneg_exact(double x) {
    return 2.126333 * std::pow(x, -3.0) + 0.3816175 * x * x;
}
double phi_exact(double x) {
    return ((x + 1.0) - (x - 1.0) * std::exp(2.0 / x)) / (3.0 - std::exp(1.0));
}

RegimeDynamics pos_dyn() { return RegimeDynamics::affine(0.1, 0.1, 0.1); }
RegimeDynamics neg_dyn() { return RegimeDynamics::gbm(1.0 / 30.0, 1.0 / 30.0); }

GridFunction sample(double lo, double hi, int n, double (*f)(double)) {
    std::vector<double> v(n + 1);
    for (int i = 0; i <= n; ++i) v[i] = f(lo + (hi - lo) * i / n);
    return GridFunction(lo, hi, std::move(v));
}

} // namespace

TEST_CASE("zero boundary data yields the zero solution") {
    GridFunction g = solve_linear_bvp(pos_dyn(), 0.1, 1.0, 2.0, 0.0, 0.0, 64);
    for (double v : g.values()) CHECK(v == 0.0);
}

TEST_CASE("negative-regime BVP matches the closed form") {
    const double m = 1.775502, H = 2.0;
    GridFunction g = solve_linear_bvp(neg_dyn(), 0.1, m, H, vneg_exact(m),
                                      vneg_exact(H), 4096);
    double max_err = 0.0;
    for (int i = 0; i <= g.cells(); ++i) {
        max_err = std::max(max_err, std::abs(g.values()[i] - vneg_exact(g.node(i))));
    }
    CHECK(max_err <= 1e-4);
}

TEST_CASE("positive-regime BVP matches the closed form") {
    const double L = 1.0, B = 3.839282;
    GridFunction g = solve_linear_bvp(pos_dyn(), 0.1, L, B, vpos_exact(L),
                                      vpos_exact(B), 4096);
    double max_err = 0.0;
    for (int i = 0; i <= g.cells(); ++i) {
        max_err = std::max(max_err, std::abs(g.values()[i] - vpos_exact(g.node(i))));
    }
    CHECK(max_err <= 1e-4);
}

TEST_CASE("convergence order is two: error ratio in [3,5] under doubling") {
    const double L = 1.0, B = 3.839282;
    std::vector<double> errs;
    for (int n : {256, 512, 1024}) {
        GridFunction g = solve_linear_bvp(pos_dyn(), 0.1, L, B, vpos_exact(L),
                                          vpos_exact(B), n);
        double e = 0.0;
        for (int i = 0; i <= g.cells(); ++i) {
            e = std::max(e, std::abs(g.values()[i] - vpos_exact(g.node(i))));
        }
        errs.push_back(e);
    }
    CHECK(errs[0] / errs[1] > 3.0);
    CHECK(errs[0] / errs[1] < 5.0);
    CHECK(errs[1] / errs[2] > 3.0);
    CHECK(errs[1] / errs[2] < 5.0);
}

TEST_CASE("discrete maximum principle: nonnegative data, nonnegative solution") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> un(0.0, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
        GridFunction g = solve_linear_bvp(neg_dyn(), 0.1, 0.2, 2.0, un(rng),
                                          un(rng), 256);
        for (double v : g.values()) CHECK(v >= 0.0);
    }
}

TEST_CASE("derivative_at") {
    auto sq = [](double x) { return x * x; };
    GridFunction g = sample(0.0, 1.0, 512, +sq);
    CHECK(g.derivative_at(0.5) == doctest::Approx(1.0).epsilon(1e-9));

    auto pw = [](double x) { return std::pow(x, 0.8); };
    GridFunction p = sample(0.5, 2.0, 4096, +pw);
    CHECK(std::abs(p.derivative_at(1.0) - 0.8) < 1e-4);

    // smooth pasting residual at B on the exact positive curve
    GridFunction v = sample(1.0, 3.839282, 4096, &vpos_exact);
    const double uB = 0.8 * std::pow(3.839282, -0.2);
    CHECK(std::abs(v.derivative_at(3.839282) - uB) < 1e-3);

    CHECK_THROWS_AS(g.derivative_at(1.5), DomainError);
}

TEST_CASE("resample") {
    GridFunction lin = sample(0.0, 2.0, 64, +[](double x) { return 3.0 * x + 1.0; });
    CHECK(lin.value_at(lin.node(17)) == lin.values()[17]);
    CHECK(lin.value_at(0.5 * (lin.node(3) + lin.node(4))) ==
          doctest::Approx(3.0 * 0.5 * (lin.node(3) + lin.node(4)) + 1.0));

    auto pw = [](double x) { return std::pow(x, 0.8); };
    GridFunction p = sample(0.5, 2.0, 4096, +pw);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> un(0.5, 2.0);
    for (int i = 0; i < 200; ++i) {
        const double x = un(rng);
        CHECK(std::abs(p.value_at(x) - pw(x)) <= 1e-6);
    }
    CHECK_THROWS_AS(p.value_at(0.4), DomainError);
    CHECK_THROWS_AS(p.value_at(2.2), DomainError);
}

TEST_CASE("GridFunction validation") {
    CHECK_THROWS_AS(GridFunction(1.0, 1.0, std::vector<double>(17, 0.0)),
                    ParameterError);
    CHECK_THROWS_AS(GridFunction(0.0, 1.0, std::vector<double>(5, 0.0)),
                    ParameterError);
    std::vector<double> bad(33, 0.0);
    bad[7] = std::nan("");
    CHECK_THROWS_AS(GridFunction(0.0, 1.0, std::move(bad)), NumericalError);
}

TEST_CASE("fundamental phi+ matches the closed form and is normalized") {
    const ModelSpec model(pos_dyn(), neg_dyn(), 1.0, 2.0, 0.1);
    const double x_max = 100.0 * (20.0 / 7.0);
    FundamentalSolution f =
        fundamental_phi_plus(model, x_max, grid_cells(1.0, x_max, 4096));
    CHECK(f.phi_plus.value_at(2.0) == doctest::Approx(1.0).epsilon(1e-12));
    for (double x = 1.0; x <= 5.0; x += 0.01) {
        const double rel =
            std::abs(f.phi_plus.value_at(x) - phi_exact(x)) / phi_exact(x);
        CHECK(rel <= 1e-3);
    }
    // strictly decreasing
    for (int i = 0; i + 1 <= f.phi_plus.cells(); ++i) {
        CHECK(f.phi_plus.values()[i + 1] < f.phi_plus.values()[i]);
    }
}

TEST_CASE("phi+ is stable under doubling the truncation") {
    const ModelSpec model(pos_dyn(), neg_dyn(), 1.0, 2.0, 0.1);
    // integer offsets from L keep both grids on the same nodes, so the
    // difference measures truncation alone
    const double xm = 573.0;
    FundamentalSolution f1 =
        fundamental_phi_plus(model, xm, grid_cells(1.0, xm, 4096));
    FundamentalSolution f2 =
        fundamental_phi_plus(model, 2 * xm - 1.0,
                             grid_cells(1.0, 2 * xm - 1.0, 4096));
    const double A = 20.0 / 7.0;
    for (double x = 1.0; x <= 2.0 * A; x += 0.01) {
        const double rel = std::abs(f1.phi_plus.value_at(x) -
                                    f2.phi_plus.value_at(x)) /
                           f2.phi_plus.value_at(x);
        CHECK(rel <= 1e-6);
    }
}

TEST_CASE("phi+ handles Gaussian-tail underflow of mean-reverting dynamics") {
    const ModelSpec model(RegimeDynamics::vasicek(0.7, 0.1, 0.1), neg_dyn(),
                          1.0, 2.0, 0.1);
    FundamentalSolution f =
        fundamental_phi_plus(model, 35.0, grid_cells(1.0, 35.0, 1024));
    CHECK(f.phi_plus.value_at(2.0) == doctest::Approx(1.0));
    CHECK(f.phi_plus.value_at(1.5) > f.phi_plus.value_at(2.0));
}
