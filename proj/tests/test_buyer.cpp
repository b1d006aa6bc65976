#include "doctest.h"

#include <cmath>
#include <vector>

#include "stopline/buyer.hpp"
#include "stopline/closedform.hpp"

using namespace stopline;

namespace {

const ExampleOracle& oracle() {
    static const ExampleOracle o;
    return o;
}

struct Solved {
    SellerSolution seller;
    FundamentalSolution phi;
    BuyerSolution buyer;
};

const Solved& closed_form() {
    static const Solved s = [] {
        const ModelSpec model = oracle().model();
        const PowerUtility u(0.8);
        SellerSolution seller = solve_seller(model, u, Numerics{});
        FundamentalSolution phi = make_phi_plus(model, seller.A, Numerics{});
        BuyerSolution buyer = solve_buyer(model, u, seller, phi, Numerics{});
        return Solved{std::move(seller), std::move(phi), std::move(buyer)};
    }();
    return s;
}

} // namespace

TEST_CASE("gains function on the closed-form config") {
    const PowerUtility u(0.8);
    const SellerSolution& sol = closed_form().seller;
    CHECK(gains_g(sol, u, sol.B, Regime::Positive) ==
          doctest::Approx(0.0).epsilon(1e-9));
    CHECK(gains_g(sol, u, 6.0, Regime::Positive) == 0.0);
    CHECK(gains_g(sol, u, 0.0, Regime::Negative) == 0.0);
    CHECK(gains_g(sol, u, 0.5, Regime::Negative) == 0.0);
    // 2.126333/8 + 0.3816175*4 - 2^0.8
    CHECK(gains_g(sol, u, 2.0, Regime::Negative) ==
          doctest::Approx(0.0511607).epsilon(2e-3));
}

TEST_CASE("find_b hits the root of the tail-optimality condition") {
    const Solved& s = closed_form();
    CHECK(std::abs(s.buyer.b - ExampleOracle::b_star) <= 5e-3);
    CHECK(std::abs(s.buyer.root_residual_b) <= 1e-6);
}

TEST_CASE("find_b is invariant under positive rescaling of phi") {
    const Solved& s = closed_form();
    const PowerUtility u(0.8);
    const double b1 = find_b(s.seller, u, s.phi, s.seller.A);
    std::vector<double> scaled(s.phi.phi_plus.values().begin(),
                               s.phi.phi_plus.values().end());
    for (double& v : scaled) v *= 37.5;
    FundamentalSolution phi2{GridFunction(s.phi.phi_plus.lo(),
                                          s.phi.phi_plus.hi(),
                                          std::move(scaled))};
    const double b2 = find_b(s.seller, u, phi2, s.seller.A);
    CHECK(std::abs(b1 - b2) <= 1e-9);
}

TEST_CASE("find_b is stable under doubling the phi truncation") {
    const Solved& s = closed_form();
    const PowerUtility u(0.8);
    Numerics wide;
    wide.x_max = 2.0 * s.phi.phi_plus.hi();
    FundamentalSolution phi2 = make_phi_plus(oracle().model(), s.seller.A, wide);
    const double b1 = find_b(s.seller, u, s.phi, s.seller.A);
    const double b2 = find_b(s.seller, u, phi2, s.seller.A);
    CHECK(std::abs(b1 - b2) <= 1e-5);
}

TEST_CASE("buy boundary and negative curve match the closed form") {
    const Solved& s = closed_form();
    CHECK(std::abs(s.buyer.a - ExampleOracle::a_star) <= 5e-3);
    // v_p(x,-) = (g(H,+)/H^2) x^2; the reported 0.0277 coefficient is not
    // consistent with the reported a* (see ExampleOracle).
    double max_err = 0.0;
    for (int i = 0; i <= s.buyer.vp_neg.cells(); ++i) {
        const double x = s.buyer.vp_neg.node(i);
        max_err = std::max(max_err, std::abs(s.buyer.vp_neg.values()[i] -
                                             oracle().buyer_c4() * x * x));
    }
    CHECK(max_err <= 1e-3);
    CHECK(s.buyer.vp_neg.values().front() == 0.0);
}

TEST_CASE("tail branch matches the reported closed form") {
    const Solved& s = closed_form();
    const PowerUtility u(0.8);
    // -0.1858 (x-1) e^{2/x} + 0.1858 (x+1) on [2.17, 5]
    double max_err = 0.0;
    for (double x = 2.17; x <= 5.0; x += 0.01) {
        const double paper =
            -0.1858 * (x - 1.0) * std::exp(2.0 / x) + 0.1858 * (x + 1.0);
        max_err = std::max(
            max_err,
            std::abs(buyer_value_at(s.buyer, s.seller, u, x, Regime::Positive) -
                     paper));
    }
    CHECK(max_err <= 1e-3);
}

TEST_CASE("buyer_value_at piecewise branches") {
    const Solved& s = closed_form();
    const PowerUtility u(0.8);
    const double mid = 0.5 * (s.buyer.a + s.buyer.b);
    CHECK(buyer_value_at(s.buyer, s.seller, u, mid, Regime::Positive) ==
          gains_g(s.seller, u, mid, Regime::Positive));
    CHECK(buyer_value_at(s.buyer, s.seller, u, 0.0, Regime::Negative) == 0.0);
    // 0.1858 [(3+1) - (3-1) e^{2/3}] = 0.0194..., agreement to 3 decimals
    CHECK(std::abs(buyer_value_at(s.buyer, s.seller, u, 3.0, Regime::Positive) -
                   0.1858 * (4.0 - 2.0 * std::exp(2.0 / 3.0))) < 5e-4);
    CHECK_THROWS_AS(buyer_value_at(s.buyer, s.seller, u, 0.2, Regime::Positive),
                    DomainError);
    CHECK_THROWS_AS(buyer_value_at(s.buyer, s.seller, u, 2.7, Regime::Negative),
                    DomainError);
}

TEST_CASE("shape and residual invariants") {
    const Solved& s = closed_form();
    CHECK(1.0 < s.buyer.a);
    CHECK(s.buyer.a < s.buyer.b);
    CHECK(s.buyer.b <= s.seller.A + 1e-6);
    CHECK(s.seller.A <= s.seller.B + 1e-9);
    CHECK(std::abs(s.buyer.pasting_residual_a) <= 1e-3);
    // derivative pasting at b: the tail slope matches g' there
    const double tail_slope =
        s.buyer.tail_coeff * s.phi.phi_plus.derivative_at(s.buyer.b);
    CHECK(std::abs(tail_slope - gains_g_deriv(s.seller, PowerUtility(0.8),
                                              s.buyer.b, Regime::Positive)) <=
          1e-3);
    CHECK(s.buyer.continuity_residual_L <= 1e-3);
    CHECK(s.buyer.continuity_residual_H <= 1e-3);
    // continuity of the assembled value across a, b, L, H
    const PowerUtility u(0.8);
    const double eps = 1e-7;
    for (double x : {s.buyer.a, s.buyer.b}) {
        const double jump =
            std::abs(buyer_value_at(s.buyer, s.seller, u, x - eps,
                                    Regime::Positive) -
                     buyer_value_at(s.buyer, s.seller, u, x + eps,
                                    Regime::Positive));
        CHECK(jump <= 1e-3);
    }
    const double jump_L =
        std::abs(buyer_value_at(s.buyer, s.seller, u, 1.0, Regime::Positive) -
                 buyer_value_at(s.buyer, s.seller, u, 1.0, Regime::Negative));
    CHECK(jump_L <= 1e-3);
    const double jump_H =
        std::abs(buyer_value_at(s.buyer, s.seller, u, 2.0, Regime::Negative) -
                 buyer_value_at(s.buyer, s.seller, u, 2.0, Regime::Positive));
    CHECK(jump_H <= 1e-3);
}

TEST_CASE("negative regime never stops away from the absorbing point") {
    const Solved& s = closed_form();
    const PowerUtility u(0.8);
    // V_p > g(.,-) strictly on (0,H) except at the H boundary junction
    for (int i = 1; i < s.buyer.vp_neg.cells(); ++i) {
        const double x = s.buyer.vp_neg.node(i);
        const double vp = s.buyer.vp_neg.values()[i];
        CHECK(vp - gains_g(s.seller, u, x, Regime::Negative) >= -1e-4);
    }
}

TEST_CASE("buyer value bounded by the best gains and nonnegative") {
    const Solved& s = closed_form();
    const PowerUtility u(0.8);
    double gmax = 0.0;
    for (double x = 1.0; x <= s.seller.B; x += 0.001) {
        gmax = std::max(gmax, gains_g(s.seller, u, x, Regime::Positive));
    }
    for (double x = 1.0; x <= 6.0; x += 0.01) {
        const double vp = buyer_value_at(s.buyer, s.seller, u, x,
                                         Regime::Positive);
        CHECK(vp >= 0.0);
        CHECK(vp <= gmax + 1e-9);
    }
    for (double x = 0.0; x <= 2.0; x += 0.01) {
        const double vp = buyer_value_at(s.buyer, s.seller, u, x,
                                         Regime::Negative);
        CHECK(vp >= 0.0);
        CHECK(vp <= gmax + 1e-9);
    }
}

TEST_CASE("buyer positive continuation curve matches the corrected closed form") {
    const Solved& s = closed_form();
    double max_err = 0.0;
    for (int i = 0; i <= s.buyer.vp_pos.cells(); ++i) {
        const double x = s.buyer.vp_pos.node(i);
        const double exact = oracle().buyer_alpha() * (x - 1.0) *
                                 std::exp(2.0 / x) +
                             oracle().buyer_beta() * (x + 1.0);
        max_err = std::max(max_err,
                           std::abs(s.buyer.vp_pos.values()[i] - exact));
    }
    CHECK(max_err <= 1e-3);
}

TEST_CASE("mean-reverting configs solve across the m < L transition") {
    const ModelSpec model(RegimeDynamics::vasicek(0.7, 0.1, 0.1),
                          RegimeDynamics::gbm(1.0 / 30.0, 1.0 / 30.0), 1.0, 2.0,
                          0.1);
    const PowerUtility u(1.3);
    const SellerSolution seller = solve_seller(model, u, Numerics{});
    const BuyerSolution buyer = solve_buyer(model, u, seller, Numerics{});
    CHECK(model.L < buyer.a);
    CHECK(buyer.a < buyer.b);
    CHECK(buyer.b <= seller.A + 1e-6);
}
