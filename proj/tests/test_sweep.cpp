#include "doctest.h"

#include <string>
#include <vector>

#include "stopline/sweep.hpp"

using namespace stopline;

namespace {

ModelSpec closed_form_model() {
    return ModelSpec(RegimeDynamics::affine(0.1, 0.1, 0.1),
                     RegimeDynamics::gbm(1.0 / 30.0, 1.0 / 30.0), 1.0, 2.0, 0.1);
}

std::vector<SweepRow> two_rows() {
    SweepRow r1;
    r1.gamma = 0.7;
    r1.A = 2.0;
    r1.B = 2.4;
    r1.m = 1.9;
    r1.a = 1.05;
    r1.b = 1.68;
    r1.seller_ok = r1.buyer_ok = true;
    r1.seller_case = SellerCase::MAboveL;
    SweepRow r2 = r1;
    r2.gamma = 0.75;
    r2.B = 3.16;
    r2.b = 2.08;
    return {r1, r2};
}

} // namespace

TEST_CASE("single-gamma sweep of the closed-form config") {
    const std::vector<SweepRow> rows =
        run_gamma_sweep(closed_form_model(), {0.8}, Numerics{});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].status == "OK");
    CHECK(rows[0].seller_case == SellerCase::MAboveL);
    const std::string csv = emit_csv(rows);
    CHECK(csv.find("gamma,A,B,m,a,b,seller_case,status") == 0);
    CHECK(csv.find("3.83928") != std::string::npos);
    CHECK(csv.find("1.77550") != std::string::npos);
    CHECK(csv.find("MAboveL") != std::string::npos);
    CHECK(csv.find(",OK") != std::string::npos);
}

TEST_CASE("csv layout for partial failures") {
    SweepRow fail;
    fail.gamma = 1.0;
    fail.A = 3.5;
    fail.B = 3.63;
    fail.m = 1.32;
    fail.seller_ok = true;
    fail.buyer_ok = false;
    fail.status = "buyer_failed";
    const std::string csv = emit_csv({fail});
    CHECK(csv.find("1.00000,3.50000,3.63000,1.32000,,,MAboveL,buyer_failed\n") !=
          std::string::npos);

    SweepRow assume;
    assume.gamma = 1.0;
    assume.status = "assumption_failed";
    const std::string csv2 = emit_csv({assume});
    CHECK(csv2.find("1.00000,,,,,,,assumption_failed\n") != std::string::npos);

    CHECK_THROWS_AS(emit_csv({}), ParameterError);
}

TEST_CASE("csv is deterministic and round-trips to printed precision") {
    const std::vector<SweepRow> rows = two_rows();
    const std::string c1 = emit_csv(rows);
    const std::string c2 = emit_csv(rows);
    CHECK(c1 == c2);
    // parse the first data line back
    const std::size_t nl = c1.find('\n');
    const std::string line = c1.substr(nl + 1, c1.find('\n', nl + 1) - nl - 1);
    std::vector<double> vals;
    std::size_t pos = 0;
    for (int i = 0; i < 6; ++i) {
        const std::size_t comma = line.find(',', pos);
        vals.push_back(std::stod(line.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    CHECK(vals[0] == doctest::Approx(0.7).epsilon(1e-6));
    CHECK(vals[2] == doctest::Approx(2.4).epsilon(1e-6));
    CHECK(vals[5] == doctest::Approx(1.68).epsilon(1e-6));
}

TEST_CASE("svg structure and determinism") {
    const std::vector<SweepRow> rows = two_rows();
    const std::string svg = emit_plot(rows, 1.0);
    CHECK(svg.find("<?xml") == 0);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.rfind("</svg>\n") == svg.size() - 7);
    std::size_t polylines = 0;
    for (std::size_t p = svg.find("<polyline"); p != std::string::npos;
         p = svg.find("<polyline", p + 1)) {
        ++polylines;
    }
    CHECK(polylines == 4);
    CHECK(svg.find("stroke-dasharray") != std::string::npos);  // L reference
    CHECK(svg.find(">gamma<") != std::string::npos);
    CHECK(emit_plot(rows, 1.0) == svg);

    CHECK_THROWS_AS(emit_plot({rows[0]}, 1.0), Error);
}

TEST_CASE("plot coordinates are consistent with the data ordering") {
    // B is increasing in the two handcrafted rows, so its rendered y must
    // decrease (SVG y grows downward).
    const std::vector<SweepRow> rows = two_rows();
    const std::string svg = emit_plot(rows, 1.0);
    const std::size_t b_line = svg.find("#d62728");
    REQUIRE(b_line != std::string::npos);
    const std::size_t pts = svg.find("points=\"", b_line);
    const std::size_t end = svg.find('"', pts + 8);
    const std::string coords = svg.substr(pts + 8, end - pts - 8);
    // "x1,y1 x2,y2"
    const std::size_t sp = coords.find(' ');
    const std::string p1 = coords.substr(0, sp), p2 = coords.substr(sp + 1);
    const double y1 = std::stod(p1.substr(p1.find(',') + 1));
    const double y2 = std::stod(p2.substr(p2.find(',') + 1));
    CHECK(y2 < y1);
}

TEST_CASE("sweep rows survive per-row failures") {
    // gamma = 1 on the closed-form config violates the sign assumptions
    // (the generator reduces to a positive constant), so that row fails
    // while its neighbours succeed.
    const std::vector<SweepRow> rows =
        run_gamma_sweep(closed_form_model(), {0.8, 1.0}, Numerics{});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].status == "OK");
    CHECK(rows[1].status == "assumption_failed");
    const std::string csv = emit_csv(rows);
    CHECK(csv.find("assumption_failed") != std::string::npos);
}
