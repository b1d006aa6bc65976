#include "doctest.h"

#include <cmath>
#include <string>

#include "stopline/config.hpp"

using namespace stopline;

namespace {

const std::string kMinimal =
    "model.positive.kind = affine\n"
    "model.positive.mu = 0.1\n"
    "model.positive.sigma2 = 0.1\n"
    "model.negative.kind = gbm\n"
    "model.negative.mu = 1/30\n"
    "model.negative.sigma2 = 1/30\n"
    "model.L = 1\n"
    "model.H = 2\n"
    "model.r = 0.1\n"
    "utility.gamma = 0.8\n";

} // namespace

TEST_CASE("shipped closed-form config parses to the reference parameters") {
    const RunSpec spec =
        load_config_file(std::string(STOPLINE_CONFIG_DIR) +
                         "/affine_closed_form.cfg");
    CHECK(spec.model.L == 1.0);
    CHECK(spec.model.H == 2.0);
    CHECK(spec.model.r == 0.1);
    CHECK(spec.utility.gamma() == 0.8);
    CHECK(spec.model.positive.kind() == DynKind::Affine);
    CHECK(spec.model.positive.c_param() == 0.1);
    CHECK(spec.model.negative.kind() == DynKind::Gbm);
    CHECK(spec.model.negative.mu_param() == doctest::Approx(1.0 / 30.0));
}

TEST_CASE("shipped table1 config carries the relaxed affine intercept") {
    const RunSpec spec =
        load_config_file(std::string(STOPLINE_CONFIG_DIR) + "/table1.cfg");
    CHECK(spec.model.positive.mu_param() == 0.15);
    CHECK(spec.model.positive.c_param() == 0.16);
    CHECK(spec.model.positive.sigma2_param() == 0.1);
    CHECK(spec.model.negative.mu_param() == doctest::Approx(1.0 / 30.0));
    CHECK(spec.model.negative.sigma2_param() == doctest::Approx(1.0 / 30.0));
    CHECK(spec.model.r == 0.15);
}

TEST_CASE("defaults fill omitted numerics and mc sections") {
    const RunSpec spec = parse_config(kMinimal);
    CHECK(spec.numerics.grid_per_unit == 4096);
    CHECK(spec.numerics.tol_pasting == 1e-6);
    CHECK(spec.numerics.tol_continuity == 1e-6);
    CHECK(spec.numerics.x_max == 0.0);
    CHECK(spec.numerics.b_max == 0.0);
    CHECK(spec.mc.n_paths == 20000);
    CHECK(spec.mc.dt == 1e-3);
    CHECK(spec.mc.t_max == 200.0);
    CHECK(spec.mc.seed == 12345);
    CHECK(spec.outputs.csv == "curves.csv");
    // affine c defaults to mu
    CHECK(spec.model.positive.c_param() == 0.1);
}

TEST_CASE("empty config is rejected") {
    CHECK_THROWS_AS(parse_config(""), ConfigError);
}

TEST_CASE("unknown keys are rejected with line and key") {
    try {
        parse_config(kMinimal + "model.positive.nu = 3\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("line 11") != std::string::npos);
        CHECK(msg.find("model.positive.nu") != std::string::npos);
    }
}

TEST_CASE("malformed values are rejected") {
    CHECK_THROWS_AS(parse_config(kMinimal + "mc.dt = fast\n"), ConfigError);
    CHECK_THROWS_AS(parse_config(kMinimal + "mc.dt = 1/0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config(kMinimal + "mc.dt\n"), ConfigError);
    CHECK_THROWS_AS(parse_config(kMinimal + "mc.dt = -0.1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config(kMinimal + "mc.dt = 0.001\nmc.dt = 0.002\n"),
                    ConfigError);
}

TEST_CASE("model invariants are enforced at parse time") {
    std::string bad = kMinimal;
    bad.replace(bad.find("model.L = 1"), 11, "model.L = 3");
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
    std::string badsig = kMinimal;
    badsig.replace(badsig.find("model.positive.sigma2 = 0.1"), 27,
                   "model.positive.sigma2 = 0.0");
    CHECK_THROWS_AS(parse_config(badsig), ConfigError);
    CHECK_THROWS_AS(parse_config(kMinimal + "numerics.tol_pasting = 0\n"),
                    ConfigError);
}

TEST_CASE("missing required keys are named") {
    try {
        parse_config("model.positive.kind = cir\nmodel.positive.mu = 0.1\n"
                     "model.positive.sigma2 = 0.1\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("model.positive.c") !=
              std::string::npos);
    }
}

TEST_CASE("rational literals parse exactly") {
    const RunSpec spec = parse_config(kMinimal);
    CHECK(spec.model.negative.mu_param() == doctest::Approx(1.0 / 30.0).epsilon(1e-15));
}

TEST_CASE("tabulated dynamics via config") {
    std::string cfg = kMinimal;
    cfg.replace(cfg.find("model.positive.kind = affine"), 28,
                "model.positive.kind = tabulated");
    cfg.replace(cfg.find("model.positive.mu = 0.1\n"), 24, "");
    cfg.replace(cfg.find("model.positive.sigma2 = 0.1\n"), 28, "");
    cfg += "model.positive.table = 1:0.2:0.3; 2:0.25:0.31; 8:0.3:0.35\n";
    const RunSpec spec = parse_config(cfg);
    CHECK(spec.model.positive.kind() == DynKind::Tabulated);
    CHECK(spec.model.positive.drift(1.5) == doctest::Approx(0.225));
    CHECK_THROWS_AS(parse_config(cfg + "x = 1\n"), ConfigError);
}

TEST_CASE("report echoes parameters and marks missing stages") {
    RunSpec spec = parse_config(kMinimal);
    spec.numerics.grid_per_unit = 512;  // keep the test fast
    const AssumptionReport rep = verify_assumptions(spec.model, spec.utility);
    const SellerSolution seller =
        solve_seller(spec.model, spec.utility, spec.numerics);
    const std::string with_seller =
        write_report(spec, rep, &seller, nullptr);
    CHECK(with_seller.find("case: MAboveL") != std::string::npos);
    CHECK(with_seller.find("not computed") != std::string::npos);  // buyer
    CHECK(with_seller.find("grid_per_unit = 512") != std::string::npos);
    CHECK(with_seller.find("gamma = 0.8") != std::string::npos);
    CHECK(with_seller.find("seed = 12345") != std::string::npos);
    CHECK(with_seller.find("negative_sign_ok = true") != std::string::npos);
    // deterministic output
    CHECK(write_report(spec, rep, &seller, nullptr) == with_seller);
}
