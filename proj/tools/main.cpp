// Command-line front end: config-driven solves, gamma sweeps, Monte Carlo
// checks. Exit codes: 0 success, 1 solver/verification failure, 2 config or
// usage error.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "stopline/closedform.hpp"
#include "stopline/config.hpp"
#include "stopline/simulate.hpp"
#include "stopline/sweep.hpp"

namespace {

using namespace stopline;

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open output file: " + path);
    out << content;
    if (!out) throw Error("write failed: " + path);
}

void append_curve(std::ostringstream& os, const char* name,
                  const GridFunction& g) {
    for (int i = 0; i <= g.cells(); ++i) {
        os << name << ',' << fmt(g.node(i)) << ',' << fmt(g.values()[i])
           << '\n';
    }
}

struct Solutions {
    AssumptionReport assume;
    SellerSolution seller;
    std::optional<BuyerSolution> buyer;
};

Solutions solve(const RunSpec& spec, bool want_buyer) {
    AssumptionReport assume = verify_assumptions(spec.model, spec.utility);
    if (!assume.ok()) {
        throw AssumptionViolation("sign assumptions failed: " + assume.detail);
    }
    Solutions out{assume, solve_seller(spec.model, spec.utility, spec.numerics),
                  std::nullopt};
    if (want_buyer) {
        out.buyer = solve_buyer(spec.model, spec.utility, out.seller,
                                spec.numerics);
    }
    return out;
}

int cmd_solve(const RunSpec& spec, bool want_buyer) {
    Solutions sol = solve(spec, want_buyer);
    std::cout << "case: " << to_string(sol.seller.seller_case) << '\n'
              << "A = " << fmt(sol.seller.A) << '\n'
              << "B = " << fmt(sol.seller.B)
              << "  (pasting residual " << fmt(sol.seller.pasting_residual_B)
              << ")\n"
              << "m = " << fmt(sol.seller.m) << "  (pasting residual "
              << fmt(sol.seller.pasting_residual_m) << ")\n"
              << "continuity residual at H = "
              << fmt(sol.seller.continuity_residual_H) << '\n';
    if (sol.buyer) {
        std::cout << "a = " << fmt(sol.buyer->a) << "  (pasting residual "
                  << fmt(sol.buyer->pasting_residual_a) << ")\n"
                  << "b = " << fmt(sol.buyer->b) << "  (root residual "
                  << fmt(sol.buyer->root_residual_b) << ")\n"
                  << "tail coefficient = " << fmt(sol.buyer->tail_coeff) << '\n';
    }

    std::ostringstream curves;
    curves << "curve,x,value\n";
    append_curve(curves, "seller_pos", sol.seller.v_pos);
    append_curve(curves, "seller_neg", sol.seller.v_neg);
    if (sol.buyer) {
        append_curve(curves, "buyer_pos", sol.buyer->vp_pos);
        append_curve(curves, "buyer_neg", sol.buyer->vp_neg);
    }
    write_file(spec.outputs.csv, curves.str());
    write_file(spec.outputs.report,
               write_report(spec, sol.assume, &sol.seller,
                            sol.buyer ? &*sol.buyer : nullptr));
    std::cout << "curves -> " << spec.outputs.csv << "\nreport -> "
              << spec.outputs.report << '\n';
    return 0;
}

int cmd_sweep(const RunSpec& spec, double from, double to, double step) {
    std::vector<double> gammas;
    if (to <= 0.0) {
        gammas.push_back(spec.utility.gamma());
    } else {
        if (from <= 0.0 || step <= 0.0 || to < from) {
            std::cerr << "invalid sweep range\n";
            return 2;
        }
        for (double g = from; g <= to + 0.5 * step; g += step) {
            gammas.push_back(g);
        }
    }
    std::vector<SweepRow> rows =
        run_gamma_sweep(spec.model, gammas, spec.numerics);
    for (const SweepRow& row : rows) {
        std::cout << "gamma=" << fmt(row.gamma) << " status=" << row.status;
        if (row.seller_ok) {
            std::cout << " B=" << fmt(row.B) << " m=" << fmt(row.m)
                      << " case=" << to_string(row.seller_case);
        }
        if (row.buyer_ok) {
            std::cout << " a=" << fmt(row.a) << " b=" << fmt(row.b);
        }
        if (!row.detail.empty()) std::cout << "  [" << row.detail << "]";
        std::cout << '\n';
    }
    write_file(spec.outputs.csv, emit_csv(rows));
    std::cout << "csv -> " << spec.outputs.csv << '\n';
    int ok_rows = 0;
    for (const SweepRow& row : rows) ok_rows += row.seller_ok ? 1 : 0;
    if (ok_rows >= 2) {
        write_file(spec.outputs.svg, emit_plot(rows, spec.model.L));
        std::cout << "svg -> " << spec.outputs.svg << '\n';
    } else {
        std::cout << "svg skipped (fewer than 2 successful rows)\n";
    }
    bool any_fail = false;
    for (const SweepRow& row : rows) any_fail |= row.status != "OK";
    return any_fail ? 1 : 0;
}

int cmd_simulate(const RunSpec& spec, double x, const std::string& regime,
                 const std::string& problem) {
    const Regime f = regime == "-" ? Regime::Negative : Regime::Positive;
    const double start_x = x > 0.0 ? x : spec.model.H;
    Solutions sol = solve(spec, problem == "buyer");

    StoppingRule rule;
    RewardFn reward;
    double reference = 0.0;
    if (problem == "buyer") {
        rule = StoppingRule::buyer(sol.buyer->a, sol.buyer->b);
        reward = [&](double s, Regime g) {
            return gains_g(sol.seller, spec.utility, s, g);
        };
        reference = buyer_value_at(*sol.buyer, sol.seller, spec.utility,
                                   start_x, f);
    } else {
        rule = StoppingRule::seller(sol.seller.B, sol.seller.m);
        reward = [&](double s, Regime) { return spec.utility.value(s); };
        reference = seller_value_at(sol.seller, spec.utility, start_x, f);
    }
    const McEstimate est = mc_value(spec.model, reward, rule,
                                    PathState{0.0, start_x, f, false}, spec.mc);
    std::cout << problem << " rule from (" << fmt(start_x) << ", "
              << (f == Regime::Positive ? "+" : "-") << "):\n"
              << "mc mean = " << fmt(est.mean) << '\n'
              << "std error = " << fmt(est.std_error) << '\n'
              << "n_paths = " << est.n_paths << '\n'
              << "truncated fraction = " << fmt(est.truncated_fraction)
              << (est.truncation_warning ? "  (warning: > 5%)" : "") << '\n'
              << "solver value = " << fmt(reference) << '\n'
              << "|mc - solver| / stderr = "
              << fmt(std::abs(est.mean - reference) /
                     (est.std_error > 0 ? est.std_error : 1.0))
              << '\n';
    return 0;
}

struct Check {
    std::string name;
    bool pass;
    std::string detail;
};

int cmd_verify(const RunSpec& spec) {
    std::vector<Check> checks;
    auto add = [&](const std::string& name, bool pass,
                   const std::string& detail) {
        checks.push_back({name, pass, detail});
        std::cout << (pass ? "[PASS] " : "[FAIL] ") << name
                  << (detail.empty() ? "" : ": " + detail) << '\n';
    };

    try {
        const AssumptionReport rep = verify_assumptions(spec.model, spec.utility);
        add("sign assumptions", rep.ok(),
            "A=" + fmt(rep.A) + (rep.detail.empty() ? "" : "; " + rep.detail));
        if (!rep.ok()) return 1;

        SellerSolution seller = solve_seller(spec.model, spec.utility,
                                             spec.numerics);
        add("seller solve", true,
            "B=" + fmt(seller.B) + " m=" + fmt(seller.m) + " case=" +
                to_string(seller.seller_case));
        add("seller shape B >= A", seller.B >= seller.A - 1e-9, "");
        add("seller pasting at B |res| <= 1e-3",
            std::abs(seller.pasting_residual_B) <= 1e-3,
            fmt(seller.pasting_residual_B));
        if (seller.m > 0.0) {
            add("seller pasting at m |res| <= 1e-3",
                std::abs(seller.pasting_residual_m) <= 1e-3,
                fmt(seller.pasting_residual_m));
        }
        bool dom = true;
        double worst = 0.0;
        for (int i = 0; i <= seller.v_pos.cells(); ++i) {
            const double d = seller.v_pos.values()[i] -
                             spec.utility.value(seller.v_pos.node(i));
            worst = std::min(worst, d);
            dom &= d >= -1e-4;
        }
        for (int i = 0; i <= seller.v_neg.cells(); ++i) {
            const double d = seller.v_neg.values()[i] -
                             spec.utility.value(seller.v_neg.node(i));
            worst = std::min(worst, d);
            dom &= d >= -1e-4;
        }
        add("seller V >= u (slack 1e-4)", dom, "min(V-u)=" + fmt(worst));

        BuyerSolution buyer = solve_buyer(spec.model, spec.utility, seller,
                                          spec.numerics);
        add("buyer solve", true, "a=" + fmt(buyer.a) + " b=" + fmt(buyer.b));
        add("buyer shape L < a < b <= A",
            spec.model.L < buyer.a && buyer.a < buyer.b &&
                buyer.b <= seller.A + 1e-6,
            "");
        add("buyer pasting at a |res| <= 1e-3",
            std::abs(buyer.pasting_residual_a) <= 1e-3,
            fmt(buyer.pasting_residual_a));

        // Closed-form oracle comparison when this is the analytic config.
        const ExampleOracle oracle;
        const bool closed_form =
            spec.model.positive.kind() == DynKind::Affine &&
            spec.model.negative.kind() == DynKind::Gbm &&
            std::abs(spec.model.positive.mu_param() - 0.1) < 1e-12 &&
            std::abs(spec.model.positive.c_param() - 0.1) < 1e-12 &&
            std::abs(spec.model.positive.sigma2_param() - 0.1) < 1e-12 &&
            std::abs(spec.model.negative.mu_param() - 1.0 / 30.0) < 1e-12 &&
            std::abs(spec.model.negative.sigma2_param() - 1.0 / 30.0) < 1e-12 &&
            std::abs(spec.model.r - 0.1) < 1e-12 &&
            std::abs(spec.model.L - 1.0) < 1e-12 &&
            std::abs(spec.model.H - 2.0) < 1e-12 &&
            std::abs(spec.utility.gamma() - 0.8) < 1e-12;
        if (closed_form) {
            add("oracle |A - 20/7| <= 1e-6",
                std::abs(seller.A - ExampleOracle::A_exact) <= 1e-6,
                fmt(seller.A));
            add("oracle |B - 3.839282| <= 5e-3",
                std::abs(seller.B - ExampleOracle::B_star) <= 5e-3,
                fmt(seller.B));
            add("oracle |m - 1.775502| <= 5e-3",
                std::abs(seller.m - ExampleOracle::m_star) <= 5e-3,
                fmt(seller.m));
            add("oracle |a - 1.1632| <= 5e-3",
                std::abs(buyer.a - ExampleOracle::a_star) <= 5e-3, fmt(buyer.a));
            add("oracle |b - 2.1686| <= 5e-3",
                std::abs(buyer.b - ExampleOracle::b_star) <= 5e-3, fmt(buyer.b));
            double max_err = 0.0;
            for (int i = 1; i < 1000; ++i) {
                const double x =
                    1.0 + (ExampleOracle::B_star - 1.0) * i / 1000.0;
                max_err = std::max(
                    max_err,
                    std::abs(seller_value_at(seller, spec.utility, x,
                                             Regime::Positive) -
                             oracle.seller_value(x, Regime::Positive)));
            }
            add("oracle seller curve max err <= 1e-3", max_err <= 1e-3,
                fmt(max_err));
        }

        // Monte Carlo consistency of the solved seller rule.
        const PathState start{0.0, spec.model.H, Regime::Positive, false};
        const McEstimate est =
            mc_value(spec.model, spec.utility,
                     StoppingRule::seller(seller.B, seller.m), start, spec.mc);
        const double ref =
            seller_value_at(seller, spec.utility, start.S, start.F);
        add("mc consistency |mc - V| <= 3 stderr",
            std::abs(est.mean - ref) <= 3.0 * est.std_error,
            "mc=" + fmt(est.mean) + " V=" + fmt(ref) + " stderr=" +
                fmt(est.std_error));
    } catch (const Error& e) {
        add("verification run", false, e.what());
    }

    for (const Check& c : checks) {
        if (!c.pass) return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"stopline: optimal buy/sell boundaries for the two-regime "
                 "support/resistance price model"};
    app.require_subcommand(1);

    std::string config_path;
    double gamma_from = 0.0, gamma_to = 0.0, gamma_step = 0.0;
    double sim_x = 0.0;
    std::string sim_regime = "+";
    std::string sim_problem = "seller";

    CLI::App* cmd_seller =
        app.add_subcommand("solve-seller", "solve the seller's free boundary "
                                           "problem");
    cmd_seller->add_option("config", config_path, "config file")->required();

    CLI::App* cmd_buyer = app.add_subcommand(
        "solve-buyer", "solve the seller's and buyer's problems");
    cmd_buyer->add_option("config", config_path, "config file")->required();

    CLI::App* cmd_sw =
        app.add_subcommand("sweep", "gamma sweep producing CSV and SVG");
    cmd_sw->add_option("config", config_path, "config file")->required();
    cmd_sw->add_option("--gamma-from", gamma_from, "sweep start");
    cmd_sw->add_option("--gamma-to", gamma_to, "sweep end (inclusive)");
    cmd_sw->add_option("--gamma-step", gamma_step, "sweep step");

    CLI::App* cmd_sim = app.add_subcommand(
        "simulate", "Monte Carlo estimate of the solved stopping rule");
    cmd_sim->add_option("config", config_path, "config file")->required();
    cmd_sim->add_option("--x", sim_x, "start price (default H)");
    cmd_sim->add_option("--regime", sim_regime, "start regime + or -")
        ->check(CLI::IsMember({"+", "-"}));
    cmd_sim->add_option("--problem", sim_problem, "seller or buyer")
        ->check(CLI::IsMember({"seller", "buyer"}));

    CLI::App* cmd_ver = app.add_subcommand(
        "verify", "run the oracle and Monte Carlo consistency checks");
    cmd_ver->add_option("config", config_path, "config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const RunSpec spec = load_config_file(config_path);
        if (cmd_seller->parsed()) return cmd_solve(spec, false);
        if (cmd_buyer->parsed()) return cmd_solve(spec, true);
        if (cmd_sw->parsed()) {
            return cmd_sweep(spec, gamma_from, gamma_to, gamma_step);
        }
        if (cmd_sim->parsed()) {
            return cmd_simulate(spec, sim_x, sim_regime, sim_problem);
        }
        if (cmd_ver->parsed()) return cmd_verify(spec);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
