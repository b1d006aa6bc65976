#include "stopline/config.hpp"

#include <cstdio>
#include <sstream>

namespace stopline {

namespace {

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

void dynamics_lines(std::ostringstream& os, const char* label,
                    const RegimeDynamics& d) {
    os << label << ".kind = " << to_string(d.kind()) << '\n';
    switch (d.kind()) {
        case DynKind::Affine:
            os << label << ".mu = " << num(d.mu_param()) << '\n'
               << label << ".c = " << num(d.c_param()) << '\n'
               << label << ".sigma2 = " << num(d.sigma2_param()) << '\n';
            break;
        case DynKind::Gbm:
            os << label << ".mu = " << num(d.mu_param()) << '\n'
               << label << ".sigma2 = " << num(d.sigma2_param()) << '\n';
            break;
        case DynKind::Vasicek:
        case DynKind::Cir:
            os << label << ".c = " << num(d.c_param()) << '\n'
               << label << ".mu = " << num(d.mu_param()) << '\n'
               << label << ".sigma2 = " << num(d.sigma2_param()) << '\n';
            break;
        case DynKind::Tabulated:
            os << label << ".table_rows = " << d.table().size() << '\n';
            break;
    }
}

} // namespace

std::string write_report(const RunSpec& spec, const AssumptionReport& assume,
                         const SellerSolution* seller,
                         const BuyerSolution* buyer) {
    std::ostringstream os;
    os << "stopline run report\n"
       << "===================\n\n"
       << "[model]\n";
    dynamics_lines(os, "positive", spec.model.positive);
    dynamics_lines(os, "negative", spec.model.negative);
    os << "L = " << num(spec.model.L) << '\n'
       << "H = " << num(spec.model.H) << '\n'
       << "r = " << num(spec.model.r) << '\n'
       << "gamma = " << num(spec.utility.gamma()) << '\n'
       << "\n[numerics]\n"
       << "grid_per_unit = " << spec.numerics.grid_per_unit << '\n'
       << "tol_pasting = " << num(spec.numerics.tol_pasting) << '\n'
       << "tol_continuity = " << num(spec.numerics.tol_continuity) << '\n'
       << "x_max = " << num(spec.numerics.x_max) << " (0 = auto)\n"
       << "b_max = " << num(spec.numerics.b_max) << " (0 = auto)\n"
       << "\n[mc]\n"
       << "n_paths = " << spec.mc.n_paths << '\n'
       << "dt = " << num(spec.mc.dt) << '\n'
       << "t_max = " << num(spec.mc.t_max) << '\n'
       << "seed = " << spec.mc.seed << '\n'
       << "\n[output]\n"
       << "csv = " << spec.outputs.csv << '\n'
       << "svg = " << spec.outputs.svg << '\n'
       << "report = " << spec.outputs.report << '\n'
       << "\n[assumptions]\n"
       << "A = " << num(assume.A) << '\n'
       << "negative_sign_ok = " << (assume.negative_sign_ok ? "true" : "false")
       << '\n'
       << "positive_pattern_ok = "
       << (assume.positive_pattern_ok ? "true" : "false") << '\n';
    if (!assume.detail.empty()) os << "detail = " << assume.detail << '\n';

    os << "\n[seller]\n";
    if (seller) {
        os << "case: " << to_string(seller->seller_case) << '\n'
           << "B = " << num(seller->B) << '\n'
           << "m = " << num(seller->m) << '\n'
           << "v(L) = " << num(seller->value_at_L) << '\n'
           << "pasting_residual_B = " << num(seller->pasting_residual_B) << '\n'
           << "pasting_residual_m = " << num(seller->pasting_residual_m)
           << (seller->m == 0.0 ? " (waived, m = 0)" : "") << '\n'
           << "continuity_residual_H = " << num(seller->continuity_residual_H)
           << '\n';
    } else {
        os << "not computed\n";
    }

    os << "\n[buyer]\n";
    if (buyer) {
        os << "a = " << num(buyer->a) << '\n'
           << "b = " << num(buyer->b) << '\n'
           << "tail_coeff = " << num(buyer->tail_coeff) << '\n'
           << "k = v_p(H,-) = " << num(buyer->k_at_H) << '\n'
           << "pasting_residual_a = " << num(buyer->pasting_residual_a) << '\n'
           << "root_residual_b = " << num(buyer->root_residual_b) << '\n'
           << "continuity_residual_L = " << num(buyer->continuity_residual_L)
           << '\n'
           << "continuity_residual_H = " << num(buyer->continuity_residual_H)
           << '\n';
    } else {
        os << "not computed\n";
    }
    return os.str();
}

} // namespace stopline
