#ifndef STOPLINE_SWEEP_HPP
#define STOPLINE_SWEEP_HPP

#include <string>
#include <vector>

#include "stopline/buyer.hpp"

namespace stopline {

/// One gamma point of a boundary sweep. Failures are data: a row with a
/// non-OK status keeps whatever stages did succeed.
struct SweepRow {
    double gamma = 0.0;
    double A = 0.0;
    double B = 0.0;
    double m = 0.0;
    double a = 0.0;
    double b = 0.0;
    SellerCase seller_case = SellerCase::MAboveL;
    bool seller_ok = false;
    bool buyer_ok = false;
    std::string status = "OK";  // OK | assumption_failed | seller_failed |
                                // buyer_failed | shape_violation
    std::string detail;         // failure note; not part of the CSV
};

/// Solves seller and buyer across the gamma list (ascending); one row per
/// gamma, failures recorded per row. Rows are independent and computed in
/// parallel; output order follows the input order.
std::vector<SweepRow> run_gamma_sweep(const ModelSpec& model_template,
                                      const std::vector<double>& gammas,
                                      const Numerics& num = {});

/// CSV document: header gamma,A,B,m,a,b,seller_case,status; 6 significant
/// digits; byte-deterministic for identical inputs. Failed stages leave
/// their fields empty.
std::string emit_csv(const std::vector<SweepRow>& rows);

/// Pure-text SVG with four polylines (B, m, a, b) against gamma, a
/// horizontal reference line at L, a legend and tick labels. Throws Error
/// with fewer than two successful rows.
std::string emit_plot(const std::vector<SweepRow>& rows, double L);

} // namespace stopline

#endif
