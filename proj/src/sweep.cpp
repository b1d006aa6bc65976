#include "stopline/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "stopline/simulate.hpp"  // thread_budget

namespace stopline {

namespace {

std::string fmt6(double v) {
    // '#' keeps trailing zeros: six significant digits, always.
    char buf[40];
    std::snprintf(buf, sizeof buf, "%#.6g", v);
    return buf;
}

std::string fmtg(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

SweepRow solve_row(const ModelSpec& model, double gamma, const Numerics& num) {
    SweepRow row;
    row.gamma = gamma;
    PowerUtility util(gamma);
    AssumptionReport rep = verify_assumptions(model, util);
    if (!rep.ok()) {
        row.status = "assumption_failed";
        row.detail = rep.detail;
        return row;
    }
    row.A = rep.A;
    try {
        SellerSolution seller = solve_seller(model, util, num);
        row.B = seller.B;
        row.m = seller.m;
        row.seller_case = seller.seller_case;
        row.seller_ok = true;
        BuyerSolution buyer = solve_buyer(model, util, seller, num);
        row.a = buyer.a;
        row.b = buyer.b;
        row.buyer_ok = true;
    } catch (const Error& e) {
        row.status = row.seller_ok ? "buyer_failed" : "seller_failed";
        row.detail = e.what();
        return row;
    }
    const double tol = 1e-9;
    if (!(row.b <= row.A + tol && row.A <= row.B + tol)) {
        row.status = "shape_violation";
        row.detail = "expected b <= A <= B";
        return row;
    }
    row.status = "OK";
    return row;
}

} // namespace

std::vector<SweepRow> run_gamma_sweep(const ModelSpec& model_template,
                                      const std::vector<double>& gammas,
                                      const Numerics& num) {
    std::vector<SweepRow> rows(gammas.size());
    const int workers =
        std::max(1, std::min<int>(thread_budget(),
                                  static_cast<int>(gammas.size())));
    auto work = [&](int w) {
        for (std::size_t i = w; i < gammas.size();
             i += static_cast<std::size_t>(workers)) {
            try {
                rows[i] = solve_row(model_template, gammas[i], num);
            } catch (const Error& e) {
                rows[i].gamma = gammas[i];
                rows[i].status = "seller_failed";
                rows[i].detail = e.what();
            }
        }
    };
    if (workers <= 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    return rows;
}

std::string emit_csv(const std::vector<SweepRow>& rows) {
    if (rows.empty()) throw ParameterError("emit_csv needs at least one row");
    std::ostringstream os;
    os << "gamma,A,B,m,a,b,seller_case,status\n";
    for (const SweepRow& row : rows) {
        os << fmt6(row.gamma) << ','
           << (row.A > 0.0 ? fmt6(row.A) : "") << ',';
        if (row.seller_ok) {
            os << fmt6(row.B) << ',' << fmt6(row.m) << ',';
        } else {
            os << ",,";
        }
        if (row.buyer_ok) {
            os << fmt6(row.a) << ',' << fmt6(row.b) << ',';
        } else {
            os << ",,";
        }
        os << (row.seller_ok ? to_string(row.seller_case) : "") << ','
           << row.status << '\n';
    }
    return os.str();
}

namespace {

struct Series {
    const char* name;
    const char* color;
    std::vector<std::pair<double, double>> pts;  // (gamma, value)
};

std::string polyline(const Series& s, double x0, double x1, double y0,
                     double y1, double w, double h, double ml, double mt) {
    std::ostringstream os;
    os << "  <polyline fill=\"none\" stroke=\"" << s.color
       << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.pts.size(); ++i) {
        const double px = ml + (s.pts[i].first - x0) / (x1 - x0) * w;
        const double py = mt + h - (s.pts[i].second - y0) / (y1 - y0) * h;
        os << (i ? " " : "") << fmtg(px) << ',' << fmtg(py);
    }
    os << "\"/>\n";
    return os.str();
}

} // namespace

std::string emit_plot(const std::vector<SweepRow>& rows, double L) {
    Series series[4] = {{"B", "#d62728", {}},
                        {"m", "#1f77b4", {}},
                        {"a", "#2ca02c", {}},
                        {"b", "#9467bd", {}}};
    int ok_rows = 0;
    double x0 = 0.0, x1 = 0.0, ylo = L, yhi = L;
    bool first = true;
    for (const SweepRow& row : rows) {
        if (!row.seller_ok) continue;
        ++ok_rows;
        series[0].pts.push_back({row.gamma, row.B});
        series[1].pts.push_back({row.gamma, row.m});
        if (row.buyer_ok) {
            series[2].pts.push_back({row.gamma, row.a});
            series[3].pts.push_back({row.gamma, row.b});
        }
        const double mx = std::max(row.B, row.buyer_ok ? row.b : row.B);
        const double mn = std::min(row.m, row.buyer_ok ? row.a : row.m);
        if (first) {
            x0 = x1 = row.gamma;
            ylo = std::min(mn, L);
            yhi = std::max(mx, L);
            first = false;
        } else {
            x0 = std::min(x0, row.gamma);
            x1 = std::max(x1, row.gamma);
            ylo = std::min(ylo, mn);
            yhi = std::max(yhi, mx);
        }
    }
    if (ok_rows < 2) {
        throw Error("emit_plot needs at least two successfully solved rows");
    }
    if (x1 - x0 <= 0.0) x1 = x0 + 1e-6;
    const double pad = 0.05 * (yhi - ylo + 1e-12);
    ylo -= pad;
    yhi += pad;

    const double W = 840, H = 560, ml = 70, mt = 20, mr = 20, mb = 50;
    const double w = W - ml - mr, h = H - mt - mb;
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
       << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << ' ' << H
       << "\">\n"
       << "  <rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H
       << "\" fill=\"white\"/>\n"
       << "  <rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << w
       << "\" height=\"" << h << "\" fill=\"none\" stroke=\"#333\"/>\n";

    // Axis ticks: five per axis.
    for (int i = 0; i <= 4; ++i) {
        const double gx = x0 + (x1 - x0) * i / 4.0;
        const double px = ml + w * i / 4.0;
        os << "  <line x1=\"" << fmtg(px) << "\" y1=\"" << mt + h
           << "\" x2=\"" << fmtg(px) << "\" y2=\"" << mt + h + 5
           << "\" stroke=\"#333\"/>\n"
           << "  <text x=\"" << fmtg(px) << "\" y=\"" << mt + h + 20
           << "\" font-size=\"12\" text-anchor=\"middle\">" << fmtg(gx)
           << "</text>\n";
        const double gy = ylo + (yhi - ylo) * i / 4.0;
        const double py = mt + h - h * i / 4.0;
        os << "  <line x1=\"" << ml - 5 << "\" y1=\"" << fmtg(py)
           << "\" x2=\"" << ml << "\" y2=\"" << fmtg(py)
           << "\" stroke=\"#333\"/>\n"
           << "  <text x=\"" << ml - 8 << "\" y=\"" << fmtg(py + 4)
           << "\" font-size=\"12\" text-anchor=\"end\">" << fmtg(gy)
           << "</text>\n";
    }
    os << "  <text x=\"" << ml + w / 2 << "\" y=\"" << H - 12
       << "\" font-size=\"13\" text-anchor=\"middle\">gamma</text>\n";

    // Reference line at L.
    const double pyL = mt + h - (L - ylo) / (yhi - ylo) * h;
    os << "  <line x1=\"" << ml << "\" y1=\"" << fmtg(pyL) << "\" x2=\""
       << ml + w << "\" y2=\"" << fmtg(pyL)
       << "\" stroke=\"#888\" stroke-dasharray=\"6,4\"/>\n"
       << "  <text x=\"" << ml + w - 4 << "\" y=\"" << fmtg(pyL - 5)
       << "\" font-size=\"12\" text-anchor=\"end\" fill=\"#666\">L = "
       << fmtg(L) << "</text>\n";

    for (const Series& s : series) {
        if (s.pts.size() >= 2) {
            os << polyline(s, x0, x1, ylo, yhi, w, h, ml, mt);
        }
    }

    // Legend.
    double ly = mt + 16;
    for (const Series& s : series) {
        os << "  <line x1=\"" << ml + 12 << "\" y1=\"" << fmtg(ly - 4)
           << "\" x2=\"" << ml + 40 << "\" y2=\"" << fmtg(ly - 4)
           << "\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"/>\n"
           << "  <text x=\"" << ml + 46 << "\" y=\"" << fmtg(ly)
           << "\" font-size=\"13\">" << s.name << "</text>\n";
        ly += 18;
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace stopline
