#include "stopline/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace stopline {

namespace {

struct RawEntry {
    std::string value;
    int line;
    bool used = false;
};

using RawMap = std::map<std::string, RawEntry>;

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

[[noreturn]] void fail(int line, const std::string& key,
                       const std::string& what) {
    std::ostringstream os;
    os << "config error at line " << line << ", key '" << key << "': " << what;
    throw ConfigError(os.str());
}

RawMap tokenize(const std::string& text) {
    RawMap out;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            fail(lineno, line, "expected 'section.key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            fail(lineno, key.empty() ? "<empty>" : key, "missing key or value");
        }
        if (out.count(key)) fail(lineno, key, "duplicate key");
        out[key] = {value, lineno, false};
    }
    return out;
}

double parse_number(const RawEntry& e, const std::string& key) {
    const std::string& v = e.value;
    const std::size_t slash = v.find('/');
    try {
        std::size_t used = 0;
        if (slash != std::string::npos) {
            const double num = std::stod(v.substr(0, slash), &used);
            if (trim(v.substr(0, slash)).size() != used) throw std::invalid_argument(v);
            std::size_t used2 = 0;
            const double den = std::stod(v.substr(slash + 1), &used2);
            if (trim(v.substr(slash + 1)).size() != used2) throw std::invalid_argument(v);
            if (den == 0.0) fail(e.line, key, "division by zero");
            return num / den;
        }
        const double out = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        fail(e.line, key, "malformed numeric value '" + v + "'");
    }
}

class Reader {
public:
    explicit Reader(RawMap& raw) : raw_(raw) {}

    std::optional<double> number(const std::string& key) {
        auto it = raw_.find(key);
        if (it == raw_.end()) return std::nullopt;
        it->second.used = true;
        return parse_number(it->second, key);
    }

    std::optional<std::string> text(const std::string& key) {
        auto it = raw_.find(key);
        if (it == raw_.end()) return std::nullopt;
        it->second.used = true;
        return it->second.value;
    }

    double require_number(const std::string& key) {
        auto v = number(key);
        if (!v) throw ConfigError("config error: missing required key '" + key + "'");
        return *v;
    }

    int line_of(const std::string& key) const {
        auto it = raw_.find(key);
        return it == raw_.end() ? 0 : it->second.line;
    }

    void reject_unused() const {
        for (const auto& [key, entry] : raw_) {
            if (!entry.used) fail(entry.line, key, "unknown key");
        }
    }

private:
    RawMap& raw_;
};

std::vector<TablePoint> parse_table(const std::string& value, int line,
                                    const std::string& key) {
    std::vector<TablePoint> pts;
    std::istringstream is(value);
    std::string item;
    while (std::getline(is, item, ';')) {
        item = trim(item);
        if (item.empty()) continue;
        TablePoint p{};
        double* fields[3] = {&p.x, &p.mu, &p.sigma};
        std::istringstream row(item);
        std::string cell;
        int got = 0;
        while (std::getline(row, cell, ':') && got < 3) {
            try {
                *fields[got] = std::stod(trim(cell));
            } catch (const std::exception&) {
                fail(line, key, "malformed table cell '" + cell + "'");
            }
            ++got;
        }
        if (got != 3) fail(line, key, "table rows are x:mu:sigma");
        pts.push_back(p);
    }
    if (pts.size() < 2) fail(line, key, "table needs at least two rows");
    return pts;
}

RegimeDynamics parse_dynamics(Reader& r, const std::string& prefix) {
    const auto kind = r.text(prefix + ".kind");
    if (!kind) {
        throw ConfigError("config error: missing required key '" + prefix +
                          ".kind'");
    }
    const int kind_line = r.line_of(prefix + ".kind");
    try {
        if (*kind == "affine") {
            const double mu = r.require_number(prefix + ".mu");
            const double sigma2 = r.require_number(prefix + ".sigma2");
            const double c = r.number(prefix + ".c").value_or(mu);
            return RegimeDynamics::affine(mu, c, sigma2);
        }
        if (*kind == "gbm") {
            return RegimeDynamics::gbm(r.require_number(prefix + ".mu"),
                                       r.require_number(prefix + ".sigma2"));
        }
        if (*kind == "vasicek") {
            return RegimeDynamics::vasicek(r.require_number(prefix + ".c"),
                                           r.require_number(prefix + ".mu"),
                                           r.require_number(prefix + ".sigma2"));
        }
        if (*kind == "cir") {
            return RegimeDynamics::cir(r.require_number(prefix + ".c"),
                                       r.require_number(prefix + ".mu"),
                                       r.require_number(prefix + ".sigma2"));
        }
        if (*kind == "tabulated") {
            const auto table = r.text(prefix + ".table");
            if (!table) {
                throw ConfigError("config error: missing required key '" +
                                  prefix + ".table'");
            }
            return RegimeDynamics::tabulated(
                parse_table(*table, r.line_of(prefix + ".table"),
                            prefix + ".table"));
        }
    } catch (const ParameterError& e) {
        fail(kind_line, prefix, e.what());
    }
    fail(kind_line, prefix + ".kind",
         "expected affine|gbm|vasicek|cir|tabulated, got '" + *kind + "'");
}

} // namespace

RunSpec parse_config(const std::string& text) {
    RawMap raw = tokenize(text);
    Reader r(raw);

    RegimeDynamics pos = parse_dynamics(r, "model.positive");
    RegimeDynamics neg = parse_dynamics(r, "model.negative");
    const double L = r.require_number("model.L");
    const double H = r.require_number("model.H");
    const double rr = r.require_number("model.r");
    const double gamma = r.require_number("utility.gamma");

    Numerics num;
    num.grid_per_unit = static_cast<int>(
        r.number("numerics.grid_per_unit").value_or(num.grid_per_unit));
    num.tol_pasting = r.number("numerics.tol_pasting").value_or(num.tol_pasting);
    num.tol_continuity =
        r.number("numerics.tol_continuity").value_or(num.tol_continuity);
    num.x_max = r.number("numerics.x_max").value_or(num.x_max);
    num.b_max = r.number("numerics.b_max").value_or(num.b_max);
    if (num.grid_per_unit < 16) {
        throw ConfigError("config error: numerics.grid_per_unit must be >= 16");
    }
    if (num.tol_pasting <= 0.0 || num.tol_continuity <= 0.0) {
        throw ConfigError("config error: tolerances must be positive");
    }

    McParams mc;
    mc.n_paths = static_cast<long>(r.number("mc.n_paths").value_or(mc.n_paths));
    mc.dt = r.number("mc.dt").value_or(mc.dt);
    mc.t_max = r.number("mc.t_max").value_or(mc.t_max);
    mc.seed = static_cast<std::uint64_t>(r.number("mc.seed").value_or(12345.0));
    if (mc.n_paths < 100) {
        throw ConfigError("config error: mc.n_paths must be >= 100");
    }
    if (mc.dt <= 0.0 || mc.t_max <= 0.0) {
        throw ConfigError("config error: mc.dt and mc.t_max must be positive");
    }

    OutputSpec out;
    out.csv = r.text("output.csv").value_or(out.csv);
    out.svg = r.text("output.svg").value_or(out.svg);
    out.report = r.text("output.report").value_or(out.report);

    r.reject_unused();

    try {
        return RunSpec{ModelSpec(std::move(pos), std::move(neg), L, H, rr),
                       PowerUtility(gamma), num, mc, out};
    } catch (const ParameterError& e) {
        throw ConfigError(std::string("config error: ") + e.what());
    }
}

RunSpec load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

} // namespace stopline
