#ifndef STOPLINE_CONFIG_HPP
#define STOPLINE_CONFIG_HPP

#include <optional>
#include <string>

#include "stopline/buyer.hpp"
#include "stopline/simulate.hpp"

namespace stopline {

struct OutputSpec {
    std::string csv = "curves.csv";
    std::string svg = "sweep.svg";
    std::string report = "report.txt";
};

/// A fully validated run configuration; every omitted numerics/mc key takes
/// its documented default.
struct RunSpec {
    ModelSpec model;
    PowerUtility utility;
    Numerics numerics;
    McParams mc;
    OutputSpec outputs;
};

/// Parses the line-oriented `section.key = value` format. `#` starts a
/// comment; blank lines are ignored; unknown keys are rejected. Numeric
/// values accept an optional p/q rational form (e.g. 1/30). Throws
/// ConfigError naming the offending line and key.
RunSpec parse_config(const std::string& text);

/// Reads and parses a config file; ConfigError on I/O failure.
RunSpec load_config_file(const std::string& path);

/// Plain-text run report: boundaries, residuals, case flags, the assumption
/// report and every effective parameter. Sections for stages that were not
/// run read "not computed".
std::string write_report(const RunSpec& spec, const AssumptionReport& assume,
                         const SellerSolution* seller,
                         const BuyerSolution* buyer);

} // namespace stopline

#endif
