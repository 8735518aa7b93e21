#pragma once

// Scenario grids laid out as size/power tables, and the two
// table artifacts: a tab-delimited text table (percent, two decimals) and a
// JSON document with raw counts, seeds and exclusions.

#include <cstdint>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "shar/error.hpp"
#include "shar/rng.hpp"
#include "shar/simlab.hpp"

namespace shar::simlab {

struct Grid {
    std::string name;
    std::vector<Scenario> cells;
};

namespace detail {

struct GridSpec {
    std::vector<std::pair<std::size_t, std::size_t>> lengths;
    std::vector<double> rhos;
    std::vector<double> multipliers{1.0};
    double sigma1 = 1.0;
    double sigma2 = 1.0;
    ErrorLaw law = ErrorLaw::Normal;
    std::size_t n_mc = 2000;
    std::size_t B = 199;
};

// Cells are ordered rho-block by rho-block; cell i gets seed derive(seed, i).
inline std::vector<Scenario> expand(const GridSpec& g, std::uint64_t seed) {
    std::vector<Scenario> cells;
    for (double rho : g.rhos) {
        for (const auto& [n1, n2] : g.lengths) {
            for (double a : g.multipliers) {
                Scenario s;
                s.T1 = n1;
                s.T2 = n2;
                s.rho = rho;
                s.sigma1 = g.sigma1;
                s.sigma2 = g.sigma2;
                s.error_law = g.law;
                s.a = a;
                s.n_mc = g.n_mc;
                s.B = g.B;
                s.seed = rng::derive(seed, {cells.size()});
                cells.push_back(s);
            }
        }
    }
    return cells;
}

}  // namespace detail

/// Standard deviations of the unequal-LRV designs.
inline constexpr double unequal_sigma1 = 0.06;
inline constexpr double unequal_sigma2 = 0.18;

inline std::vector<std::string> preset_names() {
    return {"table1", "table2", "table3", "table4", "table5",
            "table1-desk", "table2-desk", "table3-desk", "table4-desk", "table5-desk"};
}

/// Named grids. "tableN" is the full layout (nine length
/// pairs, B = 399); "tableN-desk" is a reduced grid with B = 199 that runs
/// in minutes.
inline Grid preset(const std::string& name, std::uint64_t seed,
                   lrv::CurvatureScale k_rule = lrv::CurvatureScale::LongRun) {
    const std::vector<std::pair<std::size_t, std::size_t>> full_lengths = {
        {30, 30}, {50, 50}, {100, 100}, {200, 200}, {400, 400}, {800, 800}, {30, 25}, {50, 40}, {100, 80}};
    const std::vector<std::pair<std::size_t, std::size_t>> desk_lengths = {{30, 30}, {100, 100}, {200, 200}};
    const std::vector<double> rhos = {0.0, 0.5, 0.8};

    const bool desk = name.size() > 5 && name.ends_with("-desk");
    const std::string base = desk ? name.substr(0, name.size() - 5) : name;

    detail::GridSpec g;
    g.rhos = rhos;
    g.B = desk ? 199 : 399;
    g.lengths = desk ? desk_lengths : full_lengths;
    if (base == "table1") {
    } else if (base == "table2") {
        g.sigma1 = unequal_sigma1;
        g.sigma2 = unequal_sigma2;
    } else if (base == "table3") {
        g.law = ErrorLaw::ChiSq1Standardized;
    } else if (base == "table4") {
        g.law = ErrorLaw::ChiSq1Standardized;
        g.sigma1 = unequal_sigma1;
        g.sigma2 = unequal_sigma2;
    } else if (base == "table5") {
        g.multipliers = {1.1, 1.2};
        g.lengths = desk ? std::vector<std::pair<std::size_t, std::size_t>>{{200, 200}}
                         : std::vector<std::pair<std::size_t, std::size_t>>{{200, 200}, {400, 400}, {800, 800}};
    } else {
        throw input_error("unknown preset '" + name + "'");
    }
    Grid grid{name, detail::expand(g, seed)};
    for (Scenario& s : grid.cells) s.k_rule = k_rule;
    return grid;
}

// ---------------------------------------------------------------------------
// Sinks

/// Destinations for run_table. Either stream may be null.
struct TableSink {
    std::ostream* text = nullptr;
    std::ostream* json = nullptr;
};

inline std::string format_percent(double fraction) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << 100.0 * fraction;
    return os.str();
}

inline void write_text_header(std::ostream& os) {
    os << "T1\tT2\trho\ta";
    for (const char* n : test_names) os << '\t' << n;
    for (const char* n : test_names) os << "\tse_" << n;
    os << "\texcluded\tseed\n";
}

inline void write_text_row(std::ostream& os, const CellResult& c) {
    const Scenario& s = c.scenario;
    os << s.T1 << '\t' << s.T2 << '\t' << std::fixed << std::setprecision(1) << s.rho << '\t'
       << std::setprecision(2) << s.a;
    os.unsetf(std::ios::floatfield);
    for (std::size_t i = 0; i < num_tests; ++i) os << '\t' << format_percent(c.rate(i));
    for (std::size_t i = 0; i < num_tests; ++i) os << '\t' << format_percent(c.mc_standard_error(i));
    std::size_t excluded = 0;
    for (std::size_t e : c.exclusions) excluded += e;
    os << '\t' << excluded << '\t' << s.seed << '\n';
}

inline nlohmann::ordered_json scenario_json(const Scenario& s) {
    return {{"T1", s.T1},           {"T2", s.T2},         {"rho", s.rho},
            {"sigma1", s.sigma1},   {"sigma2", s.sigma2}, {"error_law", to_string(s.error_law)},
            {"mu1", s.mu1},         {"a", s.a},           {"n_mc", s.n_mc},
            {"B", s.B},             {"alpha", s.alpha},   {"seed", s.seed},
            {"k_rule", lrv::to_string(s.k_rule)}};
}

inline nlohmann::ordered_json cell_json(const CellResult& c) {
    nlohmann::ordered_json j;
    j["scenario"] = scenario_json(c.scenario);
    for (std::size_t i = 0; i < num_tests; ++i) {
        j["rejections"][test_names[i]] = c.rejections[i];
        j["exclusions"][test_names[i]] = c.exclusions[i];
        j["rates"][test_names[i]] = c.rate(i);
        j["mc_standard_errors"][test_names[i]] = c.mc_standard_error(i);
    }
    return j;
}

/// Runs every cell in order and writes both artifacts. `progress`, when
/// set, is called after each cell (timing goes there, not into artifacts,
/// so reruns are byte-identical).
inline std::vector<CellResult> run_table(const Grid& grid, const TableSink& sink,
                                         const std::function<void(const CellResult&)>& progress = {}) {
    if (grid.cells.empty()) shar::detail::fail_domain("run_table: empty grid");
    std::vector<CellResult> results;
    results.reserve(grid.cells.size());
    if (sink.text) write_text_header(*sink.text);
    for (const Scenario& s : grid.cells) {
        results.push_back(run_cell(s));
        if (sink.text) {
            write_text_row(*sink.text, results.back());
            sink.text->flush();
            if (!*sink.text) throw std::runtime_error("run_table: failed writing text table");
        }
        if (progress) progress(results.back());
    }
    if (sink.json) {
        nlohmann::ordered_json doc;
        doc["grid"] = grid.name;
        doc["columns"] = test_names;
        doc["cells"] = nlohmann::ordered_json::array();
        for (const auto& r : results) doc["cells"].push_back(cell_json(r));
        *sink.json << doc.dump(2) << '\n';
        if (!*sink.json) throw std::runtime_error("run_table: failed writing JSON table");
    }
    return results;
}

}  // namespace shar::simlab
