#pragma once

// The `test` report: per-group descriptives (mean, sqrt of the HAR LRV, K,
// Ljung-Box) followed by the six tests. A test the data cannot support is
// kept in the report as NA with the reason.

#include <array>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "shar/app/ingest.hpp"
#include "shar/bootstrap.hpp"
#include "shar/error.hpp"
#include "shar/lrv.hpp"
#include "shar/two_sample.hpp"
#include "shar/version.hpp"

namespace shar::app {

struct RunConfig {
    double alpha = 0.05;
    std::size_t B = 399;
    std::uint64_t seed = 1;
    twosample::KChoice K1 = twosample::k_auto;
    twosample::KChoice K2 = twosample::k_auto;
    std::size_t lb_lag = 10;
    unsigned threads = 1;
    rng::InnovationLaw law = rng::InnovationLaw::Normal;
    lrv::CurvatureScale k_rule = lrv::CurvatureScale::LongRun;
};

struct GroupSummary {
    std::string label;
    std::size_t T = 0;
    double mean = 0.0;
    std::optional<twosample::HarGroup> har;  ///< empty when K or the LRV failed
    std::string har_na;
    std::optional<lrv::LjungBox> ljung_box;
    std::string ljung_box_na;
};

struct TestOutcome {
    std::string name;
    std::optional<twosample::TestReport> report;
    std::optional<sharwb::BootstrapRun> run;
    std::string na_reason;
};

struct Analysis {
    RunConfig config;
    std::array<GroupSummary, 2> groups;
    std::array<TestOutcome, 6> tests;

    bool degenerate() const {
        for (const auto& t : tests) {
            if (!t.report) return true;
        }
        return false;
    }
};

inline void validate(const RunConfig& c) {
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw input_error("alpha must lie in (0, 1)");
    if (c.B < sharwb::min_replications) throw input_error("B must be at least 19");
    if (c.lb_lag < 1) throw input_error("Ljung-Box lag must be at least 1");
    if (c.threads < 1) throw input_error("threads must be at least 1");
    if ((c.K1 && *c.K1 < 1) || (c.K2 && *c.K2 < 1)) throw input_error("K must be at least 1");
}

namespace detail {

inline GroupSummary summarize(const TimeSeriesSample& y, const std::string& label, const RunConfig& c,
                              twosample::KChoice K) {
    GroupSummary g;
    g.label = label;
    g.T = y.size();
    g.mean = y.mean();
    if (K && *K > lrv::max_basis_count(y.size())) {
        throw input_error("K = " + std::to_string(*K) + " for group '" + label + "' exceeds floor(T/2) = " +
                          std::to_string(lrv::max_basis_count(y.size())));
    }
    try {
        g.har = twosample::prepare_har_group(y, K, c.k_rule);
    } catch (const degenerate_error& e) {
        g.har_na = e.what();
    }
    if (c.lb_lag >= y.size()) {
        g.ljung_box_na = "lag " + std::to_string(c.lb_lag) + " needs T > lag";
    } else {
        try {
            g.ljung_box = lrv::ljung_box(y, c.lb_lag);
        } catch (const degenerate_error& e) {
            g.ljung_box_na = e.what();
        }
    }
    return g;
}

template <class F>
TestOutcome attempt(const char* name, F&& f) {
    TestOutcome out;
    out.name = name;
    try {
        f(out);
    } catch (const degenerate_error& e) {
        out.report.reset();
        out.run.reset();
        out.na_reason = e.what();
    }
    return out;
}

}  // namespace detail

inline Analysis analyze(const Groups& data, const RunConfig& c) {
    validate(c);
    Analysis a;
    a.config = c;
    a.groups[0] = detail::summarize(data.y1, data.label1, c, c.K1);
    a.groups[1] = detail::summarize(data.y2, data.label2, c, c.K2);
    const auto& g1 = a.groups[0].har;
    const auto& g2 = a.groups[1].har;
    const std::string har_na = !g1 ? a.groups[0].har_na : a.groups[1].har_na;

    a.tests[0] = detail::attempt("t0", [&](TestOutcome& o) { o.report = twosample::classical_t(data.y1, data.y2, c.alpha); });
    a.tests[1] = detail::attempt("t1", [&](TestOutcome& o) { o.report = twosample::welch_t(data.y1, data.y2, c.alpha); });
    auto har = [&](TestOutcome& o, auto&& run) {
        if (!g1 || !g2) throw degenerate_error(har_na);
        run(o);
    };
    a.tests[2] = detail::attempt("t0_har", [&](TestOutcome& o) {
        har(o, [&](TestOutcome& x) { x.report = twosample::har_pooled_t(*g1, *g2, c.alpha); });
    });
    a.tests[3] = detail::attempt("t1_har_norm", [&](TestOutcome& o) {
        har(o, [&](TestOutcome& x) {
            x.report = twosample::har_welch_t(*g1, *g2, c.alpha, twosample::HarReference::Normal);
        });
    });
    a.tests[4] = detail::attempt("t1_har", [&](TestOutcome& o) {
        har(o, [&](TestOutcome& x) {
            x.report = twosample::har_welch_t(*g1, *g2, c.alpha, twosample::HarReference::TAdjusted);
        });
    });
    a.tests[5] = detail::attempt("t1_har_boot", [&](TestOutcome& o) {
        har(o, [&](TestOutcome& x) {
            sharwb::BootstrapOptions opt;
            opt.B = c.B;
            opt.seed = c.seed;
            opt.law = c.law;
            opt.threads = c.threads;
            auto bt = sharwb::shar_wb_test(data.y1, data.y2, *g1, *g2, c.alpha, opt);
            x.report = std::move(bt.report);
            x.run = std::move(bt.run);
        });
    });
    return a;
}

// ---------------------------------------------------------------------------
// Text

namespace detail {

inline std::string fixed(double v, int digits) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

}  // namespace detail

inline void write_text(std::ostream& os, const Analysis& a) {
    using detail::fixed;
    os << "Descriptive statistics\n";
    os << std::left << std::setw(22) << "group" << std::right << std::setw(8) << "T" << std::setw(14) << "mean"
       << std::setw(14) << "sqrt(Omega)" << std::setw(6) << "K" << std::setw(12) << "Q(" + std::to_string(a.config.lb_lag) + ")"
       << std::setw(10) << "p(Q)" << '\n';
    for (const auto& g : a.groups) {
        os << std::left << std::setw(22) << g.label << std::right << std::setw(8) << g.T << std::setw(14)
           << fixed(g.mean, 4);
        if (g.har) {
            os << std::setw(14) << fixed(std::sqrt(g.har->lrv.omega), 4) << std::setw(6) << g.har->lrv.K;
        } else {
            os << std::setw(14) << "NA" << std::setw(6) << "NA";
        }
        if (g.ljung_box) {
            os << std::setw(12) << fixed(g.ljung_box->q, 3) << std::setw(10) << fixed(g.ljung_box->p_value, 3);
        } else {
            os << std::setw(12) << "NA" << std::setw(10) << "NA";
        }
        os << '\n';
    }
    for (const auto& g : a.groups) {
        if (!g.har) os << "  " << g.label << ": LRV NA (" << g.har_na << ")\n";
        if (!g.ljung_box) os << "  " << g.label << ": Ljung-Box NA (" << g.ljung_box_na << ")\n";
    }

    os << "\nTwo-sample tests (alpha = " << a.config.alpha << ")\n";
    os << std::left << std::setw(14) << "test" << std::right << std::setw(12) << "statistic" << std::setw(16)
       << "reference" << std::setw(10) << "p-value" << std::setw(8) << "reject" << '\n';
    for (const auto& t : a.tests) {
        os << std::left << std::setw(14) << t.name << std::right;
        if (!t.report) {
            os << std::setw(12) << "NA" << std::setw(16) << "-" << std::setw(10) << "NA" << std::setw(8) << "-"
               << "  (" << t.na_reason << ")\n";
            continue;
        }
        const auto& r = *t.report;
        std::string ref = stats::to_string(r.reference.kind());
        if (r.reference.has_df()) ref = "t(" + fixed(r.reference.df(), 2) + ")";
        if (t.run) ref = "boot(B=" + std::to_string(t.run->B) + ")";
        os << std::setw(12) << fixed(r.statistic, 4) << std::setw(16) << ref << std::setw(10) << fixed(r.p_value, 3)
           << std::setw(8) << (r.reject ? "yes" : "no") << '\n';
    }
    if (a.tests[5].run) os << "\nbootstrap seed " << a.tests[5].run->seed << '\n';
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::ordered_json to_json(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["alpha"] = c.alpha;
    j["B"] = c.B;
    j["seed"] = c.seed;
    j["K1"] = c.K1 ? nlohmann::ordered_json(*c.K1) : nlohmann::ordered_json("auto");
    j["K2"] = c.K2 ? nlohmann::ordered_json(*c.K2) : nlohmann::ordered_json("auto");
    j["lb_lag"] = c.lb_lag;
    j["multiplier"] = rng::to_string(c.law);
    j["k_rule"] = lrv::to_string(c.k_rule);
    return j;
}

inline nlohmann::ordered_json to_json(const IngestConfig& in) {
    nlohmann::ordered_json j;
    if (in.single_file()) {
        j["file"] = in.file;
        j["group_column"] = in.group_column;
        j["value_column"] = in.value_column;
    } else {
        j["file1"] = in.file1;
        j["file2"] = in.file2;
        j["column"] = in.column;
    }
    return j;
}

inline nlohmann::ordered_json to_json(const twosample::TestReport& r) {
    nlohmann::ordered_json j;
    j["statistic"] = r.statistic;
    j["reference"] = stats::to_string(r.reference.kind());
    j["df"] = r.detail.df ? nlohmann::ordered_json(*r.detail.df) : nlohmann::ordered_json(nullptr);
    j["p_value"] = r.p_value;
    j["alpha"] = r.alpha;
    j["reject"] = r.reject;
    j["mean1"] = r.detail.mean1;
    j["mean2"] = r.detail.mean2;
    j["T1"] = r.detail.T1;
    j["T2"] = r.detail.T2;
    j["spread1"] = r.detail.spread1;
    j["spread2"] = r.detail.spread2;
    j["K1"] = r.detail.K1 ? nlohmann::ordered_json(*r.detail.K1) : nlohmann::ordered_json(nullptr);
    j["K2"] = r.detail.K2 ? nlohmann::ordered_json(*r.detail.K2) : nlohmann::ordered_json(nullptr);
    return j;
}

inline nlohmann::ordered_json to_json(const sharwb::BootstrapRun& r) {
    nlohmann::ordered_json j;
    j["B"] = r.B;
    j["seed"] = r.seed;
    j["K1"] = r.K1;
    j["K2"] = r.K2;
    j["k_star1"] = r.k_star1;
    j["k_star2"] = r.k_star2;
    j["multiplier"] = rng::to_string(r.law);
    j["crit_lo"] = r.crit_lo;
    j["crit_hi"] = r.crit_hi;
    j["p_value"] = r.p_value;
    j["redraws"] = r.redraws;
    j["replicate_stats"] = r.replicate_stats;
    return j;
}

inline nlohmann::ordered_json to_json(const GroupSummary& g) {
    nlohmann::ordered_json j;
    j["label"] = g.label;
    j["T"] = g.T;
    j["mean"] = g.mean;
    if (g.har) {
        j["omega"] = g.har->lrv.omega;
        j["omega_sqrt"] = std::sqrt(g.har->lrv.omega);
        j["K"] = g.har->lrv.K;
        if (g.har->selection) {
            const auto& s = *g.har->selection;
            j["k_selection"] = {{"k_hat", s.k_hat},     {"a_hat", s.a_hat}, {"sigma_hat", s.sigma_hat},
                                {"b_hat", s.b_hat},     {"b_bar", s.b_bar}, {"clamped", s.clamped}};
        }
    } else {
        j["omega"] = nullptr;
        j["K"] = nullptr;
        j["na"] = g.har_na;
    }
    if (g.ljung_box) {
        j["ljung_box"] = {{"lag", g.ljung_box->lag}, {"q", g.ljung_box->q}, {"p_value", g.ljung_box->p_value}};
    } else {
        j["ljung_box"] = {{"na", g.ljung_box_na}};
    }
    return j;
}

inline nlohmann::ordered_json to_json(const Analysis& a, const IngestConfig& inputs) {
    nlohmann::ordered_json j;
    j["version"] = shar::version;
    j["inputs"] = to_json(inputs);
    j["config"] = to_json(a.config);
    j["groups"] = nlohmann::ordered_json::array();
    for (const auto& g : a.groups) j["groups"].push_back(to_json(g));
    j["tests"] = nlohmann::ordered_json::array();
    for (const auto& t : a.tests) {
        nlohmann::ordered_json tj;
        tj["name"] = t.name;
        if (t.report) {
            tj.update(to_json(*t.report));
        } else {
            tj["statistic"] = nullptr;
            tj["p_value"] = nullptr;
            tj["na"] = t.na_reason;
        }
        if (t.run) tj["bootstrap"] = to_json(*t.run);
        j["tests"].push_back(tj);
    }
    j["degenerate"] = a.degenerate();
    return j;
}

}  // namespace shar::app
