// shar: two-sample mean tests for autocorrelated series, and the Monte Carlo lab.
//
//   shar test --file1 a.csv --file2 b.csv [--col value] [--format json]
//   shar test --file data.csv --group-col group --value-col y
//   shar simulate --preset table1-desk --out results/table1
//   shar simulate --T1 200 --T2 200 --rho 0.8 --n-mc 500
//
// Exit status: 0 success, 2 bad input, 3 degenerate statistic (reported as
// NA), 4 internal error.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "shar/app/ingest.hpp"
#include "shar/app/report.hpp"
#include "shar/error.hpp"
#include "shar/table.hpp"
#include "shar/version.hpp"

namespace {

enum Exit : int { ok = 0, bad_input = 2, degenerate = 3, internal = 4 };

struct TestArgs {
    shar::app::IngestConfig in;
    shar::app::RunConfig run;
    std::optional<std::size_t> k1;
    std::optional<std::size_t> k2;
    bool k_auto = false;
    std::string format = "text";
    std::string out;
};

struct SimulateArgs {
    std::string preset;
    std::size_t T1 = 200;
    std::size_t T2 = 200;
    double rho = 0.0;
    double sigma1 = 1.0;
    double sigma2 = 1.0;
    std::string law = "normal";
    double a = 1.0;
    std::optional<std::size_t> n_mc;
    std::optional<std::size_t> B;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::string format = "text";
    std::string out;
    shar::lrv::CurvatureScale k_rule = shar::lrv::CurvatureScale::LongRun;
};

const std::map<std::string, shar::lrv::CurvatureScale> k_rules = {
    {"long-run", shar::lrv::CurvatureScale::LongRun}, {"innovation", shar::lrv::CurvatureScale::Innovation}};

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw shar::input_error(path + ": cannot open for writing");
    return f;
}

int run_test(const TestArgs& args) {
    shar::app::RunConfig cfg = args.run;
    if (args.k_auto && (args.k1 || args.k2)) throw shar::input_error("--k-auto cannot be combined with --k1/--k2");
    if (args.k1.has_value() != args.k2.has_value()) throw shar::input_error("--k1 and --k2 go together");
    cfg.K1 = args.k1;
    cfg.K2 = args.k2;

    const auto groups = shar::app::ingest(args.in);
    const auto analysis = shar::app::analyze(groups, cfg);

    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!args.out.empty()) {
        file = open_out(args.out);
        os = &file;
    }
    if (args.format == "json") {
        *os << shar::app::to_json(analysis, args.in).dump(2) << '\n';
    } else {
        shar::app::write_text(*os, analysis);
    }
    os->flush();
    if (!*os) throw std::runtime_error("failed writing report");
    return analysis.degenerate() ? degenerate : ok;
}

int run_simulate(const SimulateArgs& args) {
    using namespace shar::simlab;
    Grid grid;
    if (!args.preset.empty()) {
        grid = preset(args.preset, args.seed, args.k_rule);
    } else {
        Scenario s;
        s.T1 = args.T1;
        s.T2 = args.T2;
        s.rho = args.rho;
        s.sigma1 = args.sigma1;
        s.sigma2 = args.sigma2;
        s.error_law = args.law == "chisq1" ? ErrorLaw::ChiSq1Standardized : ErrorLaw::Normal;
        s.a = args.a;
        s.seed = args.seed;
        s.k_rule = args.k_rule;
        grid = {"custom", {s}};
    }
    for (Scenario& s : grid.cells) {
        if (args.n_mc) s.n_mc = *args.n_mc;
        if (args.B) s.B = *args.B;
        s.threads = args.threads;
    }

    std::ofstream text_file;
    std::ofstream json_file;
    TableSink sink;
    if (!args.out.empty()) {
        text_file = open_out(args.out + ".tsv");
        json_file = open_out(args.out + ".json");
        sink = {&text_file, &json_file};
    } else if (args.format == "json") {
        sink.json = &std::cout;
    } else {
        sink.text = &std::cout;
    }
    std::cerr << "grid " << grid.name << ": " << grid.cells.size() << " cells, master seed " << args.seed << '\n';
    std::size_t done = 0;
    run_table(grid, sink, [&](const CellResult& c) {
        ++done;
        std::cerr << "  cell " << done << '/' << grid.cells.size() << "  T1=" << c.scenario.T1
                  << " T2=" << c.scenario.T2 << " rho=" << c.scenario.rho << " a=" << c.scenario.a
                  << "  seed " << c.scenario.seed << "  (" << c.seconds << " s)\n";
    });
    if (!args.out.empty()) std::cerr << "wrote " << args.out << ".tsv and " << args.out << ".json\n";
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-sample tests of equal means for autocorrelated series"};
    app.set_version_flag("--version", std::string(shar::version));
    app.require_subcommand(1);

    TestArgs t;
    auto* test = app.add_subcommand("test", "Run diagnostics and the six two-sample tests on two series");
    auto* two = test->add_option_group("two files");
    auto* f1 = two->add_option("--file1", t.in.file1, "First group's file");
    auto* f2 = two->add_option("--file2", t.in.file2, "Second group's file");
    two->add_option("--col", t.in.column, "Value column (header name or 1-based index)");
    auto* one = test->add_option_group("one file");
    auto* f = one->add_option("--file", t.in.file, "File holding both groups");
    one->add_option("--group-col", t.in.group_column, "Group label column");
    one->add_option("--value-col", t.in.value_column, "Value column");
    f1->excludes(f);
    f2->excludes(f);
    test->add_option("--alpha", t.run.alpha, "Significance level")->capture_default_str();
    test->add_option("--B", t.run.B, "Bootstrap replications")->capture_default_str();
    test->add_option("--seed", t.run.seed, "Bootstrap seed")->capture_default_str();
    test->add_option("--k1", t.k1, "Basis count for group 1");
    test->add_option("--k2", t.k2, "Basis count for group 2");
    test->add_flag("--k-auto", t.k_auto, "Select K from the data (default)");
    test->add_option("--k-rule", t.run.k_rule, "Variance fed to the curvature plug-in")
        ->transform(CLI::CheckedTransformer(k_rules, CLI::ignore_case))
        ->default_str("long-run");
    test->add_option("--lb-lag", t.run.lb_lag, "Ljung-Box lag")->capture_default_str();
    test->add_option("--multiplier", t.run.law, "Bootstrap innovation law")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, shar::rng::InnovationLaw>{{"normal", shar::rng::InnovationLaw::Normal},
                                                            {"rademacher", shar::rng::InnovationLaw::Rademacher}},
            CLI::ignore_case))
        ->default_str("normal");
    test->add_option("--threads", t.run.threads, "Bootstrap worker threads")->capture_default_str();
    test->add_option("--format", t.format, "Output format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();
    test->add_option("--out", t.out, "Write the report here instead of stdout");

    SimulateArgs s;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo size/power tables");
    auto* pre = sim->add_option("--preset", s.preset, "Named grid")
                    ->check(CLI::IsMember(shar::simlab::preset_names()));
    auto* o_t1 = sim->add_option("--T1", s.T1, "Length of group 1")->capture_default_str();
    auto* o_t2 = sim->add_option("--T2", s.T2, "Length of group 2")->capture_default_str();
    auto* o_rho = sim->add_option("--rho", s.rho, "AR(1) coefficient")->capture_default_str();
    auto* o_s1 = sim->add_option("--sigma1", s.sigma1, "Scale of group 1")->capture_default_str();
    auto* o_s2 = sim->add_option("--sigma2", s.sigma2, "Scale of group 2")->capture_default_str();
    auto* o_law = sim->add_option("--law", s.law, "Error law")->check(CLI::IsMember({"normal", "chisq1"}))->capture_default_str();
    auto* o_a = sim->add_option("--a", s.a, "mu2 = a * mu1")->capture_default_str();
    for (auto* o : {o_t1, o_t2, o_rho, o_s1, o_s2, o_law, o_a}) pre->excludes(o);
    sim->add_option("--n-mc", s.n_mc, "Replications per cell (default 2000)");
    sim->add_option("--B", s.B, "Bootstrap replications per test (preset default)");
    sim->add_option("--seed", s.seed, "Master seed")->capture_default_str();
    sim->add_option("--threads", s.threads, "Worker threads per cell")->capture_default_str();
    sim->add_option("--k-rule", s.k_rule, "Variance fed to the curvature plug-in")
        ->transform(CLI::CheckedTransformer(k_rules, CLI::ignore_case))
        ->default_str("long-run");
    sim->add_option("--format", s.format, "Output format when writing to stdout")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
    sim->add_option("--out", s.out, "Write PREFIX.tsv and PREFIX.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : bad_input;
    }

    try {
        if (*test) return run_test(t);
        return run_simulate(s);
    } catch (const shar::input_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return bad_input;
    } catch (const shar::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return bad_input;
    } catch (const shar::degenerate_error& e) {
        std::cerr << "degenerate: " << e.what() << '\n';
        return degenerate;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return internal;
    }
}
