#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "json.hpp"
#include "shar/error.hpp"
#include "shar/simlab.hpp"
#include "shar/table.hpp"

namespace sim = shar::simlab;
namespace rng = shar::rng;

namespace {

double sample_variance(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= v.size();
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / (v.size() - 1);
}

double lag1_autocorrelation(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= v.size();
    double num = 0.0;
    double den = 0.0;
    for (std::size_t t = 0; t < v.size(); ++t) {
        den += (v[t] - m) * (v[t] - m);
        if (t > 0) num += (v[t] - m) * (v[t - 1] - m);
    }
    return num / den;
}

sim::Scenario small(double rho, std::uint64_t seed) {
    sim::Scenario s;
    s.T1 = 40;
    s.T2 = 35;
    s.rho = rho;
    s.n_mc = 60;
    s.B = 39;
    s.seed = seed;
    return s;
}

}  // namespace

TEST(SimulateSeries, IidNormalVariance) {
    auto eng = rng::substream(1, {1});
    const auto y = sim::simulate_series(100000, 0.0, 1.0, 3.0, sim::ErrorLaw::Normal, eng);
    EXPECT_NEAR(y.mean(), 3.0, 0.02);
    const double v = sample_variance(y.values());
    EXPECT_GE(v, 0.98);
    EXPECT_LE(v, 1.02);
}

TEST(SimulateSeries, Lag1Autocorrelation) {
    auto eng = rng::substream(2, {1});
    const auto y = sim::simulate_series(100000, 0.8, 1.0, 0.0, sim::ErrorLaw::Normal, eng);
    const double r = lag1_autocorrelation(y.values());
    EXPECT_GE(r, 0.79);
    EXPECT_LE(r, 0.81);
}

TEST(SimulateSeries, StandardizedChiSquareSkewness) {
    auto eng = rng::substream(3, {1});
    sim::ErrorSampler draw(sim::ErrorLaw::ChiSq1Standardized);
    const std::size_t n = 1000000;
    std::vector<double> v(n);
    double m = 0.0;
    for (double& x : v) {
        x = draw(eng);
        m += x;
    }
    m /= n;
    double m2 = 0.0;
    double m3 = 0.0;
    for (double x : v) {
        m2 += (x - m) * (x - m);
        m3 += (x - m) * (x - m) * (x - m);
    }
    m2 /= n;
    m3 /= n;
    EXPECT_NEAR(m, 0.0, 0.01);
    EXPECT_NEAR(m2, 1.0, 0.01);
    const double skew = m3 / std::pow(m2, 1.5);
    EXPECT_GE(skew, 2.7);
    EXPECT_LE(skew, 2.95);
}

TEST(SimulateSeries, VarianceTargeting) {
    for (double rho : {0.0, 0.5, 0.8}) {
        for (auto law : {sim::ErrorLaw::Normal, sim::ErrorLaw::ChiSq1Standardized}) {
            auto eng = rng::substream(4, {static_cast<std::uint64_t>(rho * 10), static_cast<std::uint64_t>(law)});
            const auto y = sim::simulate_series(100000, rho, 2.0, 0.0, law, eng);
            EXPECT_NEAR(sample_variance(y.values()) / 4.0, 1.0, 0.03) << rho;
        }
    }
}

TEST(SimulateSeries, DeterministicAndValidated) {
    auto a = rng::substream(5, {1});
    auto b = rng::substream(5, {1});
    const auto ya = sim::simulate_series(50, 0.5, 1.0, 0.0, sim::ErrorLaw::Normal, a);
    const auto yb = sim::simulate_series(50, 0.5, 1.0, 0.0, sim::ErrorLaw::Normal, b);
    EXPECT_TRUE(std::equal(ya.values().begin(), ya.values().end(), yb.values().begin()));
    EXPECT_THROW(sim::simulate_series(50, 1.0, 1.0, 0.0, sim::ErrorLaw::Normal, a), shar::domain_error);
    EXPECT_THROW(sim::simulate_series(50, -1.2, 1.0, 0.0, sim::ErrorLaw::Normal, a), shar::domain_error);
    EXPECT_THROW(sim::simulate_series(50, 0.0, 0.0, 0.0, sim::ErrorLaw::Normal, a), shar::domain_error);
}

TEST(RunCell, RatesAndStandardErrors) {
    const auto c = sim::run_cell(small(0.5, 7));
    for (std::size_t i = 0; i < sim::num_tests; ++i) {
        EXPECT_GE(c.rate(i), 0.0);
        EXPECT_LE(c.rate(i), 1.0);
        EXPECT_EQ(c.exclusions[i], 0u);
        const double r = c.rate(i);
        EXPECT_DOUBLE_EQ(c.mc_standard_error(i), std::sqrt(r * (1.0 - r) / 60.0));
    }
    EXPECT_GE(c.seconds, 0.0);
}

TEST(RunCell, DeterministicWhateverTheThreadCount) {
    auto s = small(0.3, 11);
    const auto a = sim::run_cell(s);
    const auto b = sim::run_cell(s);
    s.threads = 3;
    const auto c = sim::run_cell(s);
    EXPECT_EQ(a.rejections, b.rejections);
    EXPECT_EQ(a.rejections, c.rejections);
    s.seed = 12;
    s.threads = 1;
    s.n_mc = 300;
    auto base = s;
    base.seed = 11;
    EXPECT_NE(sim::run_cell(base).rejections, sim::run_cell(s).rejections);
}

TEST(RunCell, ValidatesScenario) {
    auto s = small(0.0, 1);
    s.B = 10;
    EXPECT_THROW(sim::run_cell(s), shar::domain_error);
    s = small(1.0, 1);
    EXPECT_THROW(sim::run_cell(s), shar::domain_error);
    s = small(0.0, 1);
    s.T2 = 3;
    EXPECT_THROW(sim::run_cell(s), shar::domain_error);
    s = small(0.0, 1);
    s.alpha = 0.0;
    EXPECT_THROW(sim::run_cell(s), shar::domain_error);
}

TEST(RunCell, PowerIncreasesWithMeanRatio) {
    sim::Scenario s;
    s.T1 = s.T2 = 400;
    s.rho = 0.5;
    s.n_mc = 2000;
    s.B = 99;
    s.seed = 2718;
    std::vector<sim::CellResult> cells;
    for (double a : {1.0, 1.1, 1.2}) {
        s.a = a;
        cells.push_back(sim::run_cell(s));
    }
    for (std::size_t i : {sim::t0_har, sim::t1_har_norm, sim::t1_har, sim::t1_har_boot}) {
        EXPECT_GE(cells[1].rate(i), cells[0].rate(i)) << sim::test_names[i];
        EXPECT_GE(cells[2].rate(i), cells[1].rate(i)) << sim::test_names[i];
    }
}

TEST(Presets, DeskGridShapes) {
    const auto t1 = sim::preset("table1-desk", 1);
    EXPECT_EQ(t1.cells.size(), 9u);
    for (const auto& c : t1.cells) {
        EXPECT_EQ(c.B, 199u);
        EXPECT_EQ(c.n_mc, 2000u);
        EXPECT_EQ(c.a, 1.0);
        EXPECT_EQ(c.error_law, sim::ErrorLaw::Normal);
    }
    const auto t2 = sim::preset("table2", 1);
    EXPECT_EQ(t2.cells.size(), 27u);
    for (const auto& c : t2.cells) {
        EXPECT_EQ(c.sigma1, 0.06);
        EXPECT_EQ(c.sigma2, 0.18);
        EXPECT_EQ(c.B, 399u);
    }
    const auto t4 = sim::preset("table4-desk", 1);
    for (const auto& c : t4.cells) {
        EXPECT_EQ(c.error_law, sim::ErrorLaw::ChiSq1Standardized);
        EXPECT_EQ(c.sigma2, 0.18);
    }
    const auto t5 = sim::preset("table5-desk", 1);
    ASSERT_EQ(t5.cells.size(), 6u);
    EXPECT_EQ(t5.cells[0].a, 1.1);
    EXPECT_EQ(t5.cells[1].a, 1.2);
    EXPECT_THROW(sim::preset("table9", 1), shar::input_error);
}

TEST(Presets, SeedsAndRule) {
    const auto a = sim::preset("table3-desk", 5);
    const auto b = sim::preset("table3-desk", 5, shar::lrv::CurvatureScale::Innovation);
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        EXPECT_EQ(a.cells[i].seed, b.cells[i].seed);
        EXPECT_EQ(a.cells[i].k_rule, shar::lrv::CurvatureScale::LongRun);
        EXPECT_EQ(b.cells[i].k_rule, shar::lrv::CurvatureScale::Innovation);
        for (std::size_t j = 0; j < i; ++j) EXPECT_NE(a.cells[i].seed, a.cells[j].seed);
    }
}

TEST(Presets, NoExclusionsUnderNormalErrors) {
    for (const char* name : {"table1-desk", "table2-desk", "table5-desk"}) {
        auto grid = sim::preset(name, 3);
        for (auto& s : grid.cells) {
            s.n_mc = 40;
            s.B = 19;
            const auto c = sim::run_cell(s);
            for (std::size_t e : c.exclusions) EXPECT_EQ(e, 0u) << name << " T=" << s.T1 << " rho=" << s.rho;
        }
    }
}

TEST(RunTable, SingleCellArtifacts) {
    sim::Grid grid{"one", {small(0.0, 9)}};
    std::ostringstream text;
    std::ostringstream json;
    int calls = 0;
    const auto res = sim::run_table(grid, {&text, &json}, [&](const sim::CellResult&) { ++calls; });
    EXPECT_EQ(calls, 1);
    ASSERT_EQ(res.size(), 1u);

    std::istringstream lines(text.str());
    std::string header;
    std::string row;
    std::string extra;
    std::getline(lines, header);
    std::getline(lines, row);
    EXPECT_FALSE(std::getline(lines, extra));
    EXPECT_EQ(header.rfind("T1\tT2\trho\ta\tt0\tt1\tt0_har\tt1_har_norm\tt1_har\tt1_har_boot", 0), 0u);
    EXPECT_EQ(row.rfind("40\t35\t0.0\t1.00\t", 0), 0u) << row;

    const auto doc = nlohmann::json::parse(json.str());
    EXPECT_EQ(doc["grid"], "one");
    ASSERT_EQ(doc["cells"].size(), 1u);
    const auto& cell = doc["cells"][0];
    EXPECT_EQ(cell["scenario"]["seed"], 9u);
    EXPECT_EQ(cell["scenario"]["k_rule"], "long-run");
    for (std::size_t i = 0; i < sim::num_tests; ++i) {
        const char* n = sim::test_names[i];
        EXPECT_EQ(cell["rejections"][n].get<std::size_t>(), res[0].rejections[i]);
        EXPECT_GE(cell["rates"][n].get<double>(), 0.0);
        EXPECT_LE(cell["rates"][n].get<double>(), 1.0);
    }
}

TEST(RunTable, RerunIsByteIdentical) {
    auto grid = sim::preset("table5-desk", 21);
    grid.cells.resize(2);
    for (auto& s : grid.cells) {
        s.n_mc = 25;
        s.B = 19;
    }
    std::ostringstream t1, j1, t2, j2;
    sim::run_table(grid, {&t1, &j1});
    sim::run_table(grid, {&t2, &j2});
    EXPECT_EQ(t1.str(), t2.str());
    EXPECT_EQ(j1.str(), j2.str());
}

TEST(RunTable, EmptyGridAndPercentFormat) {
    EXPECT_THROW(sim::run_table(sim::Grid{"none", {}}, {}), shar::domain_error);
    EXPECT_EQ(sim::format_percent(0.0501), "5.01");
    EXPECT_EQ(sim::format_percent(1.0), "100.00");
}
