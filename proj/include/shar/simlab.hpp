#pragma once

// Monte Carlo size and power experiments for the six two-sample tests on
// AR(1) data: Y_t = mu + sigma e_t, e_t = rho e_{t-1} + sqrt(1 - rho^2) v_t,
// with e_0 drawn from the stationary law so every e_t has unit variance.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "shar/bootstrap.hpp"
#include "shar/error.hpp"
#include "shar/rng.hpp"
#include "shar/sample.hpp"
#include "shar/two_sample.hpp"

namespace shar::simlab {

enum class ErrorLaw { Normal, ChiSq1Standardized };

inline const char* to_string(ErrorLaw law) {
    return law == ErrorLaw::Normal ? "normal" : "chisq1";
}

/// (chi2(1) - 1) / sqrt(2) when skewed, N(0, 1) otherwise.
class ErrorSampler {
public:
    explicit ErrorSampler(ErrorLaw law) : law_(law) {}

    double operator()(rng::Engine& eng) {
        const double z = normal_(eng);
        if (law_ == ErrorLaw::Normal) return z;
        return (z * z - 1.0) / std::numbers::sqrt2;
    }

private:
    ErrorLaw law_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

inline TimeSeriesSample simulate_series(std::size_t length, double rho, double sigma, double mu, ErrorLaw law,
                                        rng::Engine& eng) {
    if (!(std::fabs(rho) < 1.0)) shar::detail::fail_domain("simulate_series: |rho| must be < 1");
    if (!(sigma > 0.0)) shar::detail::fail_domain("simulate_series: sigma must be positive");
    ErrorSampler draw(law);
    const double innov_scale = std::sqrt(1.0 - rho * rho);
    double e = draw(eng);
    std::vector<double> y(length);
    for (std::size_t t = 0; t < length; ++t) {
        e = rho * e + innov_scale * draw(eng);
        y[t] = mu + sigma * e;
    }
    return TimeSeriesSample(std::move(y));
}

// ---------------------------------------------------------------------------
// Cells

inline constexpr std::size_t num_tests = 6;

/// Column order of every table: t0, t1, t0_har, t1_har_norm, t1_har, t1_har_boot.
inline constexpr std::array<const char*, num_tests> test_names = {"t0",          "t1",     "t0_har",
                                                                  "t1_har_norm", "t1_har", "t1_har_boot"};

enum TestIndex : std::size_t { t0 = 0, t1, t0_har, t1_har_norm, t1_har, t1_har_boot };

struct Scenario {
    std::size_t T1 = 200;
    std::size_t T2 = 200;
    double rho = 0.0;
    double sigma1 = 1.0;
    double sigma2 = 1.0;
    ErrorLaw error_law = ErrorLaw::Normal;
    double mu1 = 5.0;
    double a = 1.0;  ///< mu2 = a * mu1
    std::size_t n_mc = 2000;
    std::size_t B = 199;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    lrv::CurvatureScale k_rule = lrv::CurvatureScale::LongRun;
};

struct CellResult {
    Scenario scenario;
    std::array<std::size_t, num_tests> rejections{};
    std::array<std::size_t, num_tests> exclusions{};
    double seconds = 0.0;

    std::size_t used(std::size_t test) const { return scenario.n_mc - exclusions[test]; }

    double rate(std::size_t test) const {
        const std::size_t n = used(test);
        return n == 0 ? 0.0 : static_cast<double>(rejections[test]) / static_cast<double>(n);
    }

    /// sqrt(r (1 - r) / n) at the observed rate.
    double mc_standard_error(std::size_t test) const {
        const std::size_t n = used(test);
        if (n == 0) return 0.0;
        const double r = rate(test);
        return std::sqrt(r * (1.0 - r) / static_cast<double>(n));
    }
};

namespace detail {

inline void check_scenario(const Scenario& s) {
    if (s.T1 < TimeSeriesSample::min_length || s.T2 < TimeSeriesSample::min_length) {
        shar::detail::fail_domain("scenario: T1, T2 must be >= 4");
    }
    if (!(std::fabs(s.rho) < 1.0)) shar::detail::fail_domain("scenario: |rho| must be < 1");
    if (!(s.sigma1 > 0.0) || !(s.sigma2 > 0.0)) shar::detail::fail_domain("scenario: sigma must be positive");
    if (!(s.a > 0.0)) shar::detail::fail_domain("scenario: a must be positive");
    if (s.n_mc < 1) shar::detail::fail_domain("scenario: n_mc must be >= 1");
    if (s.B < sharwb::min_replications) shar::detail::fail_domain("scenario: B must be >= 19");
    if (!(s.alpha > 0.0 && s.alpha < 1.0)) shar::detail::fail_domain("scenario: alpha must lie in (0, 1)");
}

// Outcome per test for one replication: 1 reject, 0 accept, -1 excluded.
using Outcome = std::array<signed char, num_tests>;

template <class F>
signed char attempt(F&& f) {
    try {
        return f() ? 1 : 0;
    } catch (const degenerate_error&) {
        return -1;
    }
}

inline Outcome run_replication(const Scenario& s, std::size_t r) {
    rng::Engine e1 = rng::substream(s.seed, {rng::tag_simulation, r, 1});
    rng::Engine e2 = rng::substream(s.seed, {rng::tag_simulation, r, 2});
    const auto y1 = simulate_series(s.T1, s.rho, s.sigma1, s.mu1, s.error_law, e1);
    const auto y2 = simulate_series(s.T2, s.rho, s.sigma2, s.a * s.mu1, s.error_law, e2);

    Outcome out{};
    out[t0] = attempt([&] { return twosample::classical_t(y1, y2, s.alpha).reject; });
    out[t1] = attempt([&] { return twosample::welch_t(y1, y2, s.alpha).reject; });

    twosample::HarGroup g1;
    twosample::HarGroup g2;
    try {
        g1 = twosample::prepare_har_group(y1, twosample::k_auto, s.k_rule);
        g2 = twosample::prepare_har_group(y2, twosample::k_auto, s.k_rule);
    } catch (const degenerate_error&) {
        for (std::size_t i = t0_har; i < num_tests; ++i) out[i] = -1;
        return out;
    }
    out[t0_har] = attempt([&] { return twosample::har_pooled_t(g1, g2, s.alpha).reject; });
    out[t1_har_norm] = attempt(
        [&] { return twosample::har_welch_t(g1, g2, s.alpha, twosample::HarReference::Normal).reject; });
    out[t1_har] = attempt(
        [&] { return twosample::har_welch_t(g1, g2, s.alpha, twosample::HarReference::TAdjusted).reject; });
    out[t1_har_boot] = attempt([&] {
        sharwb::BootstrapOptions opt;
        opt.B = s.B;
        opt.seed = rng::derive(s.seed, {rng::tag_bootstrap, r});
        return sharwb::shar_wb_test(y1, y2, g1, g2, s.alpha, opt).report.reject;
    });
    return out;
}

}  // namespace detail

/// Runs every replication of a cell; deterministic given the scenario seed,
/// whatever the thread count.
inline CellResult run_cell(const Scenario& s) {
    detail::check_scenario(s);
    const auto start = std::chrono::steady_clock::now();
    std::vector<detail::Outcome> outcomes(s.n_mc);

    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) outcomes[r] = detail::run_replication(s, r);
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(s.threads, static_cast<unsigned>(s.n_mc)));
    if (threads == 1) {
        work(0, s.n_mc);
    } else {
        std::vector<std::exception_ptr> errors(threads);
        {
            std::vector<std::jthread> pool;
            // Interleaved assignment balances cells whose cost varies with K.
            for (unsigned i = 0; i < threads; ++i) {
                pool.emplace_back([&, i] {
                    try {
                        for (std::size_t r = i; r < s.n_mc; r += threads) work(r, r + 1);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                });
            }
        }
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }

    CellResult res;
    res.scenario = s;
    for (const auto& o : outcomes) {
        for (std::size_t i = 0; i < num_tests; ++i) {
            if (o[i] < 0) {
                ++res.exclusions[i];
            } else {
                res.rejections[i] += static_cast<std::size_t>(o[i]);
            }
        }
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

}  // namespace shar::simlab
