#pragma once

// Two-sided tests of equal means for two groups: the pooled and Welch
// t-tests for independent data, and their series-HAR counterparts whose
// studentization uses the series long-run variance estimator.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include "shar/error.hpp"
#include "shar/lrv.hpp"
#include "shar/sample.hpp"
#include "shar/statdist.hpp"

namespace shar::twosample {

using stats::RefDistribution;

/// Number of basis functions for one group; std::nullopt selects it from
/// the data with lrv::select_k.
using KChoice = std::optional<std::size_t>;
inline constexpr KChoice k_auto = std::nullopt;

/// Calibration for the unequal-LRV HAR statistic.
enum class HarReference { Normal, TAdjusted };

struct TestDetail {
    double mean1 = 0.0;
    double mean2 = 0.0;
    std::size_t T1 = 0;
    std::size_t T2 = 0;
    /// Sample variance (classical tests) or series LRV (HAR tests) per group.
    double spread1 = 0.0;
    double spread2 = 0.0;
    std::optional<std::size_t> K1;
    std::optional<std::size_t> K2;
    std::optional<double> df;
};

struct TestReport {
    std::string name;
    double statistic = 0.0;
    RefDistribution reference = RefDistribution::normal();
    double p_value = 1.0;
    double alpha = 0.05;
    bool reject = false;
    TestDetail detail;
};

namespace detail {

inline void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) shar::detail::fail_domain("alpha must lie in (0, 1)");
}

inline TestReport finish(std::string name, double statistic, RefDistribution ref, double alpha,
                         TestDetail detail) {
    TestReport r;
    r.name = std::move(name);
    r.statistic = statistic;
    r.reference = ref;
    r.p_value = ref.two_sided_p(statistic);
    r.alpha = alpha;
    r.reject = r.p_value < alpha;
    if (ref.has_df()) detail.df = ref.df();
    r.detail = detail;
    return r;
}

struct Moments {
    double mean;
    double variance;
    std::size_t n;
};

inline Moments moments(std::span<const double> y) {
    if (y.size() < 2) shar::detail::fail_domain("two-sample test: each group needs at least 2 observations");
    const double m = shar::detail::mean_of(y);
    double ss = 0.0;
    for (double v : y) ss += (v - m) * (v - m);
    return {m, ss / static_cast<double>(y.size() - 1), y.size()};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Independent-data tests

/// Pooled-variance t statistic, reference t(T1 + T2 - 2).
inline TestReport classical_t(std::span<const double> y1, std::span<const double> y2, double alpha = 0.05) {
    detail::check_alpha(alpha);
    const auto g1 = detail::moments(y1);
    const auto g2 = detail::moments(y2);
    const double n1 = static_cast<double>(g1.n);
    const double n2 = static_cast<double>(g2.n);
    const double pooled = ((n1 - 1.0) * g1.variance + (n2 - 1.0) * g2.variance) / (n1 + n2 - 2.0);
    if (!(pooled > 0.0)) throw degenerate_error("classical_t: pooled variance is zero");
    const double stat = (g1.mean - g2.mean) / (std::sqrt(pooled) * std::sqrt(1.0 / n1 + 1.0 / n2));
    TestDetail d{g1.mean, g2.mean, g1.n, g2.n, g1.variance, g2.variance, {}, {}, {}};
    return detail::finish("t0", stat, RefDistribution::student_t(n1 + n2 - 2.0), alpha, d);
}

/// Welch-Satterthwaite degrees of freedom for per-group variance terms.
inline double welch_df(double var1, std::size_t n1, double var2, std::size_t n2) {
    const double a = var1 / static_cast<double>(n1);
    const double b = var2 / static_cast<double>(n2);
    return (a + b) * (a + b) /
           (a * a / static_cast<double>(n1 - 1) + b * b / static_cast<double>(n2 - 1));
}

inline TestReport welch_t(std::span<const double> y1, std::span<const double> y2, double alpha = 0.05) {
    detail::check_alpha(alpha);
    const auto g1 = detail::moments(y1);
    const auto g2 = detail::moments(y2);
    const double se2 = g1.variance / static_cast<double>(g1.n) + g2.variance / static_cast<double>(g2.n);
    if (!(se2 > 0.0)) throw degenerate_error("welch_t: both sample variances are zero");
    const double stat = (g1.mean - g2.mean) / std::sqrt(se2);
    const double df = welch_df(g1.variance, g1.n, g2.variance, g2.n);
    TestDetail d{g1.mean, g2.mean, g1.n, g2.n, g1.variance, g2.variance, {}, {}, {}};
    return detail::finish("t1", stat, RefDistribution::student_t(df), alpha, d);
}

inline TestReport classical_t(const TimeSeriesSample& y1, const TimeSeriesSample& y2, double alpha = 0.05) {
    return classical_t(y1.values(), y2.values(), alpha);
}

inline TestReport welch_t(const TimeSeriesSample& y1, const TimeSeriesSample& y2, double alpha = 0.05) {
    return welch_t(y1.values(), y2.values(), alpha);
}

// ---------------------------------------------------------------------------
// Series HAR tests

/// Per-group inputs to the HAR statistics: mean, length, and the LRV
/// estimate at the chosen K (with the selection record when K was automatic).
struct HarGroup {
    double mean = 0.0;
    std::size_t T = 0;
    lrv::LrvEstimate lrv;
    std::optional<lrv::KSelection> selection;
};

inline std::size_t resolve_k(const TimeSeriesSample& y, KChoice k,
                             std::optional<lrv::KSelection>* record = nullptr,
                             lrv::CurvatureScale scale = lrv::CurvatureScale::LongRun) {
    if (k) return *k;
    auto sel = lrv::select_k(y, scale);
    if (record) *record = sel;
    return sel.k_hat;
}

inline HarGroup prepare_har_group(const TimeSeriesSample& y, KChoice k,
                                  lrv::CurvatureScale scale = lrv::CurvatureScale::LongRun) {
    HarGroup g;
    g.mean = y.mean();
    g.T = y.size();
    const std::size_t K = resolve_k(y, k, &g.selection, scale);
    g.lrv = lrv::series_lrv(y, K);
    return g;
}

/// Welch-type adjusted degrees of freedom from moment matching:
///   (r^{1/2} W1 + r^{-1/2} W2)^2 / (r W1^2 / K1 + r^{-1} W2^2 / K2),  r = T2 / T1.
inline double k_adf(double omega1, double omega2, std::size_t T1, std::size_t T2, std::size_t K1,
                    std::size_t K2) {
    if (!(omega1 > 0.0) || !(omega2 > 0.0)) shar::detail::fail_domain("k_adf: LRV inputs must be positive");
    if (K1 < 1 || K2 < 1) shar::detail::fail_domain("k_adf: K must be >= 1");
    if (T1 < 1 || T2 < 1) shar::detail::fail_domain("k_adf: lengths must be >= 1");
    const double r = static_cast<double>(T2) / static_cast<double>(T1);
    const double sr = std::sqrt(r);
    const double num = sr * omega1 + omega2 / sr;
    const double den = r * omega1 * omega1 / static_cast<double>(K1) +
                       omega2 * omega2 / (r * static_cast<double>(K2));
    return num * num / den;
}

/// Pooled-LRV HAR statistic, reference t(K1 + K2).
inline TestReport har_pooled_t(const HarGroup& g1, const HarGroup& g2, double alpha = 0.05) {
    detail::check_alpha(alpha);
    const double k1 = static_cast<double>(g1.lrv.K);
    const double k2 = static_cast<double>(g2.lrv.K);
    const double pooled = (k1 * g1.lrv.omega + k2 * g2.lrv.omega) / (k1 + k2);
    if (!(pooled > 0.0)) throw degenerate_error("har_pooled_t: pooled HAR variance is zero");
    const double inv = 1.0 / static_cast<double>(g1.T) + 1.0 / static_cast<double>(g2.T);
    const double stat = (g1.mean - g2.mean) / (std::sqrt(pooled) * std::sqrt(inv));
    TestDetail d{g1.mean, g2.mean, g1.T, g2.T, g1.lrv.omega, g2.lrv.omega, g1.lrv.K, g2.lrv.K, {}};
    return detail::finish("t0_har", stat, RefDistribution::student_t(k1 + k2), alpha, d);
}

/// (Y1 - Y2) / sqrt(W1/T1 + W2/T2), the statistic shared by the normal,
/// adjusted-t and bootstrap calibrations.
inline double har_welch_statistic(double mean1, double omega1, std::size_t T1, double mean2, double omega2,
                                  std::size_t T2) {
    const double se2 = omega1 / static_cast<double>(T1) + omega2 / static_cast<double>(T2);
    if (!(se2 > 0.0)) throw degenerate_error("har_welch_t: both HAR variances are zero");
    return (mean1 - mean2) / std::sqrt(se2);
}

inline TestReport har_welch_t(const HarGroup& g1, const HarGroup& g2, double alpha = 0.05,
                              HarReference reference = HarReference::TAdjusted) {
    detail::check_alpha(alpha);
    const double stat = har_welch_statistic(g1.mean, g1.lrv.omega, g1.T, g2.mean, g2.lrv.omega, g2.T);
    TestDetail d{g1.mean, g2.mean, g1.T, g2.T, g1.lrv.omega, g2.lrv.omega, g1.lrv.K, g2.lrv.K, {}};
    if (reference == HarReference::Normal) {
        return detail::finish("t1_har_norm", stat, RefDistribution::normal(), alpha, d);
    }
    if (!(g1.lrv.omega > 0.0) || !(g2.lrv.omega > 0.0)) {
        throw degenerate_error("har_welch_t: adjusted df needs both HAR variances positive");
    }
    const double df = k_adf(g1.lrv.omega, g2.lrv.omega, g1.T, g2.T, g1.lrv.K, g2.lrv.K);
    return detail::finish("t1_har", stat, RefDistribution::student_t(df), alpha, d);
}

inline TestReport har_pooled_t(const TimeSeriesSample& y1, const TimeSeriesSample& y2, KChoice K1 = k_auto,
                               KChoice K2 = k_auto, double alpha = 0.05) {
    return har_pooled_t(prepare_har_group(y1, K1), prepare_har_group(y2, K2), alpha);
}

inline TestReport har_welch_t(const TimeSeriesSample& y1, const TimeSeriesSample& y2, KChoice K1 = k_auto,
                              KChoice K2 = k_auto, double alpha = 0.05,
                              HarReference reference = HarReference::TAdjusted) {
    return har_welch_t(prepare_har_group(y1, K1), prepare_har_group(y2, K2), alpha, reference);
}

}  // namespace shar::twosample
