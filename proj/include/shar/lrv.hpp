#pragma once

// Series long-run variance estimation, AR(1) plug-in data-driven choice of
// the number of basis functions, and the Ljung-Box portmanteau diagnostic.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "shar/basis.hpp"
#include "shar/error.hpp"
#include "shar/sample.hpp"
#include "shar/statdist.hpp"

namespace shar::lrv {

/// Omega = (1/K) sum_l z_l^2, with the coefficients it was built from.
struct LrvEstimate {
    double omega = 0.0;
    std::size_t K = 0;
    std::vector<double> coefficients;
};

inline std::size_t max_basis_count(std::size_t length) { return length / 2; }

namespace detail {

inline void check_k(std::size_t K, std::size_t length, const char* fn) {
    if (K < 1 || K > max_basis_count(length)) {
        shar::detail::fail_domain(std::string(fn) + ": K = " + std::to_string(K) +
                                  " outside [1, " + std::to_string(max_basis_count(length)) + "]");
    }
}

inline LrvEstimate from_coefficients(std::vector<double> z) {
    LrvEstimate est;
    est.K = z.size();
    double acc = 0.0;
    for (double v : z) acc += v * v;
    est.omega = acc / static_cast<double>(est.K);
    est.coefficients = std::move(z);
    return est;
}

}  // namespace detail

/// LRV of an already-demeaned series through a precomputed table.
inline LrvEstimate series_lrv(std::span<const double> residuals, std::size_t K,
                              const basis::TrigTable& table) {
    detail::check_k(K, residuals.size(), "series_lrv");
    return detail::from_coefficients(basis::project_all(residuals, K, table));
}

/// Omega alone, without materializing the coefficient vector.
inline double series_lrv_value(std::span<const double> residuals, std::size_t K,
                               const basis::TrigTable& table) {
    detail::check_k(K, residuals.size(), "series_lrv_value");
    double acc = 0.0;
    for (std::size_t m = 1; 2 * m - 1 <= K; ++m) {
        const auto [c, s] = table.raw_projection(residuals, m);
        acc += c * c;
        if (2 * m <= K) acc += s * s;
    }
    return 2.0 * acc / (static_cast<double>(residuals.size()) * static_cast<double>(K));
}

inline LrvEstimate series_lrv(const TimeSeriesSample& sample, std::size_t K) {
    detail::check_k(K, sample.size(), "series_lrv");
    return detail::from_coefficients(basis::project_all(sample.residuals(), K));
}

// ---------------------------------------------------------------------------
// AR(1) plug-in

/// Guard applied to the lag-one coefficient before it enters (1 - A)^-k terms.
inline constexpr double ar_coefficient_bound = 0.97;

struct Ar1PlugIn {
    double a_hat = 0.0;      ///< after clamping to +-ar_coefficient_bound
    double sigma_hat = 0.0;  ///< long-run variance implied by the AR(1) fit
    double innovation_variance = 0.0;
    double a_raw = 0.0;      ///< before clamping
    bool clamped = false;
};

inline Ar1PlugIn ar1_plugin(std::span<const double> residuals) {
    const std::size_t n = residuals.size();
    if (n < 3) shar::detail::fail_domain("ar1_plugin: need at least 3 residuals");
    double cross = 0.0;
    double energy = 0.0;
    for (std::size_t t = 1; t < n; ++t) {
        cross += residuals[t] * residuals[t - 1];
        energy += residuals[t - 1] * residuals[t - 1];
    }
    if (!(energy > 0.0)) throw degenerate_error("ar1_plugin: residuals are identically zero");

    Ar1PlugIn fit;
    fit.a_raw = cross / energy;
    fit.a_hat = std::clamp(fit.a_raw, -ar_coefficient_bound, ar_coefficient_bound);
    fit.clamped = fit.a_hat != fit.a_raw;

    double innov = 0.0;
    for (std::size_t t = 1; t < n; ++t) {
        const double e = residuals[t] - fit.a_hat * residuals[t - 1];
        innov += e * e;
    }
    const double one_minus = 1.0 - fit.a_hat;
    fit.innovation_variance = innov / static_cast<double>(n - 1);
    fit.sigma_hat = fit.innovation_variance / (one_minus * one_minus);
    return fit;
}

inline Ar1PlugIn ar1_plugin(const TimeSeriesSample& sample) { return ar1_plugin(sample.residuals()); }

// ---------------------------------------------------------------------------
// Data-driven K

/// Leading constant of the CPE-optimal rule.
inline constexpr double k_rule_constant = 0.42293;

/// Curvature term B for an AR(1) plug-in, written out as the seven-term
/// matrix expression with A' = A for the scalar case:
///   -(pi^2/6) (1-A)^-3 ( A S + A^2 S A' + A^2 S - 6 A S A'
///                        + S A'^2 + A S A'^2 + S A' ) (1-A)^-3
inline double sun_b_hat(double a, double sigma) {
    const double at = a;  // transpose of a scalar
    const double inner = a * sigma + a * a * sigma * at + a * a * sigma - 6.0 * a * sigma * at +
                         sigma * at * at + a * sigma * at * at + sigma * at;
    const double inv_cube = 1.0 / ((1.0 - a) * (1.0 - a) * (1.0 - a));
    return -(std::numbers::pi * std::numbers::pi / 6.0) * inv_cube * inner * inv_cube;
}

/// Which AR(1) variance enters B before dividing by the long-run variance.
/// LongRun feeds the long-run variance itself, so B_bar = -(pi^2/3) A / (1-A)^4.
/// Innovation feeds the innovation variance, as in Andrews' VAR(1) plug-in,
/// giving B_bar = -(pi^2/3) A / (1-A)^2 and a larger K under persistence.
enum class CurvatureScale { LongRun, Innovation };

inline const char* to_string(CurvatureScale s) {
    return s == CurvatureScale::LongRun ? "long-run" : "innovation";
}

struct KSelection {
    std::size_t k_hat = 1;
    double a_hat = 0.0;
    double sigma_hat = 0.0;
    double b_hat = 0.0;
    double b_bar = 0.0;
    bool clamped = false;  ///< K hit a bound or the AR coefficient guard fired
};

/// ceil(0.42293 |B_bar|^{-1/3} T^{2/3}) clamped to [1, floor(T/2)].
inline std::size_t k_from_curvature(double b_bar, std::size_t length, bool* clamped = nullptr) {
    const std::size_t upper = max_basis_count(length);
    const double n = static_cast<double>(length);
    const double raw = k_rule_constant * std::pow(std::fabs(b_bar), -1.0 / 3.0) * std::cbrt(n * n);
    std::size_t k = upper;
    bool hit = true;
    if (std::isfinite(raw) && raw <= static_cast<double>(upper)) {
        const double up = std::ceil(raw);
        hit = up < 1.0;
        k = hit ? 1 : static_cast<std::size_t>(up);
    }
    if (clamped) *clamped = hit;
    return k;
}

inline KSelection select_k(std::span<const double> residuals,
                           CurvatureScale scale = CurvatureScale::LongRun) {
    if (max_basis_count(residuals.size()) < 1) shar::detail::fail_domain("select_k: series too short");
    const Ar1PlugIn fit = ar1_plugin(residuals);
    if (!(fit.sigma_hat > 0.0)) {
        throw degenerate_error("select_k: AR(1) plug-in long-run variance is zero");
    }
    KSelection sel;
    sel.a_hat = fit.a_hat;
    sel.sigma_hat = fit.sigma_hat;
    sel.b_hat = sun_b_hat(fit.a_hat,
                          scale == CurvatureScale::LongRun ? fit.sigma_hat : fit.innovation_variance);
    sel.b_bar = sel.b_hat / fit.sigma_hat;
    bool k_clamped = false;
    sel.k_hat = k_from_curvature(sel.b_bar, residuals.size(), &k_clamped);
    sel.clamped = k_clamped || fit.clamped;
    return sel;
}

inline KSelection select_k(const TimeSeriesSample& sample, CurvatureScale scale = CurvatureScale::LongRun) {
    return select_k(sample.residuals(), scale);
}

// ---------------------------------------------------------------------------
// Ljung-Box

struct LjungBox {
    double q = 0.0;
    double p_value = 1.0;
    std::size_t lag = 0;
};

/// Q = T(T+2) sum_{k=1}^h r_k^2 / (T-k), r_k = sum_t u_t u_{t-k} / sum_t u_t^2,
/// referred to chi-square(h).
inline LjungBox ljung_box(std::span<const double> residuals, std::size_t lag) {
    const std::size_t n = residuals.size();
    if (lag < 1 || lag >= n) {
        shar::detail::fail_domain("ljung_box: lag must lie in [1, T)");
    }
    double energy = 0.0;
    for (double u : residuals) energy += u * u;
    if (!(energy > 0.0)) throw degenerate_error("ljung_box: residuals are identically zero");

    double q = 0.0;
    for (std::size_t k = 1; k <= lag; ++k) {
        double acf = 0.0;
        for (std::size_t t = k; t < n; ++t) acf += residuals[t] * residuals[t - k];
        acf /= energy;
        q += acf * acf / static_cast<double>(n - k);
    }
    const double nd = static_cast<double>(n);
    LjungBox out;
    out.q = nd * (nd + 2.0) * q;
    out.lag = lag;
    out.p_value = stats::chisq_sf(out.q, static_cast<double>(lag));
    return out;
}

inline LjungBox ljung_box(const TimeSeriesSample& sample, std::size_t lag) {
    return ljung_box(sample.residuals(), lag);
}

}  // namespace shar::lrv
