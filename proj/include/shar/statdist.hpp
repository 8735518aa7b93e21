#pragma once

// Distribution kernels for the test reference laws: standard normal,
// Student-t with real-valued degrees of freedom, and chi-square.
//
// The incomplete beta and gamma functions are evaluated by power series and
// Lentz continued fractions, switching to the complementary form past the
// mean so that both tails keep full relative accuracy.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include "shar/error.hpp"

namespace shar::stats {

namespace detail {

inline void require_finite(double x, const char* fn) {
    if (!std::isfinite(x)) {
        shar::detail::fail_domain(std::string(fn) + ": argument must be finite");
    }
}

inline void require_positive_df(double df, const char* fn) {
    if (!(df > 0.0) || std::isnan(df)) {
        shar::detail::fail_domain(std::string(fn) + ": degrees of freedom must be positive");
    }
}

// Continued fraction for the incomplete beta function (modified Lentz).
inline double beta_continued_fraction(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    const int max_iter = 200 + static_cast<int>(20.0 * std::sqrt(std::max(a, b)));

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= eps) return h;
    }
    return h;
}

}  // namespace detail

/// Natural log of the gamma function for x > 0 (Lanczos, g = 671/128,
/// fourteen coefficients; relative error below 1e-15 on the positive axis).
inline double log_gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        shar::detail::fail_domain("log_gamma: argument must be positive and finite");
    }
    static constexpr double coef[14] = {
        57.1562356658629235,      -59.5979603554754912,     14.1360979747417471,
        -0.491913816097620199,    0.339946499848118887e-4,  0.465236289270485756e-4,
        -0.983744753048795646e-4, 0.158088703224912494e-3,  -0.210264441724104883e-3,
        0.217439618115212643e-3,  -0.164318106536763890e-3, 0.844182239838527433e-4,
        -0.261908384015814087e-4, 0.368991826595316234e-5};
    double y = x;
    double tmp = x + 5.24218750000000000;
    tmp = (x + 0.5) * std::log(tmp) - tmp;
    double ser = 0.999999999999997092;
    for (double c : coef) ser += c / ++y;
    return tmp + std::log(2.5066282746310005 * ser / x);
}

inline double log_beta(double a, double b) {
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

/// Regularized incomplete beta I_x(a, b) together with its complement
/// 1 - I_x(a, b). The caller supplies y = 1 - x so that it can be formed
/// without cancellation.
struct BetaPair {
    double lower;
    double upper;
};

inline BetaPair incomplete_beta(double a, double b, double x, double y) {
    if (!(a > 0.0) || !(b > 0.0)) shar::detail::fail_domain("incomplete_beta: a, b must be positive");
    if (x < 0.0 || y < 0.0) shar::detail::fail_domain("incomplete_beta: x outside [0, 1]");
    if (x == 0.0) return {0.0, 1.0};
    if (y == 0.0) return {1.0, 0.0};
    const double log_front = a * std::log(x) + b * std::log(y) - log_beta(a, b);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        const double lower = front * detail::beta_continued_fraction(a, b, x) / a;
        return {lower, 1.0 - lower};
    }
    const double upper = front * detail::beta_continued_fraction(b, a, y) / b;
    return {1.0 - upper, upper};
}

/// Regularized incomplete gamma P(a, x) and Q(a, x) = 1 - P(a, x).
struct GammaPair {
    double lower;
    double upper;
};

inline GammaPair incomplete_gamma(double a, double x) {
    if (!(a > 0.0)) shar::detail::fail_domain("incomplete_gamma: a must be positive");
    if (x < 0.0) shar::detail::fail_domain("incomplete_gamma: x must be nonnegative");
    if (x == 0.0) return {0.0, 1.0};
    const double log_front = -x + a * std::log(x) - log_gamma(a);
    const int max_iter = 500 + static_cast<int>(50.0 * std::sqrt(a));
    if (x < a + 1.0) {
        double ap = a;
        double del = 1.0 / a;
        double sum = del;
        for (int n = 0; n < max_iter; ++n) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-17) break;
        }
        const double lower = sum * std::exp(log_front);
        return {lower, 1.0 - lower};
    }
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < max_iter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= 1e-16) break;
    }
    const double upper = std::exp(log_front) * h;
    return {1.0 - upper, upper};
}

// ---------------------------------------------------------------------------
// Standard normal

inline double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

inline double normal_cdf(double x) {
    detail::require_finite(x, "normal_cdf");
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

// ---------------------------------------------------------------------------
// Student-t

inline double t_pdf(double x, double df) {
    detail::require_positive_df(df, "t_pdf");
    detail::require_finite(x, "t_pdf");
    const double log_norm = log_gamma(0.5 * (df + 1.0)) - log_gamma(0.5 * df) -
                            0.5 * std::log(df * std::numbers::pi);
    return std::exp(log_norm - 0.5 * (df + 1.0) * std::log1p(x * x / df));
}

inline double t_cdf(double x, double df) {
    detail::require_positive_df(df, "t_cdf");
    detail::require_finite(x, "t_cdf");
    if (x == 0.0) return 0.5;
    const double x2 = x * x;
    const double denom = df + x2;
    // P(|T| > |x|) = I_{df/(df+x^2)}(df/2, 1/2)
    const auto beta = incomplete_beta(0.5 * df, 0.5, df / denom, x2 / denom);
    const double tail = 0.5 * beta.lower;
    return x > 0.0 ? 1.0 - tail : tail;
}

namespace detail {

// Solves cdf(x) = q for q <= 0.5 on the nonpositive half-line by bracketing
// plus safeguarded Newton. Symmetric laws only.
template <class Cdf, class Pdf>
double lower_quantile(double q, Cdf&& cdf, Pdf&& pdf) {
    double hi = 0.0;
    double lo = -1.0;
    while (cdf(lo) > q) {
        hi = lo;
        lo *= 2.0;
        if (lo < -1e300) return lo;
    }
    double x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 400; ++iter) {
        const double f = cdf(x) - q;
        if (f == 0.0) return x;
        if (f > 0.0) {
            hi = x;
        } else {
            lo = x;
        }
        const double dens = pdf(x);
        double next = dens > 0.0 ? x - f / dens : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double step = std::fabs(next - x);
        x = next;
        if (step <= 2.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(x))) break;
        if (hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(x))) break;
    }
    return x;
}

inline void require_open_probability(double p, const char* fn) {
    if (!(p > 0.0 && p < 1.0)) {
        shar::detail::fail_domain(std::string(fn) + ": probability must lie in (0, 1)");
    }
}

}  // namespace detail

inline double t_quantile(double p, double df) {
    detail::require_open_probability(p, "t_quantile");
    detail::require_positive_df(df, "t_quantile");
    if (p == 0.5) return 0.0;
    const double q = std::min(p, 1.0 - p);
    const double x = detail::lower_quantile(
        q, [df](double v) { return t_cdf(v, df); }, [df](double v) { return t_pdf(v, df); });
    return p < 0.5 ? x : -x;
}

inline double normal_quantile(double p) {
    detail::require_open_probability(p, "normal_quantile");
    if (p == 0.5) return 0.0;
    const double q = std::min(p, 1.0 - p);
    const double x = detail::lower_quantile(q, normal_cdf, normal_pdf);
    return p < 0.5 ? x : -x;
}

// ---------------------------------------------------------------------------
// Chi-square

inline double chisq_sf(double x, double df) {
    detail::require_positive_df(df, "chisq_sf");
    if (!(x >= 0.0) || std::isnan(x)) shar::detail::fail_domain("chisq_sf: x must be nonnegative");
    if (std::isinf(x)) return 0.0;
    return incomplete_gamma(0.5 * df, 0.5 * x).upper;
}

inline double chisq_cdf(double x, double df) {
    detail::require_positive_df(df, "chisq_cdf");
    if (!(x >= 0.0) || std::isnan(x)) shar::detail::fail_domain("chisq_cdf: x must be nonnegative");
    if (std::isinf(x)) return 1.0;
    return incomplete_gamma(0.5 * df, 0.5 * x).lower;
}

inline double chisq_quantile(double p, double df) {
    detail::require_open_probability(p, "chisq_quantile");
    detail::require_positive_df(df, "chisq_quantile");
    double lo = 0.0;
    double hi = std::max(1.0, df);
    while (chisq_cdf(hi, df) < p) {
        lo = hi;
        hi *= 2.0;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (chisq_cdf(mid, df) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Reference distributions used by test reports

enum class RefKind { StandardNormal, StudentT, ChiSquare, BootstrapEmpirical };

inline const char* to_string(RefKind k) {
    switch (k) {
        case RefKind::StandardNormal: return "normal";
        case RefKind::StudentT: return "t";
        case RefKind::ChiSquare: return "chisq";
        case RefKind::BootstrapEmpirical: return "bootstrap";
    }
    return "?";
}

class RefDistribution {
public:
    static RefDistribution normal() { return RefDistribution(RefKind::StandardNormal, 0.0); }
    static RefDistribution student_t(double df) {
        detail::require_positive_df(df, "RefDistribution::student_t");
        return RefDistribution(RefKind::StudentT, df);
    }
    static RefDistribution chi_square(double df) {
        detail::require_positive_df(df, "RefDistribution::chi_square");
        return RefDistribution(RefKind::ChiSquare, df);
    }
    static RefDistribution bootstrap() { return RefDistribution(RefKind::BootstrapEmpirical, 0.0); }

    RefKind kind() const { return kind_; }
    bool has_df() const { return kind_ == RefKind::StudentT || kind_ == RefKind::ChiSquare; }
    double df() const { return df_; }

    double cdf(double x) const {
        switch (kind_) {
            case RefKind::StandardNormal: return normal_cdf(x);
            case RefKind::StudentT: return t_cdf(x, df_);
            case RefKind::ChiSquare: return chisq_cdf(x, df_);
            case RefKind::BootstrapEmpirical: break;
        }
        shar::detail::fail_domain("RefDistribution::cdf: empirical bootstrap law has no closed form");
    }

    double quantile(double p) const {
        switch (kind_) {
            case RefKind::StandardNormal: return normal_quantile(p);
            case RefKind::StudentT: return t_quantile(p, df_);
            case RefKind::ChiSquare: return chisq_quantile(p, df_);
            case RefKind::BootstrapEmpirical: break;
        }
        shar::detail::fail_domain("RefDistribution::quantile: empirical bootstrap law has no closed form");
    }

    /// 2 * min(F(x), 1 - F(x)) for the symmetric laws, evaluated through the
    /// lower tail at -|x| to keep small p-values accurate.
    double two_sided_p(double x) const {
        if (kind_ != RefKind::StandardNormal && kind_ != RefKind::StudentT) {
            shar::detail::fail_domain("two_sided_p: requires a symmetric reference law");
        }
        return std::min(1.0, 2.0 * cdf(-std::fabs(x)));
    }

private:
    RefDistribution(RefKind k, double df) : kind_(k), df_(df) {}

    RefKind kind_;
    double df_;
};

}  // namespace shar::stats
