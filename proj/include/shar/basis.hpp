#pragma once

// Trigonometric basis families evaluated on the grid t/T, t = 1..T.
//
// Test basis (LRV estimation), slot l = 1, 2, 3, ...:
//   l = 2m - 1  ->  sqrt(2) cos(2 pi m x)
//   l = 2m      ->  sqrt(2) sin(2 pi m x)
// Bootstrap basis (external multipliers), frequency l = 1..K*:
//   psi_1,l(x) = cos(2 pi l x),  psi_2,l(x) = sin(2 pi l x)

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "shar/error.hpp"

namespace shar::basis {

/// Frequency used by test-basis slot l.
constexpr std::size_t frequency_of_slot(std::size_t slot) { return (slot + 1) / 2; }
constexpr bool slot_is_cosine(std::size_t slot) { return slot % 2 == 1; }

namespace detail {

inline void check_unit_interval(double x, const char* fn) {
    if (!(x > 0.0 && x <= 1.0)) {
        shar::detail::fail_domain(std::string(fn) + ": x must lie in (0, 1]");
    }
}

}  // namespace detail

inline double phi(std::size_t slot, double x) {
    if (slot < 1) shar::detail::fail_domain("phi: basis index must be >= 1");
    detail::check_unit_interval(x, "phi");
    const double arg = 2.0 * std::numbers::pi * static_cast<double>(frequency_of_slot(slot)) * x;
    return std::numbers::sqrt2 * (slot_is_cosine(slot) ? std::cos(arg) : std::sin(arg));
}

inline double psi(int family, std::size_t freq, double x) {
    if (family != 1 && family != 2) shar::detail::fail_domain("psi: family must be 1 or 2");
    if (freq < 1) shar::detail::fail_domain("psi: frequency must be >= 1");
    detail::check_unit_interval(x, "psi");
    const double arg = 2.0 * std::numbers::pi * static_cast<double>(freq) * x;
    return family == 1 ? std::cos(arg) : std::sin(arg);
}

/// cos and sin of 2 pi k / T for k = 0..T-1. Any basis value on the grid
/// t/T is a lookup at index (m t) mod T, so one table of size T serves every
/// frequency. Immutable after construction.
class TrigTable {
public:
    explicit TrigTable(std::size_t length) : length_(length), cos_(length), sin_(length) {
        if (length < 1) shar::detail::fail_domain("TrigTable: length must be >= 1");
        const double step = 2.0 * std::numbers::pi / static_cast<double>(length);
        for (std::size_t k = 0; k < length; ++k) {
            cos_[k] = std::cos(step * static_cast<double>(k));
            sin_[k] = std::sin(step * static_cast<double>(k));
        }
    }

    std::size_t length() const { return length_; }

    /// cos(2 pi freq t / T), t in 1..T.
    double cos_at(std::size_t freq, std::size_t t) const { return cos_[index(freq, t)]; }
    double sin_at(std::size_t freq, std::size_t t) const { return sin_[index(freq, t)]; }

    double phi(std::size_t slot, std::size_t t) const {
        const std::size_t m = frequency_of_slot(slot);
        return std::numbers::sqrt2 * (slot_is_cosine(slot) ? cos_at(m, t) : sin_at(m, t));
    }

    double psi(int family, std::size_t freq, std::size_t t) const {
        return family == 1 ? cos_at(freq, t) : sin_at(freq, t);
    }

    /// Projection coefficients of `u` on the cosine and sine of frequency m:
    /// (sum_t cos(2 pi m t/T) u_t, sum_t sin(2 pi m t/T) u_t), unscaled.
    std::pair<double, double> raw_projection(std::span<const double> u, std::size_t freq) const {
        double c = 0.0;
        double s = 0.0;
        const std::size_t n = length_;
        std::size_t idx = freq % n;
        const std::size_t stride = idx;
        for (std::size_t t = 0; t < n; ++t) {
            c += cos_[idx] * u[t];
            s += sin_[idx] * u[t];
            idx += stride;
            if (idx >= n) idx -= n;
        }
        return {c, s};
    }

    /// out[t-1] += a cos(2 pi m t/T) + b sin(2 pi m t/T) for t = 1..T.
    void add_wave(std::size_t freq, double a, double b, std::span<double> out) const {
        const std::size_t n = length_;
        std::size_t idx = freq % n;
        const std::size_t stride = idx;
        for (std::size_t t = 0; t < n; ++t) {
            out[t] += a * cos_[idx] + b * sin_[idx];
            idx += stride;
            if (idx >= n) idx -= n;
        }
    }

private:
    std::size_t index(std::size_t freq, std::size_t t) const { return (freq % length_) * t % length_; }

    std::size_t length_;
    std::vector<double> cos_;
    std::vector<double> sin_;
};

namespace detail {

inline void check_projection_input(std::span<const double> residuals, std::size_t slot) {
    if (residuals.size() < 2) shar::detail::fail_domain("project: series length must be >= 2");
    if (slot < 1) shar::detail::fail_domain("project: basis index must be >= 1");
}

}  // namespace detail

/// z_l = T^{-1/2} sum_{t=1}^T phi_l(t/T) u_t, evaluated directly.
inline double project(std::span<const double> residuals, std::size_t slot) {
    detail::check_projection_input(residuals, slot);
    const std::size_t n = residuals.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    double acc = 0.0;
    for (std::size_t t = 1; t <= n; ++t) {
        acc += phi(slot, static_cast<double>(t) * inv_n) * residuals[t - 1];
    }
    return acc / std::sqrt(static_cast<double>(n));
}

/// Same coefficient through a precomputed table of matching length.
inline double project(std::span<const double> residuals, std::size_t slot, const TrigTable& table) {
    detail::check_projection_input(residuals, slot);
    if (table.length() != residuals.size()) {
        shar::detail::fail_domain("project: table length does not match series length");
    }
    const std::size_t n = residuals.size();
    double acc = 0.0;
    for (std::size_t t = 1; t <= n; ++t) acc += table.phi(slot, t) * residuals[t - 1];
    return acc / std::sqrt(static_cast<double>(n));
}

/// Coefficients z_1..z_K. Pairs of slots share a frequency, so each
/// frequency costs one pass over the data.
inline std::vector<double> project_all(std::span<const double> residuals, std::size_t count,
                                       const TrigTable& table) {
    detail::check_projection_input(residuals, count == 0 ? 1 : count);
    if (table.length() != residuals.size()) {
        shar::detail::fail_domain("project_all: table length does not match series length");
    }
    std::vector<double> z(count);
    const double scale = std::numbers::sqrt2 / std::sqrt(static_cast<double>(residuals.size()));
    for (std::size_t m = 1; 2 * m - 1 <= count; ++m) {
        const auto [c, s] = table.raw_projection(residuals, m);
        z[2 * m - 2] = scale * c;
        if (2 * m <= count) z[2 * m - 1] = scale * s;
    }
    return z;
}

/// Above this many basis evaluations the table path is used.
inline constexpr std::size_t table_threshold = 4096;

inline std::vector<double> project_all(std::span<const double> residuals, std::size_t count) {
    if (residuals.size() * count > table_threshold) {
        return project_all(residuals, count, TrigTable(residuals.size()));
    }
    std::vector<double> z(count);
    for (std::size_t l = 1; l <= count; ++l) z[l - 1] = project(residuals, l);
    return z;
}

}  // namespace shar::basis
