#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "shar/error.hpp"

namespace shar {

namespace detail {

inline double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline std::vector<double> demean(std::span<const double> v, double mean) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] - mean;
    return out;
}

}  // namespace detail

/// One group's observations in time order, with the sample mean and the
/// demeaned residuals cached. Immutable once built.
class TimeSeriesSample {
public:
    static constexpr std::size_t min_length = 4;

    explicit TimeSeriesSample(std::vector<double> values) : values_(std::move(values)) {
        if (values_.size() < min_length) {
            throw domain_error("TimeSeriesSample: need at least " + std::to_string(min_length) +
                               " observations, got " + std::to_string(values_.size()));
        }
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!std::isfinite(values_[i])) {
                throw domain_error("TimeSeriesSample: observation " + std::to_string(i + 1) +
                                   " is not finite");
            }
        }
        mean_ = detail::mean_of(values_);
        residuals_ = detail::demean(values_, mean_);
    }

    std::size_t size() const { return values_.size(); }
    double mean() const { return mean_; }
    std::span<const double> values() const { return values_; }
    std::span<const double> residuals() const { return residuals_; }

    /// Sum of squared residuals.
    double residual_energy() const {
        return std::inner_product(residuals_.begin(), residuals_.end(), residuals_.begin(), 0.0);
    }

    /// Sample variance with the 1/(T-1) normalization.
    double variance() const { return residual_energy() / static_cast<double>(size() - 1); }

private:
    std::vector<double> values_;
    double mean_ = 0.0;
    std::vector<double> residuals_;
};

}  // namespace shar
