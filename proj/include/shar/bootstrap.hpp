#pragma once

// Series HAR wild bootstrap for H0: mu1 = mu2.
//
// Bootstrap errors are u*_t = u_t * eta_t with serially dependent external
// multipliers
//   eta_t = K*^{-1/2} sum_{l=1}^{K*} [cos(2 pi l t/T) v_1l + sin(2 pi l t/T) v_2l],
// which have exact unit variance and Cov*(eta_t, eta_s) =
// (1/K*) sum_l cos(2 pi l (t - s)/T). Both groups are rebuilt around the
// common mean mu* = (T1 Y1 + T2 Y2) / (T1 + T2), imposing the null, and the
// replicate statistic is studentized with the same K1, K2 as the original.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "shar/basis.hpp"
#include "shar/error.hpp"
#include "shar/lrv.hpp"
#include "shar/rng.hpp"
#include "shar/sample.hpp"
#include "shar/two_sample.hpp"

namespace shar::sharwb {

using rng::InnovationLaw;

struct EtaDraw {
    std::vector<double> values;
    std::size_t k_star = 0;
    InnovationLaw law = InnovationLaw::Normal;
};

namespace detail {

inline void check_k_star(std::size_t length, std::size_t k_star) {
    if (k_star < 1 || k_star > length / 2) {
        shar::detail::fail_domain("k_star = " + std::to_string(k_star) + " outside [1, floor(T/2)] for T = " +
                                  std::to_string(length));
    }
}

// Fills `out` with eta built from the 2 K* innovations.
inline void assemble_eta(const basis::TrigTable& table, std::span<const double> v1, std::span<const double> v2,
                         std::span<double> out) {
    const std::size_t k = v1.size();
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t l = 1; l <= k; ++l) table.add_wave(l, v1[l - 1], v2[l - 1], out);
    const double scale = 1.0 / std::sqrt(static_cast<double>(k));
    for (double& e : out) e *= scale;
}

}  // namespace detail

/// eta from explicitly supplied innovations v_1l, v_2l (l = 1..K*).
inline EtaDraw eta_from_innovations(std::size_t length, std::span<const double> v1, std::span<const double> v2) {
    if (v1.size() != v2.size()) shar::detail::fail_domain("eta_from_innovations: innovation sets differ in size");
    detail::check_k_star(length, v1.size());
    EtaDraw eta;
    eta.k_star = v1.size();
    eta.values.resize(length);
    detail::assemble_eta(basis::TrigTable(length), v1, v2, eta.values);
    return eta;
}

inline EtaDraw gen_eta(std::size_t length, std::size_t k_star, rng::Engine& eng,
                       InnovationLaw law = InnovationLaw::Normal) {
    detail::check_k_star(length, k_star);
    rng::InnovationSampler draw(law);
    std::vector<double> v1(k_star);
    std::vector<double> v2(k_star);
    for (std::size_t l = 0; l < k_star; ++l) {
        v1[l] = draw(eng);
        v2[l] = draw(eng);
    }
    EtaDraw eta = eta_from_innovations(length, v1, v2);
    eta.law = law;
    return eta;
}

/// Cov*(eta_t, eta_s) for t - s = lag.
inline double eta_covariance(std::size_t length, std::size_t k_star, long lag) {
    detail::check_k_star(length, k_star);
    double acc = 0.0;
    for (std::size_t l = 1; l <= k_star; ++l) {
        acc += std::cos(2.0 * std::numbers::pi * static_cast<double>(l) * static_cast<double>(lag) /
                        static_cast<double>(length));
    }
    return acc / static_cast<double>(k_star);
}

/// Var*(T^{-1/2} sum_t u_t eta_t) given the data. The double sum over
/// (t, s) factors into (1/K*) sum_l [C_l^2 + S_l^2] with
/// C_l = T^{-1/2} sum_t cos(2 pi l t/T) u_t and S_l likewise.
inline double bootstrap_lrv_closed_form(std::span<const double> residuals, std::size_t k_star) {
    detail::check_k_star(residuals.size(), k_star);
    const basis::TrigTable table(residuals.size());
    double acc = 0.0;
    for (std::size_t l = 1; l <= k_star; ++l) {
        const auto [c, s] = table.raw_projection(residuals, l);
        acc += c * c + s * s;
    }
    return acc / (static_cast<double>(residuals.size()) * static_cast<double>(k_star));
}

// ---------------------------------------------------------------------------
// Replicates

struct BootstrapOptions {
    std::size_t B = 399;
    std::uint64_t seed = 0;
    InnovationLaw law = InnovationLaw::Normal;
    /// Draw group 1's multipliers from group 2's stream and vice versa. Running
    /// the swapped problem with this flag reproduces the negated replicates.
    bool swap_streams = false;
    unsigned threads = 1;
    std::size_t max_redraws = 100;
};

/// Fixed inputs of one bootstrap problem: residuals, mu*, K and K* per group,
/// and the basis tables. Immutable; replicates may be drawn concurrently.
class ReplicateEngine {
public:
    ReplicateEngine(const TimeSeriesSample& y1, const TimeSeriesSample& y2, std::size_t K1, std::size_t K2,
                    std::size_t k_star1, std::size_t k_star2)
        : groups_{Group(y1, K1, k_star1), Group(y2, K2, k_star2)} {
        const double n1 = static_cast<double>(y1.size());
        const double n2 = static_cast<double>(y2.size());
        mu_star_ = (n1 * y1.mean() + n2 * y2.mean()) / (n1 + n2);
    }

    double mu_star() const { return mu_star_; }

    /// One replicate statistic from given multipliers; std::nullopt when both
    /// bootstrap LRVs vanish.
    std::optional<double> from_eta(std::span<const double> eta1, std::span<const double> eta2) const {
        if (eta1.size() != groups_[0].T() || eta2.size() != groups_[1].T()) {
            shar::detail::fail_domain("ReplicateEngine::from_eta: multiplier length mismatch");
        }
        std::vector<double> work;
        const auto [m1, w1] = groups_[0].studentize(mu_star_, eta1, work);
        const auto [m2, w2] = groups_[1].studentize(mu_star_, eta2, work);
        const double se2 = w1 / static_cast<double>(groups_[0].T()) + w2 / static_cast<double>(groups_[1].T());
        if (!(se2 > 0.0)) return std::nullopt;
        return (m1 - m2) / std::sqrt(se2);
    }

    struct Draw {
        double statistic;
        std::size_t redraws;
    };

    /// Replicate b of a run: multipliers for group j come from the substream
    /// (seed, b, j), continuing within that stream on redraws.
    Draw replicate(std::size_t b, const BootstrapOptions& opt) const {
        const std::uint64_t s1 = opt.swap_streams ? 2 : 1;
        const std::uint64_t s2 = opt.swap_streams ? 1 : 2;
        rng::Engine e1 = rng::substream(opt.seed, {rng::tag_bootstrap, b, s1});
        rng::Engine e2 = rng::substream(opt.seed, {rng::tag_bootstrap, b, s2});
        rng::InnovationSampler d1(opt.law);
        rng::InnovationSampler d2(opt.law);
        std::vector<double> eta1(groups_[0].T());
        std::vector<double> eta2(groups_[1].T());
        for (std::size_t attempt = 0; attempt <= opt.max_redraws; ++attempt) {
            groups_[0].draw_eta(e1, d1, eta1);
            groups_[1].draw_eta(e2, d2, eta2);
            if (auto t = from_eta(eta1, eta2)) return {*t, attempt};
        }
        throw degenerate_error("bootstrap: " + std::to_string(opt.max_redraws) +
                               " consecutive replicates had zero bootstrap variance");
    }

private:
    class Group {
    public:
        Group(const TimeSeriesSample& y, std::size_t K, std::size_t k_star)
            : residuals_(y.residuals().begin(), y.residuals().end()), K_(K), k_star_(k_star), table_(y.size()) {
            lrv::detail::check_k(K, y.size(), "bootstrap");
            detail::check_k_star(y.size(), k_star);
        }

        std::size_t T() const { return residuals_.size(); }

        void draw_eta(rng::Engine& eng, rng::InnovationSampler& draw, std::span<double> out) const {
            std::vector<double> v1(k_star_);
            std::vector<double> v2(k_star_);
            for (std::size_t l = 0; l < k_star_; ++l) {
                v1[l] = draw(eng);
                v2[l] = draw(eng);
            }
            detail::assemble_eta(table_, v1, v2, out);
        }

        // Bootstrap mean and series LRV of Y*_t = mu* + u_t eta_t.
        std::pair<double, double> studentize(double mu_star, std::span<const double> eta,
                                             std::vector<double>& work) const {
            const std::size_t n = T();
            work.resize(n);
            double sum = 0.0;
            for (std::size_t t = 0; t < n; ++t) {
                work[t] = residuals_[t] * eta[t];
                sum += work[t];
            }
            // Y*_t - mean(Y*) equals u*_t - mean(u*); demeaning u* keeps a zero draw exactly zero.
            const double shift = sum / static_cast<double>(n);
            for (double& v : work) v -= shift;
            return {mu_star + shift, lrv::series_lrv_value(work, K_, table_)};
        }

    private:
        std::vector<double> residuals_;
        std::size_t K_;
        std::size_t k_star_;
        basis::TrigTable table_;
    };

    Group groups_[2];
    double mu_star_ = 0.0;
};

/// One draw of t*_{1,HAR} using a single caller-supplied stream for both
/// groups (group 1's innovations first). Degenerate draws are redrawn.
inline double bootstrap_replicate(const TimeSeriesSample& y1, const TimeSeriesSample& y2, std::size_t K1,
                                  std::size_t K2, std::size_t k_star1, std::size_t k_star2, rng::Engine& eng,
                                  InnovationLaw law = InnovationLaw::Normal, std::size_t max_redraws = 100) {
    const ReplicateEngine engine(y1, y2, K1, K2, k_star1, k_star2);
    for (std::size_t attempt = 0; attempt <= max_redraws; ++attempt) {
        const EtaDraw eta1 = gen_eta(y1.size(), k_star1, eng, law);
        const EtaDraw eta2 = gen_eta(y2.size(), k_star2, eng, law);
        if (auto t = engine.from_eta(eta1.values, eta2.values)) return *t;
    }
    throw degenerate_error("bootstrap_replicate: repeated zero bootstrap variance");
}

// ---------------------------------------------------------------------------
// Test

struct BootstrapRun {
    std::vector<double> replicate_stats;  ///< in replicate order
    double crit_lo = 0.0;
    double crit_hi = 0.0;
    double p_value = 1.0;
    std::size_t B = 0;
    std::uint64_t seed = 0;
    std::size_t k_star1 = 0;
    std::size_t k_star2 = 0;
    std::size_t K1 = 0;
    std::size_t K2 = 0;
    std::size_t redraws = 0;
    InnovationLaw law = InnovationLaw::Normal;
};

/// Order statistic ceil(p (B + 1)), clamped to [1, B], of sorted draws.
inline double empirical_quantile(std::span<const double> sorted, double p) {
    if (sorted.empty()) shar::detail::fail_domain("empirical_quantile: no draws");
    const double b = static_cast<double>(sorted.size());
    const double idx = std::clamp(std::ceil(p * (b + 1.0)), 1.0, b);
    return sorted[static_cast<std::size_t>(idx) - 1];
}

/// 2 min(F(t), 1 - F(t)) with F the empirical CDF (<= convention).
inline double empirical_two_sided_p(std::span<const double> sorted, double statistic) {
    const auto below = std::upper_bound(sorted.begin(), sorted.end(), statistic) - sorted.begin();
    const double F = static_cast<double>(below) / static_cast<double>(sorted.size());
    return std::min(1.0, 2.0 * std::min(F, 1.0 - F));
}

struct BootstrapTest {
    twosample::TestReport report;
    BootstrapRun run;
};

inline constexpr std::size_t min_replications = 19;

/// Bootstrap test from prepared HAR inputs (K already fixed per group).
inline BootstrapTest shar_wb_test(const TimeSeriesSample& y1, const TimeSeriesSample& y2,
                                  const twosample::HarGroup& g1, const twosample::HarGroup& g2, double alpha,
                                  const BootstrapOptions& opt) {
    twosample::detail::check_alpha(alpha);
    if (opt.B < min_replications) shar::detail::fail_domain("shar_wb_test: B must be >= 19");

    const double stat = twosample::har_welch_statistic(g1.mean, g1.lrv.omega, g1.T, g2.mean, g2.lrv.omega, g2.T);
    const std::size_t K1 = g1.lrv.K;
    const std::size_t K2 = g2.lrv.K;
    const ReplicateEngine engine(y1, y2, K1, K2, K1, K2);

    BootstrapRun run;
    run.B = opt.B;
    run.seed = opt.seed;
    run.K1 = run.k_star1 = K1;
    run.K2 = run.k_star2 = K2;
    run.law = opt.law;
    run.replicate_stats.resize(opt.B);
    std::vector<std::size_t> redraws(opt.B, 0);

    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t b = begin; b < end; ++b) {
            const auto d = engine.replicate(b, opt);
            run.replicate_stats[b] = d.statistic;
            redraws[b] = d.redraws;
        }
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(opt.B)));
    if (threads == 1) {
        work(0, opt.B);
    } else {
        std::vector<std::jthread> pool;
        std::vector<std::exception_ptr> errors(threads);
        const std::size_t chunk = (opt.B + threads - 1) / threads;
        for (unsigned i = 0; i < threads; ++i) {
            pool.emplace_back([&, i] {
                try {
                    work(std::min(opt.B, i * chunk), std::min(opt.B, (i + 1) * chunk));
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            });
        }
        pool.clear();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }
    for (std::size_t r : redraws) run.redraws += r;

    std::vector<double> sorted = run.replicate_stats;
    std::sort(sorted.begin(), sorted.end());
    run.crit_lo = empirical_quantile(sorted, alpha / 2.0);
    run.crit_hi = empirical_quantile(sorted, 1.0 - alpha / 2.0);
    run.p_value = empirical_two_sided_p(sorted, stat);

    twosample::TestReport rep;
    rep.name = "t1_har_boot";
    rep.statistic = stat;
    rep.reference = stats::RefDistribution::bootstrap();
    rep.p_value = run.p_value;
    rep.alpha = alpha;
    rep.reject = stat < run.crit_lo || stat > run.crit_hi;
    rep.detail = {g1.mean, g2.mean, g1.T, g2.T, g1.lrv.omega, g2.lrv.omega, K1, K2, {}};
    return {std::move(rep), std::move(run)};
}

inline BootstrapTest shar_wb_test(const TimeSeriesSample& y1, const TimeSeriesSample& y2, double alpha = 0.05,
                                  twosample::KChoice K1 = twosample::k_auto, twosample::KChoice K2 = twosample::k_auto,
                                  const BootstrapOptions& opt = {}) {
    return shar_wb_test(y1, y2, twosample::prepare_har_group(y1, K1), twosample::prepare_har_group(y2, K2), alpha,
                        opt);
}

}  // namespace shar::sharwb
