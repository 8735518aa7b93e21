#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "shar/error.hpp"
#include "shar/statdist.hpp"

using namespace shar::stats;

TEST(NormalCdf, CentreAndTails) {
    EXPECT_EQ(normal_cdf(0.0), 0.5);
    EXPECT_NEAR(normal_cdf(40.0), 1.0, 1e-15);
    EXPECT_NEAR(normal_cdf(-40.0), 0.0, 1e-15);
}

TEST(NormalCdf, MatchesIntegratedDensity) {
    EXPECT_NEAR(normal_cdf(1.959964), 0.975, 1e-6);
    for (double x : {-5.0, -2.5, -1.0, -0.3, 0.7, 1.5, 3.2}) {
        EXPECT_NEAR(normal_cdf(x), oracle::normal_cdf(x), 1e-13) << x;
    }
}

TEST(NormalCdf, SymmetricAndMonotone) {
    double prev = 0.0;
    for (double x = -8.0; x <= 8.0; x += 0.01) {
        const double v = normal_cdf(x);
        EXPECT_LE(std::fabs(v + normal_cdf(-x) - 1.0), 1e-15) << x;
        EXPECT_GE(v, prev);
        prev = v;
    }
}

TEST(NormalCdf, RejectsNonFinite) {
    EXPECT_THROW(normal_cdf(std::nan("")), shar::domain_error);
    EXPECT_THROW(normal_cdf(INFINITY), shar::domain_error);
}

TEST(TCdf, ClosedForms) {
    EXPECT_EQ(t_cdf(0.0, 7.3), 0.5);
    EXPECT_NEAR(t_cdf(1.0, 1.0), 0.75, 1e-14);
    for (double x : {-3.0, -0.4, 0.9, 12.0}) {
        EXPECT_NEAR(t_cdf(x, 1.0), 0.5 + std::atan(x) / std::numbers::pi, 1e-14) << x;
    }
    // df = 2: F(x) = 1/2 + x / (2 sqrt(2 + x^2))
    for (double x : {-2.0, 0.5, 4.0}) {
        EXPECT_NEAR(t_cdf(x, 2.0), 0.5 + x / (2.0 * std::sqrt(2.0 + x * x)), 1e-14) << x;
    }
}

TEST(TCdf, MatchesQuadratureOracle) {
    EXPECT_NEAR(t_cdf(2.0, 10.0), oracle::t_cdf(2.0, 10.0), 1e-10);
    for (double df : {0.7, 2.5, 5.5, 17.25, 120.0}) {
        for (double x : {-6.0, -1.3, 0.2, 2.7, 9.0}) {
            EXPECT_NEAR(t_cdf(x, df), oracle::t_cdf(x, df), 1e-10) << x << " " << df;
        }
    }
}

TEST(TCdf, ApproachesNormalForLargeDf) {
    for (double x : {-2.5, -1.0, 0.3, 1.96}) EXPECT_NEAR(t_cdf(x, 1e6), normal_cdf(x), 1e-6);
}

TEST(TCdf, RandomisedSymmetryMonotonicityRange) {
    std::mt19937_64 eng(11);
    std::uniform_real_distribution<double> udf(0.5, 500.0);
    std::uniform_real_distribution<double> ux(-30.0, 30.0);
    for (int rep = 0; rep < 100; ++rep) {
        const double df = udf(eng);
        std::vector<double> xs(100);
        for (double& x : xs) x = ux(eng);
        std::sort(xs.begin(), xs.end());
        double prev = 0.0;
        for (double x : xs) {
            const double v = t_cdf(x, df);
            ASSERT_GE(v, 0.0);
            ASSERT_LE(v, 1.0);
            ASSERT_GE(v, prev) << x << " " << df;
            ASSERT_LE(std::fabs(v + t_cdf(-x, df) - 1.0), 1e-13);
            prev = v;
        }
    }
}

TEST(TCdf, RejectsBadDf) {
    EXPECT_THROW(t_cdf(1.0, 0.0), shar::domain_error);
    EXPECT_THROW(t_cdf(1.0, -2.0), shar::domain_error);
    EXPECT_THROW(t_cdf(1.0, std::nan("")), shar::domain_error);
}

TEST(TQuantile, KnownValues) {
    EXPECT_EQ(t_quantile(0.5, 3.3), 0.0);
    EXPECT_NEAR(t_quantile(0.975, 1.0), 12.7062, 1e-3);
    EXPECT_NEAR(t_quantile(0.975, 1.0), oracle::t_quantile(0.975, 1.0), 1e-9);
    EXPECT_NEAR(t_quantile(t_cdf(1.7, 5.5), 5.5), 1.7, 1e-9);
}

TEST(TQuantile, InvertsCdfOnGrid) {
    for (double df : {0.8, 1.0, 3.7, 10.0, 44.5, 1000.0}) {
        double prev = -INFINITY;
        for (double p = 0.001; p < 1.0; p += 0.0371) {
            const double q = t_quantile(p, df);
            EXPECT_NEAR(t_cdf(q, df), p, 1e-10) << p << " " << df;
            EXPECT_GT(q, prev);
            prev = q;
        }
        for (double x : {-4.0, -1.1, 0.6, 2.2, 5.0}) EXPECT_NEAR(t_quantile(t_cdf(x, df), df), x, 1e-9 * std::max(1.0, std::fabs(x)));
    }
}

TEST(TQuantile, RejectsBadProbability) {
    EXPECT_THROW(t_quantile(0.0, 3.0), shar::domain_error);
    EXPECT_THROW(t_quantile(1.0, 3.0), shar::domain_error);
    EXPECT_THROW(t_quantile(0.3, 0.0), shar::domain_error);
}

TEST(NormalQuantile, InvertsCdf) {
    EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-12);
    for (double p : {1e-6, 0.01, 0.2, 0.5, 0.8, 0.999}) EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-12 * std::max(p, 1e-3));
}

TEST(ChisqSf, ClosedForms) {
    EXPECT_EQ(chisq_sf(0.0, 10.0), 1.0);
    EXPECT_NEAR(chisq_sf(2.0, 2.0), std::exp(-1.0), 1e-9);
    for (double x : {0.3, 1.0, 7.5, 30.0}) EXPECT_NEAR(chisq_sf(x, 2.0), std::exp(-x / 2.0), 1e-14);
    // df = 1: sf(x) = erfc(sqrt(x/2))
    for (double x : {0.01, 0.5, 3.84, 12.0}) EXPECT_NEAR(chisq_sf(x, 1.0), std::erfc(std::sqrt(x / 2.0)), 1e-13);
}

TEST(ChisqSf, MatchesOracles) {
    EXPECT_NEAR(chisq_sf(18.31, 10.0), 0.05, 2e-3);
    for (double df : {0.6, 1.5, 4.0, 10.0, 33.3, 150.0}) {
        for (double x : {0.2, 1.0, 5.0, 12.0, 40.0, 180.0}) {
            EXPECT_NEAR(chisq_sf(x, df), oracle::chisq_sf(x, df), 1e-10) << x << " " << df;
            if (x < df + 40.0) {
                EXPECT_NEAR(chisq_sf(x, df), 1.0 - oracle::gamma_p_series(df / 2.0, x / 2.0), 1e-10) << x << " " << df;
            }
        }
    }
}

TEST(ChisqSf, DecreasingAndDomain) {
    double prev = 1.0;
    for (double x = 0.0; x < 60.0; x += 0.25) {
        const double v = chisq_sf(x, 7.0);
        EXPECT_LE(v, prev);
        prev = v;
    }
    EXPECT_THROW(chisq_sf(-1.0, 3.0), shar::domain_error);
    EXPECT_THROW(chisq_sf(1.0, 0.0), shar::domain_error);
}

TEST(ChisqQuantile, InvertsCdf) {
    EXPECT_NEAR(chisq_quantile(0.95, 10.0), 18.307038053275146, 1e-9);
    for (double df : {1.0, 20.0}) {
        for (double p : {0.005, 0.5, 0.995}) EXPECT_NEAR(chisq_cdf(chisq_quantile(p, df), df), p, 1e-12);
    }
}

TEST(RefDistribution, Kinds) {
    const auto n = RefDistribution::normal();
    EXPECT_EQ(n.kind(), RefKind::StandardNormal);
    EXPECT_FALSE(n.has_df());
    EXPECT_NEAR(n.two_sided_p(1.959963984540054), 0.05, 1e-12);

    const auto t = RefDistribution::student_t(4.5);
    EXPECT_TRUE(t.has_df());
    EXPECT_EQ(t.df(), 4.5);
    EXPECT_NEAR(t.two_sided_p(-2.0), 2.0 * t_cdf(-2.0, 4.5), 1e-15);
    EXPECT_EQ(t.two_sided_p(0.0), 1.0);

    EXPECT_THROW(RefDistribution::student_t(0.0), shar::domain_error);
    EXPECT_THROW(RefDistribution::chi_square(-1.0), shar::domain_error);
    EXPECT_EQ(RefDistribution::bootstrap().kind(), RefKind::BootstrapEmpirical);
}

TEST(LogGamma, AgreesWithStd) {
    for (double x : {0.1, 0.5, 1.0, 2.5, 10.0, 171.3, 1e4}) EXPECT_NEAR(log_gamma(x), std::lgamma(x), 1e-13 * std::max(1.0, std::fabs(std::lgamma(x))));
}
