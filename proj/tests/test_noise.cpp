#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "levysde/noise.hpp"
#include "oracles.hpp"

using levysde::CfEstimate;
using levysde::ParameterError;
using levysde::RandomStream;
using levysde::StableParams;
using levysde::UsageError;

namespace {

std::vector<double> draw_sas(double alpha, double scale, int m,
                             std::uint64_t seed) {
    RandomStream stream{seed, 0, 0};
    std::vector<double> xs(m);
    for (int i = 0; i < m; ++i)
        xs[i] = levysde::sample_sas({alpha, scale}, stream);
    return xs;
}

}  // namespace

TEST(SampleSas, ZeroScaleIsExactlyZero) {
    RandomStream stream{1, 0, 0};
    for (int i = 0; i < 100; ++i)
        EXPECT_EQ(levysde::sample_sas({1.5, 0.0}, stream), 0.0);
}

TEST(SampleSas, InvalidParametersRejected) {
    RandomStream stream{1, 0, 0};
    EXPECT_THROW(levysde::sample_sas({0.0, 1.0}, stream), ParameterError);
    EXPECT_THROW(levysde::sample_sas({2.5, 1.0}, stream), ParameterError);
    EXPECT_THROW(levysde::sample_sas({1.5, -1.0}, stream), ParameterError);
    EXPECT_THROW(levysde::sample_sas({std::nan(""), 1.0}, stream),
                 ParameterError);
}

// alpha = 2 is a centered Gaussian with standard deviation scale*sqrt(2):
// Kolmogorov-Smirnov against the closed-form normal CDF.
TEST(SampleSas, GaussianEndpointMatchesNormalCdf) {
    const int m = 100000;
    auto xs = draw_sas(2.0, 1.0, m, 2024);
    const double sd = std::sqrt(2.0);
    const double ks = oracle::ks_statistic(
        xs, [sd](double x) { return oracle::normal_cdf(x / sd); });
    EXPECT_LT(ks, 0.01);
}

// Cauchy case: empirical CF at theta = 1 close to exp(-1).
TEST(SampleSas, CauchyCharacteristicFunction) {
    const int m = 100000;
    auto xs = draw_sas(1.0, 1.0, m, 7);
    EXPECT_NEAR(levysde::empirical_cf(xs, 1.0), std::exp(-1.0), 0.02);
}

// CF convention across the alpha range: empirical CF within 4/sqrt(M) of
// exp(-scale^alpha |theta|^alpha).
TEST(SampleSas, CharacteristicFunctionMatchesConvention) {
    const int m = 100000;
    const double tol = 4.0 / std::sqrt(static_cast<double>(m));
    for (double alpha : {0.75, 1.0, 1.5, 2.0}) {
        auto xs = draw_sas(alpha, 1.0, m, 99);
        for (double theta : {0.5, 1.0, 2.0}) {
            const double expected = std::exp(-std::pow(std::abs(theta), alpha));
            EXPECT_NEAR(levysde::empirical_cf(xs, theta), expected, tol)
                << "alpha=" << alpha << " theta=" << theta;
        }
    }
}

// Non-unit scale: CF oracle exp(-scale^alpha |theta|^alpha).
TEST(SampleSas, ScaleEntersCharacteristicFunction) {
    const int m = 100000;
    const double tol = 4.0 / std::sqrt(static_cast<double>(m));
    auto xs = draw_sas(1.5, 0.7, m, 55);
    for (double theta : {0.5, 1.0, 2.0})
        EXPECT_NEAR(levysde::empirical_cf(xs, theta),
                    std::exp(-std::pow(0.7, 1.5) * std::pow(theta, 1.5)), tol);
}

TEST(SampleSas, SymmetricAboutZero) {
    const int m = 100000;
    auto xs = draw_sas(1.5, 1.0, m, 11);
    std::vector<double> sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[m / 2];
    const double iqr = oracle::quantile(xs, 0.75) - oracle::quantile(xs, 0.25);
    EXPECT_NEAR(median, 0.0, 4.0 * iqr / std::sqrt(static_cast<double>(m)));
}

// Moments below the stability index are finite: the empirical p-th absolute
// moment with p = alpha/2 is stable under doubling the sample size.
TEST(SampleSas, SubAlphaMomentStableUnderDoubling) {
    for (double alpha : {0.75, 1.5}) {
        const double p = alpha / 2.0;
        auto xs = draw_sas(alpha, 1.0, 200000, 31);
        const double m_half =
            oracle::abs_moment(std::span<const double>(xs).first(100000), p);
        const double m_full = oracle::abs_moment(xs, p);
        const double ratio = m_half / m_full;
        EXPECT_GT(ratio, 0.8) << "alpha=" << alpha;
        EXPECT_LT(ratio, 1.25) << "alpha=" << alpha;
    }
}

TEST(SampleGaussian, DegenerateAndEquivariant) {
    RandomStream a{5, 0, 0};
    for (int i = 0; i < 50; ++i)
        EXPECT_EQ(levysde::sample_gaussian(0.0, a), 0.0);

    RandomStream s1{9, 3, 0}, s2{9, 3, 0};
    for (int i = 0; i < 100; ++i)
        EXPECT_EQ(levysde::sample_gaussian(2.0, s1),
                  2.0 * levysde::sample_gaussian(1.0, s2));

    RandomStream bad{1, 0, 0};
    EXPECT_THROW(levysde::sample_gaussian(-1.0, bad), ParameterError);
}

TEST(SampleGaussian, UnitVariance) {
    RandomStream stream{77, 0, 0};
    const int m = 100000;
    std::vector<double> xs(m);
    for (int i = 0; i < m; ++i) xs[i] = levysde::sample_gaussian(1.0, stream);
    EXPECT_GT(oracle::variance(xs), 0.97);
    EXPECT_LT(oracle::variance(xs), 1.03);
}

TEST(EmpiricalCf, DirectEvaluation) {
    const std::vector<double> zeros = {0.0, 0.0, 0.0};
    EXPECT_DOUBLE_EQ(levysde::empirical_cf(zeros, 5.0), 1.0);

    const std::vector<double> pm1 = {1.0, -1.0};
    EXPECT_DOUBLE_EQ(levysde::empirical_cf(pm1, std::numbers::pi), -1.0);
    // Symmetric input: imaginary part cancels exactly.
    const CfEstimate parts = levysde::empirical_cf_parts(pm1, 0.7);
    EXPECT_DOUBLE_EQ(parts.imag_part, 0.0);

    EXPECT_THROW(levysde::empirical_cf({}, 1.0), UsageError);
}

TEST(Reproducibility, IdenticalStreamStateBitIdenticalDraws) {
    RandomStream a{123, 456, 789};
    RandomStream b{123, 456, 789};
    for (int i = 0; i < 200; ++i) {
        EXPECT_EQ(levysde::sample_sas({1.5, 1.0}, a),
                  levysde::sample_sas({1.5, 1.0}, b));
        EXPECT_EQ(a.counter, b.counter);
    }
}

// alpha within 1e-9 of 1 routes to the alpha = 1 branch instead of the
// cancellation-prone general formula.
TEST(SampleSas, NearOneGuard) {
    RandomStream a{6, 0, 0}, b{6, 0, 0};
    for (int i = 0; i < 100; ++i) {
        const double x1 = levysde::sample_sas({1.0, 1.0}, a);
        const double x2 = levysde::sample_sas({1.0 + 1e-12, 1.0}, b);
        EXPECT_EQ(x1, x2);
        EXPECT_TRUE(std::isfinite(x1));
    }
}
