#pragma once

// Test-only reference computations. These deliberately avoid the library's
// own code paths so that each expectation is checked against an independent
// route (closed forms, quadrature, brute-force maximization, plain sums).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace oracle {

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

// Kolmogorov-Smirnov statistic of a sample against a reference CDF.
inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
    }
    return d;
}

// Composite Simpson quadrature (n even).
inline double simpson(const std::function<double(double)>& f, double a,
                      double b, int n = 2000) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// Total variation distance between two Gaussians with equal standard
// deviation sigma and means mean_diff apart: 2 Phi(|diff| / (2 sigma)) - 1.
inline double tv_shifted_gaussian(double mean_diff, double sigma) {
    return 2.0 * normal_cdf(std::abs(mean_diff) / (2.0 * sigma)) - 1.0;
}

inline double mean(std::span<const double> xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

inline double variance(std::span<const double> xs) {
    const double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / (static_cast<double>(xs.size()) - 1.0);
}

inline double quantile(std::vector<double> xs, double q) {
    std::sort(xs.begin(), xs.end());
    const double pos = q * (static_cast<double>(xs.size()) - 1.0);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, xs.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return xs[lo] * (1.0 - frac) + xs[hi] * frac;
}

inline double abs_moment(std::span<const double> xs, double p) {
    double s = 0.0;
    for (double x : xs) s += std::pow(std::abs(x), p);
    return s / static_cast<double>(xs.size());
}

// Plain least squares of y against x; returns {slope, intercept}.
struct LineFit {
    double slope;
    double intercept;
};

inline LineFit ols(std::span<const double> x, std::span<const double> y) {
    const double mx = mean(x), my = mean(y);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return {sxy / sxx, my - sxy / sxx * mx};
}

}  // namespace oracle
