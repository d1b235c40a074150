#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <string>

#include "levysde/errors.hpp"
#include "levysde/random.hpp"

namespace levysde {

// Symmetric alpha-stable law with characteristic function
//   E[exp(i theta X)] = exp(-scale^alpha * |theta|^alpha).
// alpha = 2 is the Gaussian endpoint of the same convention: a centered
// normal with standard deviation scale * sqrt(2).
struct StableParams {
    double alpha = 2.0;
    double scale = 1.0;

    void validate() const {
        if (!(alpha > 0.0) || !(alpha <= 2.0) || !std::isfinite(alpha))
            throw ParameterError("StableParams: alpha must be in (0,2], got " +
                                 std::to_string(alpha));
        if (!(scale >= 0.0) || !std::isfinite(scale))
            throw ParameterError("StableParams: scale must be finite and >= 0, got " +
                                 std::to_string(scale));
    }
};

// Closed-form characteristic function of the law above.
inline double stable_cf(double alpha, double scale, double theta) {
    return std::exp(-std::pow(scale, alpha) * std::pow(std::abs(theta), alpha));
}

// Centered Gaussian draw with the given standard deviation (Box-Muller,
// first component). std = 0 returns exactly 0, and scaling std rescales the
// draw without changing the underlying uniforms.
inline double sample_gaussian(double std_dev, RandomStream& stream) {
    if (!(std_dev >= 0.0) || !std::isfinite(std_dev))
        throw ParameterError("sample_gaussian: std must be finite and >= 0, got " +
                             std::to_string(std_dev));
    const double u1 = stream.next_uniform();
    const double u2 = stream.next_uniform();
    return std_dev * (std::sqrt(-2.0 * std::log(u1)) *
                      std::cos(2.0 * std::numbers::pi * u2));
}

// Symmetric alpha-stable draw via the Chambers-Mallows-Stuck transform
// specialized to the symmetric case:
//   X = sin(alpha U) / cos(U)^{1/alpha} * (cos((1-alpha)U)/E)^{(1-alpha)/alpha},
// U uniform on (-pi/2, pi/2), E unit exponential. alpha = 1 uses its tan(U)
// branch (and so does a tiny neighborhood of 1, where the general formula
// cancels catastrophically); alpha = 2 short-circuits to the Gaussian
// sampler.
inline double sample_sas(const StableParams& params, RandomStream& stream) {
    params.validate();
    if (params.alpha == 2.0)
        return sample_gaussian(params.scale * std::sqrt(2.0), stream);

    const double angle =
        std::numbers::pi * (stream.next_uniform() - 0.5);  // (-pi/2, pi/2)
    const double expo = -std::log(stream.next_uniform());  // Exp(1)

    if (std::abs(params.alpha - 1.0) < 1e-9)
        return params.scale * std::tan(angle);

    const double a = params.alpha;
    const double x = std::sin(a * angle) / std::pow(std::cos(angle), 1.0 / a) *
                     std::pow(std::cos((1.0 - a) * angle) / expo, (1.0 - a) / a);
    return params.scale * x;
}

// Real and imaginary parts of the empirical characteristic function
// (1/M) sum exp(i theta x_j). For symmetric laws the imaginary part is a
// pure diagnostic.
struct CfEstimate {
    double real_part;
    double imag_part;
};

inline CfEstimate empirical_cf_parts(std::span<const double> samples,
                                     double theta) {
    if (samples.empty())
        throw UsageError("empirical_cf: empty sample set");
    double c = 0.0;
    double s = 0.0;
    for (double x : samples) {
        c += std::cos(theta * x);
        s += std::sin(theta * x);
    }
    const double m = static_cast<double>(samples.size());
    return {c / m, s / m};
}

inline double empirical_cf(std::span<const double> samples, double theta) {
    return empirical_cf_parts(samples, theta).real_part;
}

}  // namespace levysde
