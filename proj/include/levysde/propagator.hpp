#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "levysde/errors.hpp"
#include "levysde/noise.hpp"
#include "levysde/random.hpp"
#include "levysde/spectral_model.hpp"

namespace levysde {

namespace detail {

// (1 - e^{-x}) / x for x >= 0, cancellation-safe down to x = 0 (limit 1).
inline double one_minus_exp_over(double x) {
    if (x == 0.0) return 1.0;
    return -std::expm1(-x) / x;
}

}  // namespace detail

// Exact transition law of a single mode over a step h: starting at u, the
// mode at time t+h is distributed as
//   decay * u + a_shift + N(0, gauss_std^2) + SaS(alpha, stable_scale),
// with the three noise summands independent. drift_gain is the weight the
// exponential-Euler scheme applies to a drift value frozen over the step.
// step = infinity encodes the stationary law of the linear equation
// (decay = 0).
struct ModeTransition {
    double decay = 0.0;         // e^{-lambda h}
    double a_shift = 0.0;       // a (1 - e^{-lambda h}) / lambda
    double drift_gain = 0.0;    // (1 - e^{-lambda h}) / lambda
    double gauss_std = 0.0;     // sqrt(q (1 - e^{-2 lambda h}) / (2 lambda))
    double stable_scale = 0.0;  // b ((1 - e^{-alpha lambda h}) / (alpha lambda))^{1/alpha}
    double step = 0.0;          // h
    double alpha = 2.0;
};

// Transition parameters for mode index `mode` (0-based) over step h > 0.
inline ModeTransition transition_params(const SpectralModel& model, int mode,
                                        double h) {
    if (mode < 0 || mode >= model.n_modes)
        throw UsageError("transition_params: mode index out of range: " +
                         std::to_string(mode));
    if (!(h > 0.0) || std::isnan(h))
        throw ParameterError("transition_params: step must be > 0, got " +
                             std::to_string(h));
    const double lambda = model.eigenvalues[mode];
    const double b = model.stable_coeffs[mode];
    const double q = model.gauss_coeffs[mode];
    const double a = model.const_drift[mode];
    const double alpha = model.alpha;

    ModeTransition tr;
    tr.step = h;
    tr.alpha = alpha;
    if (std::isinf(h)) {
        tr.decay = 0.0;
        tr.drift_gain = 1.0 / lambda;
        tr.a_shift = a / lambda;
        tr.gauss_std = std::sqrt(q / (2.0 * lambda));
        tr.stable_scale = b * std::pow(alpha * lambda, -1.0 / alpha);
        return tr;
    }
    tr.decay = std::exp(-lambda * h);
    tr.drift_gain = h * detail::one_minus_exp_over(lambda * h);
    tr.a_shift = a * tr.drift_gain;
    tr.gauss_std = std::sqrt(q * h * detail::one_minus_exp_over(2.0 * lambda * h));
    tr.stable_scale =
        b * std::pow(h * detail::one_minus_exp_over(alpha * lambda * h), 1.0 / alpha);
    return tr;
}

// Parameters of the invariant law of the linear equation for one mode
// (the h -> infinity limit of transition_params).
inline ModeTransition stationary_params(const SpectralModel& model, int mode) {
    return transition_params(model, mode,
                             std::numeric_limits<double>::infinity());
}

// One draw of the stochastic convolution increment of a mode:
// a_shift + Gaussian + stable, independent summands. Consumes four uniforms.
inline double sample_convolution_increment(const ModeTransition& tr,
                                           RandomStream& stream) {
    const double g = sample_gaussian(tr.gauss_std, stream);
    const double s = sample_sas({tr.alpha, tr.stable_scale}, stream);
    return tr.a_shift + g + s;
}

// Per-step convolution increments of all modes on a uniform grid, laid out
// step-major. Generated from per-mode streams so the same (seed, purpose,
// trajectory) always yields the same grid regardless of evaluation order.
struct NoiseGrid {
    double step = 0.0;
    int n_steps = 0;
    int n_modes = 0;
    std::vector<double> increments;  // [step][mode]

    double at(int step_index, int mode) const {
        return increments[static_cast<std::size_t>(step_index) * n_modes + mode];
    }
};

inline NoiseGrid sample_noise_grid(const SpectralModel& model, double h,
                                   int n_steps, std::uint64_t seed,
                                   std::uint64_t trajectory = 0,
                                   std::uint32_t purpose = 0) {
    if (n_steps < 0) throw UsageError("sample_noise_grid: n_steps must be >= 0");
    NoiseGrid grid;
    grid.step = h;
    grid.n_steps = n_steps;
    grid.n_modes = model.n_modes;
    grid.increments.resize(static_cast<std::size_t>(n_steps) * model.n_modes);
    for (int k = 0; k < model.n_modes; ++k) {
        const ModeTransition tr = transition_params(model, k, h);
        RandomStream stream =
            make_stream(seed, purpose, trajectory, static_cast<std::uint32_t>(k));
        for (int j = 0; j < n_steps; ++j)
            grid.increments[static_cast<std::size_t>(j) * model.n_modes + k] =
                sample_convolution_increment(tr, stream);
    }
    return grid;
}

// Aggregates pairs of fine steps into one coarse step of 2h:
//   inc_coarse = e^{-lambda h} * inc_first + inc_second.
// The coarse grid is distributed exactly as a grid sampled at 2h, which
// makes step-size comparisons pathwise-coupled.
inline NoiseGrid coarsen_noise(const SpectralModel& model,
                               const NoiseGrid& fine) {
    if (fine.n_steps % 2 != 0)
        throw UsageError("coarsen_noise: n_steps must be even");
    NoiseGrid coarse;
    coarse.step = 2.0 * fine.step;
    coarse.n_steps = fine.n_steps / 2;
    coarse.n_modes = fine.n_modes;
    coarse.increments.resize(static_cast<std::size_t>(coarse.n_steps) *
                             coarse.n_modes);
    for (int k = 0; k < fine.n_modes; ++k) {
        const double decay = std::exp(-model.eigenvalues[k] * fine.step);
        for (int j = 0; j < coarse.n_steps; ++j)
            coarse.increments[static_cast<std::size_t>(j) * coarse.n_modes + k] =
                decay * fine.at(2 * j, k) + fine.at(2 * j + 1, k);
    }
    return coarse;
}

}  // namespace levysde
