#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "levysde/errors.hpp"
#include "levysde/noise.hpp"
#include "levysde/random.hpp"

namespace levysde {

enum class DriftKind { zero, constant, saturating };

inline const char* to_string(DriftKind k) {
    switch (k) {
        case DriftKind::zero: return "zero";
        case DriftKind::constant: return "constant";
        case DriftKind::saturating: return "saturating";
    }
    return "?";
}

// Bounded Lipschitz nonlinearity F with declared bound C_F and Lipschitz
// constant L. The declared constants are verified against the actual map on
// random probe points at construction time; declaring values the map does
// not satisfy is a parameter error.
//
// Kinds:
//   zero        F = 0
//   constant    F(x) = v, a fixed vector
//   saturating  F(x)_k = amplitude * tanh(gain * x_{(k+1) mod N}); the
//               cyclic index shift couples the modes.
class DriftSpec {
  public:
    DriftSpec() = default;

    static DriftSpec zero(int n_modes) {
        DriftSpec d;
        d.kind_ = DriftKind::zero;
        d.n_modes_ = check_modes(n_modes);
        d.bound_ = 0.0;
        d.lipschitz_ = 0.0;
        return d;
    }

    static DriftSpec constant(std::vector<double> value) {
        DriftSpec d;
        d.kind_ = DriftKind::constant;
        d.n_modes_ = check_modes(static_cast<int>(value.size()));
        double norm_sq = 0.0;
        for (double v : value) {
            if (!std::isfinite(v))
                throw ParameterError("DriftSpec: constant value must be finite");
            norm_sq += v * v;
        }
        d.value_ = std::move(value);
        d.bound_ = std::sqrt(norm_sq);
        d.lipschitz_ = 0.0;
        return d;
    }

    // declared_bound / declared_lipschitz default to the analytic values
    // amplitude*sqrt(N) and amplitude*gain.
    static DriftSpec saturating(int n_modes, double amplitude, double gain,
                                double declared_bound = -1.0,
                                double declared_lipschitz = -1.0) {
        if (!(amplitude >= 0.0) || !std::isfinite(amplitude))
            throw ParameterError("DriftSpec: amplitude must be finite and >= 0");
        if (!(gain >= 0.0) || !std::isfinite(gain))
            throw ParameterError("DriftSpec: gain must be finite and >= 0");
        DriftSpec d;
        d.kind_ = DriftKind::saturating;
        d.n_modes_ = check_modes(n_modes);
        d.amplitude_ = amplitude;
        d.gain_ = gain;
        d.bound_ = declared_bound >= 0.0
                       ? declared_bound
                       : amplitude * std::sqrt(static_cast<double>(n_modes));
        d.lipschitz_ =
            declared_lipschitz >= 0.0 ? declared_lipschitz : amplitude * gain;
        d.verify_declared_constants();
        return d;
    }

    DriftKind kind() const { return kind_; }
    int n_modes() const { return n_modes_; }
    double bound() const { return bound_; }        // C_F
    double lipschitz() const { return lipschitz_; }  // L
    double amplitude() const { return amplitude_; }
    double gain() const { return gain_; }
    const std::vector<double>& value() const { return value_; }
    bool is_zero() const { return kind_ == DriftKind::zero; }

    // out = F(x). out and x must both have length n_modes().
    void apply(std::span<const double> x, std::span<double> out) const {
        const std::size_t n = static_cast<std::size_t>(n_modes_);
        if (x.size() != n || out.size() != n)
            throw UsageError("DriftSpec::apply: dimension mismatch");
        switch (kind_) {
            case DriftKind::zero:
                for (std::size_t k = 0; k < n; ++k) out[k] = 0.0;
                break;
            case DriftKind::constant:
                for (std::size_t k = 0; k < n; ++k) out[k] = value_[k];
                break;
            case DriftKind::saturating:
                for (std::size_t k = 0; k < n; ++k)
                    out[k] = amplitude_ * std::tanh(gain_ * x[(k + 1) % n]);
                break;
        }
    }

    std::vector<double> apply(std::span<const double> x) const {
        std::vector<double> out(static_cast<std::size_t>(n_modes_));
        apply(x, out);
        return out;
    }

  private:
    static int check_modes(int n) {
        if (n < 1) throw ParameterError("DriftSpec: n_modes must be >= 1");
        return n;
    }

    // Probes |F(x)| <= C_F and |F(x)-F(y)| <= L|x-y| on a fixed deterministic
    // cloud of Gaussian points.
    void verify_declared_constants() const {
        RandomStream probe{0x5eedD21Fu, 0, 0};
        const std::size_t n = static_cast<std::size_t>(n_modes_);
        std::vector<double> x(n), y(n), fx(n), fy(n);
        constexpr int kProbes = 64;
        constexpr double kSlack = 1.0 + 1e-9;
        for (int i = 0; i < kProbes; ++i) {
            for (std::size_t k = 0; k < n; ++k) {
                x[k] = sample_gaussian(3.0, probe);
                y[k] = sample_gaussian(3.0, probe);
            }
            apply(x, fx);
            apply(y, fy);
            double fx_sq = 0.0, diff_sq = 0.0, dist_sq = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                fx_sq += fx[k] * fx[k];
                diff_sq += (fx[k] - fy[k]) * (fx[k] - fy[k]);
                dist_sq += (x[k] - y[k]) * (x[k] - y[k]);
            }
            if (std::sqrt(fx_sq) > bound_ * kSlack)
                throw ParameterError(
                    "DriftSpec: declared bound c_f=" + std::to_string(bound_) +
                    " violated on probe (|F(x)|=" + std::to_string(std::sqrt(fx_sq)) +
                    ")");
            if (std::sqrt(diff_sq) > lipschitz_ * std::sqrt(dist_sq) * kSlack)
                throw ParameterError(
                    "DriftSpec: declared lipschitz=" + std::to_string(lipschitz_) +
                    " violated on probe");
        }
    }

    DriftKind kind_ = DriftKind::zero;
    int n_modes_ = 1;
    double bound_ = 0.0;
    double lipschitz_ = 0.0;
    double amplitude_ = 0.0;
    double gain_ = 0.0;
    std::vector<double> value_;
};

}  // namespace levysde
