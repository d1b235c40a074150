#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "levysde/errors.hpp"
#include "levysde/propagator.hpp"
#include "levysde/spectral_model.hpp"

namespace levysde {

enum class Scheme { exp_euler, picard };

inline const char* to_string(Scheme s) {
    return s == Scheme::exp_euler ? "exp_euler" : "picard";
}

struct State {
    std::vector<double> coords;
    double time = 0.0;

    bool finite() const {
        for (double c : coords)
            if (!std::isfinite(c)) return false;
        return true;
    }
    double norm() const {
        double s = 0.0;
        for (double c : coords) s += c * c;
        return std::sqrt(s);
    }
};

struct PathConfig {
    double step = 0.01;  // h
    double horizon = 1.0;  // T
    Scheme scheme = Scheme::exp_euler;
    double picard_tol = 1e-10;
    int picard_max_iter = 200;

    void validate() const {
        if (!(step > 0.0) || !std::isfinite(step))
            throw ParameterError("PathConfig: step must be finite and > 0");
        if (!(horizon >= step) || !std::isfinite(horizon))
            throw ParameterError("PathConfig: horizon must be >= step");
        if (!(picard_tol > 0.0))
            throw ParameterError("PathConfig: picard_tol must be > 0");
        if (picard_max_iter < 1)
            throw ParameterError("PathConfig: picard_max_iter must be >= 1");
    }

    // Grid t_j = j h, j = 0..n_steps; covers [0, T].
    int n_steps() const {
        return static_cast<int>(std::ceil(horizon / step - 1e-12));
    }
};

struct Provenance {
    std::uint64_t seed = 0;
    Scheme scheme = Scheme::exp_euler;
    double step = 0.0;
    std::uint64_t model_hash = 0;
    int requested_paths = 0;
    int blown_paths = 0;
};

// M independent state samples at one time, row-major M x N. Blown
// trajectories are excluded upstream, so every stored row is finite.
struct Ensemble {
    double time = 0.0;
    int n_modes = 0;
    std::vector<double> samples;
    Provenance provenance;

    int size() const {
        return n_modes == 0 ? 0 : static_cast<int>(samples.size()) / n_modes;
    }
    std::span<const double> row(int i) const {
        return {samples.data() + static_cast<std::size_t>(i) * n_modes,
                static_cast<std::size_t>(n_modes)};
    }
    double row_norm(int i) const {
        double s = 0.0;
        for (double c : row(i)) s += c * c;
        return std::sqrt(s);
    }
};

namespace detail {

inline void check_state(const SpectralModel& model, const State& state) {
    if (static_cast<int>(state.coords.size()) != model.n_modes)
        throw UsageError("state dimension does not match the model");
    if (!state.finite())
        throw UsageError("state must be finite");
}

}  // namespace detail

// One exponential-Euler step: exact linear decay and exact-in-law noise,
// drift frozen at the left endpoint. Draws its own noise from `stream`
// mode by mode, so with zero drift it reproduces a bare sequence of
// per-mode convolution increments bit for bit.
inline State exp_euler_step(const SpectralModel& model, const State& state,
                            double h, RandomStream& stream) {
    detail::check_state(model, state);
    const int n = model.n_modes;
    std::vector<double> drift(n);
    model.drift.apply(state.coords, drift);
    State next;
    next.coords.resize(n);
    next.time = state.time + h;
    for (int k = 0; k < n; ++k) {
        const ModeTransition tr = transition_params(model, k, h);
        next.coords[k] = tr.decay * state.coords[k] +
                         tr.drift_gain * drift[k] +
                         sample_convolution_increment(tr, stream);
    }
    if (!next.finite())
        throw BlownPathError("exp_euler_step: non-finite state at t = " +
                                 std::to_string(next.time),
                             next.time);
    return next;
}

struct PathResult {
    std::vector<State> states;  // grid states, t_j = j h
    bool blown = false;
    double blow_time = 0.0;
};

// Exponential-Euler run over a precomputed noise grid (shared-noise scheme
// comparisons reuse the same grid across schemes and step sizes).
inline PathResult exp_euler_path(const SpectralModel& model, const State& x0,
                                 const NoiseGrid& noise) {
    detail::check_state(model, x0);
    if (noise.n_modes != model.n_modes)
        throw UsageError("exp_euler_path: noise grid does not match the model");
    const int n = model.n_modes;
    const double h = noise.step;
    std::vector<ModeTransition> trs(n);
    for (int k = 0; k < n; ++k) trs[k] = transition_params(model, k, h);

    PathResult result;
    result.states.reserve(noise.n_steps + 1);
    result.states.push_back({x0.coords, 0.0});
    std::vector<double> drift(n), coords = x0.coords;
    for (int j = 0; j < noise.n_steps; ++j) {
        model.drift.apply(coords, drift);
        bool ok = true;
        for (int k = 0; k < n; ++k) {
            coords[k] = trs[k].decay * coords[k] + trs[k].drift_gain * drift[k] +
                        noise.at(j, k);
            ok = ok && std::isfinite(coords[k]);
        }
        const double t = (j + 1) * h;
        if (!ok) {
            result.blown = true;
            result.blow_time = t;
            return result;
        }
        result.states.push_back({coords, t});
    }
    return result;
}

struct PicardResult {
    std::vector<State> states;     // X = V + Z_A on the grid
    int iterations = 0;
    std::vector<double> residuals;  // sup-over-grid norm per iteration
    bool blown = false;
    double blow_time = 0.0;
};

// Path-conditioned fixed-point solve of the mild equation on the grid. The
// cumulative convolution Z_A(t_j) is compounded from the noise increments
// with the exact decay, and the drift integral uses the left-endpoint
// quadrature sum_{i<j} h e^{-lambda (t_j - t_i)} F(y(t_i)): one order-h
// Riemann rule, evaluated incrementally. Iteration stops when successive
// grid iterates differ by less than tol in sup norm.
inline PicardResult picard_solve(
    const SpectralModel& model, const State& x0, const NoiseGrid& noise,
    double tol, int max_iter,
    const std::vector<std::vector<double>>* initial_iterate = nullptr) {
    detail::check_state(model, x0);
    if (noise.n_modes != model.n_modes)
        throw UsageError("picard_solve: noise grid does not match the model");
    if (!(tol > 0.0)) throw ParameterError("picard_solve: tol must be > 0");
    if (max_iter < 1) throw ParameterError("picard_solve: max_iter must be >= 1");

    const int n = model.n_modes;
    const int n_pts = noise.n_steps + 1;
    const double h = noise.step;

    std::vector<double> decay(n);
    for (int k = 0; k < n; ++k)
        decay[k] = std::exp(-model.eigenvalues[k] * h);

    // Cumulative convolution on the grid: z_0 = 0, z_{j+1} = decay z_j + inc_j.
    std::vector<std::vector<double>> z(n_pts, std::vector<double>(n));
    for (int j = 0; j < noise.n_steps; ++j)
        for (int k = 0; k < n; ++k)
            z[j + 1][k] = decay[k] * z[j][k] + noise.at(j, k);

    // Homogeneous part S_{t_j} x.
    std::vector<std::vector<double>> sx(n_pts, std::vector<double>(n));
    for (int k = 0; k < n; ++k) {
        sx[0][k] = x0.coords[k];
        for (int j = 1; j < n_pts; ++j) sx[j][k] = decay[k] * sx[j - 1][k];
    }

    // Iterate on y_j ~ X(t_j). Default initial iterate: S_t x + Z_A(t).
    std::vector<std::vector<double>> y(n_pts, std::vector<double>(n));
    if (initial_iterate) {
        if (static_cast<int>(initial_iterate->size()) != n_pts)
            throw UsageError("picard_solve: initial iterate has wrong grid size");
        y = *initial_iterate;
    } else {
        for (int j = 0; j < n_pts; ++j)
            for (int k = 0; k < n; ++k) y[j][k] = sx[j][k] + z[j][k];
    }

    PicardResult result;
    std::vector<std::vector<double>> y_next(n_pts, std::vector<double>(n));
    std::vector<double> accum(n), drift(n);
    for (int it = 0; it < max_iter; ++it) {
        std::fill(accum.begin(), accum.end(), 0.0);
        double residual = 0.0;
        for (int j = 0; j < n_pts; ++j) {
            double diff_sq = 0.0;
            for (int k = 0; k < n; ++k) {
                const double v = sx[j][k] + accum[k] + z[j][k];
                y_next[j][k] = v;
                const double d = v - y[j][k];
                diff_sq += d * d;
            }
            residual = std::max(residual, std::sqrt(diff_sq));
            if (j < n_pts - 1) {
                model.drift.apply(y[j], drift);
                // accum_{j+1} = decay (accum_j + h F_j): left-endpoint rule.
                for (int k = 0; k < n; ++k)
                    accum[k] = decay[k] * (accum[k] + h * drift[k]);
            }
        }
        std::swap(y, y_next);
        result.residuals.push_back(residual);
        ++result.iterations;
        for (int j = 0; j < n_pts; ++j)
            for (int k = 0; k < n; ++k)
                if (!std::isfinite(y[j][k])) {
                    result.blown = true;
                    result.blow_time = j * h;
                    return result;
                }
        if (residual < tol) {
            result.states.resize(n_pts);
            for (int j = 0; j < n_pts; ++j)
                result.states[j] = {y[j], j * h};
            return result;
        }
    }
    throw ConvergenceError(
        "picard_solve: no convergence after " + std::to_string(max_iter) +
            " iterations (residual " + std::to_string(result.residuals.back()) +
            ")",
        result.residuals.back());
}

// Simulates one trajectory on the grid of `config`. Identical
// (seed, trajectory, purpose) yields the identical noise grid for both
// schemes, so scheme outputs are pathwise comparable.
inline std::vector<State> simulate_path(const SpectralModel& model,
                                        const State& x0,
                                        const PathConfig& config,
                                        std::uint64_t seed,
                                        std::uint64_t trajectory = 0,
                                        std::uint32_t purpose = 0) {
    config.validate();
    detail::check_state(model, x0);
    const NoiseGrid noise = sample_noise_grid(model, config.step,
                                              config.n_steps(), seed,
                                              trajectory, purpose);
    if (config.scheme == Scheme::exp_euler) {
        PathResult r = exp_euler_path(model, x0, noise);
        if (r.blown)
            throw BlownPathError("simulate_path: trajectory blew up at t = " +
                                     std::to_string(r.blow_time),
                                 r.blow_time);
        return std::move(r.states);
    }
    PicardResult r = picard_solve(model, x0, noise, config.picard_tol,
                                  config.picard_max_iter);
    if (r.blown)
        throw BlownPathError("simulate_path: trajectory blew up at t = " +
                                 std::to_string(r.blow_time),
                             r.blow_time);
    return std::move(r.states);
}

namespace detail {

inline std::vector<int> snap_to_grid(std::span<const double> times, double h,
                                     int n_steps) {
    std::vector<int> idx;
    idx.reserve(times.size());
    for (double t : times) {
        if (!(t >= 0.0) || !std::isfinite(t))
            throw UsageError("snapshot times must be finite and >= 0");
        // Round down to the grid; tiny epsilon absorbs representation error.
        int j = static_cast<int>(std::floor(t / h + 1e-9));
        idx.push_back(std::clamp(j, 0, n_steps));
    }
    return idx;
}

}  // namespace detail

// Initial condition for an ensemble: every trajectory from the same point,
// or trajectory i from row (i mod M) of a source ensemble.
struct EnsembleStart {
    State point;
    const Ensemble* sample_from = nullptr;

    static EnsembleStart at(State x) { return {std::move(x), nullptr}; }
    static EnsembleStart from(const Ensemble& e) { return {{}, &e}; }
};

// Runs m_paths independent trajectories and snapshots them at the requested
// times (snapped down to the grid; reported times are grid times). Blown
// trajectories are dropped from every snapshot and counted in provenance.
// Work is split across `threads` worker threads; per-trajectory streams make
// the result identical for any thread count.
inline std::vector<Ensemble> simulate_ensemble(
    const SpectralModel& model, const EnsembleStart& start,
    const PathConfig& config, std::span<const double> snapshot_times,
    int m_paths, std::uint64_t seed, int threads = 1,
    std::uint32_t purpose = 0) {
    config.validate();
    if (m_paths < 1) throw UsageError("simulate_ensemble: m_paths must be >= 1");
    if (snapshot_times.empty())
        throw UsageError("simulate_ensemble: no snapshot times given");
    if (start.sample_from == nullptr)
        detail::check_state(model, start.point);
    else if (start.sample_from->n_modes != model.n_modes ||
             start.sample_from->size() == 0)
        throw UsageError("simulate_ensemble: bad source ensemble for start");
    threads = std::max(1, threads);

    const int n = model.n_modes;
    const int n_steps = config.n_steps();
    const std::vector<int> snap_idx =
        detail::snap_to_grid(snapshot_times, config.step, n_steps);
    const int n_snaps = static_cast<int>(snap_idx.size());

    std::vector<double> slots(static_cast<std::size_t>(n_snaps) * m_paths * n);
    std::vector<char> blown(m_paths, 0);
    std::vector<char> conv_failed(m_paths, 0);

    auto run_range = [&](int begin, int end) {
        std::vector<ModeTransition> trs(n);
        for (int k = 0; k < n; ++k)
            trs[k] = transition_params(model, k, config.step);
        for (int p = begin; p < end; ++p) {
            State x0;
            if (start.sample_from) {
                const Ensemble& src = *start.sample_from;
                auto r = src.row(p % src.size());
                x0.coords.assign(r.begin(), r.end());
            } else {
                x0.coords = start.point.coords;
            }
            const NoiseGrid noise = sample_noise_grid(
                model, config.step, n_steps, seed,
                static_cast<std::uint64_t>(p), purpose);
            std::vector<std::vector<double>> grid_states;
            bool ok = true;
            if (config.scheme == Scheme::exp_euler) {
                PathResult r = exp_euler_path(model, x0, noise);
                ok = !r.blown;
                if (ok) {
                    grid_states.reserve(r.states.size());
                    for (auto& s : r.states)
                        grid_states.push_back(std::move(s.coords));
                }
            } else {
                try {
                    PicardResult r = picard_solve(model, x0, noise,
                                                  config.picard_tol,
                                                  config.picard_max_iter);
                    ok = !r.blown;
                    if (ok)
                        for (auto& s : r.states)
                            grid_states.push_back(std::move(s.coords));
                } catch (const ConvergenceError&) {
                    conv_failed[p] = 1;
                    ok = false;
                }
            }
            if (!ok) {
                blown[p] = 1;
                continue;
            }
            for (int s = 0; s < n_snaps; ++s) {
                const auto& src = grid_states[snap_idx[s]];
                double* dst = slots.data() +
                              (static_cast<std::size_t>(s) * m_paths +
                               static_cast<std::size_t>(p)) * n;
                std::copy(src.begin(), src.end(), dst);
            }
        }
    };

    if (threads == 1 || m_paths < 2 * threads) {
        run_range(0, m_paths);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (m_paths + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const int begin = t * chunk;
            const int end = std::min(m_paths, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(run_range, begin, end);
        }
        for (auto& th : pool) th.join();
    }

    if (const auto failed =
            std::count(conv_failed.begin(), conv_failed.end(), 1);
        failed > 0)
        throw ConvergenceError("simulate_ensemble: " + std::to_string(failed) +
                                   " trajectories did not reach the fixed "
                                   "point within picard_max_iter",
                               0.0);
    const int n_blown =
        static_cast<int>(std::count(blown.begin(), blown.end(), 1));
    if (n_blown == m_paths)
        throw Error("simulate_ensemble: all trajectories blew up");
    std::vector<Ensemble> out(n_snaps);
    for (int s = 0; s < n_snaps; ++s) {
        Ensemble& e = out[s];
        e.time = snap_idx[s] * config.step;
        e.n_modes = n;
        e.provenance = {seed,    config.scheme, config.step,
                        model.hash(), m_paths,  n_blown};
        e.samples.reserve(static_cast<std::size_t>(m_paths - n_blown) * n);
        for (int p = 0; p < m_paths; ++p) {
            if (blown[p]) continue;
            const double* src = slots.data() +
                                (static_cast<std::size_t>(s) * m_paths +
                                 static_cast<std::size_t>(p)) * n;
            e.samples.insert(e.samples.end(), src, src + n);
        }
    }
    return out;
}

inline std::vector<Ensemble> simulate_ensemble(
    const SpectralModel& model, const State& x0, const PathConfig& config,
    std::span<const double> snapshot_times, int m_paths, std::uint64_t seed,
    int threads = 1, std::uint32_t purpose = 0) {
    return simulate_ensemble(model, EnsembleStart::at(x0), config,
                             snapshot_times, m_paths, seed, threads, purpose);
}

}  // namespace levysde
