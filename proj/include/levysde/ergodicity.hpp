#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "levysde/errors.hpp"
#include "levysde/solver.hpp"

namespace levysde {

// ---------------------------------------------------------------------------
// Moments
// ---------------------------------------------------------------------------

struct MomentEstimate {
    double value = 0.0;
    double std_error = 0.0;  // jackknife standard error of the mean
    double p = 0.0;
    // Set when p >= alpha of a stable-driven model: the p-th moment of the
    // limit law is infinite there, so the estimate drifts with sample size.
    bool heavy_tail_warning = false;
};

// Empirical p-th absolute moment (1/M) sum |row_i|^p of the state norm.
inline MomentEstimate estimate_moment(const Ensemble& ens, double p,
                                      std::optional<double> alpha = {}) {
    if (!(p > 0.0) || !std::isfinite(p))
        throw UsageError("estimate_moment: p must be finite and > 0");
    const int m = ens.size();
    if (m < 1) throw UsageError("estimate_moment: empty ensemble");
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < m; ++i) {
        const double v = std::pow(ens.row_norm(i), p);
        sum += v;
        sum_sq += v * v;
    }
    MomentEstimate est;
    est.p = p;
    est.value = sum / m;
    if (m > 1) {
        const double ss = std::max(0.0, sum_sq - sum * sum / m);
        est.std_error = std::sqrt(ss / (static_cast<double>(m) * (m - 1)));
    }
    est.heavy_tail_warning = alpha.has_value() && p >= *alpha;
    return est;
}

// ---------------------------------------------------------------------------
// Total variation on low-dimensional projections
// ---------------------------------------------------------------------------

struct TVEstimate {
    double value = 0.0;
    std::vector<int> dims;  // projection coordinates, 0-based
    int bins_per_dim = 0;
    int samples_per_side = 0;
};

namespace detail {

inline double percentile(std::vector<double>& sorted_scratch, double q) {
    std::sort(sorted_scratch.begin(), sorted_scratch.end());
    const double pos = q * (static_cast<double>(sorted_scratch.size()) - 1.0);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted_scratch.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted_scratch[lo] * (1.0 - frac) + sorted_scratch[hi] * frac;
}

}  // namespace detail

// Histogram total-variation distance between two equal-size samples of the
// projection onto `dims` (at most 3 coordinates). The binning range per
// coordinate is the 0.5-99.5 percentile box of the pooled samples, with
// explicit under/overflow cells so heavy tails contribute mass instead of
// stretching the range. The larger side is subsampled (first rows) to match
// the smaller. Estimates are a lower bound of the full-state TV.
inline TVEstimate estimate_tv(const Ensemble& a, const Ensemble& b,
                              std::vector<int> dims, int bins_per_dim = 64) {
    if (a.n_modes != b.n_modes)
        throw UsageError("estimate_tv: ensembles have different mode counts");
    if (dims.empty() || dims.size() > 3)
        throw UsageError("estimate_tv: need 1 to 3 projection dims");
    for (int d : dims)
        if (d < 0 || d >= a.n_modes)
            throw UsageError("estimate_tv: dim out of range: " + std::to_string(d));
    if (bins_per_dim < 1)
        throw UsageError("estimate_tv: bins_per_dim must be >= 1");
    const int m = std::min(a.size(), b.size());
    if (m < 1) throw UsageError("estimate_tv: empty ensemble");

    const int d = static_cast<int>(dims.size());
    const int cells_per_dim = bins_per_dim + 2;  // + under/overflow
    std::vector<double> lo(d), width(d);
    std::vector<double> pooled(static_cast<std::size_t>(2) * m);
    for (int j = 0; j < d; ++j) {
        for (int i = 0; i < m; ++i) {
            pooled[i] = a.row(i)[dims[j]];
            pooled[m + i] = b.row(i)[dims[j]];
        }
        lo[j] = detail::percentile(pooled, 0.005);
        const double hi = detail::percentile(pooled, 0.995);
        width[j] = hi - lo[j];
    }

    auto cell_of = [&](std::span<const double> row) {
        std::size_t cell = 0;
        for (int j = 0; j < d; ++j) {
            const double x = row[dims[j]];
            int bin;
            if (x < lo[j]) {
                bin = 0;
            } else if (width[j] <= 0.0 || x >= lo[j] + width[j]) {
                bin = cells_per_dim - 1;
            } else {
                bin = 1 + std::min(bins_per_dim - 1,
                                   static_cast<int>((x - lo[j]) / width[j] *
                                                    bins_per_dim));
            }
            cell = cell * cells_per_dim + static_cast<std::size_t>(bin);
        }
        return cell;
    };

    std::size_t n_cells = 1;
    for (int j = 0; j < d; ++j) n_cells *= static_cast<std::size_t>(cells_per_dim);
    std::vector<std::int32_t> count_a(n_cells, 0), count_b(n_cells, 0);
    for (int i = 0; i < m; ++i) {
        ++count_a[cell_of(a.row(i))];
        ++count_b[cell_of(b.row(i))];
    }
    double abs_diff = 0.0;
    for (std::size_t c = 0; c < n_cells; ++c)
        abs_diff += std::abs(static_cast<double>(count_a[c]) - count_b[c]);

    TVEstimate tv;
    tv.value = 0.5 * abs_diff / m;
    tv.dims = std::move(dims);
    tv.bins_per_dim = bins_per_dim;
    tv.samples_per_side = m;
    return tv;
}

// ---------------------------------------------------------------------------
// Exponential rate fitting
// ---------------------------------------------------------------------------

struct RateFit {
    double beta = 0.0;   // decay rate of the fitted C e^{-beta t}
    double log_c = 0.0;
    double r_squared = 0.0;
    int points_used = 0;
    int points_dropped = 0;
};

// Least squares of log(value) against t over the points strictly above
// `noise_floor` (TV estimates at the floor carry no rate information).
// Throws InsufficientDataError when fewer than 3 usable points remain.
inline RateFit fit_rate(std::span<const double> times,
                        std::span<const double> values,
                        double noise_floor = 0.0) {
    if (times.size() != values.size())
        throw UsageError("fit_rate: times and values differ in length");
    std::vector<double> t, y;
    int dropped = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (values[i] > noise_floor && values[i] > 0.0) {
            t.push_back(times[i]);
            y.push_back(std::log(values[i]));
        } else {
            ++dropped;
        }
    }
    const int n = static_cast<int>(t.size());
    if (n < 3)
        throw InsufficientDataError(
            "fit_rate: only " + std::to_string(n) +
            " points above the noise floor (need 3); dropped " +
            std::to_string(dropped));
    double st = 0.0, sy = 0.0;
    for (int i = 0; i < n; ++i) {
        st += t[i];
        sy += y[i];
    }
    const double mt = st / n, my = sy / n;
    double stt = 0.0, sty = 0.0, syy = 0.0;
    for (int i = 0; i < n; ++i) {
        stt += (t[i] - mt) * (t[i] - mt);
        sty += (t[i] - mt) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (stt <= 0.0)
        throw InsufficientDataError("fit_rate: all usable points share one time");
    const double slope = sty / stt;
    RateFit fit;
    fit.beta = -slope;
    fit.log_c = my - slope * mt;
    fit.points_used = n;
    fit.points_dropped = dropped;
    double ss_res = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = y[i] - (fit.log_c + slope * t[i]);
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

// Plug-in histogram TV between equal laws concentrates near this scale;
// rate fits treat anything below it as noise.
inline double tv_noise_floor(int samples_per_side) {
    return 2.0 / std::sqrt(static_cast<double>(samples_per_side));
}

// ---------------------------------------------------------------------------
// Invariant-measure proxy
// ---------------------------------------------------------------------------

struct InvariantResult {
    Ensemble ensemble;       // snapshot at t_burn from x = 0
    TVEstimate diagnostic;   // TV between the t_burn and 2 t_burn snapshots
    double threshold = 0.0;  // 3 / sqrt(M)
    bool converged = false;
};

// Long-run ensemble from the origin, with a two-time self-consistency
// diagnostic: the snapshots at t_burn and 2 t_burn must agree in projected
// TV to within 3/sqrt(M), else the result is flagged as not converged.
inline InvariantResult estimate_invariant(const SpectralModel& model,
                                          PathConfig config, int m_paths,
                                          double t_burn, std::uint64_t seed,
                                          std::vector<int> dims = {0},
                                          int bins_per_dim = 64,
                                          int threads = 1,
                                          std::uint32_t purpose = 0) {
    if (!(t_burn > 0.0) || !std::isfinite(t_burn))
        throw UsageError("estimate_invariant: t_burn must be finite and > 0");
    config.horizon = std::max(config.horizon, 2.0 * t_burn);
    State origin;
    origin.coords.assign(model.n_modes, 0.0);
    const double times[] = {t_burn, 2.0 * t_burn};
    std::vector<Ensemble> snaps =
        simulate_ensemble(model, origin, config, times, m_paths, seed, threads,
                          purpose);
    InvariantResult result;
    result.diagnostic = estimate_tv(snaps[0], snaps[1], dims, bins_per_dim);
    result.threshold = 3.0 / std::sqrt(static_cast<double>(snaps[0].size()));
    result.converged = result.diagnostic.value < result.threshold;
    result.ensemble = std::move(snaps[0]);
    return result;
}

// ---------------------------------------------------------------------------
// Convergence experiment
// ---------------------------------------------------------------------------

// Initial condition of one experiment branch: a fixed state, or states
// resampled from the invariant reference (the measure-valued start).
struct StartSpec {
    enum class Kind { point, stationary };
    Kind kind = Kind::point;
    std::vector<double> coords;

    static StartSpec norm_along_e1(double r, int n_modes) {
        StartSpec s;
        s.coords.assign(n_modes, 0.0);
        s.coords[0] = r;
        return s;
    }
    static StartSpec vector(std::vector<double> x) { return {Kind::point, std::move(x)}; }
    static StartSpec stationary() { return {Kind::stationary, {}}; }

    std::string label() const {
        if (kind == Kind::stationary) return "stationary";
        double n = 0.0;
        for (double c : coords) n += c * c;
        return "|x|=" + std::to_string(std::sqrt(n));
    }
    double norm() const {
        double n = 0.0;
        for (double c : coords) n += c * c;
        return std::sqrt(n);
    }
};

struct StartReport {
    StartSpec start;
    double x_norm = 0.0;                  // NaN for the stationary start
    std::vector<double> times;
    std::vector<double> tv;
    std::optional<RateFit> fit;
    std::string fit_error;                // set when the fit was impossible
    double fitted_prefactor() const {
        return fit ? std::exp(fit->log_c) : std::nan("");
    }
};

struct ConvergenceReport {
    std::vector<StartReport> starts;
    TVEstimate reference_diagnostic;
    bool reference_converged = false;
    double reference_time = 0.0;          // burn-in time of the reference
    double noise_floor = 0.0;
    // Largest pairwise TV between the ensembles of all point starts at
    // t = uniqueness_time (the invariant-uniqueness proxy).
    double uniqueness_time = 0.0;
    double uniqueness_max_tv = 0.0;
    // Spearman rank correlation of the fitted prefactor C(x) against
    // 1 + |x|^p over the point starts (NaN when fewer than 2 fits).
    double prefactor_rank_corr = 0.0;
    double prefactor_p = 0.0;
};

namespace detail {

inline double spearman_rank_corr(std::span<const double> a,
                                 std::span<const double> b) {
    const int n = static_cast<int>(a.size());
    if (n < 2) return std::nan("");
    auto ranks = [n](std::span<const double> v) {
        std::vector<int> idx(n);
        for (int i = 0; i < n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(),
                  [&](int i, int j) { return v[i] < v[j]; });
        std::vector<double> r(n);
        for (int i = 0; i < n; ++i) r[idx[i]] = i;
        return r;
    };
    const std::vector<double> ra = ranks(a), rb = ranks(b);
    double ma = 0.0, mb = 0.0;
    for (int i = 0; i < n; ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= n;
    mb /= n;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (int i = 0; i < n; ++i) {
        cov += (ra[i] - ma) * (rb[i] - mb);
        va += (ra[i] - ma) * (ra[i] - ma);
        vb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (va <= 0.0 || vb <= 0.0) return std::nan("");
    return cov / std::sqrt(va * vb);
}

}  // namespace detail

struct ConvergenceOptions {
    std::vector<int> dims = {0};
    int bins_per_dim = 64;
    double t_burn = 0.0;   // 0: use 20 / lambda_1
    double p_moment = 0.0;  // 0: use alpha / 2
    int threads = 1;
};

// For each start, estimates the projected TV to the long-run reference law
// over the time grid and fits the exponential decay rate. Also computes the
// uniqueness proxy (pairwise TV of all point starts at the burn-in time) and
// the monotonicity of the fitted prefactor against 1 + |x|^p.
inline ConvergenceReport convergence_experiment(
    const SpectralModel& model, std::span<const StartSpec> starts,
    std::span<const double> time_grid, int m_paths, std::uint64_t seed,
    PathConfig config, const ConvergenceOptions& options = {}) {
    if (starts.empty()) throw UsageError("convergence_experiment: no starts");
    if (time_grid.empty())
        throw UsageError("convergence_experiment: empty time grid");

    ConvergenceReport report;
    const double lambda1 = model.eigenvalues.front();
    const double t_burn =
        options.t_burn > 0.0 ? options.t_burn : 20.0 / lambda1;
    report.reference_time = t_burn;
    report.uniqueness_time = t_burn;
    report.prefactor_p =
        options.p_moment > 0.0 ? options.p_moment : model.alpha / 2.0;

    // Reference law: long-run ensemble from the origin (purpose tag 1).
    PathConfig ref_config = config;
    InvariantResult reference = estimate_invariant(
        model, ref_config, m_paths, t_burn, seed, options.dims,
        options.bins_per_dim, options.threads, /*purpose=*/1);
    report.reference_diagnostic = reference.diagnostic;
    report.reference_converged = reference.converged;
    report.noise_floor = tv_noise_floor(
        std::min(reference.ensemble.size(), m_paths));

    // Each start runs on its own purpose tag; horizon covers grid + proxy.
    std::vector<double> snap_times(time_grid.begin(), time_grid.end());
    snap_times.push_back(t_burn);
    PathConfig run_config = config;
    run_config.horizon =
        std::max(*std::max_element(snap_times.begin(), snap_times.end()),
                 config.step);

    std::vector<Ensemble> proxy_ensembles;
    for (std::size_t i = 0; i < starts.size(); ++i) {
        const StartSpec& start = starts[i];
        EnsembleStart es = start.kind == StartSpec::Kind::stationary
                               ? EnsembleStart::from(reference.ensemble)
                               : EnsembleStart::at({start.coords, 0.0});
        if (start.kind == StartSpec::Kind::point &&
            static_cast<int>(start.coords.size()) != model.n_modes)
            throw UsageError("convergence_experiment: start dimension != model");
        std::vector<Ensemble> snaps = simulate_ensemble(
            model, es, run_config, snap_times, m_paths, seed, options.threads,
            /*purpose=*/static_cast<std::uint32_t>(2 + i));

        StartReport sr;
        sr.start = start;
        sr.x_norm = start.kind == StartSpec::Kind::stationary ? std::nan("")
                                                              : start.norm();
        for (std::size_t j = 0; j + 1 < snaps.size(); ++j) {
            sr.times.push_back(snaps[j].time);
            sr.tv.push_back(estimate_tv(snaps[j], reference.ensemble,
                                        options.dims, options.bins_per_dim)
                                .value);
        }
        try {
            sr.fit = fit_rate(sr.times, sr.tv, report.noise_floor);
        } catch (const InsufficientDataError& err) {
            sr.fit_error = err.what();
        }
        if (start.kind == StartSpec::Kind::point)
            proxy_ensembles.push_back(std::move(snaps.back()));
        report.starts.push_back(std::move(sr));
    }

    // Uniqueness proxy: by the burn-in time every point start should have
    // reached the same law.
    for (std::size_t i = 0; i < proxy_ensembles.size(); ++i)
        for (std::size_t j = i + 1; j < proxy_ensembles.size(); ++j)
            report.uniqueness_max_tv = std::max(
                report.uniqueness_max_tv,
                estimate_tv(proxy_ensembles[i], proxy_ensembles[j],
                            options.dims, options.bins_per_dim)
                    .value);

    // Prefactor monotonicity across point starts with successful fits.
    std::vector<double> cs, xs;
    for (const StartReport& sr : report.starts) {
        if (sr.start.kind != StartSpec::Kind::point || !sr.fit) continue;
        cs.push_back(sr.fitted_prefactor());
        xs.push_back(1.0 + std::pow(sr.x_norm, report.prefactor_p));
    }
    report.prefactor_rank_corr = detail::spearman_rank_corr(cs, xs);
    return report;
}

}  // namespace levysde
