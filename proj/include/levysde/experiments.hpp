#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "levysde/csv.hpp"
#include "levysde/ergodicity.hpp"
#include "levysde/errors.hpp"
#include "levysde/model_io.hpp"
#include "levysde/svg.hpp"

namespace levysde {

// Command-level entry points shared by the CLI binary and the tests. Every
// produced file embeds the effective configuration and seed in '#' comments,
// and output bytes depend only on (config, seed, code version) -- never on
// thread count or wall clock.

struct RunOptions {
    int threads = 1;
    bool svg = false;
};

namespace detail {

inline std::uint64_t require_seed(const ExperimentConfig& cfg) {
    if (!cfg.seed)
        throw UsageError("config: config.seed is mandatory (no wall-clock default)");
    return *cfg.seed;
}

inline std::filesystem::path prepare_out_dir(const ExperimentConfig& cfg) {
    std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::vector<StartSpec> starts_or_origin(const ExperimentConfig& cfg) {
    if (!cfg.x_list.empty()) return cfg.x_list;
    return {StartSpec::norm_along_e1(0.0, cfg.model.n_modes)};
}

inline std::vector<double> grid_or_horizon(const ExperimentConfig& cfg) {
    if (!cfg.time_grid.empty()) return cfg.time_grid;
    if (cfg.horizon) return {*cfg.horizon};
    throw UsageError("config: need time_grid or T");
}

inline void write_ensemble_rows(CsvWriter& csv,
                                const std::vector<Ensemble>& snaps) {
    std::vector<std::string> header = {"time", "path_id"};
    for (int k = 1; k <= snaps.front().n_modes; ++k)
        header.push_back("mode_" + std::to_string(k));
    csv.header(header);
    for (const Ensemble& e : snaps) {
        for (int i = 0; i < e.size(); ++i) {
            std::vector<double> row = {e.time, static_cast<double>(i)};
            for (double c : e.row(i)) row.push_back(c);
            csv.row(row);
        }
    }
}

}  // namespace detail

// --- check ------------------------------------------------------------------

struct CheckResult {
    AdmissibilityReport report;
    ExitCode exit_code = ExitCode::ok;
};

inline CheckResult run_check(const ExperimentConfig& cfg, std::ostream& out) {
    const AdmissibilityReport& report = cfg.model.admissibility;
    out << std::left << std::setw(10) << "condition" << std::setw(8) << "result"
        << std::setw(8) << "gating" << std::setw(16) << "witness"
        << "criterion\n";
    for (const ConditionEntry& e : report.entries) {
        out << std::left << std::setw(10) << e.id << std::setw(8)
            << (e.pass ? "pass" : "FAIL") << std::setw(8)
            << (e.applicable ? "yes" : "info") << std::setw(16)
            << format_double(e.witness) << e.statement;
        if (!e.note.empty()) out << "  [" << e.note << "]";
        out << "\n";
    }
    const bool ok = report.overall();
    out << "overall: " << (ok ? "PASS" : "FAIL") << "\n";
    return {report, ok ? ExitCode::ok : ExitCode::admissibility};
}

// --- simulate ----------------------------------------------------------------

inline ExitCode run_simulate(const ExperimentConfig& cfg,
                             const RunOptions& opts, std::ostream& log) {
    const std::uint64_t seed = detail::require_seed(cfg);
    const auto dir = detail::prepare_out_dir(cfg);
    const auto starts = detail::starts_or_origin(cfg);
    const auto times = detail::grid_or_horizon(cfg);
    PathConfig pc = cfg.path_config();
    pc.horizon = std::max(pc.horizon,
                          *std::max_element(times.begin(), times.end()));
    for (std::size_t i = 0; i < starts.size(); ++i) {
        if (starts[i].kind == StartSpec::Kind::stationary)
            throw UsageError("simulate: x_list cannot contain \"stationary\"");
        auto snaps = simulate_ensemble(
            cfg.model, State{starts[i].coords, 0.0}, pc, times, cfg.m_paths,
            seed, opts.threads, static_cast<std::uint32_t>(2 + i));
        const auto file = dir / ("ensemble_" + std::to_string(i) + ".csv");
        CsvWriter csv(file);
        csv.provenance("simulate", cfg.canonical());
        csv.comment("start: " + starts[i].label());
        csv.comment("blown_paths: " +
                    std::to_string(snaps.front().provenance.blown_paths));
        detail::write_ensemble_rows(csv, snaps);
        log << "wrote " << file.string() << " (" << snaps.front().size()
            << " paths x " << snaps.size() << " times)\n";
    }
    return ExitCode::ok;
}

// --- moments -----------------------------------------------------------------

inline ExitCode run_moments(const ExperimentConfig& cfg, const RunOptions& opts,
                            std::ostream& log) {
    const std::uint64_t seed = detail::require_seed(cfg);
    const auto dir = detail::prepare_out_dir(cfg);
    const auto starts = detail::starts_or_origin(cfg);
    const auto times = detail::grid_or_horizon(cfg);
    const double p = cfg.effective_p();
    PathConfig pc = cfg.path_config();
    pc.horizon = std::max(pc.horizon,
                          *std::max_element(times.begin(), times.end()));
    std::vector<SvgSeries> chart;
    for (std::size_t i = 0; i < starts.size(); ++i) {
        if (starts[i].kind == StartSpec::Kind::stationary)
            throw UsageError("moments: x_list cannot contain \"stationary\"");
        auto snaps = simulate_ensemble(
            cfg.model, State{starts[i].coords, 0.0}, pc, times, cfg.m_paths,
            seed, opts.threads, static_cast<std::uint32_t>(2 + i));
        const auto file = dir / ("moments_" + std::to_string(i) + ".csv");
        CsvWriter csv(file);
        csv.provenance("moments", cfg.canonical());
        csv.comment("start: " + starts[i].label());
        if (p >= cfg.model.alpha && cfg.model.has_stable_part())
            csv.comment("warning: p >= alpha, estimate may be unstable");
        csv.header({"t", "p", "moment", "stderr"});
        SvgSeries series{starts[i].label(), {}, {}};
        for (const Ensemble& e : snaps) {
            const MomentEstimate est = estimate_moment(
                e, p,
                cfg.model.has_stable_part()
                    ? std::optional<double>(cfg.model.alpha)
                    : std::nullopt);
            csv.row({e.time, p, est.value, est.std_error});
            series.x.push_back(e.time);
            series.y.push_back(est.value);
        }
        chart.push_back(std::move(series));
        log << "wrote " << file.string() << "\n";
    }
    if (opts.svg) {
        write_svg_chart(dir / "moments.svg", "empirical p-moment vs t", "t",
                        "E|X_t|^p", chart, /*log_y=*/false);
        log << "wrote " << (dir / "moments.svg").string() << "\n";
    }
    return ExitCode::ok;
}

// --- converge ----------------------------------------------------------------

inline ExitCode run_converge(const ExperimentConfig& cfg,
                             const RunOptions& opts, std::ostream& log) {
    const std::uint64_t seed = detail::require_seed(cfg);
    const auto dir = detail::prepare_out_dir(cfg);
    if (cfg.time_grid.empty())
        throw UsageError("converge: config.time_grid is required");
    const auto starts = detail::starts_or_origin(cfg);

    ConvergenceOptions conv;
    conv.dims = cfg.dims;
    conv.bins_per_dim = cfg.bins;
    conv.t_burn = cfg.effective_t_burn();
    conv.p_moment = cfg.effective_p();
    conv.threads = opts.threads;
    const ConvergenceReport report =
        convergence_experiment(cfg.model, starts, cfg.time_grid, cfg.m_paths,
                               seed, cfg.path_config(), conv);

    {
        CsvWriter csv(dir / "report.csv");
        csv.provenance("converge", cfg.canonical());
        csv.header({"x_norm", "t", "tv", "tv_stderr_proxy", "beta", "log_c",
                    "r2"});
        for (const StartReport& sr : report.starts) {
            const double beta = sr.fit ? sr.fit->beta : std::nan("");
            const double log_c = sr.fit ? sr.fit->log_c : std::nan("");
            const double r2 = sr.fit ? sr.fit->r_squared : std::nan("");
            for (std::size_t j = 0; j < sr.times.size(); ++j)
                csv.row({sr.x_norm, sr.times[j], sr.tv[j], report.noise_floor,
                         beta, log_c, r2});
        }
    }

    std::ofstream summary(dir / "summary.txt");
    summary << "levysde " << kVersion << " convergence report\n";
    summary << "config: " << cfg.canonical().dump() << "\n\n";
    summary << "reference: t_burn = " << format_double(report.reference_time)
            << ", self-consistency TV = "
            << format_double(report.reference_diagnostic.value) << " ("
            << (report.reference_converged ? "converged" : "NOT CONVERGED")
            << ")\n";
    summary << "noise floor (2/sqrt(M)): " << format_double(report.noise_floor)
            << "\n\n";
    int fitted = 0;
    for (const StartReport& sr : report.starts) {
        summary << "start " << sr.start.label() << ": ";
        if (sr.fit) {
            ++fitted;
            summary << "beta = " << format_double(sr.fit->beta)
                    << ", C = " << format_double(sr.fitted_prefactor())
                    << ", r2 = " << format_double(sr.fit->r_squared) << " ("
                    << sr.fit->points_used << " points, "
                    << sr.fit->points_dropped << " below floor)\n";
        } else {
            summary << "no fit: " << sr.fit_error << "\n";
        }
    }
    summary << "\nuniqueness proxy at t = "
            << format_double(report.uniqueness_time)
            << ": max pairwise TV = "
            << format_double(report.uniqueness_max_tv) << "\n";
    summary << "prefactor rank correlation vs 1+|x|^p (p = "
            << format_double(report.prefactor_p)
            << "): " << format_double(report.prefactor_rank_corr) << "\n";
    summary.close();

    if (opts.svg) {
        std::vector<SvgSeries> chart;
        for (const StartReport& sr : report.starts)
            chart.push_back({sr.start.label(), sr.times, sr.tv});
        write_svg_chart(dir / "tv_curves.svg", "projected TV vs t", "t", "TV",
                        chart, /*log_y=*/true);
    }

    log << "wrote " << (dir / "report.csv").string() << " and "
        << (dir / "summary.txt").string() << "\n";
    return fitted == 0 ? ExitCode::insufficient_data : ExitCode::ok;
}

// --- invariant ---------------------------------------------------------------

inline ExitCode run_invariant(const ExperimentConfig& cfg,
                              const RunOptions& opts, std::ostream& log) {
    const std::uint64_t seed = detail::require_seed(cfg);
    const auto dir = detail::prepare_out_dir(cfg);
    const InvariantResult inv = estimate_invariant(
        cfg.model, cfg.path_config(), cfg.m_paths, cfg.effective_t_burn(),
        seed, cfg.dims, cfg.bins, opts.threads, /*purpose=*/1);
    const auto file = dir / "invariant.csv";
    CsvWriter csv(file);
    csv.provenance("invariant", cfg.canonical());
    csv.comment("t_burn: " + format_double(cfg.effective_t_burn()));
    csv.comment("diagnostic_tv: " + format_double(inv.diagnostic.value));
    csv.comment("threshold: " + format_double(inv.threshold));
    csv.comment(inv.converged ? "status: converged" : "status: not converged");
    std::vector<Ensemble> one = {inv.ensemble};
    detail::write_ensemble_rows(csv, one);
    log << "wrote " << file.string() << " (diagnostic TV "
        << format_double(inv.diagnostic.value) << ", threshold "
        << format_double(inv.threshold) << ", "
        << (inv.converged ? "converged" : "NOT converged") << ")\n";
    return ExitCode::ok;
}

}  // namespace levysde
