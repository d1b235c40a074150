#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "levysde/drift.hpp"
#include "levysde/ergodicity.hpp"
#include "levysde/errors.hpp"
#include "levysde/solver.hpp"
#include "levysde/spectral_model.hpp"

namespace levysde {

using json = nlohmann::json;

namespace detail {

// Fail-closed object check: any key outside `allowed` is rejected, with the
// offending field path in the message.
inline void reject_unknown_fields(const json& obj, const std::string& path,
                                  const std::set<std::string>& allowed) {
    if (!obj.is_object())
        throw UsageError("config: " + path + " must be an object");
    for (const auto& [key, _] : obj.items())
        if (!allowed.contains(key))
            throw UsageError("config: unknown field " + path + "." + key);
}

inline double require_number(const json& obj, const std::string& path,
                             const std::string& key) {
    if (!obj.contains(key))
        throw UsageError("config: missing field " + path + "." + key);
    if (!obj[key].is_number())
        throw UsageError("config: " + path + "." + key + " must be a number");
    return obj[key].get<double>();
}

inline std::vector<double> number_list(const json& value,
                                       const std::string& path) {
    if (!value.is_array())
        throw UsageError("config: " + path + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : value) {
        if (!v.is_number())
            throw UsageError("config: " + path + " must contain only numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace detail

inline DriftSpec drift_from_json(const json& obj, int n_modes,
                                 const std::string& path = "model.drift") {
    detail::reject_unknown_fields(
        obj, path, {"kind", "value", "amplitude", "gain", "c_f", "lipschitz"});
    if (!obj.contains("kind") || !obj["kind"].is_string())
        throw UsageError("config: " + path + ".kind must be a string");
    const std::string kind = obj["kind"].get<std::string>();
    if (kind == "zero") return DriftSpec::zero(n_modes);
    if (kind == "constant") {
        if (!obj.contains("value"))
            throw UsageError("config: missing field " + path + ".value");
        std::vector<double> value;
        if (obj["value"].is_number()) {
            value.assign(static_cast<std::size_t>(n_modes),
                         obj["value"].get<double>());
        } else {
            value = detail::number_list(obj["value"], path + ".value");
            if (static_cast<int>(value.size()) != n_modes)
                throw UsageError("config: " + path + ".value length != n_modes");
        }
        return DriftSpec::constant(std::move(value));
    }
    if (kind == "saturating") {
        const double amplitude = detail::require_number(obj, path, "amplitude");
        const double gain = detail::require_number(obj, path, "gain");
        const double c_f = obj.contains("c_f")
                               ? detail::require_number(obj, path, "c_f")
                               : -1.0;
        const double lip = obj.contains("lipschitz")
                               ? detail::require_number(obj, path, "lipschitz")
                               : -1.0;
        return DriftSpec::saturating(n_modes, amplitude, gain, c_f, lip);
    }
    throw UsageError("config: " + path + ".kind must be one of zero | constant | saturating");
}

// Parses a model document. Power-law fields (lambda_exponent, gamma, delta,
// a_rule) and explicit lists (lambda, b, q, a) may not both be given for the
// same coefficient. The analytic admissibility family is attached only when
// every supplied part is in rule form.
inline SpectralModel model_from_json(const json& obj,
                                     const std::string& path = "model") {
    detail::reject_unknown_fields(
        obj, path,
        {"n_modes", "alpha", "lambda_exponent", "lambda", "gamma", "b", "delta",
         "q", "a_rule", "a", "mask_period", "drift"});
    if (!obj.contains("n_modes") || !obj["n_modes"].is_number_integer())
        throw UsageError("config: " + path + ".n_modes must be an integer");
    const int n_modes = obj["n_modes"].get<int>();
    if (n_modes < 1)
        throw UsageError("config: " + path + ".n_modes must be >= 1");
    const double alpha = detail::require_number(obj, path, "alpha");

    auto exclusive = [&](const char* rule, const char* list) {
        if (obj.contains(rule) && obj.contains(list))
            throw UsageError("config: " + path + " gives both " + rule +
                             " and " + list);
    };
    exclusive("lambda_exponent", "lambda");
    exclusive("gamma", "b");
    exclusive("delta", "q");
    exclusive("a_rule", "a");

    const int mask_period =
        obj.contains("mask_period")
            ? (obj["mask_period"].is_number_integer()
                   ? obj["mask_period"].get<int>()
                   : throw UsageError("config: " + path +
                                      ".mask_period must be an integer"))
            : 1;

    ARule a_rule = ARule::zero();
    bool a_is_rule = true;
    if (obj.contains("a_rule")) {
        const json& ar = obj["a_rule"];
        detail::reject_unknown_fields(ar, path + ".a_rule",
                                      {"kind", "coeff", "exponent"});
        if (!ar.contains("kind") || !ar["kind"].is_string())
            throw UsageError("config: " + path + ".a_rule.kind must be a string");
        const std::string kind = ar["kind"].get<std::string>();
        if (kind == "zero") {
            a_rule = ARule::zero();
        } else if (kind == "power") {
            a_rule = ARule::power(
                detail::require_number(ar, path + ".a_rule", "coeff"),
                detail::require_number(ar, path + ".a_rule", "exponent"));
        } else {
            throw UsageError("config: " + path +
                             ".a_rule.kind must be zero | power");
        }
    } else if (obj.contains("a")) {
        auto values = detail::number_list(obj["a"], path + ".a");
        if (static_cast<int>(values.size()) != n_modes)
            throw UsageError("config: " + path + ".a length != n_modes");
        a_rule = ARule::list(std::move(values));
        a_is_rule = false;
    }

    DriftSpec drift = obj.contains("drift")
                          ? drift_from_json(obj["drift"], n_modes)
                          : DriftSpec::zero(n_modes);

    const bool power_family =
        obj.contains("lambda_exponent") && !obj.contains("b") &&
        !obj.contains("q") && a_is_rule;

    if (power_family) {
        PowerLawSpec spec;
        spec.lambda_exponent = obj["lambda_exponent"].get<double>();
        spec.alpha = alpha;
        if (obj.contains("gamma")) spec.gamma = obj["gamma"].get<double>();
        if (obj.contains("delta")) spec.delta = obj["delta"].get<double>();
        spec.mask_period = mask_period;
        spec.a_rule = a_rule;
        return build_model(spec, n_modes, std::move(drift));
    }

    // Explicit-list model (any mixture of list and rule coefficient forms).
    SpectralModel m;
    m.n_modes = n_modes;
    m.alpha = alpha;
    auto fill = [&](const char* list_key, const char* rule_key,
                    auto&& rule_value) {
        if (obj.contains(list_key)) {
            auto v = detail::number_list(obj[list_key], path + "." + list_key);
            if (static_cast<int>(v.size()) != n_modes)
                throw UsageError("config: " + path + "." + list_key +
                                 " length != n_modes");
            return v;
        }
        std::vector<double> v(static_cast<std::size_t>(n_modes));
        for (int k = 1; k <= n_modes; ++k) v[k - 1] = rule_value(k, rule_key);
        return v;
    };
    m.eigenvalues = fill("lambda", "lambda_exponent", [&](int k, const char* key) {
        if (!obj.contains(key))
            throw UsageError("config: " + path + " needs lambda or lambda_exponent");
        return std::pow(static_cast<double>(k), obj[key].get<double>());
    });
    m.stable_coeffs = fill("b", "gamma", [&](int k, const char* key) -> double {
        if (!obj.contains(key)) return 0.0;
        return k % mask_period == 0
                   ? std::pow(static_cast<double>(k), obj[key].get<double>())
                   : 0.0;
    });
    m.gauss_coeffs = fill("q", "delta", [&](int k, const char* key) -> double {
        if (!obj.contains(key)) return 0.0;
        return std::pow(static_cast<double>(k), obj[key].get<double>());
    });
    m.const_drift.resize(static_cast<std::size_t>(n_modes));
    for (int k = 1; k <= n_modes; ++k) m.const_drift[k - 1] = a_rule.at(k);
    m.drift = std::move(drift);
    m.validate();
    m.admissibility = full_report(m);
    return m;
}

// ---------------------------------------------------------------------------
// Experiment configuration
// ---------------------------------------------------------------------------

struct ExperimentConfig {
    SpectralModel model;
    json model_json;           // as given (inline or loaded from file)
    Scheme scheme = Scheme::exp_euler;
    double h = 0.01;
    std::optional<double> horizon;
    std::vector<double> time_grid;
    int m_paths = 1000;
    std::optional<std::uint64_t> seed;
    double p_moment = 0.0;     // 0: alpha/2
    std::vector<int> dims = {0};  // 0-based internally; config file is 1-based
    int bins = 64;
    std::vector<StartSpec> x_list;
    std::string out_dir = "out";
    double t_burn = 0.0;       // 0: 20 / lambda_1
    double picard_tol = 1e-10;
    int picard_max_iter = 200;

    PathConfig path_config() const {
        PathConfig pc;
        pc.step = h;
        pc.horizon = horizon.value_or(
            time_grid.empty() ? h
                              : *std::max_element(time_grid.begin(),
                                                  time_grid.end()));
        pc.scheme = scheme;
        pc.picard_tol = picard_tol;
        pc.picard_max_iter = picard_max_iter;
        return pc;
    }

    double effective_p() const {
        return p_moment > 0.0 ? p_moment : model.alpha / 2.0;
    }
    double effective_t_burn() const {
        return t_burn > 0.0 ? t_burn : 20.0 / model.eigenvalues.front();
    }

    // Effective configuration (seed resolved, model inlined) serialized with
    // sorted keys; embedded in every output file for provenance.
    json canonical() const {
        json c;
        c["schema_version"] = 1;
        c["model"] = model_json;
        c["scheme"] = to_string(scheme);
        c["h"] = h;
        if (horizon) c["T"] = *horizon;
        if (!time_grid.empty()) c["time_grid"] = time_grid;
        c["m_paths"] = m_paths;
        if (seed) c["seed"] = *seed;
        if (p_moment > 0.0) c["p_moment"] = p_moment;
        json d = json::array();
        for (int dim : dims) d.push_back(dim + 1);
        c["dims"] = d;
        c["bins"] = bins;
        if (!x_list.empty()) {
            json xs = json::array();
            for (const StartSpec& s : x_list) {
                if (s.kind == StartSpec::Kind::stationary)
                    xs.push_back("stationary");
                else
                    xs.push_back(s.coords);
            }
            c["x_list"] = xs;
        }
        c["out_dir"] = out_dir;
        if (t_burn > 0.0) c["t_burn"] = t_burn;
        c["picard_tol"] = picard_tol;
        c["picard_max_iter"] = picard_max_iter;
        return c;
    }
};

inline json load_json_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in)
        throw UsageError("cannot open file: " + file.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& err) {
        throw UsageError("invalid JSON in " + file.string() + ": " + err.what());
    }
    return j;
}

// Parses a versioned experiment configuration. Unknown fields are rejected;
// model may be inline ("model") or a file reference ("model_file", resolved
// relative to `base_dir`).
inline ExperimentConfig config_from_json(
    const json& obj, const std::filesystem::path& base_dir = ".") {
    detail::reject_unknown_fields(
        obj, "config",
        {"schema_version", "model", "model_file", "scheme", "h", "T",
         "time_grid", "m_paths", "seed", "p_moment", "dims", "bins", "x_list",
         "out_dir", "t_burn", "picard_tol", "picard_max_iter"});
    if (!obj.contains("schema_version"))
        throw UsageError("config: missing field config.schema_version");
    if (!obj["schema_version"].is_number_integer() ||
        obj["schema_version"].get<int>() != 1)
        throw UsageError("config: unsupported config.schema_version (expected 1)");

    ExperimentConfig cfg;
    if (obj.contains("model") == obj.contains("model_file"))
        throw UsageError("config: give exactly one of model | model_file");
    if (obj.contains("model")) {
        cfg.model_json = obj["model"];
    } else {
        if (!obj["model_file"].is_string())
            throw UsageError("config: config.model_file must be a string");
        cfg.model_json = load_json_file(
            base_dir / obj["model_file"].get<std::string>());
    }
    cfg.model = model_from_json(cfg.model_json);

    if (obj.contains("scheme")) {
        const std::string s = obj["scheme"].is_string()
                                  ? obj["scheme"].get<std::string>()
                                  : throw UsageError(
                                        "config: config.scheme must be a string");
        if (s == "exp_euler")
            cfg.scheme = Scheme::exp_euler;
        else if (s == "picard")
            cfg.scheme = Scheme::picard;
        else
            throw UsageError("config: config.scheme must be exp_euler | picard");
    }
    if (obj.contains("h")) cfg.h = detail::require_number(obj, "config", "h");
    if (!(cfg.h > 0.0)) throw UsageError("config: config.h must be > 0");
    if (obj.contains("T")) {
        cfg.horizon = detail::require_number(obj, "config", "T");
        if (!(*cfg.horizon >= cfg.h))
            throw UsageError("config: config.T must be >= h");
    }
    if (obj.contains("time_grid")) {
        cfg.time_grid = detail::number_list(obj["time_grid"], "config.time_grid");
        for (double t : cfg.time_grid)
            if (!(t >= 0.0))
                throw UsageError("config: config.time_grid entries must be >= 0");
    }
    if (obj.contains("m_paths")) {
        if (!obj["m_paths"].is_number_integer())
            throw UsageError("config: config.m_paths must be an integer");
        cfg.m_paths = obj["m_paths"].get<int>();
        if (cfg.m_paths < 1)
            throw UsageError("config: config.m_paths must be >= 1");
    }
    if (obj.contains("seed")) {
        if (!obj["seed"].is_number_unsigned() && !obj["seed"].is_number_integer())
            throw UsageError("config: config.seed must be an unsigned integer");
        cfg.seed = obj["seed"].get<std::uint64_t>();
    }
    if (obj.contains("p_moment")) {
        cfg.p_moment = detail::require_number(obj, "config", "p_moment");
        if (!(cfg.p_moment > 0.0))
            throw UsageError("config: config.p_moment must be > 0");
    }
    if (obj.contains("dims")) {
        cfg.dims.clear();
        if (!obj["dims"].is_array())
            throw UsageError("config: config.dims must be an array");
        for (const auto& v : obj["dims"]) {
            if (!v.is_number_integer())
                throw UsageError("config: config.dims must contain integers");
            const int dim = v.get<int>();
            if (dim < 1 || dim > cfg.model.n_modes)
                throw UsageError("config: config.dims entries must be in [1, n_modes]");
            cfg.dims.push_back(dim - 1);
        }
        if (cfg.dims.empty() || cfg.dims.size() > 3)
            throw UsageError("config: config.dims must have 1 to 3 entries");
    }
    if (obj.contains("bins")) {
        if (!obj["bins"].is_number_integer())
            throw UsageError("config: config.bins must be an integer");
        cfg.bins = obj["bins"].get<int>();
        if (cfg.bins < 1) throw UsageError("config: config.bins must be >= 1");
    }
    if (obj.contains("x_list")) {
        if (!obj["x_list"].is_array())
            throw UsageError("config: config.x_list must be an array");
        for (const auto& v : obj["x_list"]) {
            if (v.is_number()) {
                cfg.x_list.push_back(StartSpec::norm_along_e1(
                    v.get<double>(), cfg.model.n_modes));
            } else if (v.is_array()) {
                auto coords = detail::number_list(v, "config.x_list[i]");
                if (static_cast<int>(coords.size()) != cfg.model.n_modes)
                    throw UsageError(
                        "config: config.x_list vector length != n_modes");
                cfg.x_list.push_back(StartSpec::vector(std::move(coords)));
            } else if (v.is_string() && v.get<std::string>() == "stationary") {
                cfg.x_list.push_back(StartSpec::stationary());
            } else {
                throw UsageError(
                    "config: config.x_list entries must be a norm, a vector, "
                    "or \"stationary\"");
            }
        }
    }
    if (obj.contains("out_dir")) {
        if (!obj["out_dir"].is_string())
            throw UsageError("config: config.out_dir must be a string");
        cfg.out_dir = obj["out_dir"].get<std::string>();
    }
    if (obj.contains("t_burn")) {
        cfg.t_burn = detail::require_number(obj, "config", "t_burn");
        if (!(cfg.t_burn > 0.0))
            throw UsageError("config: config.t_burn must be > 0");
    }
    if (obj.contains("picard_tol")) {
        cfg.picard_tol = detail::require_number(obj, "config", "picard_tol");
        if (!(cfg.picard_tol > 0.0))
            throw UsageError("config: config.picard_tol must be > 0");
    }
    if (obj.contains("picard_max_iter")) {
        if (!obj["picard_max_iter"].is_number_integer())
            throw UsageError("config: config.picard_max_iter must be an integer");
        cfg.picard_max_iter = obj["picard_max_iter"].get<int>();
        if (cfg.picard_max_iter < 1)
            throw UsageError("config: config.picard_max_iter must be >= 1");
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& file) {
    return config_from_json(load_json_file(file), file.parent_path());
}

}  // namespace levysde
