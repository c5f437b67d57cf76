#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "condmix/errors.hpp"

namespace condmix {

// Effective settings for one experiment run.  Every field has a per-experiment
// default; a config file overrides, command-line flags override both.  The
// manifest echoes the effective values, so a run is reproducible from it alone.
struct RunConfig {
    std::string experiment;

    // common
    std::uint64_t seed = 1234;
    unsigned threads = 1;
    unsigned precision_bits = 196;

    // lozi map and sampling
    double a = 1.8;
    double b = 0.35;
    double x0 = 0.0;
    std::uint64_t replicas = 20;
    std::uint64_t samples = 100000;
    std::uint64_t n_max = 10;
    std::uint64_t n_init = 1000;
    std::string observable = "2x";  // "2x" | "absx"
    double level = 0.99;
    double bin_width = 0.0025;

    // covering grid
    double h = 0.01;
    std::uint64_t attractor_points = 1000000;
    std::uint64_t burn_in = 1000;
    double slice_jitter = 0.5;  // x0 spread in cells; 0 = exact line

    // baker map
    unsigned k = 2;
    double mu = 0.45;
    std::vector<double> offsets{0.0, 0.55};
    std::string psi = "curved";  // "curved" | "identity"
    double t = 0.0;
    std::string a_obs = "2x";  // "2x" | "sin"
    std::string b_obs = "2x";
    std::uint64_t j_max = 64;

    // bayes
    std::vector<double> sigma_list{0.5, 0.1, 0.02, 0.0};
    std::uint64_t ensemble = 200000;
    double tol0 = 1e-3;
    std::uint64_t srb_points = 1000000;
};

namespace detail {

inline const std::vector<std::string>& config_keys(const std::string& experiment) {
    static const std::vector<std::string> common{"seed", "threads", "precision_bits"};
    static const std::vector<std::string> hist{"seed",    "threads", "precision_bits", "a", "b",
                                               "x0",      "samples", "n_init",         "bin_width"};
    static const std::vector<std::string> mix{
        "seed",  "threads", "precision_bits", "a",          "b",    "x0",
        "replicas", "samples", "n_max",       "n_init",     "observable", "level"};
    static const std::vector<std::string> covering{
        "seed", "threads", "precision_bits", "a",       "b",       "x0",
        "n_max", "samples", "attractor_points", "burn_in", "h",    "n_init",
        "slice_jitter"};
    static const std::vector<std::string> bmix{
        "seed", "threads", "precision_bits", "k",     "mu",    "offsets", "psi",
        "t",    "a_obs",   "b_obs",          "replicas", "samples", "n_max", "level"};
    static const std::vector<std::string> bfour{"seed", "threads", "precision_bits", "k",
                                                "mu",   "offsets", "psi",            "j_max",
                                                "samples"};
    static const std::vector<std::string> bayes{
        "seed",   "threads", "precision_bits", "a",    "b",          "sigma_list",
        "n_max",  "ensemble", "tol0",          "srb_points", "observable"};
    if (experiment == "lozi-cond-hist") return hist;
    if (experiment == "lozi-cond-mix") return mix;
    if (experiment == "lozi-covering") return covering;
    if (experiment == "baker-mix") return bmix;
    if (experiment == "baker-fourier") return bfour;
    if (experiment == "bayes-forecast") return bayes;
    if (experiment == "selftest") return common;
    throw ConfigError("unknown experiment '" + experiment + "'");
}

inline double as_number(const nlohmann::json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError("field '" + key + "': expected a number");
    return v.get<double>();
}

inline std::uint64_t as_count(const nlohmann::json& v, const std::string& key) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
        const auto i = v.get<std::int64_t>();
        if (i >= 0) return static_cast<std::uint64_t>(i);
        throw ConfigError("field '" + key + "': expected a nonnegative integer");
    }
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d >= 0.0 && d < 0x1p53 && d == std::floor(d)) return static_cast<std::uint64_t>(d);
    }
    throw ConfigError("field '" + key + "': expected a nonnegative integer");
}

inline std::vector<double> as_number_list(const nlohmann::json& v, const std::string& key) {
    if (!v.is_array() || v.empty())
        throw ConfigError("field '" + key + "': expected a nonempty array of numbers");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(as_number(e, key));
    return out;
}

inline void check_range(bool ok, const std::string& key, const char* what) {
    if (!ok) throw ConfigError("field '" + key + "': " + what);
}

inline void set_field(RunConfig& cfg, const std::string& key, const nlohmann::json& v) {
    if (key == "seed") {
        cfg.seed = as_count(v, key);
    } else if (key == "threads") {
        cfg.threads = static_cast<unsigned>(as_count(v, key));
        check_range(cfg.threads >= 1, key, "must be at least 1");
    } else if (key == "precision_bits") {
        cfg.precision_bits = static_cast<unsigned>(as_count(v, key));
        check_range(cfg.precision_bits >= 64 && cfg.precision_bits <= 8192, key,
                    "must lie in [64, 8192]");
    } else if (key == "a") {
        cfg.a = as_number(v, key);
    } else if (key == "b") {
        cfg.b = as_number(v, key);
    } else if (key == "x0") {
        cfg.x0 = as_number(v, key);
        check_range(std::isfinite(cfg.x0), key, "must be finite");
    } else if (key == "replicas") {
        cfg.replicas = as_count(v, key);
        check_range(cfg.replicas >= 2, key, "must be at least 2");
    } else if (key == "samples") {
        cfg.samples = as_count(v, key);
        check_range(cfg.samples >= 1, key, "must be positive");
    } else if (key == "n_max") {
        cfg.n_max = as_count(v, key);
    } else if (key == "n_init") {
        cfg.n_init = as_count(v, key);
    } else if (key == "observable") {
        cfg.observable = v.is_string() ? v.get<std::string>() : "";
        check_range(cfg.observable == "2x" || cfg.observable == "absx", key,
                    "must be \"2x\" or \"absx\"");
    } else if (key == "level") {
        cfg.level = as_number(v, key);
        check_range(cfg.level > 0.0 && cfg.level < 1.0, key, "must lie in (0,1)");
    } else if (key == "bin_width") {
        cfg.bin_width = as_number(v, key);
        check_range(cfg.bin_width > 0.0, key, "must be positive");
    } else if (key == "h") {
        cfg.h = as_number(v, key);
        check_range(cfg.h > 0.0, key, "must be positive");
    } else if (key == "attractor_points") {
        cfg.attractor_points = as_count(v, key);
        check_range(cfg.attractor_points >= 1, key, "must be positive");
    } else if (key == "burn_in") {
        cfg.burn_in = as_count(v, key);
    } else if (key == "slice_jitter") {
        cfg.slice_jitter = as_number(v, key);
        check_range(cfg.slice_jitter >= 0.0, key, "must be nonnegative");
    } else if (key == "k") {
        cfg.k = static_cast<unsigned>(as_count(v, key));
        check_range(cfg.k >= 2, key, "must be at least 2");
    } else if (key == "mu") {
        cfg.mu = as_number(v, key);
        check_range(cfg.mu > 0.0 && cfg.mu < 1.0, key, "must lie in (0,1)");
    } else if (key == "offsets") {
        cfg.offsets = as_number_list(v, key);
    } else if (key == "psi") {
        cfg.psi = v.is_string() ? v.get<std::string>() : "";
        check_range(cfg.psi == "curved" || cfg.psi == "identity", key,
                    "must be \"curved\" or \"identity\"");
    } else if (key == "t") {
        cfg.t = as_number(v, key);
    } else if (key == "a_obs" || key == "b_obs") {
        const std::string s = v.is_string() ? v.get<std::string>() : "";
        check_range(s == "2x" || s == "sin", key, "must be \"2x\" or \"sin\"");
        (key == "a_obs" ? cfg.a_obs : cfg.b_obs) = s;
    } else if (key == "j_max") {
        cfg.j_max = as_count(v, key);
        check_range(cfg.j_max >= 1, key, "must be positive");
    } else if (key == "sigma_list") {
        cfg.sigma_list = as_number_list(v, key);
        for (const double s : cfg.sigma_list)
            check_range(s >= 0.0, key, "entries must be nonnegative");
    } else if (key == "ensemble") {
        cfg.ensemble = as_count(v, key);
        check_range(cfg.ensemble >= 1, key, "must be positive");
    } else if (key == "tol0") {
        cfg.tol0 = as_number(v, key);
        check_range(cfg.tol0 > 0.0, key, "must be positive");
    } else if (key == "srb_points") {
        cfg.srb_points = as_count(v, key);
        check_range(cfg.srb_points >= 100, key, "must be at least 100");
    } else {
        throw ConfigError("field '" + key + "': no handler (internal schema bug)");
    }
}

inline nlohmann::ordered_json field_json(const RunConfig& cfg, const std::string& key) {
    if (key == "seed") return cfg.seed;
    if (key == "threads") return cfg.threads;
    if (key == "precision_bits") return cfg.precision_bits;
    if (key == "a") return cfg.a;
    if (key == "b") return cfg.b;
    if (key == "x0") return cfg.x0;
    if (key == "replicas") return cfg.replicas;
    if (key == "samples") return cfg.samples;
    if (key == "n_max") return cfg.n_max;
    if (key == "n_init") return cfg.n_init;
    if (key == "observable") return cfg.observable;
    if (key == "level") return cfg.level;
    if (key == "bin_width") return cfg.bin_width;
    if (key == "h") return cfg.h;
    if (key == "attractor_points") return cfg.attractor_points;
    if (key == "burn_in") return cfg.burn_in;
    if (key == "slice_jitter") return cfg.slice_jitter;
    if (key == "k") return cfg.k;
    if (key == "mu") return cfg.mu;
    if (key == "offsets") return cfg.offsets;
    if (key == "psi") return cfg.psi;
    if (key == "t") return cfg.t;
    if (key == "a_obs") return cfg.a_obs;
    if (key == "b_obs") return cfg.b_obs;
    if (key == "j_max") return cfg.j_max;
    if (key == "sigma_list") return cfg.sigma_list;
    if (key == "ensemble") return cfg.ensemble;
    if (key == "tol0") return cfg.tol0;
    if (key == "srb_points") return cfg.srb_points;
    throw ConfigError("field '" + key + "': no echo handler (internal schema bug)");
}

}  // namespace detail

// Per-experiment defaults matching the documented runs.
inline RunConfig default_config(const std::string& experiment) {
    RunConfig cfg;
    cfg.experiment = experiment;
    detail::config_keys(experiment);  // validates the name
    if (experiment == "lozi-cond-hist") {
        cfg.a = 1.7;
        cfg.b = 0.5;
        cfg.samples = 200000;
    } else if (experiment == "lozi-covering") {
        cfg.n_max = 20;
        cfg.samples = 20000;
    } else if (experiment == "baker-fourier") {
        cfg.samples = 1000000;
    } else if (experiment == "bayes-forecast") {
        cfg.n_max = 18;
    }
    return cfg;
}

// Cross-field checks that single fields cannot express.
inline void validate_config(const RunConfig& cfg) {
    if (cfg.experiment == "baker-mix" || cfg.experiment == "baker-fourier") {
        if (cfg.offsets.size() != cfg.k)
            throw ConfigError("field 'offsets': need exactly k = " + std::to_string(cfg.k) +
                              " entries, got " + std::to_string(cfg.offsets.size()));
    }
}

// Overlay a JSON document onto the experiment defaults.  Unknown or ill-typed
// fields fail with the offending field named.
inline RunConfig parse_config(const std::string& experiment, const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("config root: expected a JSON object");
    RunConfig cfg = default_config(experiment);
    const auto& keys = detail::config_keys(experiment);
    for (const auto& [key, value] : doc.items()) {
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            throw ConfigError("field '" + key + "': unknown for experiment '" + experiment + "'");
        detail::set_field(cfg, key, value);
    }
    validate_config(cfg);
    return cfg;
}

// Effective-config echo in schema order (defaults included).
inline nlohmann::ordered_json config_json(const RunConfig& cfg) {
    nlohmann::ordered_json out;
    out["experiment"] = cfg.experiment;
    for (const auto& key : detail::config_keys(cfg.experiment))
        out[key] = detail::field_json(cfg, key);
    return out;
}

}  // namespace condmix
