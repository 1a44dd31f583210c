#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "floq/errors.hpp"
#include "floq/system.hpp"
#include "floq/time_series.hpp"

namespace floq::lab {

/// Experiment configuration: a flat, typed key-value set. Defaults follow
/// the fixed drive used throughout (k = 6, p = 4 pi / 11, coherent state at
/// theta = 2.25, phi = 1.1, epsilon = 1e-4).
struct ExperimentConfig {
    std::string experiment;  // time_series | alpha_scan | spectral_scan |
                             // deff_scan | oracle_compare | reference_values
    int n_spins = 12;
    std::vector<double> alpha_list = {0.0};
    std::vector<double> tau_list = {1.0};
    double k = 6.0;
    double p = 4.0 * M_PI / 11.0;
    double theta = 2.25;
    double phi = 1.1;
    double epsilon = 1e-4;
    std::uint64_t seed = 1;
    long n_steps = 1000;
    long stride = 1;
    long avg_start = -1;  // -1: steady-window policy (1e5..3e5, else trailing half)
    long avg_end = -1;
    int n_samples = 1000;
    double tolerance = 1e-6;            // oracle_compare gate
    std::string boundary = "open";      // open | ring
    std::string coupling = "powerlaw";  // powerlaw | nn
    std::string deff_mode = "full";     // full | bplus
    std::string output_dir = "out";
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline double parse_real(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' expects a real, got '" + value + "'");
    }
}

inline long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' expects an integer, got '" + value + "'");
    }
}

inline std::vector<double> parse_real_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_real(key, item));
    }
    if (out.empty()) throw ConfigError("config: key '" + key + "' expects a non-empty list");
    return out;
}

}  // namespace detail

inline void apply_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    using namespace detail;
    if (key == "experiment") cfg.experiment = value;
    else if (key == "n_spins") cfg.n_spins = static_cast<int>(parse_int(key, value));
    else if (key == "alpha") cfg.alpha_list = {parse_real(key, value)};
    else if (key == "alpha_list") cfg.alpha_list = parse_real_list(key, value);
    else if (key == "tau") cfg.tau_list = {parse_real(key, value)};
    else if (key == "tau_list") cfg.tau_list = parse_real_list(key, value);
    else if (key == "k") cfg.k = parse_real(key, value);
    else if (key == "p") cfg.p = parse_real(key, value);
    else if (key == "theta") cfg.theta = parse_real(key, value);
    else if (key == "phi") cfg.phi = parse_real(key, value);
    else if (key == "epsilon") cfg.epsilon = parse_real(key, value);
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "n_steps") cfg.n_steps = parse_int(key, value);
    else if (key == "stride") cfg.stride = parse_int(key, value);
    else if (key == "avg_start") cfg.avg_start = parse_int(key, value);
    else if (key == "avg_end") cfg.avg_end = parse_int(key, value);
    else if (key == "n_samples") cfg.n_samples = static_cast<int>(parse_int(key, value));
    else if (key == "tolerance") cfg.tolerance = parse_real(key, value);
    else if (key == "boundary") cfg.boundary = value;
    else if (key == "coupling") cfg.coupling = value;
    else if (key == "deff_mode") cfg.deff_mode = value;
    else if (key == "output_dir") cfg.output_dir = value;
    else throw ConfigError("config: unknown key '" + key + "'");
}

inline ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot read '" + path + "'");
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: '" + path + "' line " + std::to_string(lineno) +
                              ": expected key = value");
        apply_key(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    }
    return cfg;
}

/// Apply one "key=value" CLI override.
inline void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("--set expects key=value, got '" + assignment + "'");
    apply_key(cfg, detail::trim(assignment.substr(0, eq)),
              detail::trim(assignment.substr(eq + 1)));
}

inline Boundary parse_boundary(const ExperimentConfig& cfg) {
    if (cfg.boundary == "open") return Boundary::OpenLine;
    if (cfg.boundary == "ring") return Boundary::Ring;
    throw ConfigError("config: boundary must be 'open' or 'ring', got '" + cfg.boundary + "'");
}

inline CouplingRange parse_coupling(const ExperimentConfig& cfg) {
    if (cfg.coupling == "powerlaw") return CouplingRange::PowerLaw;
    if (cfg.coupling == "nn") return CouplingRange::NearestNeighbor;
    throw ConfigError("config: coupling must be 'powerlaw' or 'nn', got '" + cfg.coupling + "'");
}

/// Canonical sorted key=value serialization; doubles use the same 17-digit
/// format as the CSVs so the hash is reproducible.
inline std::map<std::string, std::string> canonical_items(const ExperimentConfig& cfg) {
    std::map<std::string, std::string> m;
    m["experiment"] = cfg.experiment;
    m["n_spins"] = std::to_string(cfg.n_spins);
    auto list = [](const std::vector<double>& xs) {
        std::string s;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (i) s += ",";
            s += format_value(xs[i]);
        }
        return s;
    };
    m["alpha_list"] = list(cfg.alpha_list);
    m["tau_list"] = list(cfg.tau_list);
    m["k"] = format_value(cfg.k);
    m["p"] = format_value(cfg.p);
    m["theta"] = format_value(cfg.theta);
    m["phi"] = format_value(cfg.phi);
    m["epsilon"] = format_value(cfg.epsilon);
    m["seed"] = std::to_string(cfg.seed);
    m["n_steps"] = std::to_string(cfg.n_steps);
    m["stride"] = std::to_string(cfg.stride);
    m["avg_start"] = std::to_string(cfg.avg_start);
    m["avg_end"] = std::to_string(cfg.avg_end);
    m["n_samples"] = std::to_string(cfg.n_samples);
    m["tolerance"] = format_value(cfg.tolerance);
    m["boundary"] = cfg.boundary;
    m["coupling"] = cfg.coupling;
    m["deff_mode"] = cfg.deff_mode;
    m["output_dir"] = cfg.output_dir;
    return m;
}

/// FNV-1a over the canonical serialization (stable across platforms, unlike
/// std::hash).
inline std::string config_hash(const ExperimentConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ull;
        }
    };
    for (const auto& [key, value] : canonical_items(cfg)) {
        mix(key);
        mix("=");
        mix(value);
        mix("\n");
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Common validation shared by every experiment.
inline void validate(const ExperimentConfig& cfg) {
    static const std::vector<std::string> known = {"time_series",    "alpha_scan",
                                                   "spectral_scan",  "deff_scan",
                                                   "oracle_compare", "reference_values"};
    bool ok = false;
    for (const auto& name : known) ok = ok || name == cfg.experiment;
    if (!ok) throw ConfigError("config: unknown experiment '" + cfg.experiment + "'");
    if (cfg.n_spins < 2) throw ConfigError("config: n_spins must be >= 2");
    for (double a : cfg.alpha_list)
        if (a < 0.0) throw ConfigError("config: alpha values must be >= 0");
    for (double t : cfg.tau_list)
        if (!(t > 0.0)) throw ConfigError("config: tau values must be > 0");
    if (cfg.stride < 1) throw ConfigError("config: stride must be >= 1");
    if (cfg.n_steps < 0) throw ConfigError("config: n_steps must be >= 0");
    if ((cfg.avg_start < 0) != (cfg.avg_end < 0))
        throw ConfigError("config: avg_start and avg_end must be set together");
    if (cfg.avg_start >= 0) {
        if (cfg.avg_end < cfg.avg_start)
            throw ConfigError("config: avg_end must be >= avg_start");
        if (cfg.avg_end > cfg.n_steps)
            throw ConfigError("config: averaging window extends past n_steps");
    }
    if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0))
        throw ConfigError("config: epsilon must be in (0, 1)");
    if (cfg.n_samples < 1) throw ConfigError("config: n_samples must be >= 1");
    parse_boundary(cfg);
    parse_coupling(cfg);
    if (cfg.deff_mode != "full" && cfg.deff_mode != "bplus")
        throw ConfigError("config: deff_mode must be 'full' or 'bplus'");
}

}  // namespace floq::lab
