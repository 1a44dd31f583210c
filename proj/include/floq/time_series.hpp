#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "floq/errors.hpp"

namespace floq {

/// Sampled observables along one evolution: a shared step axis plus one
/// value column per named observable.
struct TimeSeries {
    std::vector<long> steps;
    std::vector<std::string> names;
    std::vector<std::vector<double>> values;  // one vector per name

    std::size_t n_samples() const { return steps.size(); }

    const std::vector<double>& column(const std::string& name) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return values[i];
        throw ConfigError("TimeSeries: no observable named '" + name + "'");
    }
};

/// 17 significant digits: round-trips a double exactly, so reruns diff clean.
inline std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_csv(const TimeSeries& ts, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    out << "step";
    for (const auto& n : ts.names) out << "," << n;
    out << "\n";
    for (std::size_t k = 0; k < ts.n_samples(); ++k) {
        out << ts.steps[k];
        for (const auto& col : ts.values) out << "," << format_value(col[k]);
        out << "\n";
    }
}

/// Arithmetic mean of the samples with n_start <= step <= n_end.
inline double time_average(const std::vector<long>& steps, const std::vector<double>& values,
                           long n_start, long n_end) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < steps.size(); ++k) {
        if (steps[k] >= n_start && steps[k] <= n_end) {
            sum += values[k];
            ++count;
        }
    }
    if (count == 0) throw ConfigError("time_average: empty window");
    return sum / count;
}

inline double time_average(const TimeSeries& ts, const std::string& name, long n_start,
                           long n_end) {
    return time_average(ts.steps, ts.column(name), n_start, n_end);
}

struct SteadyWindow {
    long start = 0;
    long end = 0;
    bool shortened = false;  // true when the run is too short for the default window
};

/// Default steady-state window 1e5..3e5 kicks; shorter runs fall back to the
/// trailing half, flagged so the caller can log it.
inline SteadyWindow steady_window(long n_steps) {
    if (n_steps >= 300000) return {100000, 300000, false};
    return {n_steps / 2, n_steps, true};
}

}  // namespace floq
