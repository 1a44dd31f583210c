#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "floq/entropy.hpp"
#include "floq/errors.hpp"
#include "floq/floquet.hpp"
#include "floq/kicked_ising.hpp"
#include "floq/lab/config.hpp"
#include "floq/references.hpp"
#include "floq/spectral.hpp"
#include "floq/state.hpp"
#include "floq/symmetries.hpp"
#include "floq/system.hpp"
#include "floq/time_series.hpp"
#include "floq/version.hpp"

namespace floq::lab {

inline constexpr int kMaxEvolutionSpins = 22;

/// Flat record: one scalar result per row, mirrored into results.csv for
/// every scan so downstream tooling can join on a single schema.
struct ResultRow {
    std::string experiment;
    int n_spins = 0;
    double alpha = 0.0;
    double tau = 0.0;
    std::string observable;
    double value = 0.0;
    std::string metadata;
};

inline void write_result_rows(const std::vector<ResultRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    out << "experiment,n_spins,alpha,tau,observable,value,metadata\n";
    for (const auto& r : rows) {
        out << r.experiment << "," << r.n_spins << "," << format_value(r.alpha) << ","
            << format_value(r.tau) << "," << r.observable << "," << format_value(r.value) << ","
            << r.metadata << "\n";
    }
}

/// Thread count: FLOQLAB_THREADS if set, else 1. Points are independent, and
/// results are committed in point order, so the output is thread-invariant.
inline int worker_threads() {
    if (const char* env = std::getenv("FLOQLAB_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return 1;
}

namespace detail {

template <typename Fn>
void parallel_for(std::size_t count, int n_threads, Fn&& fn) {
    if (n_threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int n = std::min<std::size_t>(n_threads, count);
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

inline std::string tag_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

inline std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

}  // namespace detail

/// Tracks every file a run produces; on failure the partial outputs are
/// removed so reruns never see a half-written directory.
class RunOutputs {
  public:
    explicit RunOutputs(const std::string& dir) : dir_(dir) {
        std::filesystem::create_directories(dir_);
    }

    std::string path(const std::string& name) {
        files_.push_back(name);
        return (std::filesystem::path(dir_) / name).string();
    }

    const std::vector<std::string>& files() const { return files_; }

    void remove_all() {
        for (const auto& f : files_) {
            std::error_code ec;
            std::filesystem::remove(std::filesystem::path(dir_) / f, ec);
        }
    }

  private:
    std::string dir_;
    std::vector<std::string> files_;
};

struct RunReport {
    std::vector<std::string> outputs;
    nlohmann::json notes;
};

inline void write_manifest(const ExperimentConfig& cfg, const RunReport& report,
                           double elapsed_seconds, const std::string& dir) {
    nlohmann::json manifest;
    manifest["version"] = kVersion;
    manifest["experiment"] = cfg.experiment;
    manifest["config_hash"] = config_hash(cfg);
    nlohmann::json config;
    for (const auto& [key, value] : canonical_items(cfg)) config[key] = value;
    manifest["config"] = config;
    manifest["threads"] = worker_threads();
    manifest["finished_at"] = detail::iso_timestamp();
    manifest["elapsed_seconds"] = elapsed_seconds;
    manifest["outputs"] = report.outputs;
    manifest["notes"] = report.notes;
    std::ofstream out(std::filesystem::path(dir) / "manifest.json");
    if (!out) throw ConfigError("cannot write manifest in '" + dir + "'");
    out << manifest.dump(2) << "\n";
}

namespace detail {

inline void guard_evolution(int n_spins) {
    if (n_spins > kMaxEvolutionSpins)
        throw CapacityError("state-vector evolution beyond N=" +
                            std::to_string(kMaxEvolutionSpins) +
                            " is not supported (requested N=" + std::to_string(n_spins) +
                            "); reduce n_spins");
    if (n_spins < 2) throw ConfigError("n_spins must be >= 2");
}

inline void guard_dense(int n_spins) {
    if (n_spins > kMaxDenseSpins)
        throw CapacityError("dense diagonalization beyond N=" + std::to_string(kMaxDenseSpins) +
                            " is not supported (requested N=" + std::to_string(n_spins) +
                            "); reduce n_spins");
    if (n_spins % 2 != 0)
        throw ConfigError("symmetry-sector experiments need an even n_spins");
}

struct Window {
    long start;
    long end;
    bool shortened;
};

inline Window resolve_window(const ExperimentConfig& cfg) {
    if (cfg.avg_start >= 0) return {cfg.avg_start, cfg.avg_end, false};
    const auto w = steady_window(cfg.n_steps);
    return {w.start, w.end, w.shortened};
}

/// Evolve the configured coherent state and record <J^2> and the half-chain
/// entropy. Entropy needs an even N (half cut); J^2 alone works for any N.
inline TimeSeries run_single_trace(const ExperimentConfig& cfg, double alpha, double tau) {
    SystemParams params(cfg.n_spins, alpha, cfg.k, cfg.p, tau, parse_boundary(cfg));
    const PhaseTable table = build_phase_table(params, parse_coupling(cfg));
    StateVector psi = coherent_state(cfg.n_spins, {cfg.theta, cfg.phi});
    const std::uint64_t mask = half_chain_mask(cfg.n_spins / 2);
    std::vector<Observer> observers = {
        {"jsq", [](long, const StateVector& s) { return expval_jsq(s); }},
        {"s_half", [mask](long, const StateVector& s) { return von_neumann_entropy(s, mask); }},
    };
    return evolve_record(psi, table, cfg.n_steps, cfg.stride, observers);
}

}  // namespace detail

/// One CSV per (alpha, tau) trace of <J^2>(n) and S_{N/2}(n).
inline RunReport run_time_series(const ExperimentConfig& cfg, RunOutputs& outputs) {
    detail::guard_evolution(cfg.n_spins);
    if (cfg.n_spins % 2 != 0)
        throw ConfigError("time_series records the half-chain entropy; n_spins must be even");

    struct Point {
        double alpha, tau;
        TimeSeries ts;
    };
    std::vector<Point> points;
    for (double tau : cfg.tau_list)
        for (double alpha : cfg.alpha_list) points.push_back({alpha, tau, {}});

    detail::parallel_for(points.size(), worker_threads(), [&](std::size_t i) {
        points[i].ts = detail::run_single_trace(cfg, points[i].alpha, points[i].tau);
    });

    RunReport report;
    for (const auto& pt : points) {
        const std::string name = "timeseries_N" + std::to_string(cfg.n_spins) + "_alpha" +
                                 detail::tag_number(pt.alpha) + "_tau" +
                                 detail::tag_number(pt.tau) + ".csv";
        write_csv(pt.ts, outputs.path(name));
        report.outputs.push_back(name);
    }
    return report;
}

/// Steady-window averages of <J^2> and S_{N/2} against alpha (and tau), with
/// the closed-form reference values appended per row.
inline RunReport run_alpha_scan(const ExperimentConfig& cfg, RunOutputs& outputs) {
    detail::guard_evolution(cfg.n_spins);
    if (cfg.n_spins % 2 != 0)
        throw ConfigError("alpha_scan records the half-chain entropy; n_spins must be even");
    if (cfg.alpha_list.empty()) throw ConfigError("alpha_scan: alpha_list is empty");
    const auto window = detail::resolve_window(cfg);
    if (window.end > cfg.n_steps || window.start >= window.end)
        throw ConfigError("alpha_scan: averaging window does not fit the run");

    struct Point {
        double alpha, tau;
        double jsq_avg = 0.0, s_avg = 0.0;
    };
    std::vector<Point> points;
    for (double tau : cfg.tau_list)
        for (double alpha : cfg.alpha_list) points.push_back({alpha, tau});

    detail::parallel_for(points.size(), worker_threads(), [&](std::size_t i) {
        const TimeSeries ts = detail::run_single_trace(cfg, points[i].alpha, points[i].tau);
        points[i].jsq_avg = time_average(ts, "jsq", window.start, window.end);
        points[i].s_avg = time_average(ts, "s_half", window.start, window.end);
    });

    const int n = cfg.n_spins;
    RunReport report;
    {
        std::ofstream out(outputs.path("alpha_scan.csv"));
        out << "n_spins,alpha,tau,jsq_avg,s_half_avg,jsq_pss,jsq_rmt,s_pss,s_page\n";
        for (const auto& pt : points) {
            out << n << "," << format_value(pt.alpha) << "," << format_value(pt.tau) << ","
                << format_value(pt.jsq_avg) << "," << format_value(pt.s_avg) << ","
                << format_value(ReferenceValues::jsq_pss(n)) << ","
                << format_value(ReferenceValues::jsq_rmt(n)) << ","
                << format_value(ReferenceValues::s_pss(n)) << ","
                << format_value(ReferenceValues::s_page(n)) << "\n";
        }
    }
    report.outputs.push_back("alpha_scan.csv");

    std::vector<ResultRow> rows;
    for (const auto& pt : points) {
        rows.push_back({cfg.experiment, n, pt.alpha, pt.tau, "jsq_avg", pt.jsq_avg, ""});
        rows.push_back({cfg.experiment, n, pt.alpha, pt.tau, "s_half_avg", pt.s_avg, ""});
    }
    write_result_rows(rows, outputs.path("results.csv"));
    report.outputs.push_back("results.csv");
    report.notes["window_start"] = window.start;
    report.notes["window_end"] = window.end;
    report.notes["window_shortened"] = window.shortened;
    return report;
}

/// Mean level-spacing ratio of the (R-even, B-even) Floquet block per
/// (alpha, tau), plus the raw eigenphases.
inline RunReport run_spectral_scan(const ExperimentConfig& cfg, RunOutputs& outputs) {
    detail::guard_dense(cfg.n_spins);

    struct Point {
        double alpha, tau;
        double mean_r = 0.0;
        int merged = 0;
        std::vector<double> phases;
    };
    std::vector<Point> points;
    for (double tau : cfg.tau_list)
        for (double alpha : cfg.alpha_list) points.push_back({alpha, tau});

    const SectorBasis sector = build_sector_basis(cfg.n_spins, +1, +1);
    detail::parallel_for(points.size(), worker_threads(), [&](std::size_t i) {
        SystemParams params(cfg.n_spins, points[i].alpha, cfg.k, cfg.p, points[i].tau,
                            parse_boundary(cfg));
        const PhaseTable table = build_phase_table(params, parse_coupling(cfg));
        const DenseUnitary block = sector_block_via_steps(table, sector);
        points[i].phases = floquet_eigenphases(block);
        const SpacingStats stats = spacing_ratios(points[i].phases);
        points[i].mean_r = stats.mean_r;
        points[i].merged = stats.merged_levels;
    });

    RunReport report;
    {
        std::ofstream out(outputs.path("spectral_summary.csv"));
        out << "n_spins,alpha,tau,mean_r,merged_levels,r_coe,r_poisson\n";
        for (const auto& pt : points) {
            out << cfg.n_spins << "," << format_value(pt.alpha) << "," << format_value(pt.tau)
                << "," << format_value(pt.mean_r) << "," << pt.merged << ","
                << format_value(ReferenceValues::r_coe) << ","
                << format_value(ReferenceValues::r_poisson) << "\n";
        }
    }
    report.outputs.push_back("spectral_summary.csv");
    {
        std::ofstream out(outputs.path("eigenphases.csv"));
        out << "alpha,tau,sector,eigenphase\n";
        for (const auto& pt : points)
            for (double phase : pt.phases)
                out << format_value(pt.alpha) << "," << format_value(pt.tau) << ",R+B+,"
                    << format_value(phase) << "\n";
    }
    report.outputs.push_back("eigenphases.csv");

    std::vector<ResultRow> rows;
    for (const auto& pt : points)
        rows.push_back({cfg.experiment, cfg.n_spins, pt.alpha, pt.tau, "mean_r", pt.mean_r,
                        "sector=R+B+"});
    write_result_rows(rows, outputs.path("results.csv"));
    report.outputs.push_back("results.csv");
    return report;
}

/// Effective dimension of the coherent state in the Floquet eigenbasis,
/// assembled sector by sector (exactly equivalent to diagonalizing the full
/// operator once the symmetry commutators have been verified).
inline RunReport run_deff_scan(const ExperimentConfig& cfg, RunOutputs& outputs) {
    detail::guard_dense(cfg.n_spins);

    const bool bplus_only = cfg.deff_mode == "bplus";
    std::vector<SectorBasis> sectors;
    for (int pr : {+1, -1})
        for (int pb : {+1, -1}) {
            if (bplus_only && pb != +1) continue;
            sectors.push_back(build_sector_basis(cfg.n_spins, pr, pb));
        }

    struct Point {
        double alpha, tau;
        int d_eff = 0;
    };
    std::vector<Point> points;
    for (double tau : cfg.tau_list)
        for (double alpha : cfg.alpha_list) points.push_back({alpha, tau});

    const StateVector psi0 = coherent_state(cfg.n_spins, {cfg.theta, cfg.phi});
    const double expected_weight =
        bplus_only ? bit_reversal_even_weight(psi0) : 1.0;

    detail::parallel_for(points.size(), worker_threads(), [&](std::size_t i) {
        SystemParams params(cfg.n_spins, points[i].alpha, cfg.k, cfg.p, points[i].tau,
                            parse_boundary(cfg));
        const PhaseTable table = build_phase_table(params, parse_coupling(cfg));
        std::vector<EigenstateOverlap> overlaps;
        int sector_id = 0;
        for (const auto& sector : sectors) {
            const DenseUnitary block = sector_block_via_steps(table, sector);
            const EigenSystem sys = diagonalize_floquet(block);
            const Eigen::VectorXcd proj = sector.project(psi0);
            const Eigen::VectorXcd coeffs = sys.eigenvectors.adjoint() * proj;
            for (Eigen::Index c = 0; c < coeffs.size(); ++c)
                overlaps.push_back({std::norm(coeffs[c]), sys.eigenphases[c], sector_id, c});
            ++sector_id;
        }
        points[i].d_eff = effective_dimension(std::move(overlaps), cfg.epsilon, expected_weight);
    });

    const int n = cfg.n_spins;
    RunReport report;
    {
        std::ofstream out(outputs.path("deff_summary.csv"));
        out << "n_spins,alpha,tau,d_eff,dim_pss,dim_bplus\n";
        for (const auto& pt : points)
            out << n << "," << format_value(pt.alpha) << "," << format_value(pt.tau) << ","
                << pt.d_eff << "," << (n + 1) << "," << bit_reversal_even_dim(n) << "\n";
    }
    report.outputs.push_back("deff_summary.csv");

    std::vector<ResultRow> rows;
    for (const auto& pt : points)
        rows.push_back({cfg.experiment, n, pt.alpha, pt.tau, "d_eff",
                        static_cast<double>(pt.d_eff), "mode=" + cfg.deff_mode});
    write_result_rows(rows, outputs.path("results.csv"));
    report.outputs.push_back("results.csv");
    report.notes["decomposition_mode"] = cfg.deff_mode;
    report.notes["epsilon"] = cfg.epsilon;
    return report;
}

/// Paired state-vector and free-fermion traces of <J^2>(n) and S_{N/2}(n)
/// for the nearest-neighbor ring drive from |0...0>.
inline RunReport run_oracle_compare(const ExperimentConfig& cfg, RunOutputs& outputs) {
    detail::guard_evolution(cfg.n_spins);
    if (cfg.n_spins % 2 != 0) throw ConfigError("oracle_compare: n_spins must be even");
    if (cfg.tau_list.size() != 1)
        throw ConfigError("oracle_compare: exactly one tau expected");
    const double tau = cfg.tau_list[0];

    // The comparison is exact only for the ring nearest-neighbor drive from
    // the polar state, so those are forced rather than configurable.
    SystemParams params(cfg.n_spins, 0.0, cfg.k, cfg.p, tau, Boundary::Ring);
    const PhaseTable table = build_phase_table(params, CouplingRange::NearestNeighbor);
    IsingParams ising(cfg.n_spins, cfg.k, cfg.p, tau);

    StateVector psi(cfg.n_spins);
    psi.amp[0] = 1.0;
    const int l_half = cfg.n_spins / 2;
    const std::uint64_t mask = half_chain_mask(l_half);

    std::ofstream out(outputs.path("oracle_compare.csv"));
    out << "step,jsq_ed,jsq_oracle,s_ed,s_oracle,jsq_absdiff,s_absdiff\n";
    double max_jsq_diff = 0.0, max_s_diff = 0.0;
    for (long n = 0; n <= cfg.n_steps; ++n) {
        if (n > 0) floquet_step_inplace(psi, table);
        if (n % cfg.stride != 0 && n != cfg.n_steps) continue;
        const double jsq_ed = expval_jsq(psi);
        const double s_ed = von_neumann_entropy(psi, mask);
        const auto kernel = correlator_kernel(evolve_modes(ising, n), cfg.n_spins - 1);
        const double jsq_orc = jsq_oracle_from_kernel(kernel);
        const double s_orc = entropy_oracle_from_kernel(kernel, l_half);
        const double d_jsq = std::abs(jsq_ed - jsq_orc);
        const double d_s = std::abs(s_ed - s_orc);
        max_jsq_diff = std::max(max_jsq_diff, d_jsq);
        max_s_diff = std::max(max_s_diff, d_s);
        out << n << "," << format_value(jsq_ed) << "," << format_value(jsq_orc) << ","
            << format_value(s_ed) << "," << format_value(s_orc) << "," << format_value(d_jsq)
            << "," << format_value(d_s) << "\n";
    }

    RunReport report;
    report.outputs.push_back("oracle_compare.csv");
    report.notes["max_jsq_absdiff"] = max_jsq_diff;
    report.notes["max_s_absdiff"] = max_s_diff;
    report.notes["tolerance"] = cfg.tolerance;
    report.notes["within_tolerance"] =
        max_jsq_diff <= cfg.tolerance && max_s_diff <= cfg.tolerance;
    return report;
}

/// Closed-form reference values for this N plus Monte Carlo estimates over
/// Haar-random states (full space, and the bit-reversal-even sector for even N).
inline RunReport run_reference_values(const ExperimentConfig& cfg, RunOutputs& outputs) {
    detail::guard_evolution(cfg.n_spins);
    if (cfg.n_spins % 2 != 0)
        throw ConfigError("reference_values: n_spins must be even (half-chain cut)");
    const int n = cfg.n_spins;

    const auto full = random_state_reference(n, cfg.n_samples, cfg.seed, StateRestriction::Full);
    const auto sector =
        random_state_reference(n, cfg.n_samples, cfg.seed, StateRestriction::BitReversalEven);

    std::vector<ResultRow> rows = {
        {cfg.experiment, n, 0, 0, "jsq_pss", ReferenceValues::jsq_pss(n), "closed_form"},
        {cfg.experiment, n, 0, 0, "jsq_rmt", ReferenceValues::jsq_rmt(n), "closed_form"},
        {cfg.experiment, n, 0, 0, "jsq_rmt_bplus", ReferenceValues::jsq_rmt_bit_reversal_even(n),
         "closed_form"},
        {cfg.experiment, n, 0, 0, "s_pss", ReferenceValues::s_pss(n), "closed_form"},
        {cfg.experiment, n, 0, 0, "s_page", ReferenceValues::s_page(n), "closed_form"},
        {cfg.experiment, n, 0, 0, "r_poisson", ReferenceValues::r_poisson, "closed_form"},
        {cfg.experiment, n, 0, 0, "r_coe", ReferenceValues::r_coe, "closed_form"},
        {cfg.experiment, n, 0, 0, "jsq_mc_full", full.jsq_mean, "stderr=" +
                                                                    format_value(full.jsq_stderr)},
        {cfg.experiment, n, 0, 0, "s_half_mc_full", full.entropy_mean,
         "stderr=" + format_value(full.entropy_stderr)},
        {cfg.experiment, n, 0, 0, "jsq_mc_bplus", sector.jsq_mean,
         "stderr=" + format_value(sector.jsq_stderr)},
        {cfg.experiment, n, 0, 0, "s_half_mc_bplus", sector.entropy_mean,
         "stderr=" + format_value(sector.entropy_stderr)},
    };
    write_result_rows(rows, outputs.path("reference_values.csv"));

    RunReport report;
    report.outputs.push_back("reference_values.csv");
    report.notes["n_samples"] = cfg.n_samples;
    return report;
}

/// Dispatch, timing, manifest, and cleanup-on-failure for one run.
inline void run_experiment(const ExperimentConfig& cfg) {
    validate(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    RunOutputs outputs(cfg.output_dir);
    RunReport report;
    try {
        if (cfg.experiment == "time_series") report = run_time_series(cfg, outputs);
        else if (cfg.experiment == "alpha_scan") report = run_alpha_scan(cfg, outputs);
        else if (cfg.experiment == "spectral_scan") report = run_spectral_scan(cfg, outputs);
        else if (cfg.experiment == "deff_scan") report = run_deff_scan(cfg, outputs);
        else if (cfg.experiment == "oracle_compare") report = run_oracle_compare(cfg, outputs);
        else if (cfg.experiment == "reference_values") report = run_reference_values(cfg, outputs);
        else throw ConfigError("unknown experiment '" + cfg.experiment + "'");
    } catch (...) {
        outputs.remove_all();
        throw;
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(cfg, report, elapsed, cfg.output_dir);
}

}  // namespace floq::lab
