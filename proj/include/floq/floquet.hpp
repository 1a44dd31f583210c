#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "floq/errors.hpp"
#include "floq/state.hpp"
#include "floq/system.hpp"
#include "floq/time_series.hpp"

namespace floq {

/// Precomputed diagonal phases for one Floquet period.
///
/// kick_phases[s]     = exp(-i (p tau / 2) sum_b z_b), diagonal in the z basis.
/// coupling_phases[s] = exp(-i (k tau / (4 Kac)) sum_{i!=j} x_i x_j / D_ij^alpha),
///                      the diagonal of the XX exponential in the x basis
///                      (reached by a global Hadamard), with x_b = +1 for bit 0.
struct PhaseTable {
    std::vector<cplx> coupling_phases;
    std::vector<cplx> kick_phases;
    int n_spins = 0;

    std::size_t dim() const { return kick_phases.size(); }
};

inline PhaseTable build_phase_table(const SystemParams& params,
                                    CouplingRange range = CouplingRange::PowerLaw) {
    const int n = params.n_spins();
    const std::size_t dim = std::size_t{1} << n;
    PhaseTable table;
    table.n_spins = n;
    table.coupling_phases.resize(dim);
    table.kick_phases.resize(dim);

    // Pair weights w_ij = D_ij^-alpha (or the bare nearest-neighbor bonds),
    // and the matching rescaling factor.
    std::vector<double> weight(static_cast<std::size_t>(n) * n, 0.0);
    double kac = 0.0;
    if (range == CouplingRange::PowerLaw) {
        kac = params.kac();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j)
                    weight[i * n + j] =
                        std::pow(static_cast<double>(pair_distance(i, j, n, params.boundary())),
                                 -params.alpha());
    } else {
        kac = kac_factor_nn(n, params.boundary());
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j && pair_distance(i, j, n, params.boundary()) == 1)
                    weight[i * n + j] = 1.0;
    }

    const double coupling_scale = params.coupling() * params.period() / (4.0 * kac);
    for (std::size_t s = 0; s < dim; ++s) {
        double pair_sum = 0.0;
        for (int i = 0; i < n; ++i) {
            const int xi = z_sign(s, i);
            for (int j = i + 1; j < n; ++j)
                pair_sum += 2.0 * weight[i * n + j] * xi * z_sign(s, j);
        }
        table.coupling_phases[s] = std::polar(1.0, -coupling_scale * pair_sum);
    }

    const double kick_scale = params.kick() * params.period() / 2.0;
    for (std::size_t s = 0; s < dim; ++s) {
        const double zsum = static_cast<double>(n - 2 * std::popcount(s));
        table.kick_phases[s] = std::polar(1.0, -kick_scale * zsum);
    }
    return table;
}

/// In-place normalized Walsh-Hadamard transform (tensor power of the
/// single-qubit Hadamard). Involutive: applying it twice is the identity.
inline void walsh_hadamard(std::vector<cplx>& amp) {
    const std::size_t dim = amp.size();
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (std::size_t h = 1; h < dim; h <<= 1) {
        for (std::size_t base = 0; base < dim; base += h << 1) {
            for (std::size_t k = base; k < base + h; ++k) {
                const cplx a = amp[k];
                const cplx b = amp[k + h];
                amp[k] = (a + b) * inv_sqrt2;
                amp[k + h] = (a - b) * inv_sqrt2;
            }
        }
    }
}

/// One Floquet period applied in place: kick phases in the z basis, then the
/// coupling phases conjugated by the global Hadamard (the kick exponential
/// sits rightmost in the period, so it acts first). O(N 2^N).
inline void floquet_step_inplace(StateVector& psi, const PhaseTable& table) {
    if (psi.dim() != table.dim())
        throw ConfigError("floquet_step: state dimension does not match phase table");
    auto& amp = psi.amp;
    const std::size_t dim = amp.size();
    for (std::size_t s = 0; s < dim; ++s) amp[s] *= table.kick_phases[s];
    walsh_hadamard(amp);
    for (std::size_t s = 0; s < dim; ++s) amp[s] *= table.coupling_phases[s];
    walsh_hadamard(amp);
}

inline StateVector floquet_step(const StateVector& psi, const PhaseTable& table) {
    StateVector out = psi;
    floquet_step_inplace(out, table);
    return out;
}

/// Tags which basis a dense operator is expressed in.
enum class BasisTag { Computational, Sector };

struct DenseUnitary {
    Eigen::MatrixXcd entries;
    BasisTag basis = BasisTag::Computational;

    /// Frobenius defect of U U^dag - I, normalized by sqrt(dim).
    double unitarity_defect() const {
        const auto dim = entries.rows();
        Eigen::MatrixXcd d = entries * entries.adjoint();
        d.diagonal().array() -= 1.0;
        return d.norm() / std::sqrt(static_cast<double>(dim));
    }
};

inline constexpr int kMaxDenseSpins = 14;

/// Full 2^N x 2^N Floquet matrix, column j = one period applied to basis
/// vector e_j. Guarded: dense storage beyond N=14 is not supported.
inline DenseUnitary dense_unitary(const SystemParams& params,
                                  CouplingRange range = CouplingRange::PowerLaw) {
    const int n = params.n_spins();
    if (n > kMaxDenseSpins)
        throw CapacityError("dense_unitary: N=" + std::to_string(n) + " exceeds dense limit " +
                            std::to_string(kMaxDenseSpins));
    const PhaseTable table = build_phase_table(params, range);
    const std::size_t dim = std::size_t{1} << n;
    DenseUnitary u;
    u.entries.resize(dim, dim);
    StateVector col(n);
    for (std::size_t j = 0; j < dim; ++j) {
        std::fill(col.amp.begin(), col.amp.end(), cplx{0.0, 0.0});
        col.amp[j] = 1.0;
        floquet_step_inplace(col, table);
        for (std::size_t i = 0; i < dim; ++i) u.entries(i, j) = col.amp[i];
    }
    return u;
}

/// Named per-step observable. Called as f(step, state).
struct Observer {
    std::string name;
    std::function<double(long, const StateVector&)> eval;
};

inline constexpr long kRenormalizeInterval = 10000;

/// Apply the Floquet step n_steps times, sampling every `stride` steps (and
/// always at step 0 and the final step). The state is renormalized every 1e4
/// steps; the drift being scrubbed is below 1e-10 in any observable.
/// Observer exceptions are rethrown with the step index attached.
inline TimeSeries evolve_record(StateVector& psi, const PhaseTable& table, long n_steps,
                                long stride, const std::vector<Observer>& observers) {
    if (n_steps < 0) throw ConfigError("evolve_record: n_steps must be >= 0");
    if (stride < 1) throw ConfigError("evolve_record: stride must be >= 1");
    TimeSeries ts;
    for (const auto& obs : observers) ts.names.push_back(obs.name);
    ts.values.resize(observers.size());

    auto sample = [&](long step) {
        ts.steps.push_back(step);
        for (std::size_t i = 0; i < observers.size(); ++i) {
            try {
                ts.values[i].push_back(observers[i].eval(step, psi));
            } catch (const std::exception& e) {
                throw ConsistencyError("observer '" + observers[i].name + "' failed at step " +
                                       std::to_string(step) + ": " + e.what());
            }
        }
    };

    sample(0);
    for (long step = 1; step <= n_steps; ++step) {
        floquet_step_inplace(psi, table);
        if (step % kRenormalizeInterval == 0) psi.normalize();
        if (step % stride == 0 || step == n_steps) sample(step);
    }
    return ts;
}

}  // namespace floq
