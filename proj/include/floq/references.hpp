#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "floq/entropy.hpp"
#include "floq/state.hpp"
#include "floq/symmetries.hpp"

namespace floq {

/// Closed-form reference values the observables are compared against.
struct ReferenceValues {
    /// <J^2> of the maximal-spin (coherent) manifold: N/2 (N/2 + 1).
    static double jsq_pss(int n) { return 0.5 * n * (0.5 * n + 1.0); }
    /// <J^2> of random states in the full Hilbert space: 3N/4.
    static double jsq_rmt(int n) { return 0.75 * n; }
    /// Half-chain entropy of random states in the permutation symmetric
    /// subspace: log2(N/2 + 1) - 2/3 bits.
    static double s_pss(int n) { return std::log2(0.5 * n + 1.0) - 2.0 / 3.0; }
    /// Page value for random pure states: N/2 - 1/(2 ln 2) bits.
    static double s_page(int n) { return 0.5 * n - 0.5 / std::log(2.0); }
    /// <J^2> of random states confined to the bit-reversal-even sector:
    /// (3N/4) (1 + 2^{1-N/2}) / (1 + 2^{-N/2}).
    static double jsq_rmt_bit_reversal_even(int n) {
        const double x = std::pow(2.0, -0.5 * n);
        return 0.75 * n * (1.0 + 2.0 * x) / (1.0 + x);
    }

    static constexpr double r_poisson = 0.386;
    static constexpr double r_coe = 0.529;
};

enum class StateRestriction { Full, BitReversalEven };

struct RandomStateStats {
    double jsq_mean = 0.0;
    double jsq_stderr = 0.0;
    double entropy_mean = 0.0;
    double entropy_stderr = 0.0;
    int n_samples = 0;
};

namespace detail {

/// Per-sample RNG stream: deterministic for (seed, index) and independent of
/// how samples are scheduled across threads.
inline std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{seed, index, std::uint64_t{0x5eed5eed5eed5eedull}};
    return std::mt19937_64(seq);
}

inline void fill_gaussian(std::mt19937_64& rng, cplx* data, std::size_t n) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) data[i] = cplx{gauss(rng), gauss(rng)};
}

}  // namespace detail

/// Sample means of <J^2> and the half-chain entropy over Haar-random unit
/// vectors, either in the full space or in the bit-reversal-even subspace.
inline RandomStateStats random_state_reference(int n_spins, int n_samples, std::uint64_t seed,
                                               StateRestriction restriction) {
    if (restriction == StateRestriction::BitReversalEven && n_spins % 2 != 0)
        throw ConfigError("random_state_reference: bit-reversal sector needs even N");

    SectorBasis even_r = restriction == StateRestriction::BitReversalEven
                             ? build_sector_basis(n_spins, +1, +1)
                             : SectorBasis{};
    SectorBasis odd_r = restriction == StateRestriction::BitReversalEven
                            ? build_sector_basis(n_spins, -1, +1)
                            : SectorBasis{};
    const std::uint64_t mask = half_chain_mask(n_spins / 2);

    double jsq_sum = 0.0, jsq_sq = 0.0, ent_sum = 0.0, ent_sq = 0.0;
    for (int k = 0; k < n_samples; ++k) {
        auto rng = detail::sample_rng(seed, static_cast<std::uint64_t>(k));
        StateVector psi(n_spins);
        if (restriction == StateRestriction::Full) {
            detail::fill_gaussian(rng, psi.amp.data(), psi.dim());
        } else {
            // Gaussian coordinates over the B=+1 basis (both R blocks).
            std::vector<cplx> coords(even_r.dimension() + odd_r.dimension());
            detail::fill_gaussian(rng, coords.data(), coords.size());
            std::size_t pos = 0;
            for (const auto& v : even_r.vectors) {
                psi.amp[v.idx_a] += v.coeff_a * coords[pos];
                if (v.idx_b != v.idx_a) psi.amp[v.idx_b] += v.coeff_b * coords[pos];
                ++pos;
            }
            for (const auto& v : odd_r.vectors) {
                psi.amp[v.idx_a] += v.coeff_a * coords[pos];
                if (v.idx_b != v.idx_a) psi.amp[v.idx_b] += v.coeff_b * coords[pos];
                ++pos;
            }
        }
        psi.normalize();
        const double jsq = expval_jsq(psi);
        const double ent = von_neumann_entropy(psi, mask);
        jsq_sum += jsq;
        jsq_sq += jsq * jsq;
        ent_sum += ent;
        ent_sq += ent * ent;
    }

    RandomStateStats stats;
    stats.n_samples = n_samples;
    stats.jsq_mean = jsq_sum / n_samples;
    stats.entropy_mean = ent_sum / n_samples;
    if (n_samples > 1) {
        const double jsq_var = (jsq_sq - n_samples * stats.jsq_mean * stats.jsq_mean) /
                               (n_samples - 1);
        const double ent_var = (ent_sq - n_samples * stats.entropy_mean * stats.entropy_mean) /
                               (n_samples - 1);
        stats.jsq_stderr = std::sqrt(std::max(0.0, jsq_var) / n_samples);
        stats.entropy_stderr = std::sqrt(std::max(0.0, ent_var) / n_samples);
    }
    return stats;
}

}  // namespace floq
