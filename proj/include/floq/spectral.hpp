#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "floq/errors.hpp"
#include "floq/floquet.hpp"

namespace floq {

/// Eigen-decomposition of a unitary block: phases in (-pi, pi] sorted
/// ascending, eigenvector columns permuted to match.
struct EigenSystem {
    std::vector<double> eigenphases;
    Eigen::MatrixXcd eigenvectors;
    std::string sector_label;

    std::size_t dimension() const { return eigenphases.size(); }
};

inline constexpr double kUnitaryInputTolerance = 1e-8;

/// Decompose a unitary via its Schur form. For a normal matrix the Schur
/// factor T is diagonal, so the (exactly unitary) Schur basis Q is the
/// eigenvector matrix; the off-diagonal residue of T is checked, not assumed.
inline EigenSystem diagonalize_floquet(const DenseUnitary& block,
                                       const std::string& sector_label = "",
                                       bool want_vectors = true) {
    const double defect = block.unitarity_defect();
    if (defect > kUnitaryInputTolerance)
        throw ConsistencyError("diagonalize_floquet: input is not unitary (defect " +
                               std::to_string(defect) + ")");

    const auto dim = block.entries.rows();
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(block.entries, want_vectors);
    if (schur.info() != Eigen::Success)
        throw ConsistencyError("diagonalize_floquet: Schur iteration failed to converge");

    const Eigen::MatrixXcd& t = schur.matrixT();
    double off = 0.0;
    for (Eigen::Index j = 0; j < dim; ++j)
        for (Eigen::Index i = 0; i < j; ++i) off += std::norm(t(i, j));
    if (std::sqrt(off / static_cast<double>(dim)) > 1e-7)
        throw ConsistencyError("diagonalize_floquet: Schur form not diagonal; input not normal");

    std::vector<double> phases(dim);
    for (Eigen::Index i = 0; i < dim; ++i) phases[i] = std::arg(t(i, i));

    std::vector<Eigen::Index> order(dim);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&phases](Eigen::Index a, Eigen::Index b) { return phases[a] < phases[b]; });

    EigenSystem sys;
    sys.sector_label = sector_label;
    sys.eigenphases.resize(dim);
    for (Eigen::Index i = 0; i < dim; ++i) sys.eigenphases[i] = phases[order[i]];
    if (want_vectors) {
        sys.eigenvectors.resize(dim, dim);
        const Eigen::MatrixXcd& q = schur.matrixU();
        for (Eigen::Index i = 0; i < dim; ++i) sys.eigenvectors.col(i) = q.col(order[i]);
    }
    return sys;
}

/// Eigenphases only (skips accumulating the Schur basis).
inline std::vector<double> floquet_eigenphases(const DenseUnitary& block) {
    return diagonalize_floquet(block, "", false).eigenphases;
}

struct SpacingStats {
    std::vector<double> ratios;
    double mean_r = 0.0;
    int merged_levels = 0;  // near-degenerate spacings folded before ratios
};

inline constexpr double kDegenerateSpacing = 1e-12;

/// Consecutive-gap ratios r_n = min(s_n, s_{n-1}) / max(s_n, s_{n-1}) on the
/// circle: the D phases of a D-level block give D spacings (including the
/// wrap-around gap) and D ratios. Spacings below 1e-12 are merged first so
/// solver-resolution degeneracies do not produce spurious zeros.
inline SpacingStats spacing_ratios(const std::vector<double>& eigenphases) {
    if (eigenphases.size() < 3) throw ConfigError("spacing_ratios: need at least 3 levels");
    std::vector<double> phases = eigenphases;
    std::sort(phases.begin(), phases.end());

    const std::size_t d = phases.size();
    std::vector<double> spacings;
    spacings.reserve(d);
    SpacingStats stats;
    for (std::size_t i = 0; i + 1 < d; ++i) {
        const double s = phases[i + 1] - phases[i];
        if (s < kDegenerateSpacing) {
            ++stats.merged_levels;
            continue;
        }
        spacings.push_back(s);
    }
    const double wrap = 2.0 * M_PI - (phases.back() - phases.front());
    if (wrap < kDegenerateSpacing)
        ++stats.merged_levels;
    else
        spacings.push_back(wrap);

    if (spacings.size() < 2)
        throw ConsistencyError("spacing_ratios: fewer than 2 distinct spacings");
    const std::size_t m = spacings.size();
    stats.ratios.reserve(m);
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double a = spacings[i];
        const double b = spacings[(i + 1) % m];  // circular: wrap ratio included
        const double r = std::min(a, b) / std::max(a, b);
        stats.ratios.push_back(r);
        sum += r;
    }
    stats.mean_r = sum / static_cast<double>(m);
    return stats;
}

/// One overlap entry of the initial state with a Floquet eigenstate.
struct EigenstateOverlap {
    double weight = 0.0;  // |c_i|^2
    double phase = 0.0;
    int sector = 0;
    Eigen::Index column = 0;
};

inline constexpr double kCompletenessTolerance = 1e-10;

/// Smallest K such that the K largest overlap weights sum to >= 1 - epsilon.
/// Weights are sorted descending with ties broken by eigenphase ascending.
/// The total weight must match `expected_weight` (1 for a complete basis,
/// the sector weight when the state was projected) to 1e-8.
inline int effective_dimension(std::vector<EigenstateOverlap> overlaps, double epsilon,
                               double expected_weight = 1.0) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw ConfigError("effective_dimension: epsilon must be in (0, 1)");
    double total = 0.0;
    for (const auto& o : overlaps) total += o.weight;
    if (std::abs(total - expected_weight) > 1e-8)
        throw ConsistencyError("effective_dimension: overlap weights sum to " +
                               std::to_string(total) + ", expected " +
                               std::to_string(expected_weight));
    std::sort(overlaps.begin(), overlaps.end(), [](const auto& a, const auto& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        return a.phase < b.phase;
    });
    double acc = 0.0;
    int k = 0;
    for (const auto& o : overlaps) {
        acc += o.weight;
        ++k;
        if (acc >= total - epsilon) return k;
    }
    return k;
}

/// Reference sampler: uniform independent phases (Poisson spectrum).
inline std::vector<double> sample_poisson_phases(int n_levels, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(-M_PI, M_PI);
    std::vector<double> phases(n_levels);
    for (auto& p : phases) p = uni(rng);
    return phases;
}

/// Haar-random unitary via QR of a complex Ginibre matrix with the standard
/// phase fix on the R diagonal.
inline Eigen::MatrixXcd sample_haar_unitary(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXcd g(dim, dim);
    for (int j = 0; j < dim; ++j)
        for (int i = 0; i < dim; ++i) g(i, j) = cplx{gauss(rng), gauss(rng)};
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ();
    Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; ++j) {
        const cplx d = r(j, j);
        q.col(j) *= (std::abs(d) > 0.0) ? d / std::abs(d) : cplx{1.0, 0.0};
    }
    return q;
}

/// Reference sampler: eigenphases of a circular-orthogonal-ensemble draw,
/// U = V^T V with V Haar.
inline std::vector<double> sample_coe_phases(int dim, std::mt19937_64& rng) {
    const Eigen::MatrixXcd v = sample_haar_unitary(dim, rng);
    DenseUnitary u;
    u.entries = v.transpose() * v;
    return floquet_eigenphases(u);
}

}  // namespace floq
