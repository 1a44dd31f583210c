#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "floq/errors.hpp"
#include "floq/floquet.hpp"
#include "floq/state.hpp"

namespace floq {

/// Diagonal of the spin-flip parity R = exp(-i pi J_z): entry s is
/// e^{-i pi m_s} with m_s the z-magnetization. For even N these are +-1.
inline std::vector<cplx> z_parity_diagonal(int n_spins) {
    const std::size_t dim = std::size_t{1} << n_spins;
    std::vector<cplx> diag(dim);
    for (std::size_t s = 0; s < dim; ++s)
        diag[s] = std::polar(1.0, -M_PI * z_magnetization(s, n_spins));
    return diag;
}

/// Index permutation exchanging bit b with bit N-1-b (site i with N+1-i).
/// An involution; fixed points are the palindromic indices.
inline std::vector<std::uint64_t> bit_reversal_permutation(int n_spins) {
    const std::size_t dim = std::size_t{1} << n_spins;
    std::vector<std::uint64_t> perm(dim);
    for (std::size_t s = 0; s < dim; ++s) {
        std::uint64_t r = 0;
        for (int b = 0; b < n_spins; ++b)
            if ((s >> b) & 1u) r |= std::uint64_t{1} << (n_spins - 1 - b);
        perm[s] = r;
    }
    return perm;
}

/// Orthonormal basis of one joint (R, bit-reversal) symmetry sector, stored
/// sparsely: every basis vector touches one or two computational states.
struct SectorBasis {
    struct Vector {
        std::uint64_t idx_a = 0;
        std::uint64_t idx_b = 0;  // == idx_a for palindromic orbits
        double coeff_a = 1.0;
        double coeff_b = 0.0;
    };

    int n_spins = 0;
    int parity_r = +1;  // eigenvalue of the literal diagonal e^{-i pi m}
    int parity_b = +1;  // bit-reversal eigenvalue
    std::vector<Vector> vectors;

    std::size_t dimension() const { return vectors.size(); }

    /// Expand sector coordinates into a full 2^N amplitude vector.
    StateVector to_full(const Eigen::VectorXcd& coords) const {
        StateVector psi(n_spins);
        for (std::size_t k = 0; k < vectors.size(); ++k) {
            const auto& v = vectors[k];
            psi.amp[v.idx_a] += v.coeff_a * coords[k];
            if (v.idx_b != v.idx_a) psi.amp[v.idx_b] += v.coeff_b * coords[k];
        }
        return psi;
    }

    /// Project a full vector onto sector coordinates.
    Eigen::VectorXcd project(const StateVector& psi) const {
        Eigen::VectorXcd coords(vectors.size());
        for (std::size_t k = 0; k < vectors.size(); ++k) {
            const auto& v = vectors[k];
            cplx c = v.coeff_a * psi.amp[v.idx_a];
            if (v.idx_b != v.idx_a) c += v.coeff_b * psi.amp[v.idx_b];
            coords[k] = c;
        }
        return coords;
    }
};

/// Closed-form dimension of the bit-reversal-even subspace (both R sectors).
inline std::size_t bit_reversal_even_dim(int n_spins) {
    return (std::size_t{1} << (n_spins - 1)) + (std::size_t{1} << (n_spins / 2 - 1));
}

/// Build the joint sector basis from bit-reversal orbits: a palindromic index
/// is itself a B=+1 vector, a two-element orbit {s, rev(s)} yields
/// (|s> +- |rev s>)/sqrt(2) for B = +-1. Both members share popcount, so the
/// (diagonal) R eigenvalue is well defined per orbit and filtering by it
/// needs no re-orthogonalization. Only even N is supported.
inline SectorBasis build_sector_basis(int n_spins, int parity_r, int parity_b) {
    if (n_spins % 2 != 0)
        throw ConfigError("build_sector_basis: only even spin counts are supported");
    if ((parity_r != 1 && parity_r != -1) || (parity_b != 1 && parity_b != -1))
        throw ConfigError("build_sector_basis: parities must be +-1");

    const auto perm = bit_reversal_permutation(n_spins);
    const std::size_t dim = std::size_t{1} << n_spins;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

    SectorBasis basis;
    basis.n_spins = n_spins;
    basis.parity_r = parity_r;
    basis.parity_b = parity_b;

    for (std::size_t s = 0; s < dim; ++s) {
        const std::uint64_t r = perm[s];
        if (r < s) continue;  // visit each orbit once, at its smaller index
        // m is integer for even N, so the R eigenvalue is (-1)^m.
        const int m = (n_spins - 2 * std::popcount(s)) / 2;
        const int r_eig = (m % 2 == 0) ? 1 : -1;
        if (r_eig != parity_r) continue;
        if (r == s) {
            if (parity_b == 1) basis.vectors.push_back({s, s, 1.0, 0.0});
        } else {
            basis.vectors.push_back(
                {s, r, inv_sqrt2, parity_b == 1 ? inv_sqrt2 : -inv_sqrt2});
        }
    }
    return basis;
}

/// Sparse triplet (row, col, value) CSV export of the basis matrix, one row
/// per nonzero, for external verification.
inline void write_sector_basis_csv(const SectorBasis& basis, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    out << "row,col,value\n";
    for (std::size_t k = 0; k < basis.vectors.size(); ++k) {
        const auto& v = basis.vectors[k];
        out << v.idx_a << "," << k << "," << format_value(v.coeff_a) << "\n";
        if (v.idx_b != v.idx_a)
            out << v.idx_b << "," << k << "," << format_value(v.coeff_b) << "\n";
    }
}

/// Frobenius defect (normalized by sqrt(dim)) of [U, R] for diagonal R.
inline double diagonal_commutator_defect(const Eigen::MatrixXcd& u, const std::vector<cplx>& diag) {
    const auto dim = u.rows();
    double acc = 0.0;
    for (Eigen::Index j = 0; j < dim; ++j)
        for (Eigen::Index i = 0; i < dim; ++i)
            acc += std::norm(u(i, j) * (diag[j] - diag[i]));
    return std::sqrt(acc / static_cast<double>(dim));
}

/// Frobenius defect (normalized by sqrt(dim)) of [U, P] for permutation P.
inline double permutation_commutator_defect(const Eigen::MatrixXcd& u,
                                            const std::vector<std::uint64_t>& perm) {
    const auto dim = u.rows();
    double acc = 0.0;
    for (Eigen::Index j = 0; j < dim; ++j)
        for (Eigen::Index i = 0; i < dim; ++i) {
            // (U P)_ij = U_{i, perm(j)}, (P U)_ij = U_{perm(i), j}  (P symmetric)
            const cplx d = u(i, perm[j]) - u(perm[i], j);
            acc += std::norm(d);
        }
    return std::sqrt(acc / static_cast<double>(dim));
}

inline constexpr double kCommutatorTolerance = 1e-8;

/// V^dag U V in the sector basis. U must commute with both symmetries; the
/// commutator defects are checked first and a violation is an error carrying
/// the defect norm.
inline DenseUnitary project_unitary(const DenseUnitary& u, const SectorBasis& sector) {
    const std::size_t full_dim = std::size_t{1} << sector.n_spins;
    if (static_cast<std::size_t>(u.entries.rows()) != full_dim)
        throw ConfigError("project_unitary: dimension mismatch with sector basis");

    const double defect_r =
        diagonal_commutator_defect(u.entries, z_parity_diagonal(sector.n_spins));
    if (defect_r > kCommutatorTolerance)
        throw SymmetryViolationError("project_unitary: U does not commute with spin-flip parity",
                                     defect_r);
    const double defect_b =
        permutation_commutator_defect(u.entries, bit_reversal_permutation(sector.n_spins));
    if (defect_b > kCommutatorTolerance)
        throw SymmetryViolationError("project_unitary: U does not commute with bit reversal",
                                     defect_b);

    const std::size_t dim = sector.dimension();
    // W = U V, columns gathered through the sparse basis.
    Eigen::MatrixXcd w(full_dim, dim);
    for (std::size_t k = 0; k < dim; ++k) {
        const auto& v = sector.vectors[k];
        w.col(k) = v.coeff_a * u.entries.col(v.idx_a);
        if (v.idx_b != v.idx_a) w.col(k) += v.coeff_b * u.entries.col(v.idx_b);
    }
    DenseUnitary block;
    block.basis = BasisTag::Sector;
    block.entries.resize(dim, dim);
    for (std::size_t m = 0; m < dim; ++m) {
        const auto& v = sector.vectors[m];
        for (std::size_t k = 0; k < dim; ++k) {
            cplx val = v.coeff_a * w(v.idx_a, k);
            if (v.idx_b != v.idx_a) val += v.coeff_b * w(v.idx_b, k);
            block.entries(m, k) = val;
        }
    }
    return block;
}

/// Sector block built by applying the fast Floquet step to each sparse basis
/// vector, avoiding the full 2^N x 2^N matrix. Commutation with both
/// symmetries is verified on a few random vectors before building.
inline DenseUnitary sector_block_via_steps(const PhaseTable& table, const SectorBasis& sector,
                                           int n_probe_vectors = 8) {
    const int n = sector.n_spins;
    const std::size_t full_dim = std::size_t{1} << n;
    if (table.dim() != full_dim)
        throw ConfigError("sector_block_via_steps: table/sector dimension mismatch");

    // Randomized commutation probe: compare U S psi against S U psi.
    const auto parity = z_parity_diagonal(n);
    const auto perm = bit_reversal_permutation(n);
    std::uint64_t rng_state = 0x9e3779b97f4a7c15ull ^ (std::uint64_t(n) << 32);
    auto next_u01 = [&rng_state]() {
        rng_state ^= rng_state << 13;
        rng_state ^= rng_state >> 7;
        rng_state ^= rng_state << 17;
        return static_cast<double>(rng_state >> 11) / 9007199254740992.0;
    };
    for (int probe = 0; probe < n_probe_vectors; ++probe) {
        StateVector psi(n);
        for (auto& a : psi.amp) a = cplx{next_u01() - 0.5, next_u01() - 0.5};
        psi.normalize();
        StateVector s_psi(n);
        for (std::size_t i = 0; i < full_dim; ++i) s_psi.amp[i] = parity[i] * psi.amp[i];
        StateVector u_s = floquet_step(s_psi, table);
        StateVector u_psi = floquet_step(psi, table);
        double defect = 0.0;
        for (std::size_t i = 0; i < full_dim; ++i)
            defect += std::norm(u_s.amp[i] - parity[i] * u_psi.amp[i]);
        if (std::sqrt(defect) > kCommutatorTolerance)
            throw SymmetryViolationError("sector_block_via_steps: spin-flip parity violated",
                                         std::sqrt(defect));
        for (std::size_t i = 0; i < full_dim; ++i) s_psi.amp[perm[i]] = psi.amp[i];
        u_s = floquet_step(s_psi, table);
        defect = 0.0;
        for (std::size_t i = 0; i < full_dim; ++i)
            defect += std::norm(u_s.amp[perm[i]] - u_psi.amp[i]);
        if (std::sqrt(defect) > kCommutatorTolerance)
            throw SymmetryViolationError("sector_block_via_steps: bit reversal violated",
                                         std::sqrt(defect));
    }

    const std::size_t dim = sector.dimension();
    DenseUnitary block;
    block.basis = BasisTag::Sector;
    block.entries.resize(dim, dim);
    StateVector col(n);
    for (std::size_t k = 0; k < dim; ++k) {
        const auto& v = sector.vectors[k];
        std::fill(col.amp.begin(), col.amp.end(), cplx{0.0, 0.0});
        col.amp[v.idx_a] = v.coeff_a;
        if (v.idx_b != v.idx_a) col.amp[v.idx_b] = v.coeff_b;
        floquet_step_inplace(col, table);
        block.entries.col(k) = sector.project(col);
    }
    return block;
}

/// Weight ||P_{B+} psi||^2 of a state in the bit-reversal-even subspace,
/// via <psi|P|psi> = (1 + <psi|B|psi>)/2. Spin coherent states give 1.
inline double bit_reversal_even_weight(const StateVector& psi) {
    const auto perm = bit_reversal_permutation(psi.n_spins);
    cplx overlap{0.0, 0.0};
    for (std::size_t s = 0; s < psi.dim(); ++s)
        overlap += std::conj(psi.amp[s]) * psi.amp[perm[s]];
    return 0.5 * (1.0 + overlap.real());
}

}  // namespace floq
