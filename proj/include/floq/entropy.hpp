#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "floq/errors.hpp"
#include "floq/state.hpp"

namespace floq {

/// Schmidt values below this are treated as exact zeros in the entropy sum.
inline constexpr double kSchmidtCutoff = 1e-12;

/// Bitmask selecting the first n_a sites (bits 0..n_a-1).
inline std::uint64_t half_chain_mask(int n_a) { return (std::uint64_t{1} << n_a) - 1; }

/// Von Neumann entropy, in bits, of the subsystem selected by `mask`.
///
/// The amplitude vector is reshaped into a 2^{N_A} x 2^{N_B} matrix M with
/// the masked bits packed into the row index; the entropy is
/// -sum_i lambda_i log2 lambda_i over the eigenvalues lambda_i = sigma_i^2
/// of M M^dag (the squared Schmidt/singular values), with 0 log 0 = 0.
inline double von_neumann_entropy(const StateVector& psi, std::uint64_t mask) {
    const int n = psi.n_spins;
    const std::uint64_t full = (n == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
    mask &= full;
    if (mask == 0 || mask == full)
        throw ConfigError("von_neumann_entropy: mask must select a proper subsystem");

    const int n_a = std::popcount(mask);
    const int n_b = n - n_a;
    const std::size_t dim_a = std::size_t{1} << n_a;
    const std::size_t dim_b = std::size_t{1} << n_b;

    // Gather the masked bits into the row index. When the mask is the
    // contiguous low block this is a straight reinterpret of the amplitudes.
    Eigen::MatrixXcd m(dim_a, dim_b);
    if (mask == half_chain_mask(n_a)) {
        for (std::size_t b = 0; b < dim_b; ++b)
            for (std::size_t a = 0; a < dim_a; ++a) m(a, b) = psi.amp[a | (b << n_a)];
    } else {
        std::vector<int> bits_a, bits_b;
        for (int b = 0; b < n; ++b) ((mask >> b) & 1u ? bits_a : bits_b).push_back(b);
        for (std::size_t s = 0; s < psi.dim(); ++s) {
            std::size_t ia = 0, ib = 0;
            for (std::size_t k = 0; k < bits_a.size(); ++k) ia |= ((s >> bits_a[k]) & 1u) << k;
            for (std::size_t k = 0; k < bits_b.size(); ++k) ib |= ((s >> bits_b[k]) & 1u) << k;
            m(ia, ib) = psi.amp[s];
        }
    }

    // Eigenvalues of the smaller Gram matrix are the squared Schmidt values.
    Eigen::MatrixXcd gram;
    if (dim_a <= dim_b)
        gram.noalias() = m * m.adjoint();
    else
        gram.noalias() = m.adjoint() * m;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(gram, Eigen::EigenvaluesOnly);

    double entropy = 0.0;
    for (double lambda : solver.eigenvalues()) {
        if (lambda < kSchmidtCutoff) continue;
        entropy -= lambda * std::log2(lambda);
    }
    return entropy;
}

}  // namespace floq
