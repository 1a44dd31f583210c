#pragma once

// Test-only oracles: dense Pauli algebra, Jordan-Wigner operator matrices and
// a natural-order Wick/Pfaffian evaluator. Everything here is built by a
// route independent of the library code it checks (explicit matrices and
// brute-force sums), so it stays deliberately naive and small-N.

#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "floq/kicked_ising.hpp"
#include "floq/pfaffian.hpp"
#include "floq/state.hpp"

namespace edo {

using floq::cplx;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline Matrix pauli(floq::Axis axis) {
    Matrix m(2, 2);
    switch (axis) {
        case floq::Axis::X: m << 0, 1, 1, 0; break;
        case floq::Axis::Y: m << 0, cplx{0, -1}, cplx{0, 1}, 0; break;
        case floq::Axis::Z: m << 1, 0, 0, -1; break;
    }
    return m;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// op acting on bit `site` (0-based; bit 0 is the lowest index bit).
inline Matrix site_operator(int n_spins, int site, const Matrix& op) {
    Matrix m = Matrix::Identity(1, 1);
    // kron(high bits, ..., low bits): build from bit n-1 down to bit 0
    for (int b = n_spins - 1; b >= 0; --b)
        m = kron(m, b == site ? op : Matrix::Identity(2, 2));
    return m;
}

inline Matrix collective_spin(int n_spins, floq::Axis axis) {
    const std::size_t dim = std::size_t{1} << n_spins;
    Matrix j = Matrix::Zero(dim, dim);
    for (int b = 0; b < n_spins; ++b) j += 0.5 * site_operator(n_spins, b, pauli(axis));
    return j;
}

inline Matrix jsq_matrix(int n_spins) {
    const std::size_t dim = std::size_t{1} << n_spins;
    Matrix j2 = Matrix::Zero(dim, dim);
    for (auto axis : {floq::Axis::X, floq::Axis::Y, floq::Axis::Z}) {
        const Matrix j = collective_spin(n_spins, axis);
        j2 += j * j;
    }
    return j2;
}

inline Vector to_eigen(const floq::StateVector& psi) {
    return Eigen::Map<const Vector>(psi.amp.data(), psi.amp.size());
}

/// sigma^a on one site applied through bit operations (no matrices), so it
/// also works at N = 14.
inline floq::StateVector apply_pauli(const floq::StateVector& psi, int site, floq::Axis axis) {
    floq::StateVector out(psi.n_spins);
    const std::size_t dim = psi.dim();
    const std::size_t bit = std::size_t{1} << site;
    switch (axis) {
        case floq::Axis::X:
            for (std::size_t s = 0; s < dim; ++s) out.amp[s] = psi.amp[s ^ bit];
            break;
        case floq::Axis::Y:
            for (std::size_t s = 0; s < dim; ++s) {
                const cplx src = psi.amp[s ^ bit];
                out.amp[s] = (s & bit) ? cplx{-src.imag(), src.real()}
                                       : cplx{src.imag(), -src.real()};
            }
            break;
        case floq::Axis::Z:
            for (std::size_t s = 0; s < dim; ++s)
                out.amp[s] = (s & bit) ? -psi.amp[s] : psi.amp[s];
            break;
    }
    return out;
}

/// <psi| sigma_i^a sigma_j^a |psi> (sites 0-based).
inline cplx pauli_correlator(const floq::StateVector& psi, int i, int j, floq::Axis axis) {
    const auto tmp = apply_pauli(apply_pauli(psi, j, axis), i, axis);
    return floq::inner(psi, tmp);
}

/// Jordan-Wigner string operators as dense matrices (0-based sites):
///   A_b = -sigma_b^x prod_{j<b} sigma_j^z,   B_b = i sigma_b^y prod_{j<b} sigma_j^z,
/// giving c_b = (A_b - B_b)/2 and c_b^dag = (A_b + B_b)/2.
struct JwOperators {
    std::vector<Matrix> a;
    std::vector<Matrix> b;
    std::vector<Matrix> c;
    std::vector<Matrix> cdag;

    explicit JwOperators(int n_spins) {
        const std::size_t dim = std::size_t{1} << n_spins;
        Matrix string = Matrix::Identity(dim, dim);
        for (int site = 0; site < n_spins; ++site) {
            const Matrix ax = site_operator(n_spins, site, pauli(floq::Axis::X));
            const Matrix ay = site_operator(n_spins, site, pauli(floq::Axis::Y));
            a.push_back(-ax * string);
            b.push_back(cplx{0, 1} * ay * string);
            c.push_back(0.5 * (a.back() - b.back()));
            cdag.push_back(0.5 * (a.back() + b.back()));
            string = site_operator(n_spins, site, pauli(floq::Axis::Z)) * string;
        }
    }
};

/// Fermionic correlators straight from the state vector:
/// C_ij = <c_i^dag c_j>, F_ij = <c_i^dag c_j^dag>.
inline void ed_correlators(const JwOperators& jw, const Vector& psi, Matrix& c_out,
                           Matrix& f_out) {
    const int n = static_cast<int>(jw.c.size());
    c_out.resize(n, n);
    f_out.resize(n, n);
    for (int i = 0; i < n; ++i) {
        const Vector bra = jw.c[i] * psi;  // <psi| c_i^dag ... = (c_i |psi>)^dag ...
        for (int j = 0; j < n; ++j) {
            c_out(i, j) = bra.dot(jw.c[j] * psi);
            f_out(i, j) = bra.dot(jw.cdag[j] * psi);
        }
    }
}

/// Natural-order Wick contraction: the expectation of an ordered string of
/// A/B operators equals the Pfaffian of the matrix of ordered pair
/// contractions, with no permutation bookkeeping at all. Used to cross-check
/// the sorted-block assembly in the library.
struct StringOp {
    bool is_a;  // A if true, B if false
    int site;   // 1-based, matching the library's spin_correlator contract
};

inline cplx natural_order_pfaffian(const floq::CorrelatorKernel& kernel,
                                   const std::vector<StringOp>& ops) {
    const int m = static_cast<int>(ops.size());
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(m, m);
    for (int k = 0; k < m; ++k) {
        for (int l = k + 1; l < m; ++l) {
            cplx val;
            const int u = ops[k].site, v = ops[l].site;
            if (ops[k].is_a && ops[l].is_a) {
                val = cplx{0.0, 2.0 * kernel.f_at(v - u).imag()};
            } else if (!ops[k].is_a && !ops[l].is_a) {
                val = cplx{0.0, 2.0 * kernel.f_at(v - u).imag()};
            } else if (ops[k].is_a) {  // <A_u B_v>
                val = 2.0 * kernel.f_at(v - u).real() - 2.0 * kernel.c_at(v - u) +
                      (u == v ? 1.0 : 0.0);
            } else {  // <B_u A_v> = -<A_v B_u> ({A, B} vanishes on and off site)
                val = -(2.0 * kernel.f_at(u - v).real() - 2.0 * kernel.c_at(u - v) +
                        (u == v ? 1.0 : 0.0));
            }
            g(k, l) = val;
            g(l, k) = -val;
        }
    }
    return floq::pfaffian(g);
}

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline floq::StateVector random_state(int n_spins, std::mt19937_64& gen) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    floq::StateVector psi(n_spins);
    for (auto& a : psi.amp) a = cplx{gauss(gen), gauss(gen)};
    psi.normalize();
    return psi;
}

}  // namespace edo
