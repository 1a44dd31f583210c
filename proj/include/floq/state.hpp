#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "floq/errors.hpp"

namespace floq {

using cplx = std::complex<double>;

/// Normalized amplitude vector over the computational (z) basis.
///
/// Basis convention, fixed everywhere in this library: bit b of index s is
/// the z-eigenvalue of spin b+1 (so bit 0 is site 1, the leftmost site), and
/// bit value 0 means sigma^z = +1, i.e. the |0> state. With this ordering the
/// site-reversal symmetry is literally the bit reversal of the index.
struct StateVector {
    std::vector<cplx> amp;
    int n_spins = 0;

    StateVector() = default;
    explicit StateVector(int n) : amp(std::size_t{1} << n, cplx{0.0, 0.0}), n_spins(n) {}

    std::size_t dim() const { return amp.size(); }

    double norm_sq() const {
        double s = 0.0;
        for (const auto& a : amp) s += std::norm(a);
        return s;
    }

    void normalize() {
        const double n = std::sqrt(norm_sq());
        if (n <= 0.0) throw ConsistencyError("StateVector: cannot normalize zero vector");
        for (auto& a : amp) a /= n;
    }
};

/// +1 if bit b of s is clear (sigma^z = +1), else -1.
inline int z_sign(std::uint64_t s, int b) { return (s >> b) & 1u ? -1 : 1; }

/// z-magnetization m_s = (N - 2 popcount(s)) / 2 of basis state s.
inline double z_magnetization(std::uint64_t s, int n_spins) {
    return 0.5 * (n_spins - 2 * std::popcount(s));
}

struct CoherentAngles {
    double theta = 0.0;
    double phi = 0.0;
};

/// Product state with every spin pointing along (theta, phi):
/// per site, cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>.
inline StateVector coherent_state(int n_spins, CoherentAngles angles) {
    StateVector psi(n_spins);
    const double c = std::cos(angles.theta / 2.0);
    const cplx s = std::polar(std::sin(angles.theta / 2.0), angles.phi);
    const std::size_t dim = psi.dim();
    for (std::size_t idx = 0; idx < dim; ++idx) {
        cplx a{1.0, 0.0};
        for (int b = 0; b < n_spins; ++b) a *= ((idx >> b) & 1u) ? s : cplx{c, 0.0};
        psi.amp[idx] = a;
    }
    // Product of unit-norm single-site states; renormalize to kill round-off.
    psi.normalize();
    return psi;
}

enum class Axis { X, Y, Z };

/// Collective spin operator J_axis = sum_i sigma_i^axis / 2 applied to psi.
/// The result is in general unnormalized.
inline StateVector apply_collective(const StateVector& psi, Axis axis) {
    const int n = psi.n_spins;
    const std::size_t dim = psi.dim();
    StateVector out(n);
    switch (axis) {
        case Axis::Z:
            for (std::size_t s = 0; s < dim; ++s) out.amp[s] = z_magnetization(s, n) * psi.amp[s];
            break;
        case Axis::X:
            for (std::size_t s = 0; s < dim; ++s) {
                cplx acc{0.0, 0.0};
                for (int b = 0; b < n; ++b) acc += psi.amp[s ^ (std::size_t{1} << b)];
                out.amp[s] = 0.5 * acc;
            }
            break;
        case Axis::Y:
            // sigma^y |0> = i|1>, sigma^y |1> = -i|0>: the amplitude arriving
            // at s from s^e_b carries +i when bit b of s is set, else -i.
            for (std::size_t s = 0; s < dim; ++s) {
                cplx acc{0.0, 0.0};
                for (int b = 0; b < n; ++b) {
                    const cplx src = psi.amp[s ^ (std::size_t{1} << b)];
                    acc += ((s >> b) & 1u) ? cplx{-src.imag(), src.real()}
                                           : cplx{src.imag(), -src.real()};
                }
                out.amp[s] = 0.5 * acc;
            }
            break;
    }
    return out;
}

/// <psi|J^2|psi> computed as sum_a ||J_a psi||^2 (fused, no temporaries).
inline double expval_jsq(const StateVector& psi) {
    const int n = psi.n_spins;
    const std::size_t dim = psi.dim();
    double total = 0.0;
    for (std::size_t s = 0; s < dim; ++s) {
        const double m = z_magnetization(s, n);
        total += m * m * std::norm(psi.amp[s]);
    }
    for (std::size_t s = 0; s < dim; ++s) {
        cplx accx{0.0, 0.0};
        cplx accy{0.0, 0.0};
        for (int b = 0; b < n; ++b) {
            const cplx src = psi.amp[s ^ (std::size_t{1} << b)];
            accx += src;
            accy += ((s >> b) & 1u) ? cplx{-src.imag(), src.real()}
                                    : cplx{src.imag(), -src.real()};
        }
        total += 0.25 * (std::norm(accx) + std::norm(accy));
    }
    return total;
}

inline cplx inner(const StateVector& a, const StateVector& b) {
    cplx s{0.0, 0.0};
    for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a.amp[i]) * b.amp[i];
    return s;
}

}  // namespace floq
