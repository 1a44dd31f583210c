#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "floq/errors.hpp"
#include "floq/pfaffian.hpp"
#include "floq/state.hpp"
#include "floq/system.hpp"

namespace floq {

/// Nearest-neighbor kicked chain on a ring (the infinite-power-law limit),
/// solvable through Jordan-Wigner free fermions. The effective couplings are
/// J = k / (2 Kac) with Kac = 2N/(N-1), and B = p/2.
struct IsingParams {
    int n_spins;
    double k;
    double p;
    double tau;

    IsingParams(int n, double coupling_k, double kick_p, double period_tau)
        : n_spins(n), k(coupling_k), p(kick_p), tau(period_tau) {
        if (n < 2 || n % 2 != 0)
            throw ConfigError("IsingParams: need an even number of spins >= 2");
        if (!(period_tau > 0.0)) throw ConfigError("IsingParams: period must be positive");
    }

    double j_eff() const { return k / (2.0 * kac_factor_nn(n_spins, Boundary::Ring)); }
    double b_eff() const { return p / 2.0; }
};

/// Antiperiodic-sector quasi-momenta q_m = (2m-1) pi / N, m = 1..N/2. The
/// initial state |0...0> is the fermion vacuum with even parity, and the
/// whole evolution stays in this sector.
inline std::vector<double> ising_momenta(int n_spins) {
    std::vector<double> q(n_spins / 2);
    for (int m = 1; m <= n_spins / 2; ++m)
        q[m - 1] = (2.0 * m - 1.0) * M_PI / n_spins;
    return q;
}

/// One-period evolution restricted to the two-dimensional (q, -q) pair
/// subspace, in the (pair-excited, vacuum) basis, with the per-mode global
/// phase dropped (it cancels in every correlator). Kick acts first.
inline Eigen::Matrix2cd ising_mode_matrix(const IsingParams& params, double q) {
    const double jt = 2.0 * params.j_eff() * params.tau;
    const double bt = 2.0 * params.b_eff() * params.tau;
    const cplx kick_phase = std::polar(1.0, bt);
    const cplx alpha = kick_phase * cplx{std::cos(jt), -std::cos(q) * std::sin(jt)};
    const cplx beta = -kick_phase * std::sin(q) * std::sin(jt);
    Eigen::Matrix2cd u;
    u << alpha, -std::conj(beta), beta, std::conj(alpha);
    return u;
}

/// Pair-subspace amplitudes at one time: |psi_q> = u |pair> + v |vacuum>.
struct ModeAmplitudes {
    double q = 0.0;
    double theta = 0.0;
    cplx u{0.0, 0.0};
    cplx v{1.0, 0.0};
};

inline constexpr double kResonantSinTheta = 1e-9;

/// Closed form for the n-th matrix power acting on (0, 1): with
/// cos(theta_q) = cos(2Bt) cos(2Jt) + cos(q) sin(2Bt) sin(2Jt),
///   u_q(n) = e^{-2iBt} sin(q) sin(2Jt) * sin(n theta)/sin(theta)
///   v_q(n) = cos(n theta) + i [cos(q) cos(2Bt) sin(2Jt) - sin(2Bt) cos(2Jt)]
///            * sin(n theta)/sin(theta).
/// At resonant modes (sin theta -> 0) the ratio is replaced by its limit
/// n cos(theta)^{n-1} instead of perturbing q.
inline ModeAmplitudes mode_evolution(const IsingParams& params, double q, long n) {
    const double jt = 2.0 * params.j_eff() * params.tau;
    const double bt = 2.0 * params.b_eff() * params.tau;
    const double cos_theta = std::cos(bt) * std::cos(jt) + std::cos(q) * std::sin(bt) * std::sin(jt);
    const double clamped = std::clamp(cos_theta, -1.0, 1.0);
    const double theta = std::acos(clamped);
    const double sin_theta = std::sin(theta);

    double ratio;  // sin(n theta) / sin(theta)
    double cos_n;
    if (sin_theta < kResonantSinTheta) {
        // theta at 0 or pi: sin(n theta)/sin(theta) -> n sign^{n-1}
        const double sign = clamped >= 0.0 ? 1.0 : -1.0;
        ratio = static_cast<double>(n);
        if (sign < 0.0 && n % 2 == 0) ratio = -ratio;
        cos_n = (n % 2 == 0) ? 1.0 : sign;
    } else {
        ratio = std::sin(n * theta) / sin_theta;
        cos_n = std::cos(n * theta);
    }

    ModeAmplitudes amp;
    amp.q = q;
    amp.theta = theta;
    amp.u = std::polar(1.0, -bt) * (std::sin(q) * std::sin(jt) * ratio);
    amp.v = cplx{cos_n, (std::cos(q) * std::cos(bt) * std::sin(jt) - std::sin(bt) * std::cos(jt)) *
                            ratio};
    return amp;
}

struct ModeSet {
    std::vector<ModeAmplitudes> modes;
    int n_spins = 0;
    long step = 0;
};

inline ModeSet evolve_modes(const IsingParams& params, long n) {
    ModeSet set;
    set.n_spins = params.n_spins;
    set.step = n;
    for (double q : ising_momenta(params.n_spins)) set.modes.push_back(mode_evolution(params, q, n));
    return set;
}

/// Translation-invariant correlator profiles:
///   c(d) = <c_i^dag c_{i+d}> = (2/N) sum_{q>0} |u_q|^2 cos(q d)   (real, even)
///   f(d) = <c_i^dag c_{i+d}^dag> = (2i/N) sum_{q>0} u_q^* v_q sin(q d)  (odd)
struct CorrelatorKernel {
    std::vector<double> c;  // d = 0 .. max_d
    std::vector<cplx> f;
    int n_spins = 0;
    long step = 0;

    double c_at(int d) const { return c[std::abs(d)]; }
    cplx f_at(int d) const { return d >= 0 ? f[d] : -f[-d]; }
};

inline CorrelatorKernel correlator_kernel(const ModeSet& set, int max_d) {
    CorrelatorKernel kernel;
    kernel.n_spins = set.n_spins;
    kernel.step = set.step;
    kernel.c.resize(max_d + 1, 0.0);
    kernel.f.resize(max_d + 1, cplx{0.0, 0.0});
    const double scale = 2.0 / set.n_spins;
    for (int d = 0; d <= max_d; ++d) {
        double c_acc = 0.0;
        cplx uv_acc{0.0, 0.0};
        for (const auto& mode : set.modes) {
            c_acc += std::norm(mode.u) * std::cos(mode.q * d);
            uv_acc += std::conj(mode.u) * mode.v * std::sin(mode.q * d);
        }
        kernel.c[d] = scale * c_acc;
        kernel.f[d] = cplx{0.0, scale} * uv_acc;
    }
    return kernel;
}

/// L x L fermionic correlation matrices C_ij = <c_i^dag c_j>,
/// F_ij = <c_i^dag c_j^dag>.
struct CorrelatorPair {
    Eigen::MatrixXcd c;
    Eigen::MatrixXcd f;
    long step = 0;
};

inline CorrelatorPair correlators(const IsingParams& params, long n, int l) {
    if (l > params.n_spins) throw ConfigError("correlators: subsystem exceeds chain length");
    const auto kernel = correlator_kernel(evolve_modes(params, n), l > 0 ? l - 1 : 0);
    CorrelatorPair pair;
    pair.step = n;
    pair.c.resize(l, l);
    pair.f.resize(l, l);
    for (int i = 0; i < l; ++i) {
        for (int j = 0; j < l; ++j) {
            pair.c(i, j) = kernel.c_at(i - j);
            pair.f(i, j) = kernel.f_at(j - i);
        }
    }
    return pair;
}

namespace detail {

// Pair contractions of the string operators A_j = c_j^dag + c_j and
// B_j = c_j^dag - c_j in a translation-invariant state with real C:
//   <A_u A_v> = <B_u B_v> = 2i Im f(v-u)          (u != v)
//   <A_u B_v> = 2 Re f(v-u) - 2 c(v-u) + delta_uv
inline cplx contract_aa(const CorrelatorKernel& k, int u, int v) {
    return cplx{0.0, 2.0 * k.f_at(v - u).imag()};
}
inline cplx contract_ab(const CorrelatorKernel& k, int u, int v) {
    return 2.0 * k.f_at(v - u).real() - 2.0 * k.c_at(v - u) + (u == v ? 1.0 : 0.0);
}

/// Pfaffian of the sorted-block contraction matrix
///   M = [[X, Z], [-Z^T, Y]],  X_mn = <A_{a_m} A_{a_n}>, Z_mn = <A_{a_m} B_{b_n}>,
///   Y_mn = <B_{b_m} B_{b_n}>
/// for A-sites a_m = a0 + m and B-sites b_n = b0 + n (m, n = 0..r-1).
inline cplx string_pfaffian(const CorrelatorKernel& kernel, int r, int a0, int b0) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2 * r, 2 * r);
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < r; ++j) {
            if (i != j) {
                const cplx aa = contract_aa(kernel, a0 + i, a0 + j);
                const cplx bb = contract_aa(kernel, b0 + i, b0 + j);
                m(i, j) = aa;
                m(r + i, r + j) = bb;
            }
            const cplx ab = contract_ab(kernel, a0 + i, b0 + j);
            m(i, r + j) = ab;
            m(r + j, i) = -ab;
        }
    }
    return pfaffian(m);
}

inline int minus_one_pow(long e) { return (e % 2 == 0) ? 1 : -1; }

}  // namespace detail

inline constexpr double kImaginaryResidueTolerance = 1e-7;

/// Equal-time spin-spin correlator <sigma_i^a sigma_j^a> for sites
/// 1 <= i < j <= N (string taken along increasing site index).
///
/// zz comes from the Wick closed form
///   1 - 4 c(0) + 4 c(0)^2 + 4 |f(r)|^2 - 4 |c(r)|^2,  r = j - i.
/// xx is the 2r-operator string B_i A_{i+1} B_{i+1} ... A_j; sorting it into
/// (A..A B..B) block order gives (-1)^{r(r+1)/2} Pf(M) with A-sites i+1..j
/// and B-sites i..j-1. yy is the mirrored string -A_i ... B_j, giving
/// -(-1)^{(r-1)(r-2)/2} Pf(M') with A-sites i..j-1 and B-sites i+1..j.
/// The sign conventions are pinned by the exact small-N state-vector tests.
inline double spin_correlator(const CorrelatorKernel& kernel, int i, int j, Axis axis) {
    if (!(1 <= i && i < j && j <= kernel.n_spins))
        throw ConfigError("spin_correlator: need 1 <= i < j <= N");
    const int r = j - i;
    if (axis == Axis::Z) {
        const double c0 = kernel.c_at(0);
        return 1.0 - 4.0 * c0 + 4.0 * c0 * c0 + 4.0 * std::norm(kernel.f_at(r)) -
               4.0 * std::norm(kernel.c_at(r));
    }
    cplx value;
    if (axis == Axis::X) {
        value = static_cast<double>(detail::minus_one_pow(static_cast<long>(r) * (r + 1) / 2)) *
                detail::string_pfaffian(kernel, r, i + 1, i);
    } else {
        value = -static_cast<double>(
                    detail::minus_one_pow(static_cast<long>(r - 1) * (r - 2) / 2)) *
                detail::string_pfaffian(kernel, r, i, i + 1);
    }
    if (std::abs(value.imag()) > kImaginaryResidueTolerance)
        throw ConsistencyError("spin_correlator: imaginary residue " +
                               std::to_string(value.imag()));
    return value.real();
}

inline double spin_correlator(const IsingParams& params, long n, int i, int j, Axis axis) {
    const auto kernel = correlator_kernel(evolve_modes(params, n), params.n_spins - 1);
    return spin_correlator(kernel, i, j, axis);
}

/// <J^2> assembled from the pair correlators:
/// (1/2) sum_{i<j} (xx + yy + zz) + 3N/4, using translation invariance to
/// reduce the pair sum to separations r = 1..N-1 with multiplicity N - r.
inline double jsq_oracle_from_kernel(const CorrelatorKernel& kernel) {
    const int n = kernel.n_spins;
    double acc = 0.0;
    for (int r = 1; r < n; ++r) {
        const double xx = spin_correlator(kernel, 1, 1 + r, Axis::X);
        const double yy = spin_correlator(kernel, 1, 1 + r, Axis::Y);
        const double zz = spin_correlator(kernel, 1, 1 + r, Axis::Z);
        acc += (n - r) * (xx + yy + zz);
    }
    return 0.5 * acc + 0.75 * n;
}

inline double jsq_oracle(const IsingParams& params, long n) {
    return jsq_oracle_from_kernel(correlator_kernel(evolve_modes(params, n), params.n_spins - 1));
}

/// Entanglement entropy of l consecutive sites, in bits, from the eigenvalues
/// of the 2l x 2l correlation matrix [[I - C, -F^*], [F, C]] (the Hermitian
/// arrangement of the subsystem's particle/hole blocks). Eigenvalues must lie
/// in [0, 1] up to 1e-8 and pair as (mu, 1 - mu).
inline double entropy_oracle_from_kernel(const CorrelatorKernel& kernel, int l) {
    if (l < 1 || l > kernel.n_spins / 2)
        throw ConfigError("entropy_oracle: need 1 <= l <= N/2");
    Eigen::MatrixXcd gamma(2 * l, 2 * l);
    for (int i = 0; i < l; ++i) {
        for (int j = 0; j < l; ++j) {
            const double c = kernel.c_at(i - j);
            const cplx f = kernel.f_at(j - i);
            gamma(i, j) = (i == j ? 1.0 : 0.0) - c;
            gamma(i, l + j) = -std::conj(f);
            gamma(l + i, j) = f;
            gamma(l + i, l + j) = c;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(gamma, Eigen::EigenvaluesOnly);
    double entropy = 0.0;
    for (double mu : solver.eigenvalues()) {
        if (mu < -1e-8 || mu > 1.0 + 1e-8)
            throw ConsistencyError("entropy_oracle: occupation eigenvalue " + std::to_string(mu) +
                                   " outside [0, 1]");
        mu = std::clamp(mu, 0.0, 1.0);
        if (mu > 0.0) entropy -= mu * std::log2(mu);
    }
    return entropy;
}

inline double entropy_oracle(const IsingParams& params, long n, int l) {
    return entropy_oracle_from_kernel(correlator_kernel(evolve_modes(params, n), l), l);
}

struct EntropyExtrapolation {
    double value_at_half_chain = 0.0;  // fitted S at l = N/2
    double slope = 0.0;
    double intercept = 0.0;
    double max_residual = 0.0;
    bool residual_warning = false;  // fit residual above 5% of the data range
    std::vector<double> mean_entropies;
};

/// Least-squares linear fit of the window-averaged entropy against subsystem
/// size, evaluated at l = N/2. The steady-state entropy of the kicked chain
/// grows linearly in l, so this extrapolates sizes far beyond what a state
/// vector could reach.
inline EntropyExtrapolation extrapolate_half_chain(const IsingParams& params,
                                                   const std::vector<int>& sizes, long n_start,
                                                   long n_end, long stride = 1) {
    if (sizes.size() < 3)
        throw ConfigError("extrapolate_half_chain: need at least 3 subsystem sizes");
    if (n_end < n_start || stride < 1)
        throw ConfigError("extrapolate_half_chain: bad averaging window");
    int max_l = 0;
    for (int l : sizes) {
        if (l < 1 || l > params.n_spins / 2)
            throw ConfigError("extrapolate_half_chain: subsystem size out of range");
        max_l = std::max(max_l, l);
    }

    std::vector<double> sums(sizes.size(), 0.0);
    long count = 0;
    for (long n = n_start; n <= n_end; n += stride) {
        const auto kernel = correlator_kernel(evolve_modes(params, n), max_l);
        for (std::size_t k = 0; k < sizes.size(); ++k)
            sums[k] += entropy_oracle_from_kernel(kernel, sizes[k]);
        ++count;
    }

    EntropyExtrapolation fit;
    fit.mean_entropies.resize(sizes.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
        fit.mean_entropies[k] = sums[k] / count;
        sx += sizes[k];
        sy += fit.mean_entropies[k];
        sxx += static_cast<double>(sizes[k]) * sizes[k];
        sxy += sizes[k] * fit.mean_entropies[k];
    }
    const double m = static_cast<double>(sizes.size());
    const double denom = m * sxx - sx * sx;
    fit.slope = (m * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / m;
    fit.value_at_half_chain = fit.slope * (params.n_spins / 2.0) + fit.intercept;

    double lo = fit.mean_entropies[0], hi = fit.mean_entropies[0];
    for (std::size_t k = 0; k < sizes.size(); ++k) {
        lo = std::min(lo, fit.mean_entropies[k]);
        hi = std::max(hi, fit.mean_entropies[k]);
        fit.max_residual = std::max(
            fit.max_residual,
            std::abs(fit.mean_entropies[k] - (fit.slope * sizes[k] + fit.intercept)));
    }
    fit.residual_warning = fit.max_residual > 0.05 * std::max(hi - lo, 1e-12);
    return fit;
}

}  // namespace floq
