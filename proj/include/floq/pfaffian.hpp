#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "floq/errors.hpp"
#include "floq/state.hpp"

namespace floq {

inline constexpr double kSkewSymmetryTolerance = 1e-10;

/// Pfaffian of an even-dimensional skew-symmetric complex matrix by
/// Parlett-Reid tridiagonalization with partial pivoting: the matrix is
/// reduced two rows/columns at a time by congruence updates that leave the
/// Pfaffian invariant, row swaps each flip its sign, and the pivots
/// accumulate the value. O(n^3); satisfies Pf(M)^2 = det(M).
inline cplx pfaffian(const Eigen::MatrixXcd& m) {
    const Eigen::Index n = m.rows();
    if (n != m.cols() || n % 2 != 0)
        throw ConfigError("pfaffian: matrix must be square with even dimension");
    if (n == 0) return cplx{1.0, 0.0};

    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double skew = (m + m.transpose()).cwiseAbs().maxCoeff();
    if (skew > kSkewSymmetryTolerance * scale)
        throw ConsistencyError("pfaffian: matrix is not skew-symmetric (defect " +
                               std::to_string(skew) + ")");

    Eigen::MatrixXcd a = m;
    cplx pf{1.0, 0.0};
    for (Eigen::Index k = 0; k + 1 < n; k += 2) {
        // Pivot: largest entry in column k below the diagonal.
        Eigen::Index kp = k + 1;
        double best = std::abs(a(k + 1, k));
        for (Eigen::Index i = k + 2; i < n; ++i) {
            if (std::abs(a(i, k)) > best) {
                best = std::abs(a(i, k));
                kp = i;
            }
        }
        if (best == 0.0) return cplx{0.0, 0.0};
        if (kp != k + 1) {
            a.row(k + 1).swap(a.row(kp));
            a.col(k + 1).swap(a.col(kp));
            pf = -pf;
        }
        pf *= a(k, k + 1);
        if (k + 2 < n) {
            const Eigen::Index rest = n - (k + 2);
            Eigen::VectorXcd tau = a.row(k).segment(k + 2, rest) / a(k, k + 1);
            const Eigen::VectorXcd col = a.col(k + 1).segment(k + 2, rest);
            a.block(k + 2, k + 2, rest, rest).noalias() += tau * col.transpose();
            a.block(k + 2, k + 2, rest, rest).noalias() -= col * tau.transpose();
        }
    }
    return pf;
}

}  // namespace floq
