#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "floq/errors.hpp"

namespace floq {

/// Distance metric on the chain: open line D_ij = |i-j|,
/// ring D_ij = min(|i-j|, N-|i-j|).
enum class Boundary { OpenLine, Ring };

/// Coupling range. NearestNeighbor is the infinite-power-law limit kept as a
/// dedicated flag so the weights never underflow; the rescaling factor is
/// then fixed to its limit value (2 on the open line, 2N/(N-1) on the ring).
enum class CouplingRange { PowerLaw, NearestNeighbor };

inline int pair_distance(int i, int j, int n_spins, Boundary boundary) {
    int d = std::abs(i - j);
    if (boundary == Boundary::Ring) d = std::min(d, n_spins - d);
    return d;
}

/// Coupling rescaling N(alpha) = (1/(N-1)) * sum_{i != j} D_ij^(-alpha),
/// over ordered pairs. Keeps the interaction energy extensive for any range.
inline double kac_factor(int n_spins, double alpha, Boundary boundary) {
    if (n_spins < 2) throw ConfigError("kac_factor: need at least 2 spins");
    double sum = 0.0;
    for (int i = 0; i < n_spins; ++i) {
        for (int j = 0; j < n_spins; ++j) {
            if (i == j) continue;
            sum += std::pow(static_cast<double>(pair_distance(i, j, n_spins, boundary)), -alpha);
        }
    }
    return sum / (n_spins - 1);
}

/// Nearest-neighbor limit of the rescaling factor (only unit-distance pairs
/// survive): 2(N-1)/(N-1) = 2 on the open line, 2N/(N-1) on the ring.
inline double kac_factor_nn(int n_spins, Boundary boundary) {
    if (n_spins < 2) throw ConfigError("kac_factor_nn: need at least 2 spins");
    if (boundary == Boundary::Ring) return 2.0 * n_spins / (n_spins - 1);
    return 2.0;
}

/// Physical and drive parameters of the kicked chain. The cached rescaling
/// factor is recomputed by the constructor, so values are always consistent;
/// to change a parameter, build a new instance.
class SystemParams {
  public:
    SystemParams(int n_spins, double alpha, double coupling_k, double kick_p, double period_tau,
                 Boundary boundary = Boundary::OpenLine)
        : n_spins_(n_spins),
          alpha_(alpha),
          coupling_(coupling_k),
          kick_(kick_p),
          period_(period_tau),
          boundary_(boundary) {
        if (n_spins < 2) throw ConfigError("SystemParams: need at least 2 spins");
        if (alpha < 0.0) throw ConfigError("SystemParams: alpha must be non-negative");
        if (!(period_tau > 0.0)) throw ConfigError("SystemParams: period must be positive");
        kac_ = kac_factor(n_spins_, alpha_, boundary_);
    }

    int n_spins() const { return n_spins_; }
    double alpha() const { return alpha_; }
    double coupling() const { return coupling_; }
    double kick() const { return kick_; }
    double period() const { return period_; }
    Boundary boundary() const { return boundary_; }
    double kac() const { return kac_; }

    SystemParams with_alpha(double alpha) const {
        return SystemParams(n_spins_, alpha, coupling_, kick_, period_, boundary_);
    }
    SystemParams with_period(double tau) const {
        return SystemParams(n_spins_, alpha_, coupling_, kick_, tau, boundary_);
    }

  private:
    int n_spins_;
    double alpha_;
    double coupling_;
    double kick_;
    double period_;
    Boundary boundary_;
    double kac_;
};

inline std::string to_string(Boundary b) {
    return b == Boundary::OpenLine ? "open" : "ring";
}

inline std::string to_string(CouplingRange r) {
    return r == CouplingRange::PowerLaw ? "powerlaw" : "nn";
}

}  // namespace floq
