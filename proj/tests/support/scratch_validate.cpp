// Throwaway convention-validation driver (not part of the test suite).
#include <cstdio>

#include "ed_oracle.hpp"
#include "floq/floquet.hpp"
#include "floq/kicked_ising.hpp"
#include "floq/entropy.hpp"

using namespace floq;

int main() {
    const int n = 6;
    const double k = 6.0, p = 4.0 * M_PI / 11.0, tau = 1.0;
    IsingParams ip(n, k, p, tau);
    std::printf("J_eff=%.6f B_eff=%.6f 2Jt=%.6f 2Bt=%.6f\n", ip.j_eff(), ip.b_eff(),
                2 * ip.j_eff() * tau, 2 * ip.b_eff() * tau);

    // ED side: nearest-neighbor ring drive from |0...0>
    SystemParams sp(n, 0.0, k, p, tau, Boundary::Ring);
    const PhaseTable table = build_phase_table(sp, CouplingRange::NearestNeighbor);
    StateVector psi(n);
    psi.amp[0] = 1.0;

    edo::JwOperators jw(n);
    // sanity: CAR {c_i, c_j^dag} = delta_ij
    double car_defect = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            edo::Matrix anti = jw.c[i] * jw.cdag[j] + jw.cdag[j] * jw.c[i];
            if (i == j) anti -= edo::Matrix::Identity(anti.rows(), anti.cols());
            car_defect = std::max(car_defect, anti.cwiseAbs().maxCoeff());
        }
    std::printf("CAR defect: %.3e\n", car_defect);

    for (long step = 0; step <= 7; ++step) {
        if (step > 0) floquet_step_inplace(psi, table);
        const auto vec = edo::to_eigen(psi);

        // mode closed form vs matrix powers
        double mode_diff = 0.0;
        for (double q : ising_momenta(n)) {
            Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
            const Eigen::Matrix2cd uq = ising_mode_matrix(ip, q);
            for (long s = 0; s < step; ++s) u = uq * u;
            Eigen::Vector2cd uv = u * Eigen::Vector2cd(0.0, 1.0);
            const auto amp = mode_evolution(ip, q, step);
            mode_diff = std::max(mode_diff, std::abs(uv(0) - amp.u));
            mode_diff = std::max(mode_diff, std::abs(uv(1) - amp.v));
        }

        // correlators vs ED
        edo::Matrix c_ed, f_ed;
        edo::ed_correlators(jw, vec, c_ed, f_ed);
        const auto pair = correlators(ip, step, n);
        const double c_diff = (c_ed - pair.c).cwiseAbs().maxCoeff();
        const double f_diff = (f_ed - pair.f).cwiseAbs().maxCoeff();

        // spin correlators vs ED
        const auto kernel = correlator_kernel(evolve_modes(ip, step), n - 1);
        double xx_diff = 0.0, yy_diff = 0.0, zz_diff = 0.0;
        for (int i = 1; i < n; ++i) {
            for (int j = i + 1; j <= n; ++j) {
                const double xx_ed = edo::pauli_correlator(psi, i - 1, j - 1, Axis::X).real();
                const double yy_ed = edo::pauli_correlator(psi, i - 1, j - 1, Axis::Y).real();
                const double zz_ed = edo::pauli_correlator(psi, i - 1, j - 1, Axis::Z).real();
                xx_diff = std::max(xx_diff,
                                   std::abs(xx_ed - spin_correlator(kernel, i, j, Axis::X)));
                yy_diff = std::max(yy_diff,
                                   std::abs(yy_ed - spin_correlator(kernel, i, j, Axis::Y)));
                zz_diff = std::max(zz_diff,
                                   std::abs(zz_ed - spin_correlator(kernel, i, j, Axis::Z)));
            }
        }

        const double jsq_ed = expval_jsq(psi);
        const double jsq_orc = jsq_oracle(ip, step);
        double ent_diff = 0.0;
        for (int l = 1; l <= n / 2; ++l) {
            const double s_ed = von_neumann_entropy(psi, half_chain_mask(l));
            const double s_orc = entropy_oracle(ip, step, l);
            ent_diff = std::max(ent_diff, std::abs(s_ed - s_orc));
        }

        std::printf(
            "n=%ld mode=%.2e C=%.2e F=%.2e xx=%.2e yy=%.2e zz=%.2e J2(ed:%.8f orc:%.8f "
            "d=%.2e) S=%.2e\n",
            step, mode_diff, c_diff, f_diff, xx_diff, yy_diff, zz_diff, jsq_ed, jsq_orc,
            std::abs(jsq_ed - jsq_orc), ent_diff);
    }
    return 0;
}
