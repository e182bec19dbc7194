#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "refocus/beam.hpp"
#include "refocus/chain.hpp"
#include "refocus/envelope.hpp"

namespace refocus {

// Conditional-phase-flip gate on ions (j, n) driven by chi_i(t) = Omega_i sin(mu t).
// mu in units of omega_z, tau in trap periods 2 pi / omega_z.
struct GateConfig {
    int target_j = 0;
    int target_n = 1;
    double mu = 9.9888;          // omega_z units
    double tau_periods = 180.0;  // units of 2 pi / omega_z
    double rabi_j = 0.1;
    double rabi_n = 0.1;
    BeamProfile beam = BeamProfile::make_gaussian(1.0);
    int n_corr = 0;              // correction beams per target (split across sides)
    double eta_com = 0.1;

    double tau() const { return tau_periods * 2.0 * 3.14159265358979323846; }
    void validate(int n_ions) const;
};

struct EffectiveRabiVector {
    Eigen::VectorXd omega;             // signed amplitude per ion
    Eigen::VectorXd profile_j;         // G_j at all ion positions
    Eigen::VectorXd profile_n;         // G_n at all ion positions
};

struct GatePhases {
    Eigen::MatrixXcd alpha;   // N x K residual displacements alpha_i^k(tau)
    Eigen::MatrixXd phi;      // N x N two-spin phases phi_in(tau), symmetric
};

struct FidelityResult {
    double fidelity = 0.0;
    double infidelity = 1.0;
    double motional_loss = 0.0;   // 1 - F with all phases forced ideal
    double phase_error = 0.0;     // 1 - F with all alpha zeroed
};

// Correction-beam sites for a target: the target plus its n_corr nearest ions
// (by distance, edges handled by taking whatever neighbors exist).
std::vector<int> correction_sites(const Eigen::VectorXd& u, int target, int n_corr);

// Refocused profile for one target across the whole chain: beams on
// correction_sites, amplitudes from the restricted exact solve.
Eigen::VectorXd target_profile(const Eigen::VectorXd& u, const BeamProfile& beam,
                               int target, int n_corr);

// Omega_i = Omega_j G_j(x_i) + Omega_n G_n(x_i); perfect focusing when n_corr < 0.
EffectiveRabiVector effective_rabi(const Eigen::VectorXd& u, const GateConfig& config,
                                   bool perfect_focusing = false);

// closed-form single integrals --------------------------------------------------
// eps1(z, tau) = int_0^tau e^{izt} dt; eps1t adds a factor t in the integrand.
std::complex<double> eps1(double z, double tau);
std::complex<double> eps1t(double z, double tau);
// int_0^tau sin(mu t) e^{i w t} dt
std::complex<double> displacement_integral(double mu, double w, double tau);
// int_0^tau dt2 int_0^{t2} dt1 sin(mu t2) sin(w (t2 - t1)) sin(mu t1)
double phase_integral(double mu, double w, double tau);

// alpha_i^k = Omega_i g_i^k int sin(mu t) e^{i w_k t} dt,  g_i^k = eta_k b_i^k;
// phi_in = 2 Omega_i Omega_n Sum_k g_i^k g_n^k I(mu, w_k, tau).
GatePhases gate_phases(const Eigen::VectorXd& omega_eff, const ModeSpectrum& transverse,
                       double eta_com, double mu, double tau);

// Thermal-state fidelity of the conditional phase flip on (j, n) against
// exp(i pi sigma_j sigma_n / 4), motional modes thermal with occupations nbar,
// spectator-ion couplings entering as dephasing (spectator spins maximally mixed).
FidelityResult gate_fidelity(const GatePhases& phases, const Eigen::VectorXd& nbar,
                             int j, int n);

// Convenience: full pipeline for one (Omega_j, Omega_n) point.
double gate_infidelity(const Eigen::VectorXd& u, const ModeSpectrum& transverse,
                       const Eigen::VectorXd& nbar, const GateConfig& config,
                       bool perfect_focusing = false);

struct DetuningScanPoint {
    double mu = 0.0;
    double best_rabi_j = 0.0;
    double best_rabi_n = 0.0;
    double infidelity = 1.0;
    double baseline_infidelity = 1.0;   // perfect focusing at the same mu
    bool converged = true;
};

struct OptimizerPolicy {
    double omega_max = 1.0;
    int coarse_grid = 32;        // seeding grid per axis; the best cells restart
    int restarts = 2;            // coordinate-descent restarts
    int sweeps = 40;             // coordinate sweep cap per restart
    double tol = 1e-7;           // golden-section bracket tolerance
};

// Minimize infidelity over (Omega_j, Omega_n) in (0, omega_max]^2 by coordinate
// descent with golden-section line search, restarted from the best cells of a
// deterministic coarse grid.
DetuningScanPoint optimize_rabi(const Eigen::VectorXd& u, const ModeSpectrum& transverse,
                                const Eigen::VectorXd& nbar, GateConfig config,
                                const OptimizerPolicy& policy,
                                bool perfect_focusing = false);

// For each mu on the grid, optimize (Omega_j, Omega_n) with and without focusing.
std::vector<DetuningScanPoint> scan_detuning(const Eigen::VectorXd& u,
                                             const ModeSpectrum& transverse,
                                             const Eigen::VectorXd& nbar,
                                             const GateConfig& config_template,
                                             const std::vector<double>& mu_grid,
                                             const OptimizerPolicy& policy);

}
