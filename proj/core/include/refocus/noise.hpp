#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "refocus/chain.hpp"
#include "refocus/envelope.hpp"

namespace refocus {

struct BeamErrorModel {
    double delta_r = 0.0;     // std of relative amplitude error
    double delta_phi = 0.0;   // std of phase error, radians
    int samples = 5000;
    std::uint64_t seed = 1;

    void validate() const;
};

struct NoiseGrid {
    std::vector<double> delta_r_axis;
    std::vector<double> delta_phi_axis;
    Eigen::MatrixXd mean_error;      // eps_bar per (r, phi) cell
    Eigen::MatrixXd standard_error;  // MC standard error per cell
};

// f_j -> f_j (1 + r_j) e^{i phi_j} on active beams only.
Eigen::VectorXcd perturb_envelope(const EnvelopeSolution& f,
                                  const Eigen::VectorXd& r,
                                  const Eigen::VectorXd& phi);

// eps = (1/N) Sum_n | |G_tilde(x_n)|^2 - |G(x_n)|^2 |.
double intensity_error(const Eigen::VectorXcd& ideal, const Eigen::VectorXcd& perturbed);

// Mean intensity error over `samples` random beam-error draws at one (dr, dphi).
// Per-sample seeds derived from model.seed; results bit-identical for a fixed seed.
struct MonteCarloCell {
    double mean = 0.0;
    double standard_error = 0.0;
};
MonteCarloCell monte_carlo_cell(const EnvelopeSolution& f, const AddressingMatrix& m,
                                const BeamErrorModel& model);

NoiseGrid monte_carlo_grid(const EnvelopeSolution& f, const AddressingMatrix& m,
                           const std::vector<double>& delta_r_axis,
                           const std::vector<double>& delta_phi_axis,
                           int samples, std::uint64_t seed);

struct PositionFluctuation {
    Eigen::VectorXd sigma;        // per-ion position standard deviation, meters
    Eigen::VectorXd occupations;  // axial n_bar per mode
    double com_occupation = 0.0;
};

// Thermal position spread along the chain axis at temperature k_B T = hbar Gamma / 2:
// sigma_i^2 = Sum_k (b_i^k)^2 (hbar / 2 M omega_k)(2 n_k + 1) over axial modes.
PositionFluctuation thermal_position_std(const ChainGeometry& geometry,
                                         const TrapConfig& config,
                                         double gamma_linewidth = 2.0 * 3.14159265358979323846 * 20.0e6);

}
