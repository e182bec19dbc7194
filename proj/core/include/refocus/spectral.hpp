#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace refocus {

enum class WavevectorGrid {
    endpoint,   // evenly spaced over [-pi/a_min, pi/a_min], endpoints included
    dft,        // k_m = 2 pi m / (N a_min), m centered (half-open Brillouin zone)
};

struct PlaneWaveSet {
    std::vector<double> k_x;      // axial wavevectors, rad / unit length
    double optical_k = 0.0;       // magnitude of the full optical wavevector
    std::vector<double> angles;   // tilt angles asin(k_x / k), when optical_k > 0
    WavevectorGrid grid = WavevectorGrid::endpoint;
};

struct SpectralAmplitudes {
    int target_index = 0;
    Eigen::VectorXcd amplitudes;
    double residual_max = 0.0;
    double condition_estimate = 0.0;
};

// N waves spanning the Brillouin zone of the smallest spacing.
PlaneWaveSet make_plane_wave_set(int n_waves, double a_min, WavevectorGrid grid,
                                 double optical_k = 0.0);

// M[n][j] = exp(i k_x^j x_n) on the actual ion positions.
Eigen::MatrixXcd plane_wave_matrix(const std::vector<double>& positions,
                                   const PlaneWaveSet& waves);

SpectralAmplitudes solve_spectral_amplitudes(const Eigen::MatrixXcd& m, int target,
                                             double cond_limit = 1e12);

// Reconstructed complex profile G(x) = Sum_j f_j exp(i k_x^j x) on a grid.
Eigen::VectorXcd spectral_profile(const PlaneWaveSet& waves,
                                  const Eigen::VectorXcd& amplitudes,
                                  const std::vector<double>& grid);

struct TiltAngle {
    double theta_m = 0.0;
    bool small_angle_valid = true;   // false when theta_m > 0.2 rad
};

// theta_m = pi / (k a_min), the angular window needed to span the Brillouin zone.
TiltAngle max_tilt_angle(double optical_k, double a_min);

}
