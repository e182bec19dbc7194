#include "refocus/spectral.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "refocus/errors.hpp"
#include "refocus/linalg.hpp"

namespace refocus {

namespace {
constexpr double pi = std::numbers::pi;
}

PlaneWaveSet make_plane_wave_set(int n_waves, double a_min, WavevectorGrid grid,
                                 double optical_k) {
    if (n_waves < 2) throw validation_error("need at least 2 plane waves");
    if (!(a_min > 0.0)) throw validation_error("minimum spacing must be positive");
    if (optical_k < 0.0) throw validation_error("optical wavevector must be >= 0");

    PlaneWaveSet set;
    set.grid = grid;
    set.optical_k = optical_k;
    set.k_x.resize(n_waves);
    const double edge = pi / a_min;
    if (grid == WavevectorGrid::endpoint) {
        for (int j = 0; j < n_waves; ++j)
            set.k_x[j] = -edge + 2.0 * edge * j / (n_waves - 1);
    } else {
        const int m_lo = -(n_waves / 2);
        for (int j = 0; j < n_waves; ++j)
            set.k_x[j] = 2.0 * pi * (m_lo + j) / (n_waves * a_min);
    }
    if (optical_k > 0.0) {
        set.angles.resize(n_waves);
        for (int j = 0; j < n_waves; ++j) {
            double s = set.k_x[j] / optical_k;
            if (std::abs(s) > 1.0)
                throw validation_error("Brillouin zone exceeds the optical wavevector");
            set.angles[j] = std::asin(s);
        }
    }
    return set;
}

Eigen::MatrixXcd plane_wave_matrix(const std::vector<double>& positions,
                                   const PlaneWaveSet& waves) {
    if (positions.empty()) throw validation_error("need at least one position");
    const int n = static_cast<int>(positions.size());
    const int m = static_cast<int>(waves.k_x.size());
    Eigen::MatrixXcd mat(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            double ph = waves.k_x[j] * positions[i];
            mat(i, j) = {std::cos(ph), std::sin(ph)};
        }
    return mat;
}

SpectralAmplitudes solve_spectral_amplitudes(const Eigen::MatrixXcd& m, int target,
                                             double cond_limit) {
    const int n = static_cast<int>(m.rows());
    if (m.cols() != n) throw validation_error("spectral solve needs a square matrix");
    if (target < 0 || target >= n) throw validation_error("target index out of range");

    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
    rhs[target] = 1.0;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
    double anorm = m.cwiseAbs().colwise().sum().maxCoeff();
    double cond = condest_1norm(lu, anorm);
    if (!std::isfinite(cond) || cond > cond_limit) {
        char est[32];
        std::snprintf(est, sizeof est, "%.3g", cond);
        throw numerical_error(std::string("plane wave matrix too ill-conditioned to invert "
                                          "(estimate ") + est + ")");
    }

    SpectralAmplitudes sol;
    sol.target_index = target;
    sol.amplitudes = lu.solve(rhs);
    sol.condition_estimate = cond;
    Eigen::VectorXcd recon = m * sol.amplitudes;
    recon[target] -= 1.0;
    sol.residual_max = recon.cwiseAbs().maxCoeff();
    return sol;
}

Eigen::VectorXcd spectral_profile(const PlaneWaveSet& waves, const Eigen::VectorXcd& amplitudes,
                                  const std::vector<double>& grid) {
    if (static_cast<int>(waves.k_x.size()) != amplitudes.size())
        throw validation_error("wave count does not match amplitude count");
    Eigen::VectorXcd out(static_cast<int>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::complex<double> acc = 0.0;
        for (int j = 0; j < amplitudes.size(); ++j) {
            double ph = waves.k_x[j] * grid[i];
            acc += amplitudes[j] * std::complex<double>{std::cos(ph), std::sin(ph)};
        }
        out[static_cast<int>(i)] = acc;
    }
    return out;
}

TiltAngle max_tilt_angle(double optical_k, double a_min) {
    if (!(optical_k > 0.0)) throw validation_error("optical wavevector must be positive");
    if (!(a_min > 0.0)) throw validation_error("minimum spacing must be positive");
    TiltAngle t;
    t.theta_m = pi / (optical_k * a_min);
    t.small_angle_valid = t.theta_m <= 0.2;
    return t;
}

}
