#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <vector>

#include "refocus/beam.hpp"

namespace refocus {

// M[n][j] = g(x_n - c_j): amplitude of beam j at site n.
struct AddressingMatrix {
    Eigen::MatrixXcd entries;
    std::vector<double> site_positions;
    std::vector<double> beam_centers;

    bool is_real() const;
    Eigen::MatrixXd real_part() const { return entries.real(); }
};

// Correction-beam amplitudes f for one target site, Sum_j M[n][j] f[j] = delta(n, target).
struct EnvelopeSolution {
    int target_index = 0;
    Eigen::VectorXcd amplitudes;
    double truncation_epsilon = 0.0;
    std::vector<int> active_indices;   // j with |f[j]| > truncation_epsilon
    double residual_max = 0.0;         // max_n |Sum_j M[n][j] f[j] - delta(n, target)|
    double condition_estimate = 0.0;

    int active_count() const { return static_cast<int>(active_indices.size()); }
};

struct RefocusedProfile {
    std::vector<double> grid;
    Eigen::VectorXcd values;
};

AddressingMatrix build_addressing_matrix(const QubitLattice& lattice, const BeamProfile& beam,
                                         const std::vector<double>& centers);

// Dense (or banded, when applicable) solve of M f = e_target with condition check.
// Throws numerical_error when the condition estimate exceeds cond_limit.
EnvelopeSolution solve_envelope_exact(const AddressingMatrix& m, int target,
                                      double cond_limit = 1e12);

// Periodic (discrete Fourier) inversion on a homogeneous lattice:
// f(d) = (1/N) Sum_k e^{ikd} / g(k), k = 2 pi m / N over a centered window.
// Valid for gaussian and exponential beams.
EnvelopeSolution solve_envelope_fourier(const BeamProfile& beam, int n_sites, int target,
                                        double spacing_a = 1.0);

// theta_3(k/2, gamma) = 1 + 2 Sum_{n>=1} gamma^{n^2} cos(n k); series cutoff chosen so
// dropped terms are below 1e-15 (order_cutoff is an upper limit on the series length).
double gaussian_spectrum(double k, double gamma, int order_cutoff = 64);

// Spectrum of the exponential beam on the unit lattice:
// g(k) = (1 - lambda^2) / (1 - 2 lambda cos k + lambda^2).
double exponential_spectrum(double k, double lambda);

// Central envelope amplitude approximations for the gaussian beam.
double f0_small_waist(double gamma);          // 1/sqrt(1 - 4 gamma^2), gamma < 1/2
double f0_large_waist(double w_over_a);       // (2/pi^{5/2}) (a/w)^3 e^{pi^2 w^2 / 4 a^2}

// Zero all amplitudes with |f| <= epsilon. When resolve_active is true the reduced
// system is re-solved on the active set instead of just dropping beams.
EnvelopeSolution truncate_envelope(const EnvelopeSolution& f, const AddressingMatrix& m,
                                   double epsilon, bool resolve_active = false);

// Beam count predicted by the decay argument: 2 (w/a)^2 ln(1/eps).
double predicted_active_count(const BeamProfile& beam, double spacing_a, double epsilon);

// Active beams counted against a threshold relative to the central amplitude,
// |f_j| > eps |f_target|; this is the normalization the predicted count refers to.
int active_count_relative(const EnvelopeSolution& f, double epsilon);

RefocusedProfile refocused_profile(const EnvelopeSolution& f, const BeamProfile& beam,
                                   const std::vector<double>& centers,
                                   const std::vector<double>& grid);

// All 2n roots of P_n(x) = x^n (1 + Sum_{m=1..n} (x^{-m} + x^m) gamma^{m^2}),
// via companion-matrix eigenvalues.
std::vector<std::complex<double>> toeplitz_polynomial_roots(double gamma, int n);

std::complex<double> toeplitz_polynomial_eval(double gamma, int n, std::complex<double> x);

// Least-squares slope of ln|f| vs distance from the target over [d_min, d_max];
// also verifies (-1)^d sign alternation when the amplitudes are real.
struct DecayFit {
    double slope = 0.0;
    bool signs_alternate = false;
};
DecayFit fit_decay_constant(const EnvelopeSolution& f, int d_min, int d_max);

}
