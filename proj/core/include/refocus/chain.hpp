#pragma once

#include <Eigen/Dense>
#include <vector>

namespace refocus {

namespace constants {
inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double k_boltzmann = 1.380649e-23;    // J/K
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double coulomb_k = 8.9875517923e9;    // 1/(4 pi eps0), N m^2 / C^2
inline constexpr double amu = 1.66053906660e-27;       // kg
// Mass chosen so the single-ion oscillator length sqrt(hbar / 2 M omega_z)
// is 5.4 nm at omega_z = 2 pi x 1 MHz (about 173 amu, a Yb-scale ion).
double default_ion_mass_kg();
}

struct TrapConfig {
    int ion_count = 2;
    double omega_z = 2.0 * 3.14159265358979323846 * 1.0e6;  // rad/s
    double anisotropy = 10.0;                               // omega_x / omega_z
    double ion_mass = constants::default_ion_mass_kg();     // kg
    int charge_number = 1;

    void validate() const;
    double omega_x() const { return anisotropy * omega_z; }
    // l = (Z^2 e^2 / (4 pi eps0 M omega_z^2))^{1/3}
    double length_scale() const;
};

struct ChainGeometry {
    Eigen::VectorXd u;        // dimensionless equilibrium positions, increasing
    double length_scale = 0;  // meters

    int size() const { return static_cast<int>(u.size()); }
    Eigen::VectorXd physical_positions() const { return u * length_scale; }
    double min_spacing() const;   // dimensionless
    double max_spacing() const;
};

// Normal modes of the chain. Frequencies in units of omega_z, sorted by
// `descending` (true for transverse: index 0 is the center-of-mass mode).
struct ModeSpectrum {
    Eigen::VectorXd freqs;      // omega_k / omega_z
    Eigen::MatrixXd vectors;    // column k = eigenvector b^k (orthonormal)
    bool descending = true;
};

// Solve u_m = Sum_{n<m} 1/(u_m - u_n)^2 - Sum_{n>m} 1/(u_n - u_m)^2 by Newton
// iteration with a backtracking line search that preserves the ion ordering;
// the potential is strictly convex on the ordered domain, so this converges
// from a uniform-spacing seed. Residual below 1e-12 guaranteed on success.
Eigen::VectorXd equilibrium_positions(int n_ions);

ChainGeometry make_chain_geometry(const TrapConfig& config);

// Equilibrium force residual, max over ions.
double equilibrium_residual(const Eigen::VectorXd& u);

// Transverse coupling matrix: A_nn = (omega_x/omega_z)^2 - Sum 1/|u_n - u_p|^3,
// A_nm = 1/|u_n - u_m|^3. omega_k = omega_z sqrt(eigenvalue). Throws
// numerical_error on a negative eigenvalue (zigzag instability).
ModeSpectrum transverse_mode_spectrum(const ChainGeometry& geometry, const TrapConfig& config);

// Axial coupling matrix: diag 1 + 2 Sum 1/|u|^3, offdiag -2/|u|^3; ascending order
// (index 0 is the center-of-mass mode at omega_z).
ModeSpectrum axial_mode_spectrum(const ChainGeometry& geometry);

// Thermal occupations at the temperature fixed by n_bar = 1 for the highest
// (center-of-mass) transverse mode: n_k = 1/(2^{omega_k / omega_com} - 1).
Eigen::VectorXd thermal_occupations_com_reference(const ModeSpectrum& transverse);

// Occupations at temperature T: n_k = 1/(exp(hbar omega_k / k_B T) - 1),
// omega_k passed in rad/s.
Eigen::VectorXd thermal_occupations_at_temperature(const Eigen::VectorXd& omega_rad_s, double temperature_k);

// Lamb-Dicke parameters eta_k = eta_com sqrt(omega_com / omega_k) for the
// transverse spectrum (eta_com = |dk| sqrt(hbar / 2 M omega_com) is a knob).
Eigen::VectorXd lamb_dicke_parameters(const ModeSpectrum& transverse, double eta_com);

}
