#pragma once

#include <complex>
#include <vector>

#include "refocus/errors.hpp"

namespace refocus {

enum class BeamKind { gaussian, exponential, plane_wave };

// Single-beam amplitude profile, normalized so |g(0)| = 1.
//   gaussian:     g(x) = exp(-x^2 / w^2)
//   exponential:  g(x) = exp(-alpha |x|)
//   plane_wave:   g(x) = exp(i k_x x)
struct BeamProfile {
    BeamKind kind = BeamKind::gaussian;
    double width = 1.0;   // w for gaussian
    double decay = 1.0;   // alpha for exponential
    double k_x = 0.0;     // wavevector for plane_wave

    static BeamProfile make_gaussian(double w);
    static BeamProfile make_exponential(double alpha);
    static BeamProfile make_plane_wave(double k_x);

    std::complex<double> amplitude(double x) const;
    // Real-valued evaluation; throws for plane_wave.
    double amplitude_real(double x) const;

    // Amplitude at one lattice spacing, gamma = exp(-(a/w)^2) for gaussian,
    // lambda = exp(-alpha a) for exponential.
    double lattice_decay(double a) const;
};

// 1D qubit array. Positions strictly increasing, at least 2 sites.
struct QubitLattice {
    std::vector<double> positions;
    double spacing_a = 1.0;   // reference spacing for dimensionless ratios

    static QubitLattice homogeneous(int n_sites, double a);
    static QubitLattice from_positions(std::vector<double> pos, double a_ref);

    int size() const { return static_cast<int>(positions.size()); }
    void validate() const;
};

}
