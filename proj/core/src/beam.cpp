#include "refocus/beam.hpp"

#include <cmath>

namespace refocus {

BeamProfile BeamProfile::make_gaussian(double w) {
    if (!(w > 0.0) || !std::isfinite(w)) throw validation_error("gaussian width must be positive");
    BeamProfile b;
    b.kind = BeamKind::gaussian;
    b.width = w;
    return b;
}

BeamProfile BeamProfile::make_exponential(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw validation_error("exponential decay must be positive");
    BeamProfile b;
    b.kind = BeamKind::exponential;
    b.decay = alpha;
    return b;
}

BeamProfile BeamProfile::make_plane_wave(double k_x) {
    if (!std::isfinite(k_x)) throw validation_error("plane wave k_x must be finite");
    BeamProfile b;
    b.kind = BeamKind::plane_wave;
    b.k_x = k_x;
    return b;
}

std::complex<double> BeamProfile::amplitude(double x) const {
    switch (kind) {
        case BeamKind::gaussian:
            return {std::exp(-(x * x) / (width * width)), 0.0};
        case BeamKind::exponential:
            return {std::exp(-decay * std::abs(x)), 0.0};
        case BeamKind::plane_wave:
            return {std::cos(k_x * x), std::sin(k_x * x)};
    }
    return {0.0, 0.0};
}

double BeamProfile::amplitude_real(double x) const {
    if (kind == BeamKind::plane_wave) throw validation_error("plane wave amplitude is complex");
    return amplitude(x).real();
}

double BeamProfile::lattice_decay(double a) const {
    switch (kind) {
        case BeamKind::gaussian:
            return std::exp(-(a * a) / (width * width));
        case BeamKind::exponential:
            return std::exp(-decay * a);
        case BeamKind::plane_wave:
            return 1.0;
    }
    return 0.0;
}

QubitLattice QubitLattice::homogeneous(int n_sites, double a) {
    if (n_sites < 2) throw validation_error("lattice needs at least 2 sites");
    if (!(a > 0.0)) throw validation_error("lattice spacing must be positive");
    QubitLattice lat;
    lat.spacing_a = a;
    lat.positions.resize(n_sites);
    for (int i = 0; i < n_sites; ++i) lat.positions[i] = i * a;
    return lat;
}

QubitLattice QubitLattice::from_positions(std::vector<double> pos, double a_ref) {
    QubitLattice lat;
    lat.positions = std::move(pos);
    lat.spacing_a = a_ref;
    lat.validate();
    return lat;
}

void QubitLattice::validate() const {
    if (positions.size() < 2) throw validation_error("lattice needs at least 2 sites");
    if (!(spacing_a > 0.0)) throw validation_error("lattice spacing must be positive");
    for (std::size_t i = 1; i < positions.size(); ++i)
        if (!(positions[i] > positions[i - 1]))
            throw validation_error("lattice positions must be strictly increasing");
}

}
