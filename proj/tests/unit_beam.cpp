#include "doctest.h"

#include <cmath>

#include "refocus/beam.hpp"
#include "refocus/errors.hpp"

using namespace refocus;

TEST_CASE("gaussian amplitude profile") {
    auto b = BeamProfile::make_gaussian(2.0);
    CHECK(b.amplitude_real(0.0) == doctest::Approx(1.0));
    CHECK(b.amplitude_real(2.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(b.amplitude_real(-2.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(b.amplitude(1.0).imag() == 0.0);
    CHECK(b.lattice_decay(2.0) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("exponential amplitude profile") {
    auto b = BeamProfile::make_exponential(0.5);
    CHECK(b.amplitude_real(0.0) == doctest::Approx(1.0));
    CHECK(b.amplitude_real(3.0) == doctest::Approx(std::exp(-1.5)));
    CHECK(b.amplitude_real(-3.0) == doctest::Approx(std::exp(-1.5)));
    CHECK(b.lattice_decay(1.0) == doctest::Approx(std::exp(-0.5)));
}

TEST_CASE("plane wave amplitude is a pure phase") {
    auto b = BeamProfile::make_plane_wave(1.7);
    auto v = b.amplitude(0.3);
    CHECK(std::abs(v) == doctest::Approx(1.0));
    CHECK(std::arg(v) == doctest::Approx(1.7 * 0.3));
    CHECK_THROWS_AS(b.amplitude_real(0.3), validation_error);
}

TEST_CASE("beam parameter validation") {
    CHECK_THROWS_AS(BeamProfile::make_gaussian(0.0), validation_error);
    CHECK_THROWS_AS(BeamProfile::make_gaussian(-1.0), validation_error);
    CHECK_THROWS_AS(BeamProfile::make_exponential(0.0), validation_error);
}

TEST_CASE("homogeneous lattice") {
    auto lat = QubitLattice::homogeneous(5, 2.0);
    CHECK(lat.size() == 5);
    CHECK(lat.spacing_a == 2.0);
    CHECK(lat.positions[0] == doctest::Approx(0.0));
    CHECK(lat.positions[4] == doctest::Approx(8.0));
    CHECK_THROWS_AS(QubitLattice::homogeneous(0, 1.0), validation_error);
    CHECK_THROWS_AS(QubitLattice::homogeneous(5, 0.0), validation_error);
}

TEST_CASE("lattice from positions requires strict order") {
    auto lat = QubitLattice::from_positions({0.0, 1.0, 2.5}, 1.0);
    CHECK(lat.size() == 3);
    CHECK_THROWS_AS(QubitLattice::from_positions({0.0, 0.0, 1.0}, 1.0), validation_error);
    CHECK_THROWS_AS(QubitLattice::from_positions({1.0, 0.0}, 1.0), validation_error);
}
