#include "doctest.h"

#include <cmath>

#include "refocus/chain.hpp"
#include "refocus/errors.hpp"

using namespace refocus;

TEST_CASE("two and three ion equilibria match the analytic values") {
    auto u2 = equilibrium_positions(2);
    CHECK(u2[1] == doctest::Approx(std::cbrt(0.25)).epsilon(1e-12));
    CHECK(u2[0] == doctest::Approx(-std::cbrt(0.25)).epsilon(1e-12));

    auto u3 = equilibrium_positions(3);
    CHECK(u3[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(u3[2] == doctest::Approx(std::cbrt(1.25)).epsilon(1e-12));

    CHECK(equilibrium_positions(1)[0] == 0.0);
    CHECK_THROWS_AS(equilibrium_positions(0), validation_error);
}

TEST_CASE("equilibrium residual stays small for longer chains") {
    for (int n : {5, 21, 50}) {
        auto u = equilibrium_positions(n);
        CHECK(equilibrium_residual(u) < 1e-12);
        for (int i = 1; i < n; ++i) CHECK(u[i] > u[i - 1]);
        // Reflection symmetry of the chain.
        for (int i = 0; i < n; ++i) CHECK(u[i] == doctest::Approx(-u[n - 1 - i]).epsilon(1e-10));
    }
}

TEST_CASE("trap length scale and default mass") {
    TrapConfig trap;
    CHECK(trap.length_scale() == doctest::Approx(2.72819e-6).epsilon(1e-5));
    CHECK(trap.ion_mass / constants::amu == doctest::Approx(173.312).epsilon(1e-5));
    trap.ion_count = 0;
    CHECK_THROWS_AS(trap.validate(), validation_error);
}

TEST_CASE("21-ion chain spacings at the reference trap") {
    TrapConfig trap;
    trap.ion_count = 21;
    auto geo = make_chain_geometry(trap);
    CHECK(geo.min_spacing() * geo.length_scale * 1e6 == doctest::Approx(1.02059).epsilon(1e-4));
    CHECK(geo.max_spacing() * geo.length_scale * 1e6 == doctest::Approx(1.77965).epsilon(1e-4));
    CHECK(geo.physical_positions()[0] == doctest::Approx(geo.u[0] * geo.length_scale));
}

TEST_CASE("transverse spectrum: center of mass first, then descending") {
    TrapConfig trap;
    trap.ion_count = 20;
    auto geo = make_chain_geometry(trap);
    auto spec = transverse_mode_spectrum(geo, trap);

    REQUIRE(spec.freqs.size() == 20);
    CHECK(spec.descending);
    CHECK(spec.freqs[0] == doctest::Approx(10.0).epsilon(1e-12));  // com = anisotropy
    CHECK(spec.freqs[1] == doctest::Approx(9.949874).epsilon(1e-6));
    CHECK(spec.freqs[2] == doctest::Approx(9.877697).epsilon(1e-6));
    CHECK(spec.freqs[19] == doctest::Approx(5.418665).epsilon(1e-6));
    for (int k = 1; k < 20; ++k) CHECK(spec.freqs[k] < spec.freqs[k - 1]);

    // com eigenvector is uniform
    for (int i = 0; i < 20; ++i)
        CHECK(spec.vectors(i, 0) == doctest::Approx(1.0 / std::sqrt(20.0)).epsilon(1e-10));
    // orthonormal columns
    Eigen::MatrixXd gram = spec.vectors.transpose() * spec.vectors;
    CHECK((gram - Eigen::MatrixXd::Identity(20, 20)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("transverse spectrum throws at the zigzag instability") {
    TrapConfig trap;
    trap.ion_count = 20;
    trap.anisotropy = 2.0;
    auto geo = make_chain_geometry(trap);
    CHECK_THROWS_AS(transverse_mode_spectrum(geo, trap), numerical_error);
}

TEST_CASE("axial spectrum starts at the trap frequency") {
    TrapConfig trap;
    trap.ion_count = 12;
    auto geo = make_chain_geometry(trap);
    auto spec = axial_mode_spectrum(geo);
    CHECK_FALSE(spec.descending);
    CHECK(spec.freqs[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(spec.freqs[1] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-10));  // stretch mode
    for (int k = 1; k < 12; ++k) CHECK(spec.freqs[k] > spec.freqs[k - 1]);
    for (int i = 0; i < 12; ++i)
        CHECK(spec.vectors(i, 0) == doctest::Approx(1.0 / std::sqrt(12.0)).epsilon(1e-10));
}

TEST_CASE("occupations referenced to unit occupation of the com mode") {
    ModeSpectrum spec;
    spec.descending = true;
    spec.freqs.resize(3);
    spec.freqs << 1.0, 0.995, 0.5418665;
    spec.vectors = Eigen::MatrixXd::Identity(3, 3);
    auto nbar = thermal_occupations_com_reference(spec);
    CHECK(nbar[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(nbar[1] == doctest::Approx(1.0069677).epsilon(1e-6));
    // lower frequency modes are hotter
    CHECK(nbar[2] > nbar[1]);

    ModeSpectrum axial = spec;
    axial.descending = false;
    CHECK_THROWS_AS(thermal_occupations_com_reference(axial), validation_error);
}

TEST_CASE("occupations at a physical temperature") {
    Eigen::VectorXd omega(2);
    omega << 2.0 * M_PI * 1.0e6, 2.0 * M_PI * 10.0e6;
    // Doppler limit of a 2 pi x 20 MHz linewidth
    double t = constants::hbar * (2.0 * M_PI * 20.0e6) / (2.0 * constants::k_boltzmann);
    auto nbar = thermal_occupations_at_temperature(omega, t);
    CHECK(nbar[0] == doctest::Approx(9.50833).epsilon(1e-5));
    CHECK(nbar[1] < nbar[0]);
    CHECK_THROWS_AS(thermal_occupations_at_temperature(omega, 0.0), validation_error);
}

TEST_CASE("mode coupling strength scales as an inverse square root") {
    TrapConfig trap;
    trap.ion_count = 10;
    auto geo = make_chain_geometry(trap);
    auto spec = transverse_mode_spectrum(geo, trap);
    auto eta = lamb_dicke_parameters(spec, 0.1);
    CHECK(eta[0] == doctest::Approx(0.1).epsilon(1e-12));
    for (int k = 0; k < 10; ++k)
        CHECK(eta[k] == doctest::Approx(0.1 * std::sqrt(spec.freqs[0] / spec.freqs[k])).epsilon(1e-12));
    CHECK_THROWS_AS(lamb_dicke_parameters(spec, 0.0), validation_error);
}
