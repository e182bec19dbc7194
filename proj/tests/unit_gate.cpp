#include "doctest.h"

#include <cmath>
#include <complex>

#include "oracles.hpp"
#include "refocus/chain.hpp"
#include "refocus/errors.hpp"
#include "refocus/gate.hpp"
#include "refocus/rng.hpp"

using namespace refocus;
using cd = std::complex<double>;

namespace {

const double pi = 3.14159265358979323846;

struct Chain20 {
    TrapConfig trap;
    ChainGeometry geo;
    ModeSpectrum modes;
    Eigen::VectorXd nbar;
    Chain20() {
        trap.ion_count = 20;
        geo = make_chain_geometry(trap);
        modes = transverse_mode_spectrum(geo, trap);
        nbar = thermal_occupations_com_reference(modes);
    }
};

const Chain20& chain20() {
    static Chain20 c;
    return c;
}

}  // namespace

TEST_CASE("single oscillating integrals match quadrature") {
    const double tau = 7.7;
    for (double z : {2.3, -0.4, 11.0}) {
        cd want = oracles::integrate_c([&](double t) { return std::exp(cd{0.0, z * t}); }, 0.0,
                                       tau, 200);
        CHECK(std::abs(eps1(z, tau) - want) < 1e-12);
        cd want_t = oracles::integrate_c([&](double t) { return t * std::exp(cd{0.0, z * t}); },
                                         0.0, tau, 200);
        CHECK(std::abs(eps1t(z, tau) - want_t) < 1e-11);
    }
}

TEST_CASE("oscillating integrals are continuous across the small-argument branch") {
    const double tau = 13.0;
    // The series/closed-form handoff sits at |z| tau = 1/2; straddle it closely
    // enough that the function's own variation is below the tolerance.
    double z_lo = 0.5 * (1.0 - 1e-13) / tau, z_hi = 0.5 * (1.0 + 1e-13) / tau;
    CHECK(std::abs(eps1(z_lo, tau) - eps1(z_hi, tau)) < 1e-12 * tau);
    CHECK(std::abs(eps1t(z_lo, tau) - eps1t(z_hi, tau)) < 1e-12 * tau * tau);
    CHECK(std::abs(eps1(0.0, tau) - cd{tau, 0.0}) < 1e-15);
    CHECK(std::abs(eps1t(0.0, tau) - cd{0.5 * tau * tau, 0.0}) < 1e-12);
    // Deep inside the old cancellation regime both integrals stay smooth.
    for (double x : {1e-10, 1e-8, 1e-6, 1e-4}) {
        double z = x / tau;
        CHECK(std::abs(eps1(z, tau) - cd{tau, 0.0}) < tau * x);
        CHECK(std::abs(eps1t(z, tau) - cd{0.5 * tau * tau, 0.0}) < tau * tau * x);
    }
}

TEST_CASE("displacement integral matches quadrature on and off resonance") {
    for (auto [mu, w, tau] : {std::tuple{1.3, 0.9, 21.5}, {1.1, 1.1, 13.0}, {9.9888, 10.0, 40.0}}) {
        cd want = oracles::integrate_c(
            [&, mu = mu, w = w](double t) { return std::sin(mu * t) * std::exp(cd{0.0, w * t}); },
            0.0, tau, 800);
        CHECK(std::abs(displacement_integral(mu, w, tau) - want) < 1e-11);
    }
}

TEST_CASE("two-spin phase integral matches nested quadrature") {
    for (auto [mu, w, tau] : {std::tuple{1.3, 0.9, 21.5}, {1.1, 1.1, 13.0}, {9.9888, 10.0, 50.0}}) {
        double want = oracles::integrate_nested(
            [&, mu = mu, w = w](double t1, double t2) {
                return std::sin(mu * t2) * std::sin(w * (t2 - t1)) * std::sin(mu * t1);
            },
            0.0, tau, 700);
        CHECK(phase_integral(mu, w, tau) == doctest::Approx(want).epsilon(5e-9));
    }
}

TEST_CASE("correction beams center on the nearest ions") {
    const auto& c = chain20();
    CHECK(correction_sites(c.geo.u, 9, 0) == std::vector<int>{9});
    CHECK(correction_sites(c.geo.u, 9, 2) == std::vector<int>{8, 9, 10});
    CHECK(correction_sites(c.geo.u, 9, 8) == std::vector<int>{5, 6, 7, 8, 9, 10, 11, 12, 13});
    CHECK(correction_sites(c.geo.u, 0, 3) == std::vector<int>{0, 1, 2, 3});
    CHECK(correction_sites(c.geo.u, 19, 2) == std::vector<int>{17, 18, 19});
    CHECK_THROWS_AS(correction_sites(c.geo.u, 25, 2), validation_error);
}

TEST_CASE("refocused drive profile: delta on the correction set, leak outside") {
    const auto& c = chain20();
    auto beam = BeamProfile::make_gaussian(1.15 * c.geo.min_spacing());

    auto prof0 = target_profile(c.geo.u, beam, 9, 0);
    CHECK(prof0[9] == doctest::Approx(1.0).epsilon(1e-12));
    // bare gaussian leak on the neighbor, roughly e^{-(a/w)^2}
    CHECK(prof0[10] == doctest::Approx(std::exp(-1.0 / (1.15 * 1.15))).epsilon(0.05));

    auto prof_full = target_profile(c.geo.u, beam, 9, 19);
    for (int i = 0; i < 20; ++i)
        CHECK(std::abs(prof_full[i] - (i == 9 ? 1.0 : 0.0)) < 1e-9);

    double prev = 1e9;
    for (int n_corr : {0, 2, 4, 6, 8}) {
        auto prof = target_profile(c.geo.u, beam, 9, n_corr);
        CHECK(prof[9] == doctest::Approx(1.0).epsilon(1e-10));
        auto sites = correction_sites(c.geo.u, 9, n_corr);
        double leak = 0.0;
        for (int i = 0; i < 20; ++i) {
            bool active = std::find(sites.begin(), sites.end(), i) != sites.end();
            if (active && i != 9)
                CHECK(std::abs(prof[i]) < 1e-10);
            else if (!active)
                leak = std::max(leak, std::abs(prof[i]));
        }
        CHECK(leak < prev);
        prev = leak;
    }

    // Edge target: correction restricted to one side still improves monotonically.
    prev = 1e9;
    for (int n_corr : {0, 1, 2, 3}) {
        auto prof = target_profile(c.geo.u, beam, 0, n_corr);
        double leak = 0.0;
        for (int i = n_corr + 1; i < 20; ++i) leak = std::max(leak, std::abs(prof[i]));
        CHECK(leak < prev);
        prev = leak;
    }
}

TEST_CASE("effective drive is linear in the two beam amplitudes") {
    const auto& c = chain20();
    GateConfig cfg;
    cfg.target_j = 9;
    cfg.target_n = 10;
    cfg.rabi_j = 0.3;
    cfg.rabi_n = 0.5;
    cfg.n_corr = 2;
    cfg.beam = BeamProfile::make_gaussian(1.15 * c.geo.min_spacing());

    auto v = effective_rabi(c.geo.u, cfg);
    for (int i = 0; i < 20; ++i)
        CHECK(v.omega[i] ==
              doctest::Approx(0.3 * v.profile_j[i] + 0.5 * v.profile_n[i]).epsilon(1e-12));

    auto ideal = effective_rabi(c.geo.u, cfg, true);
    for (int i = 0; i < 20; ++i) {
        double want = (i == 9) ? 0.3 : (i == 10) ? 0.5 : 0.0;
        CHECK(ideal.omega[i] == doctest::Approx(want).epsilon(1e-12));
    }

    GateConfig bad = cfg;
    bad.target_n = 9;
    CHECK_THROWS_AS(effective_rabi(c.geo.u, bad), validation_error);
}

TEST_CASE("gate phase assembly matches direct quadrature") {
    ModeSpectrum spec;
    spec.descending = true;
    spec.freqs.resize(2);
    spec.freqs << 1.0, 0.8;
    spec.vectors.resize(2, 2);
    double th = 0.3;
    spec.vectors << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);

    Eigen::VectorXd omega(2);
    omega << 0.2, 0.7;
    const double eta_com = 0.13, mu = 0.9, tau = 10.0;
    auto ph = gate_phases(omega, spec, eta_com, mu, tau);

    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) {
            double eta_k = eta_com * std::sqrt(1.0 / spec.freqs[k]);
            cd want = omega[i] * eta_k * spec.vectors(i, k) *
                      oracles::integrate_c(
                          [&](double t) {
                              return std::sin(mu * t) * std::exp(cd{0.0, spec.freqs[k] * t});
                          },
                          0.0, tau, 400);
            CHECK(std::abs(ph.alpha(i, k) - want) < 1e-10);
        }

    for (int i = 0; i < 2; ++i) CHECK(ph.phi(i, i) == 0.0);
    double want01 = 0.0;
    for (int k = 0; k < 2; ++k) {
        double eta_k = eta_com * std::sqrt(1.0 / spec.freqs[k]);
        double gi = eta_k * spec.vectors(0, k), gn = eta_k * spec.vectors(1, k);
        want01 += 2.0 * omega[0] * omega[1] * gi * gn *
                  oracles::integrate_nested(
                      [&](double t1, double t2) {
                          return std::sin(mu * t2) * std::sin(spec.freqs[k] * (t2 - t1)) *
                                 std::sin(mu * t1);
                      },
                      0.0, tau, 300);
    }
    CHECK(ph.phi(0, 1) == doctest::Approx(want01).epsilon(1e-8));
    CHECK(ph.phi(1, 0) == doctest::Approx(ph.phi(0, 1)).epsilon(1e-14));
}

TEST_CASE("ideal conditional phase gives unit fidelity, detuned phase cos^2") {
    GatePhases ph;
    ph.alpha = Eigen::MatrixXcd::Zero(4, 3);
    ph.phi = Eigen::MatrixXd::Zero(4, 4);
    Eigen::VectorXd nbar = Eigen::VectorXd::Constant(3, 0.7);

    ph.phi(0, 2) = ph.phi(2, 0) = pi / 4.0;
    auto r = gate_fidelity(ph, nbar, 0, 2);
    CHECK(r.fidelity == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.motional_loss == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.phase_error == doctest::Approx(0.0).epsilon(1e-12));

    const double delta = 0.17;
    ph.phi(0, 2) = ph.phi(2, 0) = pi / 4.0 + delta;
    auto rd = gate_fidelity(ph, nbar, 0, 2);
    CHECK(rd.fidelity == doctest::Approx(std::cos(delta) * std::cos(delta)).epsilon(1e-12));
    CHECK(rd.phase_error == doctest::Approx(rd.infidelity).epsilon(1e-12));
    CHECK(rd.motional_loss == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("closed-form fidelity agrees with a truncated Fock simulation") {
    NormalStream s(2026);
    double maxerr = 0.0;
    for (int draw = 0; draw < 6; ++draw) {
        const int ions = 3, modes = 3;
        GatePhases ph;
        ph.alpha.resize(ions, modes);
        ph.phi.resize(ions, ions);
        for (int i = 0; i < ions; ++i)
            for (int k = 0; k < modes; ++k)
                ph.alpha(i, k) = 0.25 * cd{s.normal(), s.normal()};
        ph.phi.setZero();
        for (int i = 0; i < ions; ++i)
            for (int m = i + 1; m < ions; ++m)
                ph.phi(i, m) = ph.phi(m, i) = 0.4 * s.normal();
        Eigen::VectorXd nbar(modes);
        for (int k = 0; k < modes; ++k) nbar[k] = 0.2 + 0.8 * s.uniform01();

        double closed = gate_fidelity(ph, nbar, 0, 2).fidelity;
        double fock = oracles::fock_fidelity(ph.alpha, ph.phi, nbar, 0, 2);
        maxerr = std::max(maxerr, std::abs(closed - fock));
    }
    CHECK(maxerr < 1e-7);
}

TEST_CASE("hotter modes decay the fidelity faster") {
    GatePhases ph;
    ph.alpha = Eigen::MatrixXcd::Constant(2, 1, cd{0.1, 0.05});
    ph.phi = Eigen::MatrixXd::Zero(2, 2);
    ph.phi(0, 1) = ph.phi(1, 0) = pi / 4.0;
    Eigen::VectorXd cold = Eigen::VectorXd::Constant(1, 0.1);
    Eigen::VectorXd hot = Eigen::VectorXd::Constant(1, 2.0);
    CHECK(gate_fidelity(ph, cold, 0, 1).fidelity > gate_fidelity(ph, hot, 0, 1).fidelity);
}

TEST_CASE("amplitude optimizer is deterministic and finds the baseline dip") {
    const auto& c = chain20();
    GateConfig cfg;
    cfg.target_j = 9;
    cfg.target_n = 10;
    cfg.mu = 9.9888;
    cfg.beam = BeamProfile::make_gaussian(1.15 * c.geo.min_spacing());
    OptimizerPolicy pol;

    auto a = optimize_rabi(c.geo.u, c.modes, c.nbar, cfg, pol, true);
    auto b = optimize_rabi(c.geo.u, c.modes, c.nbar, cfg, pol, true);
    CHECK(a.infidelity == b.infidelity);
    CHECK(a.best_rabi_j == b.best_rabi_j);
    CHECK(a.best_rabi_n == b.best_rabi_n);
    CHECK(a.converged);
    CHECK(a.infidelity > 3e-3);
    CHECK(a.infidelity < 6e-3);

    OptimizerPolicy bad;
    bad.restarts = 0;
    CHECK_THROWS_AS(optimize_rabi(c.geo.u, c.modes, c.nbar, cfg, bad, true), validation_error);
}

TEST_CASE("detuning scan reproduces pointwise optimization") {
    const auto& c = chain20();
    GateConfig cfg;
    cfg.target_j = 9;
    cfg.target_n = 10;
    cfg.n_corr = 2;
    cfg.beam = BeamProfile::make_gaussian(1.15 * c.geo.min_spacing());
    OptimizerPolicy pol;
    pol.coarse_grid = 8;  // keep the scan cheap

    std::vector<double> grid = {9.98, 9.9888};
    auto pts = scan_detuning(c.geo.u, c.modes, c.nbar, cfg, grid, pol);
    REQUIRE(pts.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(pts[i].mu == grid[i]);
        GateConfig at = cfg;
        at.mu = grid[i];
        auto direct = optimize_rabi(c.geo.u, c.modes, c.nbar, at, pol, false);
        CHECK(pts[i].infidelity == direct.infidelity);
        auto ideal = optimize_rabi(c.geo.u, c.modes, c.nbar, at, pol, true);
        CHECK(pts[i].baseline_infidelity == ideal.infidelity);
        CHECK(pts[i].baseline_infidelity <= pts[i].infidelity * (1.0 + 1e-9));
    }
    CHECK_THROWS_AS(scan_detuning(c.geo.u, c.modes, c.nbar, cfg, {}, pol), validation_error);
}

TEST_CASE("gate configuration validation") {
    GateConfig cfg;
    CHECK(cfg.tau() == doctest::Approx(180.0 * 2.0 * pi));
    cfg.target_j = cfg.target_n = 1;
    CHECK_THROWS_AS(cfg.validate(20), validation_error);
    cfg.target_j = 0;
    cfg.target_n = 25;
    CHECK_THROWS_AS(cfg.validate(20), validation_error);
    cfg.target_n = 1;
    cfg.mu = -1.0;
    CHECK_THROWS_AS(cfg.validate(20), validation_error);
    cfg.mu = 10.0;
    cfg.n_corr = -1;
    CHECK_THROWS_AS(cfg.validate(20), validation_error);
}
