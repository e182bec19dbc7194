// Microbenchmarks for the hot paths: envelope solves, chain setup, the gate
// fidelity kernel driving the optimizer, Monte Carlo noise samples.

#include <benchmark/benchmark.h>

#include "refocus/chain.hpp"
#include "refocus/envelope.hpp"
#include "refocus/gate.hpp"
#include "refocus/noise.hpp"
#include "refocus/spectral.hpp"

using namespace refocus;

namespace {

AddressingMatrix homogeneous_matrix(int n, double waist) {
    auto lattice = QubitLattice::homogeneous(n, 1.0);
    auto beam = BeamProfile::make_gaussian(waist);
    return build_addressing_matrix(lattice, beam, lattice.positions);
}

void bm_envelope_banded(benchmark::State& state) {
    auto m = homogeneous_matrix(401, 0.7);  // narrow beam keeps the band small
    for (auto _ : state) benchmark::DoNotOptimize(solve_envelope_exact(m, 200));
}
BENCHMARK(bm_envelope_banded)->Unit(benchmark::kMillisecond);

void bm_envelope_dense(benchmark::State& state) {
    auto m = homogeneous_matrix(401, 1.5);  // wide beam falls back to dense LU
    for (auto _ : state) benchmark::DoNotOptimize(solve_envelope_exact(m, 200));
}
BENCHMARK(bm_envelope_dense)->Unit(benchmark::kMillisecond);

void bm_envelope_fourier(benchmark::State& state) {
    auto beam = BeamProfile::make_gaussian(1.0);
    for (auto _ : state) benchmark::DoNotOptimize(solve_envelope_fourier(beam, 401, 200));
}
BENCHMARK(bm_envelope_fourier)->Unit(benchmark::kMillisecond);

void bm_gaussian_spectrum(benchmark::State& state) {
    double k = 0.3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(gaussian_spectrum(k, 0.64));
        k = k < 3.0 ? k + 1e-3 : 0.3;
    }
}
BENCHMARK(bm_gaussian_spectrum);

void bm_equilibrium_21(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(equilibrium_positions(21));
}
BENCHMARK(bm_equilibrium_21)->Unit(benchmark::kMillisecond);

void bm_transverse_modes_20(benchmark::State& state) {
    TrapConfig trap;
    trap.ion_count = 20;
    auto geo = make_chain_geometry(trap);
    for (auto _ : state) benchmark::DoNotOptimize(transverse_mode_spectrum(geo, trap));
}
BENCHMARK(bm_transverse_modes_20);

struct GateFixture {
    ChainGeometry geo;
    ModeSpectrum modes;
    Eigen::VectorXd nbar;
    GateConfig cfg;

    GateFixture() {
        TrapConfig trap;
        trap.ion_count = 20;
        geo = make_chain_geometry(trap);
        modes = transverse_mode_spectrum(geo, trap);
        nbar = thermal_occupations_com_reference(modes);
        cfg.target_j = 9;
        cfg.target_n = 10;
        cfg.beam = BeamProfile::make_gaussian(1.15 * geo.min_spacing());
        cfg.n_corr = 4;
    }
};

void bm_gate_infidelity(benchmark::State& state) {
    static const GateFixture fx;
    for (auto _ : state)
        benchmark::DoNotOptimize(gate_infidelity(fx.geo.u, fx.modes, fx.nbar, fx.cfg));
}
BENCHMARK(bm_gate_infidelity);

void bm_gate_phases(benchmark::State& state) {
    static const GateFixture fx;
    auto eff = effective_rabi(fx.geo.u, fx.cfg);
    Eigen::VectorXd omega = 0.2 * eff.profile_j + 0.15 * eff.profile_n;
    for (auto _ : state)
        benchmark::DoNotOptimize(
            gate_phases(omega, fx.modes, fx.cfg.eta_com, fx.cfg.mu, fx.cfg.tau()));
}
BENCHMARK(bm_gate_phases);

void bm_optimize_rabi(benchmark::State& state) {
    static const GateFixture fx;
    OptimizerPolicy policy;
    for (auto _ : state)
        benchmark::DoNotOptimize(optimize_rabi(fx.geo.u, fx.modes, fx.nbar, fx.cfg, policy));
}
BENCHMARK(bm_optimize_rabi)->Unit(benchmark::kMillisecond);

void bm_monte_carlo_200(benchmark::State& state) {
    TrapConfig trap;
    trap.ion_count = 21;
    auto geo = make_chain_geometry(trap);
    std::vector<double> pos(geo.u.data(), geo.u.data() + 21);
    double w = geo.u[11] - geo.u[10];
    auto lattice = QubitLattice::from_positions(pos, w);
    auto m = build_addressing_matrix(lattice, BeamProfile::make_gaussian(w), pos);
    auto f = solve_envelope_exact(m, 10);
    BeamErrorModel model;
    model.delta_r = 0.05;
    model.delta_phi = 0.2;
    model.samples = 200;
    for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_cell(f, m, model));
}
BENCHMARK(bm_monte_carlo_200)->Unit(benchmark::kMillisecond);

void bm_spectral_solve_21(benchmark::State& state) {
    TrapConfig trap;
    trap.ion_count = 21;
    auto geo = make_chain_geometry(trap);
    std::vector<double> pos(geo.u.data(), geo.u.data() + 21);
    auto waves = make_plane_wave_set(21, geo.min_spacing(), WavevectorGrid::endpoint);
    auto m = plane_wave_matrix(pos, waves);
    for (auto _ : state) benchmark::DoNotOptimize(solve_spectral_amplitudes(m, 10));
}
BENCHMARK(bm_spectral_solve_21);

}  // namespace

BENCHMARK_MAIN();
