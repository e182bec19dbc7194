#include "refocus/noise.hpp"

#include <cmath>

#include "refocus/errors.hpp"
#include "refocus/parallel.hpp"
#include "refocus/rng.hpp"

namespace refocus {

void BeamErrorModel::validate() const {
    if (!(delta_r >= 0.0)) throw validation_error("amplitude error std must be >= 0");
    if (!(delta_phi >= 0.0)) throw validation_error("phase error std must be >= 0");
    if (samples < 1) throw validation_error("sample count must be >= 1");
}

Eigen::VectorXcd perturb_envelope(const EnvelopeSolution& f, const Eigen::VectorXd& r,
                                  const Eigen::VectorXd& phi) {
    const int a = static_cast<int>(f.active_indices.size());
    if (r.size() != a || phi.size() != a)
        throw validation_error("error vectors must match the active beam count");
    Eigen::VectorXcd out = f.amplitudes;
    for (int b = 0; b < a; ++b) {
        int j = f.active_indices[b];
        out[j] *= (1.0 + r[b]) * std::complex<double>{std::cos(phi[b]), std::sin(phi[b])};
    }
    return out;
}

double intensity_error(const Eigen::VectorXcd& ideal, const Eigen::VectorXcd& perturbed) {
    if (ideal.size() != perturbed.size())
        throw validation_error("profiles must have matching size");
    double acc = 0.0;
    for (int n = 0; n < ideal.size(); ++n)
        acc += std::abs(std::norm(perturbed[n]) - std::norm(ideal[n]));
    return acc / ideal.size();
}

MonteCarloCell monte_carlo_cell(const EnvelopeSolution& f, const AddressingMatrix& m,
                                const BeamErrorModel& model) {
    model.validate();
    if (m.entries.cols() != f.amplitudes.size())
        throw validation_error("matrix and envelope sizes do not match");

    const int a = static_cast<int>(f.active_indices.size());
    const Eigen::VectorXcd ideal = m.entries * f.amplitudes;

    double sum = 0.0, sum_sq = 0.0;
    Eigen::VectorXd r(a), phi(a);
    for (int s = 0; s < model.samples; ++s) {
        // One stream per sample index: every grid cell sees the same normals,
        // scaled by its own deltas, so grids vary smoothly in (dr, dphi).
        NormalStream stream(derive_seed(model.seed, static_cast<std::uint64_t>(s)));
        for (int b = 0; b < a; ++b) r[b] = model.delta_r * stream.normal();
        for (int b = 0; b < a; ++b) phi[b] = model.delta_phi * stream.normal();
        double eps = intensity_error(ideal, m.entries * perturb_envelope(f, r, phi));
        sum += eps;
        sum_sq += eps * eps;
    }

    MonteCarloCell cell;
    cell.mean = sum / model.samples;
    if (model.samples > 1) {
        double var = (sum_sq - sum * sum / model.samples) / (model.samples - 1);
        cell.standard_error = std::sqrt(std::max(0.0, var) / model.samples);
    }
    return cell;
}

NoiseGrid monte_carlo_grid(const EnvelopeSolution& f, const AddressingMatrix& m,
                           const std::vector<double>& delta_r_axis,
                           const std::vector<double>& delta_phi_axis, int samples,
                           std::uint64_t seed) {
    if (delta_r_axis.empty() || delta_phi_axis.empty())
        throw validation_error("noise grid axes must be nonempty");
    NoiseGrid grid;
    grid.delta_r_axis = delta_r_axis;
    grid.delta_phi_axis = delta_phi_axis;
    const int nr = static_cast<int>(delta_r_axis.size());
    const int np = static_cast<int>(delta_phi_axis.size());
    grid.mean_error.resize(nr, np);
    grid.standard_error.resize(nr, np);

    parallel_for(static_cast<std::size_t>(nr) * np, [&](std::size_t idx) {
        const int ir = static_cast<int>(idx) / np;
        const int ip = static_cast<int>(idx) % np;
        BeamErrorModel model;
        model.delta_r = delta_r_axis[ir];
        model.delta_phi = delta_phi_axis[ip];
        model.samples = samples;
        model.seed = seed;
        MonteCarloCell cell = monte_carlo_cell(f, m, model);
        grid.mean_error(ir, ip) = cell.mean;
        grid.standard_error(ir, ip) = cell.standard_error;
    });
    return grid;
}

PositionFluctuation thermal_position_std(const ChainGeometry& geometry, const TrapConfig& config,
                                         double gamma_linewidth) {
    config.validate();
    if (!(gamma_linewidth > 0.0)) throw validation_error("linewidth must be positive");

    ModeSpectrum axial = axial_mode_spectrum(geometry);
    const int n = geometry.size();
    Eigen::VectorXd omega = axial.freqs * config.omega_z;
    const double temperature = constants::hbar * gamma_linewidth / (2.0 * constants::k_boltzmann);

    PositionFluctuation out;
    out.occupations = thermal_occupations_at_temperature(omega, temperature);
    out.com_occupation = out.occupations[0];
    out.sigma.resize(n);
    for (int i = 0; i < n; ++i) {
        double var = 0.0;
        for (int k = 0; k < n; ++k) {
            double b = axial.vectors(i, k);
            var += b * b * constants::hbar / (2.0 * config.ion_mass * omega[k]) *
                   (2.0 * out.occupations[k] + 1.0);
        }
        out.sigma[i] = std::sqrt(var);
    }
    return out;
}

}
