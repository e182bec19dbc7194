#include "refocus/chain.hpp"

#include <cmath>

#include "refocus/errors.hpp"

namespace refocus {

namespace constants {

double default_ion_mass_kg() {
    // hbar / (2 omega_z x0^2) with x0 = 5.4 nm, omega_z = 2 pi x 1 MHz.
    const double omega_z = 2.0 * 3.14159265358979323846 * 1.0e6;
    const double x0 = 5.4e-9;
    return hbar / (2.0 * omega_z * x0 * x0);
}

}  // namespace constants

void TrapConfig::validate() const {
    if (ion_count < 1) throw validation_error("ion count must be >= 1");
    if (!(omega_z > 0.0)) throw validation_error("axial frequency must be positive");
    if (!(anisotropy > 0.0)) throw validation_error("anisotropy must be positive");
    if (!(ion_mass > 0.0)) throw validation_error("ion mass must be positive");
    if (charge_number < 1) throw validation_error("charge number must be >= 1");
}

double TrapConfig::length_scale() const {
    const double q = charge_number * constants::elementary_charge;
    return std::cbrt(constants::coulomb_k * q * q / (ion_mass * omega_z * omega_z));
}

double ChainGeometry::min_spacing() const {
    double s = std::numeric_limits<double>::infinity();
    for (int i = 1; i < size(); ++i) s = std::min(s, u[i] - u[i - 1]);
    return s;
}

double ChainGeometry::max_spacing() const {
    double s = 0.0;
    for (int i = 1; i < size(); ++i) s = std::max(s, u[i] - u[i - 1]);
    return s;
}

namespace {

double chain_potential(const Eigen::VectorXd& u) {
    const int n = static_cast<int>(u.size());
    double v = 0.5 * u.squaredNorm();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) v += 1.0 / (u[j] - u[i]);
    return v;
}

Eigen::VectorXd chain_gradient(const Eigen::VectorXd& u) {
    const int n = static_cast<int>(u.size());
    Eigen::VectorXd g = u;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double inv2 = 1.0 / ((u[j] - u[i]) * (u[j] - u[i]));
            g[i] += inv2;
            g[j] -= inv2;
        }
    return g;
}

Eigen::MatrixXd chain_hessian(const Eigen::VectorXd& u) {
    const int n = static_cast<int>(u.size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) h(i, i) = 1.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double d = u[j] - u[i];
            double inv3 = 2.0 / (d * d * d);
            h(i, i) += inv3;
            h(j, j) += inv3;
            h(i, j) -= inv3;
            h(j, i) -= inv3;
        }
    return h;
}

bool strictly_increasing(const Eigen::VectorXd& u) {
    for (int i = 1; i < u.size(); ++i)
        if (!(u[i] > u[i - 1])) return false;
    return true;
}

}  // namespace

double equilibrium_residual(const Eigen::VectorXd& u) {
    return chain_gradient(u).cwiseAbs().maxCoeff();
}

Eigen::VectorXd equilibrium_positions(int n_ions) {
    if (n_ions < 1) throw validation_error("ion count must be >= 1");
    if (n_ions == 1) return Eigen::VectorXd::Zero(1);

    // The potential is strictly convex on the ordered domain, so Newton with an
    // Armijo backtracking line search converges from any ordered seed.
    const double spacing0 = 2.018 / std::pow(n_ions, 0.559);
    Eigen::VectorXd u(n_ions);
    for (int i = 0; i < n_ions; ++i) u[i] = spacing0 * (i - 0.5 * (n_ions - 1));

    double v = chain_potential(u);
    for (int iter = 0; iter < 200; ++iter) {
        Eigen::VectorXd g = chain_gradient(u);
        if (g.cwiseAbs().maxCoeff() < 1e-13) break;
        Eigen::MatrixXd h = chain_hessian(u);
        Eigen::LLT<Eigen::MatrixXd> llt(h);
        Eigen::VectorXd p = (llt.info() == Eigen::Success)
                                ? Eigen::VectorXd(-llt.solve(g))
                                : Eigen::VectorXd(-g);
        // Near the optimum the Armijo decrease (~|g|^2) falls below the roundoff
        // noise of the potential; plain Newton is locally convergent, so take the
        // full step as long as it keeps the ions ordered.
        if (g.cwiseAbs().maxCoeff() < 1e-6) {
            Eigen::VectorXd trial = u + p;
            if (strictly_increasing(trial)) {
                u = trial;
                v = chain_potential(u);
                continue;
            }
        }
        double slope = g.dot(p);
        double t = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            Eigen::VectorXd trial = u + t * p;
            if (strictly_increasing(trial)) {
                double vt = chain_potential(trial);
                if (vt <= v + 1e-4 * t * slope) {
                    u = trial;
                    v = vt;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if (!accepted) break;
    }
    if (equilibrium_residual(u) > 1e-12)
        throw numerical_error("equilibrium solve did not converge");
    return u;
}

ChainGeometry make_chain_geometry(const TrapConfig& config) {
    config.validate();
    ChainGeometry geo;
    geo.u = equilibrium_positions(config.ion_count);
    geo.length_scale = config.length_scale();
    return geo;
}

namespace {

void fix_vector_signs(Eigen::MatrixXd& vectors) {
    for (int k = 0; k < vectors.cols(); ++k) {
        double s = vectors.col(k).sum();
        if (std::abs(s) < 1e-9) {
            int imax;
            vectors.col(k).cwiseAbs().maxCoeff(&imax);
            s = vectors(imax, k);
        }
        if (s < 0.0) vectors.col(k) = -vectors.col(k);
    }
}

}  // namespace

ModeSpectrum transverse_mode_spectrum(const ChainGeometry& geometry, const TrapConfig& config) {
    config.validate();
    const int n = geometry.size();
    const double aniso2 = config.anisotropy * config.anisotropy;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        double diag = aniso2;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            double d = std::abs(geometry.u[i] - geometry.u[j]);
            double inv3 = 1.0 / (d * d * d);
            diag -= inv3;
            a(i, j) = inv3;
        }
        a(i, i) = diag;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    if (es.info() != Eigen::Success) throw numerical_error("transverse eigensolve failed");
    if (es.eigenvalues()[0] <= 0.0)
        throw numerical_error("transverse spectrum unstable; raise the anisotropy");

    ModeSpectrum spec;
    spec.descending = true;
    spec.freqs = es.eigenvalues().reverse().cwiseSqrt();
    spec.vectors = es.eigenvectors().rowwise().reverse();
    fix_vector_signs(spec.vectors);
    return spec;
}

ModeSpectrum axial_mode_spectrum(const ChainGeometry& geometry) {
    const int n = geometry.size();
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        double diag = 1.0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            double d = std::abs(geometry.u[i] - geometry.u[j]);
            double inv3 = 2.0 / (d * d * d);
            diag += inv3;
            b(i, j) = -inv3;
        }
        b(i, i) = diag;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
    if (es.info() != Eigen::Success) throw numerical_error("axial eigensolve failed");

    ModeSpectrum spec;
    spec.descending = false;
    spec.freqs = es.eigenvalues().cwiseSqrt();
    spec.vectors = es.eigenvectors();
    fix_vector_signs(spec.vectors);
    return spec;
}

Eigen::VectorXd thermal_occupations_com_reference(const ModeSpectrum& transverse) {
    if (!transverse.descending) throw validation_error("expected a transverse (descending) spectrum");
    const double omega_com = transverse.freqs[0];
    Eigen::VectorXd nbar(transverse.freqs.size());
    for (int k = 0; k < nbar.size(); ++k)
        nbar[k] = 1.0 / (std::exp2(transverse.freqs[k] / omega_com) - 1.0);
    return nbar;
}

Eigen::VectorXd thermal_occupations_at_temperature(const Eigen::VectorXd& omega_rad_s,
                                                   double temperature_k) {
    if (!(temperature_k > 0.0)) throw validation_error("temperature must be positive");
    Eigen::VectorXd nbar(omega_rad_s.size());
    for (int k = 0; k < nbar.size(); ++k) {
        double r = constants::hbar * omega_rad_s[k] / (constants::k_boltzmann * temperature_k);
        nbar[k] = 1.0 / std::expm1(r);
    }
    return nbar;
}

Eigen::VectorXd lamb_dicke_parameters(const ModeSpectrum& transverse, double eta_com) {
    if (!transverse.descending) throw validation_error("expected a transverse (descending) spectrum");
    if (!(eta_com > 0.0)) throw validation_error("eta_com must be positive");
    const double omega_com = transverse.freqs[0];
    Eigen::VectorXd eta(transverse.freqs.size());
    for (int k = 0; k < eta.size(); ++k)
        eta[k] = eta_com * std::sqrt(omega_com / transverse.freqs[k]);
    return eta;
}

}
