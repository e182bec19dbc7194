#include "refocus/gate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "refocus/errors.hpp"
#include "refocus/parallel.hpp"

namespace refocus {

namespace {

constexpr double pi = std::numbers::pi;
constexpr std::complex<double> iu{0.0, 1.0};

}  // namespace

void GateConfig::validate(int n_ions) const {
    if (target_j < 0 || target_j >= n_ions || target_n < 0 || target_n >= n_ions)
        throw validation_error("gate targets out of range");
    if (target_j == target_n) throw validation_error("gate targets must differ");
    if (!(mu > 0.0)) throw validation_error("detuning mu must be positive");
    if (!(tau_periods > 0.0)) throw validation_error("gate time must be positive");
    if (!(rabi_j >= 0.0 && rabi_n >= 0.0)) throw validation_error("Rabi amplitudes must be >= 0");
    if (n_corr < 0) throw validation_error("correction beam count must be >= 0");
    if (!(eta_com > 0.0)) throw validation_error("eta_com must be positive");
}

std::vector<int> correction_sites(const Eigen::VectorXd& u, int target, int n_corr) {
    const int n = static_cast<int>(u.size());
    if (target < 0 || target >= n) throw validation_error("target index out of range");
    if (n_corr < 0) throw validation_error("correction beam count must be >= 0");
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        double da = std::abs(u[a] - u[target]);
        double db = std::abs(u[b] - u[target]);
        if (da != db) return da < db;
        return a < b;
    });
    const int keep = std::min(n, n_corr + 1);
    std::vector<int> sites(order.begin(), order.begin() + keep);
    std::sort(sites.begin(), sites.end());
    return sites;
}

Eigen::VectorXd target_profile(const Eigen::VectorXd& u, const BeamProfile& beam,
                               int target, int n_corr) {
    const int n = static_cast<int>(u.size());
    std::vector<int> sites = correction_sites(u, target, n_corr);
    const int a = static_cast<int>(sites.size());

    Eigen::MatrixXd sub(a, a);
    for (int r = 0; r < a; ++r)
        for (int c = 0; c < a; ++c) sub(r, c) = beam.amplitude_real(u[sites[r]] - u[sites[c]]);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(a);
    for (int r = 0; r < a; ++r)
        if (sites[r] == target) rhs[r] = 1.0;
    Eigen::VectorXd f = Eigen::PartialPivLU<Eigen::MatrixXd>(sub).solve(rhs);
    if (!f.allFinite()) throw numerical_error("correction beam solve failed");

    Eigen::VectorXd profile(n);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int r = 0; r < a; ++r) acc += f[r] * beam.amplitude_real(u[i] - u[sites[r]]);
        profile[i] = acc;
    }
    return profile;
}

EffectiveRabiVector effective_rabi(const Eigen::VectorXd& u, const GateConfig& config,
                                   bool perfect_focusing) {
    const int n = static_cast<int>(u.size());
    config.validate(n);
    EffectiveRabiVector v;
    if (perfect_focusing) {
        v.profile_j = Eigen::VectorXd::Zero(n);
        v.profile_n = Eigen::VectorXd::Zero(n);
        v.profile_j[config.target_j] = 1.0;
        v.profile_n[config.target_n] = 1.0;
    } else {
        v.profile_j = target_profile(u, config.beam, config.target_j, config.n_corr);
        v.profile_n = target_profile(u, config.beam, config.target_n, config.n_corr);
    }
    v.omega = config.rabi_j * v.profile_j + config.rabi_n * v.profile_n;
    return v;
}

namespace {

// Sum_{m>=0} (ix)^m / (m! (m+shift)), the Taylor form of the phase integrals;
// used below the |x| = 1/2 branch point where the closed forms cancel badly.
std::complex<double> phase_series(double x, int shift) {
    std::complex<double> term = 1.0 / static_cast<double>(shift);
    std::complex<double> acc = term;
    for (int m = 1; m < 32; ++m) {
        term *= iu * x * (static_cast<double>(m - 1 + shift) /
                          (static_cast<double>(m) * (m + shift)));
        acc += term;
        if (std::abs(term) < 1e-20 * std::abs(acc)) break;
    }
    return acc;
}

}  // namespace

std::complex<double> eps1(double z, double tau) {
    const double x = z * tau;
    if (std::abs(x) < 0.5) return tau * phase_series(x, 1);
    // e^{ix} - 1 written without cancellation.
    const double s = std::sin(0.5 * x);
    return std::complex<double>(-2.0 * s * s, std::sin(x)) / (iu * z);
}

std::complex<double> eps1t(double z, double tau) {
    const double x = z * tau;
    if (std::abs(x) < 0.5) return tau * tau * phase_series(x, 2);
    const std::complex<double> e = std::exp(iu * x);
    return tau * e / (iu * z) - (e - 1.0) / (iu * iu * z * z);
}

std::complex<double> displacement_integral(double mu, double w, double tau) {
    return (eps1(w + mu, tau) - eps1(w - mu, tau)) / (2.0 * iu);
}

namespace {

// int_0^tau dt2 e^{i a t2} int_0^{t2} dt1 e^{i b t1}
std::complex<double> nested_exp_integral(double a, double b, double tau) {
    if (std::abs(b) * tau < 1e-8) return eps1t(a, tau);
    return (eps1(a + b, tau) - eps1(a, tau)) / (iu * b);
}

}  // namespace

double phase_integral(double mu, double w, double tau) {
    std::complex<double> acc = 0.0;
    for (int s1 : {-1, 1})
        for (int s2 : {-1, 1})
            for (int s3 : {-1, 1}) {
                double a = s1 * mu + s3 * w;
                double b = s2 * mu - s3 * w;
                acc += (iu / 8.0) * static_cast<double>(s1 * s2 * s3) *
                       nested_exp_integral(a, b, tau);
            }
    return acc.real();
}

GatePhases gate_phases(const Eigen::VectorXd& omega_eff, const ModeSpectrum& transverse,
                       double eta_com, double mu, double tau) {
    const int n = static_cast<int>(omega_eff.size());
    const int k_modes = static_cast<int>(transverse.freqs.size());
    if (n != k_modes) throw validation_error("mode count does not match ion count");

    Eigen::VectorXd eta = lamb_dicke_parameters(transverse, eta_com);
    Eigen::MatrixXd g(n, k_modes);  // g_i^k = eta_k b_i^k
    for (int k = 0; k < k_modes; ++k) g.col(k) = eta[k] * transverse.vectors.col(k);

    Eigen::VectorXcd disp(k_modes);
    Eigen::VectorXd iph(k_modes);
    for (int k = 0; k < k_modes; ++k) {
        disp[k] = displacement_integral(mu, transverse.freqs[k], tau);
        iph[k] = phase_integral(mu, transverse.freqs[k], tau);
    }

    Eigen::MatrixXd w = omega_eff.asDiagonal() * g;  // W_ik = Omega_i g_i^k
    GatePhases ph;
    ph.alpha = w.cast<std::complex<double>>() * disp.asDiagonal();
    ph.phi = 2.0 * w * iph.asDiagonal() * w.transpose();
    ph.phi.diagonal().setZero();
    return ph;
}

namespace {

FidelityResult fidelity_from(const GatePhases& phases, const Eigen::VectorXd& nbar, int j, int n) {
    const int ions = static_cast<int>(phases.alpha.rows());
    const int k_modes = static_cast<int>(phases.alpha.cols());
    if (nbar.size() != k_modes) throw validation_error("occupation count does not match mode count");

    std::complex<double> acc = 0.0;
    for (int sj : {-1, 1})
        for (int sn : {-1, 1})
            for (int tj : {-1, 1})
                for (int tn : {-1, 1}) {
                    const int dphase = sj * sn - tj * tn;
                    std::complex<double> term =
                        std::exp(-iu * (pi * dphase / 4.0)) *
                        std::exp(iu * (phases.phi(j, n) * dphase));

                    double decay = 0.0;
                    double overlap_im = 0.0;
                    for (int k = 0; k < k_modes; ++k) {
                        std::complex<double> t = double(sj) * phases.alpha(j, k) +
                                                 double(sn) * phases.alpha(n, k);
                        std::complex<double> tt = double(tj) * phases.alpha(j, k) +
                                                  double(tn) * phases.alpha(n, k);
                        overlap_im += (std::conj(tt) * t).imag();
                        decay += std::norm(t - tt) * (nbar[k] + 0.5);
                    }
                    term *= std::exp(iu * overlap_im) * std::exp(-decay);

                    for (int i = 0; i < ions; ++i) {
                        if (i == j || i == n) continue;
                        double lambda = phases.phi(i, j) * (sj - tj) + phases.phi(i, n) * (sn - tn);
                        for (int k = 0; k < k_modes; ++k) {
                            std::complex<double> d = double(sj - tj) * phases.alpha(j, k) +
                                                     double(sn - tn) * phases.alpha(n, k);
                            lambda += (std::conj(phases.alpha(i, k)) * d).imag();
                        }
                        term *= std::cos(lambda);
                    }
                    acc += term;
                }

    FidelityResult r;
    r.fidelity = acc.real() / 16.0;
    r.infidelity = 1.0 - r.fidelity;
    return r;
}

}  // namespace

FidelityResult gate_fidelity(const GatePhases& phases, const Eigen::VectorXd& nbar, int j, int n) {
    const int ions = static_cast<int>(phases.alpha.rows());
    if (j < 0 || j >= ions || n < 0 || n >= ions || j == n)
        throw validation_error("gate targets out of range");

    FidelityResult r = fidelity_from(phases, nbar, j, n);

    GatePhases ideal_phi = phases;
    ideal_phi.phi.setZero();
    ideal_phi.phi(j, n) = ideal_phi.phi(n, j) = pi / 4.0;
    r.motional_loss = fidelity_from(ideal_phi, nbar, j, n).infidelity;

    GatePhases no_alpha = phases;
    no_alpha.alpha.setZero();
    r.phase_error = fidelity_from(no_alpha, nbar, j, n).infidelity;
    return r;
}

double gate_infidelity(const Eigen::VectorXd& u, const ModeSpectrum& transverse,
                       const Eigen::VectorXd& nbar, const GateConfig& config,
                       bool perfect_focusing) {
    EffectiveRabiVector v = effective_rabi(u, config, perfect_focusing);
    GatePhases ph = gate_phases(v.omega, transverse, config.eta_com, config.mu, config.tau());
    return fidelity_from(ph, nbar, config.target_j, config.target_n).infidelity;
}

namespace {

// Precomputed pieces that do not depend on the Rabi amplitudes.
struct GateKernel {
    Eigen::VectorXd profile_j, profile_n;
    Eigen::MatrixXd g;        // g_i^k
    Eigen::VectorXcd disp;    // displacement integral per mode
    Eigen::VectorXd iph;      // phase integral per mode
    Eigen::VectorXd nbar;
    int j = 0, n = 0;

    double infidelity(double rabi_j, double rabi_n) const {
        Eigen::VectorXd omega = rabi_j * profile_j + rabi_n * profile_n;
        Eigen::MatrixXd w = omega.asDiagonal() * g;
        GatePhases ph;
        ph.alpha = w.cast<std::complex<double>>() * disp.asDiagonal();
        ph.phi = 2.0 * w * iph.asDiagonal() * w.transpose();
        ph.phi.diagonal().setZero();
        return fidelity_from(ph, nbar, j, n).infidelity;
    }
};

GateKernel make_kernel(const Eigen::VectorXd& u, const ModeSpectrum& transverse,
                       const Eigen::VectorXd& nbar, const GateConfig& config,
                       bool perfect_focusing) {
    GateKernel ker;
    EffectiveRabiVector v = effective_rabi(u, config, perfect_focusing);
    ker.profile_j = v.profile_j;
    ker.profile_n = v.profile_n;
    const int n = static_cast<int>(u.size());
    const int k_modes = static_cast<int>(transverse.freqs.size());
    Eigen::VectorXd eta = lamb_dicke_parameters(transverse, config.eta_com);
    ker.g.resize(n, k_modes);
    for (int k = 0; k < k_modes; ++k) ker.g.col(k) = eta[k] * transverse.vectors.col(k);
    ker.disp.resize(k_modes);
    ker.iph.resize(k_modes);
    const double tau = config.tau();
    for (int k = 0; k < k_modes; ++k) {
        ker.disp[k] = displacement_integral(config.mu, transverse.freqs[k], tau);
        ker.iph[k] = phase_integral(config.mu, transverse.freqs[k], tau);
    }
    ker.nbar = nbar;
    ker.j = config.target_j;
    ker.n = config.target_n;
    return ker;
}

constexpr double golden_ratio_inv = 0.6180339887498949;

template <typename F>
double golden_section(F&& f, double lo, double hi, double tol) {
    double a = lo, b = hi;
    double c = b - golden_ratio_inv * (b - a);
    double d = a + golden_ratio_inv * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - golden_ratio_inv * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + golden_ratio_inv * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

DetuningScanPoint optimize_rabi(const Eigen::VectorXd& u, const ModeSpectrum& transverse,
                                const Eigen::VectorXd& nbar, GateConfig config,
                                const OptimizerPolicy& policy, bool perfect_focusing) {
    if (!(policy.omega_max > 0.0)) throw validation_error("omega_max must be positive");
    if (policy.coarse_grid < 2 || policy.restarts < 1 || policy.sweeps < 1)
        throw validation_error("bad optimizer policy");

    GateKernel ker = make_kernel(u, transverse, nbar, config, perfect_focusing);
    const double lo = 1e-6 * policy.omega_max;
    const double cell = policy.omega_max / policy.coarse_grid;

    // Deterministic coarse grid; the best `restarts` cells seed coordinate descent.
    std::vector<std::pair<double, std::pair<double, double>>> cells;
    cells.reserve(static_cast<std::size_t>(policy.coarse_grid) * policy.coarse_grid);
    for (int cj = 0; cj < policy.coarse_grid; ++cj)
        for (int cn = 0; cn < policy.coarse_grid; ++cn) {
            double oj = cell * (cj + 0.5);
            double on = cell * (cn + 0.5);
            cells.push_back({ker.infidelity(oj, on), {oj, on}});
        }
    std::partial_sort(cells.begin(), cells.begin() + policy.restarts, cells.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });

    double best_inf = cells[0].first;
    double best_oj = cells[0].second.first;
    double best_on = cells[0].second.second;

    for (int r = 0; r < policy.restarts; ++r) {
        double oj = cells[r].second.first;
        double on = cells[r].second.second;
        double h = cell;
        for (int sweep = 0; sweep < policy.sweeps; ++sweep) {
            double oj_prev = oj, on_prev = on;
            oj = golden_section([&](double x) { return ker.infidelity(x, on); },
                                std::max(lo, oj - h), std::min(policy.omega_max, oj + h),
                                policy.tol);
            on = golden_section([&](double x) { return ker.infidelity(oj, x); },
                                std::max(lo, on - h), std::min(policy.omega_max, on + h),
                                policy.tol);
            // Shrink the bracket only once the walk stalls inside it, so a
            // diagonal valley can be followed beyond the initial cell.
            if (std::abs(oj - oj_prev) + std::abs(on - on_prev) < 0.25 * h) h *= 0.5;
            if (h < 4.0 * policy.tol) break;
        }
        double inf = ker.infidelity(oj, on);
        if (inf < best_inf) {
            best_inf = inf;
            best_oj = oj;
            best_on = on;
        }
    }

    DetuningScanPoint pt;
    pt.mu = config.mu;
    pt.best_rabi_j = best_oj;
    pt.best_rabi_n = best_on;
    pt.infidelity = best_inf;
    pt.converged = std::isfinite(best_inf);
    return pt;
}

std::vector<DetuningScanPoint> scan_detuning(const Eigen::VectorXd& u,
                                             const ModeSpectrum& transverse,
                                             const Eigen::VectorXd& nbar,
                                             const GateConfig& config_template,
                                             const std::vector<double>& mu_grid,
                                             const OptimizerPolicy& policy) {
    if (mu_grid.empty()) throw validation_error("detuning grid must be nonempty");
    std::vector<DetuningScanPoint> points(mu_grid.size());
    parallel_for(mu_grid.size(), [&](std::size_t i) {
        GateConfig cfg = config_template;
        cfg.mu = mu_grid[i];
        DetuningScanPoint focused = optimize_rabi(u, transverse, nbar, cfg, policy, false);
        DetuningScanPoint ideal = optimize_rabi(u, transverse, nbar, cfg, policy, true);
        focused.baseline_infidelity = ideal.infidelity;
        points[i] = focused;
    });
    return points;
}

}
