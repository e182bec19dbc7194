#include "refocus/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "refocus/errors.hpp"
#include "refocus/linalg.hpp"

namespace refocus {

namespace {

constexpr double pi = std::numbers::pi;

double hager_estimate_spd(const BandedCholesky& chol, int n) {
    Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / n);
    double est = 0.0;
    for (int iter = 0; iter < 5; ++iter) {
        Eigen::VectorXd y = chol.solve(x);
        Eigen::VectorXd xi(n);
        for (int i = 0; i < n; ++i) xi[i] = (y[i] >= 0.0) ? 1.0 : -1.0;
        Eigen::VectorXd z = chol.solve(xi);
        int jmax;
        double zmax = z.cwiseAbs().maxCoeff(&jmax);
        est = std::max(est, y.lpNorm<1>());
        if (zmax <= z.dot(x)) break;
        x.setZero();
        x[jmax] = 1.0;
    }
    return est;
}

}  // namespace

AddressingMatrix build_addressing_matrix(const QubitLattice& lattice, const BeamProfile& beam,
                                         const std::vector<double>& centers) {
    lattice.validate();
    if (centers.empty()) throw validation_error("addressing matrix needs at least one beam center");
    const int n = lattice.size();
    const int c = static_cast<int>(centers.size());
    AddressingMatrix m;
    m.site_positions = lattice.positions;
    m.beam_centers = centers;
    m.entries.resize(n, c);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < c; ++j) {
            std::complex<double> v = beam.amplitude(lattice.positions[i] - centers[j]);
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw numerical_error("non-finite addressing matrix entry");
            m.entries(i, j) = v;
        }
    return m;
}

bool AddressingMatrix::is_real() const {
    return entries.imag().cwiseAbs().maxCoeff() == 0.0;
}

EnvelopeSolution solve_envelope_exact(const AddressingMatrix& m, int target, double cond_limit) {
    const int n = static_cast<int>(m.entries.rows());
    if (m.entries.cols() != n) throw validation_error("envelope solve needs a square matrix");
    if (target < 0 || target >= n) throw validation_error("target index out of range");

    EnvelopeSolution sol;
    sol.target_index = target;
    sol.truncation_epsilon = 0.0;

    Eigen::VectorXcd f(n);
    double cond = 0.0;

    if (m.is_real()) {
        Eigen::MatrixXd a = m.real_part();
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
        rhs[target] = 1.0;
        const int bw = matrix_half_bandwidth(a);
        bool solved = false;
        if (bw <= 8 && a.isApprox(a.transpose(), 1e-14)) {
            BandedCholesky chol;
            if (chol.compute(a, bw)) {
                Eigen::VectorXd x = chol.solve(rhs);
                double anorm = a.cwiseAbs().colwise().sum().maxCoeff();
                cond = anorm * hager_estimate_spd(chol, n);
                f = x.cast<std::complex<double>>();
                solved = true;
            }
        }
        if (!solved) {
            Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
            double anorm = a.cwiseAbs().colwise().sum().maxCoeff();
            cond = condest_1norm(lu, anorm);
            f = lu.solve(rhs).cast<std::complex<double>>();
        }
    } else {
        Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
        rhs[target] = 1.0;
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m.entries);
        double anorm = m.entries.cwiseAbs().colwise().sum().maxCoeff();
        cond = condest_1norm(lu, anorm);
        f = lu.solve(rhs);
    }

    if (!std::isfinite(cond) || cond > cond_limit) {
        char est[32];
        std::snprintf(est, sizeof est, "%.3g", cond);
        throw numerical_error(std::string("addressing matrix too ill-conditioned to invert "
                                          "(estimate ") + est + ")");
    }

    sol.amplitudes = f;
    sol.condition_estimate = cond;
    Eigen::VectorXcd recon = m.entries * f;
    recon[target] -= 1.0;
    sol.residual_max = recon.cwiseAbs().maxCoeff();
    sol.active_indices.reserve(n);
    for (int j = 0; j < n; ++j)
        if (std::abs(f[j]) > 0.0) sol.active_indices.push_back(j);
    return sol;
}

double gaussian_spectrum(double k, double gamma, int order_cutoff) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw validation_error("gamma must lie in (0, 1)");
    if (order_cutoff < 1) throw validation_error("order cutoff must be >= 1");
    double s = 1.0;
    for (int n = 1; n <= order_cutoff; ++n) {
        double w = 2.0 * std::pow(gamma, static_cast<double>(n) * n);
        if (w < 1e-16) break;
        s += w * std::cos(n * k);
    }
    return s;
}

double exponential_spectrum(double k, double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw validation_error("lambda must lie in (0, 1)");
    return (1.0 - lambda * lambda) / (1.0 - 2.0 * lambda * std::cos(k) + lambda * lambda);
}

EnvelopeSolution solve_envelope_fourier(const BeamProfile& beam, int n_sites, int target,
                                        double spacing_a) {
    if (n_sites < 2) throw validation_error("need at least 2 sites");
    if (target < 0 || target >= n_sites) throw validation_error("target index out of range");
    if (beam.kind == BeamKind::plane_wave)
        throw validation_error("fourier inversion is defined for gaussian and exponential beams");

    const double decay = beam.lattice_decay(spacing_a);
    EnvelopeSolution sol;
    sol.target_index = target;
    sol.amplitudes.resize(n_sites);

    const int m_lo = -(n_sites / 2);
    const int m_hi = m_lo + n_sites - 1;
    std::vector<double> inv_g(n_sites);
    for (int m = m_lo; m <= m_hi; ++m) {
        double k = 2.0 * pi * m / n_sites;
        double gk = (beam.kind == BeamKind::gaussian) ? gaussian_spectrum(k, decay)
                                                      : exponential_spectrum(k, decay);
        if (gk == 0.0) throw numerical_error("beam spectrum vanishes; profile not invertible");
        inv_g[m - m_lo] = 1.0 / gk;
    }
    for (int j = 0; j < n_sites; ++j) {
        const int d = j - target;
        double acc = 0.0;
        for (int m = m_lo; m <= m_hi; ++m)
            acc += std::cos(2.0 * pi * m * d / n_sites) * inv_g[m - m_lo];
        sol.amplitudes[j] = acc / n_sites;
    }

    // Residual against the periodic (image-summed) beam the inversion assumes.
    std::vector<double> g_ring(n_sites, 0.0);
    for (int d = 0; d < n_sites; ++d) {
        double acc = 0.0;
        for (int p = -64; p <= 64; ++p) {
            double x = (d + static_cast<double>(p) * n_sites) * spacing_a;
            acc += beam.amplitude_real(x);
        }
        g_ring[d] = acc;
    }
    double worst = 0.0;
    for (int nidx = 0; nidx < n_sites; ++nidx) {
        std::complex<double> acc = 0.0;
        for (int j = 0; j < n_sites; ++j) {
            int d = ((nidx - j) % n_sites + n_sites) % n_sites;
            acc += g_ring[d] * sol.amplitudes[j];
        }
        if (nidx == target) acc -= 1.0;
        worst = std::max(worst, std::abs(acc));
    }
    sol.residual_max = worst;
    sol.condition_estimate = 0.0;
    sol.active_indices.resize(n_sites);
    for (int j = 0; j < n_sites; ++j) sol.active_indices[j] = j;
    return sol;
}

double f0_small_waist(double gamma) {
    if (!(gamma >= 0.0 && gamma < 0.5))
        throw validation_error("small-waist form requires gamma < 1/2");
    return 1.0 / std::sqrt(1.0 - 4.0 * gamma * gamma);
}

double f0_large_waist(double w_over_a) {
    if (!(w_over_a >= 1.0)) throw validation_error("large-waist form requires w/a >= 1");
    double r = 1.0 / w_over_a;
    return 2.0 / std::pow(pi, 2.5) * r * r * r * std::exp(pi * pi * w_over_a * w_over_a / 4.0);
}

EnvelopeSolution truncate_envelope(const EnvelopeSolution& f, const AddressingMatrix& m,
                                   double epsilon, bool resolve_active) {
    if (!(epsilon > 0.0)) throw validation_error("truncation epsilon must be positive");
    EnvelopeSolution out;
    out.target_index = f.target_index;
    out.truncation_epsilon = epsilon;
    out.condition_estimate = f.condition_estimate;
    const int n = static_cast<int>(f.amplitudes.size());
    out.amplitudes = Eigen::VectorXcd::Zero(n);
    for (int j = 0; j < n; ++j)
        if (std::abs(f.amplitudes[j]) > epsilon) out.active_indices.push_back(j);

    if (resolve_active) {
        const int a = static_cast<int>(out.active_indices.size());
        int tpos = -1;
        for (int r = 0; r < a; ++r)
            if (out.active_indices[r] == f.target_index) tpos = r;
        if (tpos < 0) throw validation_error("target beam was truncated away; cannot re-solve");
        Eigen::MatrixXcd sub(a, a);
        Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(a);
        for (int r = 0; r < a; ++r)
            for (int c = 0; c < a; ++c)
                sub(r, c) = m.entries(out.active_indices[r], out.active_indices[c]);
        rhs[tpos] = 1.0;
        Eigen::VectorXcd sub_f = Eigen::PartialPivLU<Eigen::MatrixXcd>(sub).solve(rhs);
        for (int r = 0; r < a; ++r) out.amplitudes[out.active_indices[r]] = sub_f[r];
    } else {
        for (int j : out.active_indices) out.amplitudes[j] = f.amplitudes[j];
    }

    Eigen::VectorXcd recon = m.entries * out.amplitudes;
    recon[f.target_index] -= 1.0;
    out.residual_max = recon.cwiseAbs().maxCoeff();
    return out;
}

double predicted_active_count(const BeamProfile& beam, double spacing_a, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw validation_error("epsilon must lie in (0, 1)");
    switch (beam.kind) {
        case BeamKind::gaussian: {
            double wa = beam.width / spacing_a;
            return 2.0 * wa * wa * std::log(1.0 / epsilon);
        }
        case BeamKind::exponential:
            return 3.0;  // exact two-neighbor support
        case BeamKind::plane_wave:
            throw validation_error("no truncation count for plane waves");
    }
    return 0.0;
}

int active_count_relative(const EnvelopeSolution& f, double epsilon) {
    double f0 = std::abs(f.amplitudes[f.target_index]);
    int count = 0;
    for (int j = 0; j < f.amplitudes.size(); ++j)
        if (std::abs(f.amplitudes[j]) > epsilon * f0) ++count;
    return count;
}

RefocusedProfile refocused_profile(const EnvelopeSolution& f, const BeamProfile& beam,
                                   const std::vector<double>& centers,
                                   const std::vector<double>& grid) {
    if (grid.empty()) throw validation_error("profile grid must be nonempty");
    if (static_cast<int>(centers.size()) != f.amplitudes.size())
        throw validation_error("center count does not match amplitude count");
    RefocusedProfile p;
    p.grid = grid;
    p.values.resize(static_cast<int>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::complex<double> acc = 0.0;
        for (std::size_t j = 0; j < centers.size(); ++j)
            acc += f.amplitudes[static_cast<int>(j)] * beam.amplitude(grid[i] - centers[j]);
        p.values[static_cast<int>(i)] = acc;
    }
    return p;
}

namespace {

// Newton refinement of a root of P_n in extended precision; the companion
// eigenvalues land close enough that a few steps reach machine accuracy.
std::complex<double> polish_root(double gamma, int n, std::complex<double> r0) {
    using cl = std::complex<long double>;
    std::vector<long double> coef(2 * n + 1, 0.0L);  // coef[p] multiplies x^p
    coef[n] = 1.0L;
    for (int m = 1; m <= n; ++m) {
        long double g = powl(static_cast<long double>(gamma), static_cast<long double>(m) * m);
        coef[n - m] += g;
        coef[n + m] += g;
    }
    cl r(r0.real(), r0.imag());
    for (int it = 0; it < 6; ++it) {
        cl p = coef[2 * n], dp = 0.0L;
        for (int k = 2 * n - 1; k >= 0; --k) {
            dp = dp * r + p;
            p = p * r + coef[k];
        }
        if (std::abs(dp) == 0.0L) break;
        cl step = p / dp;
        r -= step;
        if (std::abs(step) < 1e-18L * std::abs(r)) break;
    }
    return {static_cast<double>(r.real()), static_cast<double>(r.imag())};
}

}  // namespace

std::vector<std::complex<double>> toeplitz_polynomial_roots(double gamma, int n) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw validation_error("gamma must lie in (0, 1)");
    if (n < 1 || n > 6) throw validation_error("polynomial order must be in [1, 6]");
    // P_n is palindromic, so substitute y = x + 1/x:
    // x^{-n} P_n(x) = 1 + Sum_m gamma^{m^2} (x^m + x^{-m}) = 1 + Sum_m gamma^{m^2} p_m(y)
    // with p_0 = 2, p_1 = y, p_{m+1} = y p_m - p_{m-1}. Roots then come in exact
    // reciprocal pairs from the quadratic x^2 - y x + 1 = 0.
    std::vector<Eigen::VectorXd> p(n + 1);
    p[0] = Eigen::VectorXd::Constant(1, 2.0);
    if (n >= 1) {
        p[1] = Eigen::VectorXd::Zero(2);
        p[1][1] = 1.0;
    }
    for (int m = 2; m <= n; ++m) {
        p[m] = Eigen::VectorXd::Zero(m + 1);
        p[m].segment(1, m) += p[m - 1];
        p[m].head(m - 1) -= p[m - 2];
    }
    Eigen::VectorXd q = Eigen::VectorXd::Zero(n + 1);
    q[0] = 1.0;
    for (int m = 1; m <= n; ++m)
        q.head(m + 1) += std::pow(gamma, static_cast<double>(m) * m) * p[m];

    std::vector<std::complex<double>> y_roots(n);
    if (n == 1) {
        y_roots[0] = -q[0] / q[1];
    } else {
        Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
        for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
        for (int i = 0; i < n; ++i) companion(i, n - 1) = -q[i] / q[n];
        Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
        if (es.info() != Eigen::Success) throw numerical_error("companion eigensolve failed");
        for (int i = 0; i < n; ++i) y_roots[i] = es.eigenvalues()[i];
    }

    std::vector<std::complex<double>> roots;
    roots.reserve(2 * n);
    for (const auto& y : y_roots) {
        std::complex<double> s = std::sqrt(y * y - 4.0);
        std::complex<double> big = 0.5 * (y + s);
        if (std::abs(y - s) > std::abs(big) * 2.0) big = 0.5 * (y - s);
        std::complex<double> small = polish_root(gamma, n, 1.0 / big);
        roots.push_back(small);
        roots.push_back(1.0 / small);
    }
    std::sort(roots.begin(), roots.end(), [](auto a, auto b) {
        return std::abs(a) < std::abs(b);
    });
    return roots;
}

std::complex<double> toeplitz_polynomial_eval(double gamma, int n, std::complex<double> x) {
    std::complex<double> acc = std::pow(x, n);
    for (int m = 1; m <= n; ++m) {
        double g = std::pow(gamma, static_cast<double>(m) * m);
        acc += g * (std::pow(x, n - m) + std::pow(x, n + m));
    }
    return acc;
}

DecayFit fit_decay_constant(const EnvelopeSolution& f, int d_min, int d_max) {
    if (d_min < 1 || d_max < d_min) throw validation_error("bad decay fit range");
    const int n = static_cast<int>(f.amplitudes.size());
    const int t = f.target_index;
    std::vector<double> xs, ys;
    bool alternate = true;
    for (int d = d_min; d <= d_max; ++d) {
        for (int j : {t - d, t + d}) {
            if (j < 0 || j >= n) continue;
            double mag = std::abs(f.amplitudes[j]);
            if (!(mag > 0.0)) throw validation_error("zero amplitude in decay fit range");
            xs.push_back(d);
            ys.push_back(std::log(mag));
            double re = f.amplitudes[j].real();
            double expect = (d % 2 == 0) ? 1.0 : -1.0;
            if (re * expect <= 0.0) alternate = false;
        }
    }
    if (xs.size() < 4) throw validation_error("decay fit needs at least 4 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double m = xs.size();
    DecayFit fit;
    fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    fit.signs_alternate = alternate;
    return fit;
}

}
