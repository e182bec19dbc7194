#include "refocus/linalg.hpp"

#include <cmath>

#include "refocus/errors.hpp"

namespace refocus {

namespace {

// Hager's 1-norm estimator for ||A^{-1}||_1 given solve callbacks for A and A^T.
template <typename Solve, typename SolveT>
double inv_norm1_estimate(int n, Solve&& solve, SolveT&& solve_t) {
    Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / n);
    double est = 0.0;
    for (int iter = 0; iter < 5; ++iter) {
        Eigen::VectorXd y = solve(x);
        double y1 = y.lpNorm<1>();
        Eigen::VectorXd xi(n);
        for (int i = 0; i < n; ++i) xi[i] = (y[i] >= 0.0) ? 1.0 : -1.0;
        Eigen::VectorXd z = solve_t(xi);
        int jmax;
        double zmax = z.cwiseAbs().maxCoeff(&jmax);
        est = std::max(est, y1);
        if (zmax <= z.dot(x)) break;
        x.setZero();
        x[jmax] = 1.0;
    }
    return est;
}

}  // namespace

double condest_1norm(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu, double anorm1) {
    int n = static_cast<int>(lu.rows());
    double inv = inv_norm1_estimate(
        n, [&](const Eigen::VectorXd& v) { return lu.solve(v).eval(); },
        [&](const Eigen::VectorXd& v) { return lu.transpose().solve(v).eval(); });
    return anorm1 * inv;
}

double condest_1norm(const Eigen::PartialPivLU<Eigen::MatrixXcd>& lu, double anorm1) {
    int n = static_cast<int>(lu.rows());
    // Real Hager sweep on the complex operator via |.|-sign vectors is enough
    // for an order-of-magnitude estimate.
    Eigen::VectorXcd x = Eigen::VectorXcd::Constant(n, std::complex<double>(1.0 / n, 0.0));
    double est = 0.0;
    for (int iter = 0; iter < 5; ++iter) {
        Eigen::VectorXcd y = lu.solve(x);
        double y1 = 0.0;
        for (int i = 0; i < n; ++i) y1 += std::abs(y[i]);
        Eigen::VectorXcd xi(n);
        for (int i = 0; i < n; ++i) {
            double m = std::abs(y[i]);
            xi[i] = (m > 0.0) ? y[i] / m : std::complex<double>(1.0, 0.0);
        }
        Eigen::VectorXcd z = lu.adjoint().solve(xi);
        int jmax = 0;
        double zmax = 0.0;
        for (int i = 0; i < n; ++i)
            if (std::abs(z[i]) > zmax) { zmax = std::abs(z[i]); jmax = i; }
        est = std::max(est, y1);
        double overlap = std::abs(z.dot(x));
        if (zmax <= overlap) break;
        x.setZero();
        x[jmax] = 1.0;
    }
    return anorm1 * est;
}

bool BandedCholesky::compute(const Eigen::MatrixXd& a, int m) {
    n_ = static_cast<int>(a.rows());
    m_ = m;
    l_ = Eigen::MatrixXd::Zero(m + 1, n_);
    // l_(d, j) holds L(j + d, j), d = 0..m
    for (int j = 0; j < n_; ++j) {
        double diag = a(j, j);
        int lo = std::max(0, j - m_);
        for (int p = lo; p < j; ++p) {
            double lj = l_(j - p, p);
            diag -= lj * lj;
        }
        if (!(diag > 0.0) || !std::isfinite(diag)) return false;
        double dj = std::sqrt(diag);
        l_(0, j) = dj;
        int hi = std::min(n_ - 1, j + m_);
        for (int i = j + 1; i <= hi; ++i) {
            double s = a(i, j);
            int plo = std::max({0, i - m_, j - m_});
            for (int p = plo; p < j; ++p) s -= l_(i - p, p) * l_(j - p, p);
            l_(i - j, j) = s / dj;
        }
    }
    return true;
}

Eigen::VectorXd BandedCholesky::solve(const Eigen::VectorXd& rhs) const {
    if (rhs.size() != n_) throw validation_error("banded solve: dimension mismatch");
    Eigen::VectorXd y = rhs;
    for (int j = 0; j < n_; ++j) {
        y[j] /= l_(0, j);
        int hi = std::min(n_ - 1, j + m_);
        for (int i = j + 1; i <= hi; ++i) y[i] -= l_(i - j, j) * y[j];
    }
    for (int j = n_ - 1; j >= 0; --j) {
        int hi = std::min(n_ - 1, j + m_);
        for (int i = j + 1; i <= hi; ++i) y[j] -= l_(i - j, j) * y[i];
        y[j] /= l_(0, j);
    }
    return y;
}

int matrix_half_bandwidth(const Eigen::MatrixXd& a, double tol) {
    int n = static_cast<int>(a.rows());
    int bw = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (std::abs(a(i, j)) > tol) bw = std::max(bw, std::abs(i - j));
    return bw;
}

}
