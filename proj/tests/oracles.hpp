#pragma once

// Independent reference implementations used only by tests. Everything here is
// deliberately written against the definitions, not against the library code:
// quadrature instead of closed forms, truncated Fock spaces instead of
// coherent-state algebra, long double series instead of the production series.

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

namespace oracles {

// Composite 16-point Gauss-Legendre quadrature of f over [a, b].
double integrate(const std::function<double(double)>& f, double a, double b, int panels);

std::complex<double> integrate_c(const std::function<std::complex<double>(double)>& f, double a,
                                 double b, int panels);

// Double integral int_a^b dt2 g2(t2) int_a^{t2} dt1 g1(t1, t2).
double integrate_nested(const std::function<double(double, double)>& f, double a, double b,
                        int panels);

// theta_3(k/2, q) = 1 + 2 Sum q^{n^2} cos(n k), long double accumulation.
long double theta3_half(long double k, long double q);

// Brute-force fidelity of the conditional phase flip: spectator spins
// z-enumerated (maximally mixed), motional modes as truncated Fock spaces with
// displacement operators built by scaling-and-squaring matrix exponentials.
double fock_fidelity(const Eigen::MatrixXcd& alpha, const Eigen::MatrixXd& phi,
                     const Eigen::VectorXd& nbar, int j, int n, int cutoff = 30);

}  // namespace oracles
