#pragma once

#include <Eigen/Dense>
#include <complex>

namespace refocus {

// 1-norm condition estimate (Hager/Higham style) from an LU factorization.
double condest_1norm(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu, double anorm1);
double condest_1norm(const Eigen::PartialPivLU<Eigen::MatrixXcd>& lu, double anorm1);

// Symmetric positive definite banded Cholesky, half bandwidth m.
// Returns false if the matrix is not numerically positive definite.
// band(i, j) holds A(j + i - m, j) for i in [max(0, m - j), m], i.e. row index
// within the band; only the lower triangle (i <= m) is referenced.
class BandedCholesky {
public:
    // a: full symmetric matrix (only the band is read); m: half bandwidth.
    bool compute(const Eigen::MatrixXd& a, int m);
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
    int dim() const { return n_; }
    int half_bandwidth() const { return m_; }

private:
    Eigen::MatrixXd l_;   // (m+1) x n band storage of the Cholesky factor
    int n_ = 0;
    int m_ = 0;
};

// Half bandwidth of a matrix treating |entry| <= tol as zero.
int matrix_half_bandwidth(const Eigen::MatrixXd& a, double tol = 1e-15);

}
