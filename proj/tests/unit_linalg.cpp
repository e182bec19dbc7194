#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>

#include "refocus/linalg.hpp"
#include "refocus/rng.hpp"

using namespace refocus;

namespace {

Eigen::MatrixXd random_banded_spd(int n, int bw, std::uint64_t seed) {
    NormalStream s(seed);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = j; i <= std::min(n - 1, j + bw); ++i) {
            a(i, j) = s.normal();
            a(j, i) = a(i, j);
        }
    // Diagonal dominance makes it positive definite.
    for (int i = 0; i < n; ++i) a(i, i) = 2.0 * bw + 2.0 + std::abs(a(i, i));
    return a;
}

}  // namespace

TEST_CASE("banded Cholesky solves match dense solves") {
    for (int bw : {1, 3, 7}) {
        Eigen::MatrixXd a = random_banded_spd(40, bw, 11 + bw);
        NormalStream s(99);
        Eigen::VectorXd rhs(40);
        for (int i = 0; i < 40; ++i) rhs[i] = s.normal();

        BandedCholesky chol;
        REQUIRE(chol.compute(a, bw));
        CHECK(chol.dim() == 40);
        CHECK(chol.half_bandwidth() == bw);
        Eigen::VectorXd x = chol.solve(rhs);
        Eigen::VectorXd x_dense = a.ldlt().solve(rhs);
        CHECK((x - x_dense).cwiseAbs().maxCoeff() < 1e-11);
        CHECK((a * x - rhs).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("banded Cholesky rejects indefinite matrices") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(5, 5);
    a(2, 2) = -1.0;
    BandedCholesky chol;
    CHECK_FALSE(chol.compute(a, 0));
}

TEST_CASE("condition estimate brackets the true 1-norm condition number") {
    // Diagonal matrix: exact condition number known.
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(6, 6);
    for (int i = 0; i < 6; ++i) d(i, i) = std::pow(10.0, -i);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(d);
    double est = condest_1norm(lu, 1.0);
    CHECK(est == doctest::Approx(1e5).epsilon(1e-8));

    // Random dense matrix: the estimate is a lower bound within a small factor.
    NormalStream s(5);
    Eigen::MatrixXd a(30, 30);
    for (int i = 0; i < 30; ++i)
        for (int j = 0; j < 30; ++j) a(i, j) = s.normal();
    double anorm = a.cwiseAbs().colwise().sum().maxCoeff();
    Eigen::PartialPivLU<Eigen::MatrixXd> lua(a);
    double inv_norm = lua.inverse().cwiseAbs().colwise().sum().maxCoeff();
    double exact = anorm * inv_norm;
    double est_a = condest_1norm(lua, anorm);
    CHECK(est_a <= exact * (1.0 + 1e-12));
    CHECK(est_a >= 0.1 * exact);
}

TEST_CASE("complex condition estimate") {
    NormalStream s(17);
    Eigen::MatrixXcd a(20, 20);
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) a(i, j) = std::complex<double>{s.normal(), s.normal()};
    double anorm = a.cwiseAbs().colwise().sum().maxCoeff();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
    double inv_norm = lu.inverse().cwiseAbs().colwise().sum().maxCoeff();
    double exact = anorm * inv_norm;
    double est = condest_1norm(lu, anorm);
    CHECK(est <= exact * (1.0 + 1e-12));
    CHECK(est >= 0.1 * exact);
}

TEST_CASE("half bandwidth detection") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(8, 8);
    CHECK(matrix_half_bandwidth(a) == 0);
    a(0, 3) = 1e-20;
    CHECK(matrix_half_bandwidth(a) == 0);  // below tolerance
    a(0, 3) = 1e-3;
    CHECK(matrix_half_bandwidth(a) == 3);
    a(7, 0) = 0.5;
    CHECK(matrix_half_bandwidth(a) == 7);
}
