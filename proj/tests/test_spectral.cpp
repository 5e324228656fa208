#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "tfpv/spectral.hpp"

using namespace tfpv;

TEST_CASE("characteristic polynomial of a 2x2 matrix") {
    Eigen::MatrixXd J(2, 2);
    J << -1, 2, 1, -3;
    CharPoly cp = charpoly_coeffs(J);
    REQUIRE(cp.n == 2);
    CHECK(cp.sigma_k(1) == doctest::Approx(4.0));  // -trace
    CHECK(cp.sigma_k(2) == doctest::Approx(1.0));  // det
    CHECK(cp.sigma_k(0) == 1.0);
}

TEST_CASE("closed-form roots for low degree") {
    // chi(tau) = tau^2 + 4 tau + 1, roots -2 +- sqrt(3)
    Eigen::VectorXd sigma(2);
    sigma << 4.0, 1.0;
    auto roots = poly_roots(sigma);
    REQUIRE(roots.size() == 2);
    CHECK(roots[0].real() == doctest::Approx(-2.0 - std::sqrt(3.0)));
    CHECK(roots[1].real() == doctest::Approx(-2.0 + std::sqrt(3.0)));
    CHECK(roots[0].imag() == doctest::Approx(0.0));
}

TEST_CASE("simultaneous iteration for degree four") {
    // (tau+1)(tau+2)(tau+3)(tau+4)
    Eigen::VectorXd sigma(4);
    sigma << 10.0, 35.0, 50.0, 24.0;
    auto roots = poly_roots(sigma);
    REQUIRE(roots.size() == 4);
    std::sort(roots.begin(), roots.end(),
              [](auto a, auto b) { return a.real() < b.real(); });
    std::vector<double> expect = {-4.0, -3.0, -2.0, -1.0};
    for (int i = 0; i < 4; ++i) {
        CHECK(roots[i].real() == doctest::Approx(expect[i]).epsilon(1e-10));
        CHECK(std::abs(roots[i].imag()) < 1e-10);
    }
}

TEST_CASE("eigenvalues satisfy the residual contract") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        int n = 3 + trial % 3;
        Eigen::MatrixXd J(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) J(i, j) = u(rng);
        Spectrum sp = eigenvalues(J);
        CharPoly cp = charpoly_coeffs(J);
        double scale = std::pow(std::max(1.0, J.cwiseAbs().rowwise().sum().maxCoeff()), n);
        for (auto lam : sp.lambda) {
            std::complex<double> chi(1.0, 0.0);
            for (int k = 1; k <= n; ++k) chi = chi * lam + cp.sigma_k(k);
            CHECK(std::abs(chi) <= 1e-8 * scale);
        }
    }
}

TEST_CASE("spectrum classification: real vs essentially real") {
    Spectrum sp = classify_spectrum({{-1.0, 0.0}, {-2.0, 0.0}});
    CHECK(sp.all_real);
    CHECK(sp.essentially_real);

    sp = classify_spectrum({{-2.0, 1.0}, {-2.0, -1.0}});
    CHECK_FALSE(sp.all_real);
    CHECK(sp.essentially_real);  // |Re| > |Im|

    sp = classify_spectrum({{-1.0, 3.0}, {-1.0, -3.0}});
    CHECK_FALSE(sp.essentially_real);
}

TEST_CASE("spectrum ordering by descending |Re|") {
    Spectrum sp = classify_spectrum({{-0.1, 0.0}, {-5.0, 0.0}, {-1.0, 0.0}});
    CHECK(sp.lambda[0].real() == doctest::Approx(-5.0));
    CHECK(sp.lambda[2].real() == doctest::Approx(-0.1));
}

TEST_CASE("index-sum rule for dimensionless sigma ratios") {
    // sigma_3 / (sigma_1 sigma_2): 3 == 1 + 2
    CHECK(check_dimensionless({3}, {1, 2}, 3));
    // sigma_3 sigma_1 / sigma_2^2: 3 + 1 == 2 + 2
    CHECK(check_dimensionless({3, 1}, {2, 2}, 3));
    // sigma_2 / sigma_1 carries dimension Time^{-1}
    CHECK_FALSE(check_dimensionless({2}, {1}, 3));
    // indices above n are invalid
    CHECK_THROWS(check_dimensionless({4}, {2, 2}, 3));
}

TEST_CASE("symmetric identity links the spectrum to sigma ratios") {
    // sum_{i != j} lambda_i / lambda_j = sigma_1 sigma_{n-1} / sigma_n - n
    Eigen::MatrixXd D = Eigen::Vector3d(-1.0, -2.0, -5.0).asDiagonal();
    Eigen::MatrixXd Q(3, 3);
    Q << 1, 1, 0, 0, 1, 1, 1, 0, 1;  // invertible, non-orthogonal
    Eigen::MatrixXd J = Q * D * Q.inverse();
    auto rep = symmetric_identity_check(eigenvalues(J), charpoly_coeffs(J));
    CHECK(rep.defined);
    CHECK(rep.pass);
    CHECK(rep.lhs ==
          doctest::Approx(0.5 + 2.0 + 0.2 + 5.0 + 0.4 + 2.5).epsilon(1e-9));
}

TEST_CASE("symmetric identity undefined at a singular matrix") {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2, 2);
    J(0, 1) = 1.0;
    auto rep = symmetric_identity_check(eigenvalues(J), charpoly_coeffs(J));
    CHECK_FALSE(rep.defined);
}

TEST_CASE("Routh-Hurwitz stability test") {
    Eigen::VectorXd stable(3);
    stable << 6.0, 11.0, 6.0;  // (tau+1)(tau+2)(tau+3)
    CHECK(routh_hurwitz_stable(stable));

    Eigen::VectorXd unstable(3);
    unstable << 1.0, 1.0, 10.0;  // fails the Routh condition c1 c2 > c3
    CHECK_FALSE(routh_hurwitz_stable(unstable));

    Eigen::VectorXd sign_fail(2);
    sign_fail << -1.0, 1.0;
    CHECK_FALSE(routh_hurwitz_stable(sign_fail));
}
