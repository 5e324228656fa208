#ifndef TFPV_SPECTRAL_HPP
#define TFPV_SPECTRAL_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace tfpv {

// Monic characteristic polynomial chi(tau) = tau^n + sigma_1 tau^{n-1} + ... + sigma_n,
// so sigma_1 = -trace(J) and sigma_n = (-1)^n det(J).  With this sign
// convention all sigma_k of a Hurwitz-stable matrix are positive, and
// sigma_k carries dimension Time^{-k}.
struct CharPoly {
    Eigen::VectorXd sigma;  // sigma(0) = sigma_1, ..., sigma(n-1) = sigma_n
    int n = 0;
    double sigma_k(int k) const { return k == 0 ? 1.0 : sigma(k - 1); }
};

struct Spectrum {
    std::vector<std::complex<double>> lambda;  // sorted by descending |Re|, ties by
                                               // descending |Im|, then sign of Im
    bool all_real = false;
    bool essentially_real = false;  // |Re| > |Im| for every eigenvalue
};

// Faddeev-LeVerrier recursion; exact in floating point arithmetic up to
// rounding (no iterative eigen decomposition involved).
CharPoly charpoly_coeffs(const Eigen::MatrixXd& J);

// Roots of a monic real polynomial given by its sigma coefficients.
// Closed forms for degree <= 3; Aberth-Ehrlich simultaneous iteration with
// Newton polish otherwise.
std::vector<std::complex<double>> poly_roots(const Eigen::VectorXd& sigma);

// Eigenvalues via the characteristic polynomial.  Residual contract:
// |chi(lambda)| <= 1e-8 * max(1, ||J||_inf)^n for every root.
Spectrum eigenvalues(const Eigen::MatrixXd& J);

Spectrum classify_spectrum(std::vector<std::complex<double>> roots);

// A product/quotient of sigma_k is dimensionless iff the index sums of
// numerator and denominator agree (sigma_k ~ Time^{-k}).  Index 0 stands for
// sigma_0 = 1; indices outside [0, n] throw.
bool check_dimensionless(const std::vector<int>& numerator, const std::vector<int>& denominator,
                         int n);

struct SymmetricIdentityReport {
    bool defined = false;    // false when an eigenvalue vanishes
    double lhs = 0.0;        // sum_{i != j} lambda_i / lambda_j (real part)
    double rhs = 0.0;        // sigma_1 sigma_{n-1} / sigma_n - n
    double rel_err = 0.0;
    bool pass = false;       // rel_err <= 1e-9
};

SymmetricIdentityReport symmetric_identity_check(const Spectrum& sp, const CharPoly& cp);

// Hurwitz test via the Routh table on tau^m + c_1 tau^{m-1} + ... + c_m.
bool routh_hurwitz_stable(const Eigen::VectorXd& coeffs);

}  // namespace tfpv

#endif
