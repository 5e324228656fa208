#include "tfpv/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tfpv {

namespace {

using cplx = std::complex<double>;

// Horner evaluation of the monic polynomial and its derivative.
std::pair<cplx, cplx> horner(const Eigen::VectorXd& sigma, cplx z) {
    int n = static_cast<int>(sigma.size());
    cplx p = 1.0, dp = 0.0;
    for (int k = 0; k < n; ++k) {
        dp = dp * z + p;
        p = p * z + sigma(k);
    }
    return {p, dp};
}

std::vector<cplx> roots_quadratic(double b, double c) {
    // tau^2 + b tau + c, numerically stable via the sign-matched root
    double disc = b * b - 4.0 * c;
    if (disc >= 0.0) {
        double sq = std::sqrt(disc);
        double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
        double r1 = q;
        double r2 = (q != 0.0) ? c / q : -b - q;
        return {cplx(r1, 0.0), cplx(r2, 0.0)};
    }
    double sq = std::sqrt(-disc);
    return {cplx(-b / 2.0, sq / 2.0), cplx(-b / 2.0, -sq / 2.0)};
}

std::vector<cplx> roots_cubic(double a1, double a2, double a3) {
    // tau^3 + a1 tau^2 + a2 tau + a3; depressed form y^3 + p y + q
    double shift = a1 / 3.0;
    double p = a2 - a1 * a1 / 3.0;
    double q = 2.0 * a1 * a1 * a1 / 27.0 - a1 * a2 / 3.0 + a3;
    std::vector<cplx> y;
    double disc = -4.0 * p * p * p - 27.0 * q * q;
    if (p == 0.0 && q == 0.0) {
        y = {0.0, 0.0, 0.0};
    } else if (disc >= 0.0) {
        // three real roots: trigonometric (Viete) form, p < 0 here
        double m = 2.0 * std::sqrt(-p / 3.0);
        double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
        double theta = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k)
            y.push_back(m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0));
    } else {
        // one real root: Cardano with cancellation-safe branch
        double rad = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
        double u3 = -q / 2.0 - (q >= 0.0 ? rad : -rad);
        double u = std::cbrt(u3);
        double v = (u != 0.0) ? -p / (3.0 * u) : 0.0;
        double real = u + v;
        double im = std::sqrt(3.0) / 2.0 * std::abs(u - v);
        y = {cplx(real, 0.0), cplx(-real / 2.0, im), cplx(-real / 2.0, -im)};
    }
    for (auto& r : y) r -= shift;
    return y;
}

std::vector<cplx> roots_aberth(const Eigen::VectorXd& sigma) {
    int n = static_cast<int>(sigma.size());
    double r = 0.0;
    for (int k = 0; k < n; ++k)
        r = std::max(r, std::pow(std::abs(sigma(k)), 1.0 / (k + 1)));
    r = 1.0 + r;
    std::vector<cplx> z(n);
    for (int k = 0; k < n; ++k) {
        double ang = 2.0 * std::numbers::pi * (k + 0.25) / n + 0.4;  // deterministic spread
        z[k] = r * cplx(std::cos(ang), std::sin(ang));
    }
    for (int it = 0; it < 500; ++it) {
        double moved = 0.0;
        for (int k = 0; k < n; ++k) {
            auto [p, dp] = horner(sigma, z[k]);
            if (std::abs(p) == 0.0) continue;
            cplx ratio = (dp != 0.0) ? p / dp : cplx(1e-16, 0);
            cplx sum = 0.0;
            for (int j = 0; j < n; ++j)
                if (j != k) sum += 1.0 / (z[k] - z[j]);
            cplx w = ratio / (1.0 - ratio * sum);
            z[k] -= w;
            moved = std::max(moved, std::abs(w));
        }
        if (moved < 1e-15 * (1.0 + r)) break;
    }
    // Newton polish
    for (auto& zk : z)
        for (int it = 0; it < 3; ++it) {
            auto [p, dp] = horner(sigma, zk);
            if (std::abs(dp) > 0.0) zk -= p / dp;
        }
    return z;
}

bool spectrum_less(const cplx& a, const cplx& b) {
    double ra = std::abs(a.real()), rb = std::abs(b.real());
    if (ra != rb) return ra > rb;
    double ia = std::abs(a.imag()), ib = std::abs(b.imag());
    if (ia != ib) return ia > ib;
    return a.imag() > b.imag();
}

}  // namespace

CharPoly charpoly_coeffs(const Eigen::MatrixXd& J) {
    if (J.rows() != J.cols()) throw std::invalid_argument("charpoly_coeffs: non-square matrix");
    if (!J.allFinite()) throw std::invalid_argument("charpoly_coeffs: non-finite entries");
    int n = static_cast<int>(J.rows());
    CharPoly cp;
    cp.n = n;
    cp.sigma.resize(n);
    Eigen::MatrixXd M = J;
    double c = -M.trace();
    cp.sigma(0) = c;
    for (int k = 2; k <= n; ++k) {
        M = J * (M + c * Eigen::MatrixXd::Identity(n, n));
        c = -M.trace() / k;
        cp.sigma(k - 1) = c;
    }
    return cp;
}

std::vector<cplx> poly_roots(const Eigen::VectorXd& sigma) {
    int n = static_cast<int>(sigma.size());
    if (n == 0) return {};
    if (n == 1) return {cplx(-sigma(0), 0.0)};
    if (n == 2) return roots_quadratic(sigma(0), sigma(1));
    if (n == 3) return roots_cubic(sigma(0), sigma(1), sigma(2));
    return roots_aberth(sigma);
}

Spectrum classify_spectrum(std::vector<cplx> roots) {
    Spectrum sp;
    std::sort(roots.begin(), roots.end(), spectrum_less);
    sp.lambda = std::move(roots);
    sp.all_real = true;
    sp.essentially_real = true;
    for (const auto& l : sp.lambda) {
        double scale = std::max(1.0, std::abs(l));
        if (std::abs(l.imag()) > 1e-12 * scale) sp.all_real = false;
        if (!(std::abs(l.real()) > std::abs(l.imag())) && std::abs(l) > 0.0)
            sp.essentially_real = false;
    }
    if (sp.all_real) sp.essentially_real = true;
    return sp;
}

Spectrum eigenvalues(const Eigen::MatrixXd& J) {
    CharPoly cp = charpoly_coeffs(J);
    auto roots = poly_roots(cp.sigma);
    double scale = std::max(1.0, J.cwiseAbs().rowwise().sum().maxCoeff());
    double tol = 1e-8 * std::pow(scale, cp.n);
    for (auto& r : roots) {
        // Newton polish until the residual contract holds
        for (int it = 0; it < 8; ++it) {
            auto [p, dp] = horner(cp.sigma, r);
            if (std::abs(p) <= tol || std::abs(dp) == 0.0) break;
            r -= p / dp;
        }
    }
    return classify_spectrum(std::move(roots));
}

bool check_dimensionless(const std::vector<int>& numerator, const std::vector<int>& denominator,
                         int n) {
    // index 0 denotes sigma_0 = 1, which carries no dimension
    long num = 0, den = 0;
    for (int i : numerator) {
        if (i < 0 || i > n) throw std::out_of_range("check_dimensionless: index out of range");
        num += i;
    }
    for (int i : denominator) {
        if (i < 0 || i > n) throw std::out_of_range("check_dimensionless: index out of range");
        den += i;
    }
    return num == den;
}

SymmetricIdentityReport symmetric_identity_check(const Spectrum& sp, const CharPoly& cp) {
    SymmetricIdentityReport rep;
    int n = cp.n;
    for (const auto& l : sp.lambda)
        if (std::abs(l) == 0.0) return rep;  // identity undefined
    rep.defined = true;
    cplx acc = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) acc += sp.lambda[i] / sp.lambda[j];
    rep.lhs = acc.real();
    rep.rhs = cp.sigma_k(1) * cp.sigma_k(n - 1) / cp.sigma_k(n) - n;
    double scale = std::max({1.0, std::abs(rep.lhs), std::abs(rep.rhs)});
    rep.rel_err = std::abs(rep.lhs - rep.rhs) / scale;
    rep.pass = rep.rel_err <= 1e-9;
    return rep;
}

bool routh_hurwitz_stable(const Eigen::VectorXd& coeffs) {
    // coeffs = (c_1, ..., c_m) of tau^m + c_1 tau^{m-1} + ... + c_m
    int m = static_cast<int>(coeffs.size());
    if (m == 0) return true;
    std::vector<double> full(m + 1);
    full[0] = 1.0;
    for (int i = 0; i < m; ++i) full[i + 1] = coeffs(i);
    // all coefficients positive is necessary for Hurwitz stability
    for (int i = 1; i <= m; ++i)
        if (!(full[i] > 0.0)) return false;
    // Routh array: first column must stay positive
    std::vector<double> r0, r1;
    for (int j = 0; 2 * j <= m; ++j) r0.push_back(full[2 * j]);
    for (int j = 0; 2 * j + 1 <= m; ++j) r1.push_back(full[2 * j + 1]);
    r1.resize(r0.size(), 0.0);
    for (int i = 2; i <= m; ++i) {
        if (!(r1[0] > 0.0)) return false;
        std::vector<double> r2(r0.size(), 0.0);
        for (size_t j = 0; j + 1 < r0.size(); ++j)
            r2[j] = (r1[0] * r0[j + 1] - r0[0] * r1[j + 1]) / r1[0];
        r0 = r1;
        r1 = r2;
        if (!(r1[0] > 0.0)) return false;
    }
    return true;
}

}  // namespace tfpv
