#include "doctest.h"

#include <cmath>
#include <random>

#include "tfpv/lyap.hpp"

using namespace tfpv;

TEST_CASE("drive/decay estimate at a reference point") {
    // k1 = km1 = e0 = 1, k2 = 1e-2
    LyapEstimate est = lyap_estimate(1.0, 1.0, 1e-2, 1.0, 1.0);
    CHECK(est.gamma == doctest::Approx(1.0));
    CHECK(est.kappa == doctest::Approx(0.01));
    CHECK(est.eps_PE == doctest::Approx(0.02));
    CHECK(est.eps_L == doctest::Approx(std::sqrt(2.0) * 0.01));
    CHECK(est.eps_inf == doctest::Approx(2.0 * 0.02));  // (k1 e0 + km1)/(k1 e0) * eps_PE
    CHECK(est.t_onset > 0.0);
}

TEST_CASE("the factor-two convention reproduces the product-rate parameter") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> logu(-1.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        double k1 = std::pow(10.0, logu(rng)), km1 = std::pow(10.0, logu(rng));
        double k2 = std::pow(10.0, logu(rng)), e0 = std::pow(10.0, logu(rng));
        LyapEstimate two = lyap_estimate(k1, km1, k2, e0, 1.0, LyapConvention::Two);
        CHECK(two.eps_L_normalized == two.eps_PE);  // bitwise by construction
        LyapEstimate rt2 = lyap_estimate(k1, km1, k2, e0, 1.0, LyapConvention::Sqrt2);
        CHECK(rt2.eps_L_alt == two.eps_L);
        CHECK(two.eps_L_alt == rt2.eps_L);
    }
}

TEST_CASE("slow-manifold geometry invariants") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> logu(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        double k1 = std::pow(10.0, logu(rng)), km1 = std::pow(10.0, logu(rng));
        double e0 = std::pow(10.0, logu(rng));
        SlowProductGeometry g = slowprod_geometry(k1, km1, e0);
        double floor = 2.0 * std::sqrt(g.KS * g.e0);
        for (int i = 0; i <= 200; ++i) {
            double x = 5.0 * (g.KS + g.e0) * i / 200.0;
            CHECK(g.q(x) >= floor * (1.0 - 1e-12));
            double h = 1e-6 * (1.0 + x);
            CHECK(std::abs(g.q(x + h) - g.q(x - h)) / (2 * h) <= 1.0 + 1e-8);
            // Vieta: the branches factor the fast quadratic
            CHECK(g.h_plus(x) + g.h_minus(x) ==
                  doctest::Approx(-(g.KS + g.e0 - x)).epsilon(1e-9));
            CHECK(g.h_plus(x) * g.h_minus(x) == doctest::Approx(-g.KS * x).epsilon(1e-9));
        }
        CHECK(g.h_plus(0.0) == doctest::Approx(0.0));
    }
}

TEST_CASE("V(t) decays under the drive/decay envelope") {
    double k1 = 1.0, km1 = 0.5, k2 = 0.02, e0 = 1.0, s0 = 2.0;
    LyapEstimate est = lyap_estimate(k1, km1, k2, e0, s0);
    SlowProductGeometry g = slowprod_geometry(k1, km1, e0);
    OdeSystem sys = slowprod_xy_system(k1, km1, k2, e0);
    Eigen::VectorXd x0(2);
    x0 << s0, s0;  // x = s + c, y = s at c = 0
    IntegrateOptions opt;
    opt.rtol = 1e-10;
    Trajectory tr = integrate(sys, x0, 0.0, 8.0 * est.t_onset + 10.0 / est.gamma, opt);
    VDecayReport rep = verify_V_decay(tr, est, g);
    CHECK(rep.pass);
    CHECK(rep.post_onset_pass);
    CHECK(rep.max_post <= 1.05 * est.eps_L);
}

TEST_CASE("exactly invariant manifold when the product rate vanishes") {
    LyapEstimate est = lyap_estimate(1.0, 1.0, 0.0, 1.0, 1.0);
    CHECK(est.kappa == 0.0);
    CHECK(est.eps_L == 0.0);
    SlowProductGeometry g = slowprod_geometry(1.0, 1.0, 1.0);
    OdeSystem sys = slowprod_xy_system(1.0, 1.0, 0.0, 1.0);
    Eigen::VectorXd x0(2);
    x0 << 1.0, 1.0;
    Trajectory tr = integrate(sys, x0, 0.0, 30.0, {});
    double V_end = std::pow(tr.x.back()(1) - g.h_plus(tr.x.back()(0)), 2);
    CHECK(V_end < 1e-12);
}

TEST_CASE("estimate rejects nonpositive rates") {
    CHECK_THROWS_AS(lyap_estimate(0.0, 1.0, 1.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(lyap_estimate(1.0, 1.0, -1.0, 1.0, 1.0), std::invalid_argument);
}
