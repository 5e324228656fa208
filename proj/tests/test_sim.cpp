#include "doctest.h"

#include <cmath>

#include "tfpv/catalog.hpp"
#include "tfpv/csv.hpp"
#include "tfpv/sim.hpp"

using namespace tfpv;

namespace {

OdeSystem scalar_decay() {
    OdeSystem sys;
    sys.id = "decay";
    sys.states = {"y"};
    sys.rhs = [](double, const Eigen::VectorXd& y) { return Eigen::VectorXd(-y); };
    return sys;
}

}  // namespace

TEST_CASE("explicit integration of exponential decay") {
    Eigen::VectorXd y0(1);
    y0 << 1.0;
    IntegrateOptions opt;
    opt.rtol = 1e-10;
    Trajectory tr = integrate(scalar_decay(), y0, 0.0, 1.0, opt);
    CHECK(tr.x.back()(0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
    CHECK(tr.explicit_steps > 0);
    CHECK(tr.stiff_steps == 0);
    // dense output is much better than linear interpolation between nodes
    CHECK(std::abs(tr.interpolate(0.5)(0) - std::exp(-0.5)) < 1e-8);
}

TEST_CASE("implicit integration handles a stiff linear system") {
    OdeSystem sys;
    sys.id = "stiff2";
    sys.states = {"a", "b"};
    sys.rhs = [](double, const Eigen::VectorXd& y) {
        Eigen::VectorXd v(2);
        v << -y(0), -1e4 * y(1);
        return v;
    };
    Eigen::VectorXd y0(2);
    y0 << 1.0, 1.0;
    IntegrateOptions opt;
    opt.rtol = 1e-8;
    opt.force_stiff = true;
    Trajectory tr = integrate(sys, y0, 0.0, 1.0, opt);
    CHECK(tr.stiff_steps > 0);
    CHECK(tr.x.back()(0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-5));
    CHECK(std::abs(tr.x.back()(1)) < 1e-8);
}

TEST_CASE("automatic stiffness switch on a fast-slow mechanism") {
    Scenario sc = figure_scenario(figure_set("fig3"));  // rates up to 1e5
    OdeSystem sys = full_system(sc, 1.0);
    Eigen::VectorXd x0 = initial_state(sc, 1.0);
    IntegrateOptions opt;
    opt.rtol = 1e-6;
    Trajectory tr = integrate(sys, x0, 0.0, 1.0, opt);
    CHECK(tr.stiff_steps > 0);  // switched away from the explicit pair
}

TEST_CASE("integration input validation") {
    Eigen::VectorXd y0(1);
    y0 << 1.0;
    IntegrateOptions opt;
    opt.rtol = 1e-2;  // outside the supported window
    CHECK_THROWS_AS(integrate(scalar_decay(), y0, 0.0, 1.0, opt), std::invalid_argument);
    CHECK_THROWS_AS(integrate(scalar_decay(), y0, 1.0, 1.0, {}), std::invalid_argument);
    Eigen::VectorXd bad(1);
    bad << std::nan("");
    CHECK_THROWS_AS(integrate(scalar_decay(), bad, 0.0, 1.0, {}), std::invalid_argument);
}

TEST_CASE("non-finite right-hand side aborts with context") {
    OdeSystem sys;
    sys.id = "blowup";
    sys.states = {"y"};
    sys.rhs = [](double t, const Eigen::VectorXd& y) {
        Eigen::VectorXd v(1);
        v(0) = t < 0.5 ? y(0) : std::numeric_limits<double>::quiet_NaN();
        return v;
    };
    Eigen::VectorXd y0(1);
    y0 << 1.0;
    CHECK_THROWS_AS(integrate(sys, y0, 0.0, 1.0, {}), std::runtime_error);
}

TEST_CASE("initial state resolves init bindings at the raw parameters") {
    Scenario sc = figure_scenario(figure_set("fig1"));
    Eigen::VectorXd x0 = initial_state(sc, 0.1);
    CHECK(x0(sc.field.state_index("s")) == doctest::Approx(1.0));  // s0
    CHECK(x0(sc.field.state_index("c1")) == 0.0);
    CHECK(x0(sc.field.state_index("c2")) == 0.0);
}

TEST_CASE("full-vs-reduced comparison converges along the ray") {
    Scenario sc = figure_scenario(figure_set("fig1"));
    auto make_reduced = [](const ParameterPoint& pi) {
        return closed_form_reduction("coop.e0", pi);
    };
    CompareOptions opt;
    opt.rtol = 1e-8;
    opt.jobs = 2;
    ComparisonReport rep = compare(sc, make_reduced, {0.1, 0.01, 0.001}, opt);
    REQUIRE(rep.rows.size() == 3);
    CHECK(rep.rows[0].eps == 0.1);  // sorted descending
    CHECK(rep.rows[0].err_post > rep.rows[1].err_post);
    CHECK(rep.rows[1].err_post > rep.rows[2].err_post);
    CHECK(rep.slope == doctest::Approx(1.0).epsilon(0.3));
    CHECK(rep.rows[0].eps_star == doctest::Approx(0.0125).epsilon(1e-6));
}

TEST_CASE("comparison is deterministic across thread counts") {
    Scenario sc = figure_scenario(figure_set("fig6"));
    auto make_reduced = [](const ParameterPoint& pi) {
        return closed_form_reduction("uncomp.e0", pi);
    };
    CompareOptions serial, parallel;
    parallel.jobs = 4;
    ComparisonReport a = compare(sc, make_reduced, {0.1, 0.03, 0.01}, serial);
    ComparisonReport b = compare(sc, make_reduced, {0.1, 0.03, 0.01}, parallel);
    REQUIRE(a.rows.size() == b.rows.size());
    for (size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].err_post == b.rows[i].err_post);  // bitwise
        CHECK(a.rows[i].t_c == b.rows[i].t_c);
    }
    CHECK(a.slope == b.slope);
}

TEST_CASE("csv serialization round-trips doubles exactly") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
    double v = 0.12345678901234567;
    CHECK(std::stod(format_double(v)) == v);

    Trajectory tr;
    tr.states = {"s", "c"};
    tr.T = 2.0;
    tr.t = {0.0, 2.0};
    Eigen::VectorXd a(2), b(2);
    a << 1.0, 0.0;
    b << 0.5, 0.25;
    tr.x = {a, b};
    std::string csv = trajectory_csv(tr);
    CHECK(csv.rfind("t,tau,s,c\n", 0) == 0);
    CHECK(csv.find("2,1,0.5,0.25") != std::string::npos);
}
