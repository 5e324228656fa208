#ifndef TFPV_SIM_HPP
#define TFPV_SIM_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tfpv/reduce.hpp"
#include "tfpv/scenario.hpp"

namespace tfpv {

struct OdeSystem {
    std::string id;
    std::vector<std::string> states;
    std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)> rhs;
    // analytic Jacobian when available; otherwise a finite-difference one is
    // substituted internally
    std::function<Eigen::MatrixXd(double, const Eigen::VectorXd&)> jac;
};

struct Trajectory {
    std::string system_id;
    std::vector<std::string> states;
    std::vector<double> t;            // strictly increasing
    std::vector<Eigen::VectorXd> x;
    std::vector<Eigen::VectorXd> dx;  // node derivatives for dense output
    double T = 0.0;                   // horizon used for tau = t / T
    int stiff_steps = 0;              // accepted steps taken by the implicit method
    int explicit_steps = 0;

    // cubic Hermite when node derivatives are present, else piecewise linear
    Eigen::VectorXd interpolate(double tq) const;
};

struct IntegrateOptions {
    double rtol = 1e-8;
    double atol = 1e-12;
    double initial_step = 0.0;  // 0: automatic
    bool force_stiff = false;   // start with the linearly implicit method
};

// Adaptive integration with an embedded explicit Runge-Kutta 5(4) pair for
// nonstiff stretches and an L-stable linearly implicit Rosenbrock 3(2)
// method (analytic Jacobian) for stiff ones.  Switches to the implicit
// method when the explicit step collapses below 1e-6 * span for 20
// consecutive steps; aborts with an error when any step falls below
// 1e-14 * span or the right-hand side returns non-finite values.
Trajectory integrate(const OdeSystem& sys, const Eigen::VectorXd& x0, double t0, double t1,
                     const IntegrateOptions& opt = {});

// Full-system OdeSystem at the raw parameters pi_hat + eps * rho.
OdeSystem full_system(const Scenario& sc, double eps);
// OdeSystem wrapper for a reduced model (finite-difference Jacobian).
OdeSystem reduced_system(const ReducedModel& m);
// Initial state of the retained species: init bindings resolved at the raw
// parameters, unbound species start at zero.
Eigen::VectorXd initial_state(const Scenario& sc, double eps);

struct CompareRow {
    double eps = 0.0;
    double eps_star = 0.0, mu_star = 0.0;
    double T = 0.0, t_c = 0.0;
    double err_post = 0.0;  // sup |obs_full - obs_red| / s0 on [t_c, T]
    double err_full = 0.0;  // same on [0, T]
    double err_l2 = 0.0;    // secondary L2 metric on [0, T]
};

struct ComparisonReport {
    std::vector<CompareRow> rows;  // sorted by eps descending
    double slope = 0.0;            // least-squares log(err_post) vs log(eps)
};

struct CompareOptions {
    std::string observed = "s";
    double rtol = 1e-9;
    double decay_fraction = 1e-3;  // horizon: reduced observed falls below this * s0
    std::optional<double> fixed_T; // overrides the decay rule
    int grid_points = 2000;        // common comparison grid
    int jobs = 1;                  // parallel eps evaluations
};

// Full-vs-reduced sweep along the parameter ray.  make_reduced builds the
// reduced model at the raw (eps-folded) parameter point; eps_star/mu_star
// are evaluated once per eps from the distinguished-parameter ratios.
ComparisonReport compare(const Scenario& sc,
                         const std::function<ReducedModel(const ParameterPoint&)>& make_reduced,
                         const std::vector<double>& eps_list, const CompareOptions& opt = {});

struct CascadeReport {
    double c2_tilde = 0.0;
    double t_fast_end = 0.0;   // end of the initial complex-accumulation window
    double t_slow_end = 0.0;   // stage-1 approach to c2_tilde (99%)
    double T = 0.0;
    double err_c2_slow = 0.0;      // stage-1 c2 tracking on [t_fast_end, t_slow_end] / c2_tilde
    double err_s_veryslow = 0.0;   // stage-2 s tracking on [t_slow_end, T] / s0
    Trajectory full, stage1, stage2;
};

// Runs the competitive full system against both cascade stages at the raw
// parameters of the scenario at the given eps.
CascadeReport three_timescale_run(const Scenario& sc, const CascadeModel& cm, double eps,
                                  const CompareOptions& opt = {});

}  // namespace tfpv

#endif
