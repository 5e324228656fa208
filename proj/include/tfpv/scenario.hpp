#ifndef TFPV_SCENARIO_HPP
#define TFPV_SCENARIO_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "tfpv/expr.hpp"
#include "tfpv/netmodel.hpp"
#include "tfpv/spectral.hpp"

namespace tfpv {

// Chart of the critical manifold: slow coordinates are a subset of the state
// variables; the remaining (fast) coordinates are given as expressions over
// the slow coordinates and the parameters.
struct ManifoldChart {
    std::vector<std::string> slow;
    std::map<std::string, Expr> graph;  // fast state -> expression
    bool coordinate_subspace = false;   // true when every graph expr is constant 0
};

struct Scenario {
    std::string id;
    Network net;
    PolyVectorField field;
    ParameterPoint pi_hat;  // the parameter point with an s-dimensional critical manifold
    ParameterPoint rho;     // ray direction: parameters move along pi_hat + eps * rho
    int s = 1;
    ManifoldChart chart;
    // closed intervals for the slow coordinates, in chart.slow order
    std::vector<std::array<double, 2>> box;
    std::vector<double> eps_schedule;
    double eps_max = 0.0;

    Eigen::VectorXd pi_hat_vector() const { return field.param_vector(pi_hat); }
    Eigen::VectorXd rho_vector() const { return field.param_vector(rho); }
    Eigen::VectorXd param_vector_at(double eps) const;
    ParameterPoint params_at(double eps) const;  // pi_hat + eps*rho as a map
};

// Build a scenario from its JSON document (schema: network, eliminate,
// pi_hat, rho, s, chart{slow,graph}, box, eps).  "network" may be inline DSL
// text under key "network_source" or a path relative to base_dir.  Box bounds
// and chart graphs may reference parameter names; they are evaluated at
// pi_hat (the critical manifold lives at the singular parameter point).
Scenario load_scenario(const nlohmann::json& doc, const std::string& base_dir);

// Full state for slow coordinates u (chart.slow order).  With newton_refine,
// Gauss-Newton on the fast coordinates polishes the chart point to
// ||h(x, pi_hat)|| <= 1e-12 * scale.
Eigen::VectorXd chart_point(const Scenario& sc, const Eigen::VectorXd& u,
                            bool newton_refine = false);

// All grid points of the box, per-axis resolution points_per_axis (total
// capped at 1e6); returned in row-major order for deterministic reductions.
std::vector<Eigen::VectorXd> box_grid(const Scenario& sc, int points_per_axis);

// sigma_i(x, pi_hat + eps*rho) recovered exactly as a polynomial in eps by
// interpolation at Chebyshev nodes (degree bound i * param_degree of the
// Jacobian, known structurally).
struct SigmaExpansion {
    std::vector<Eigen::VectorXd> coeffs;  // coeffs[i-1](k) = eps^k coefficient of sigma_i
    std::vector<int> vanishing_order;     // first coefficient with |c| > 1e-10*scale
    Eigen::VectorXd sigma_hat0;           // sigma_i / eps^{max(0, i-n+s)} at eps = 0
    Eigen::VectorXd sigma_at_pi_hat;      // sigma_i(x, pi_hat)
    double scale = 1.0;                   // max(1, ||J(x, pi_hat)||_inf)
};

SigmaExpansion sigma_expansion(const Scenario& sc, const Eigen::VectorXd& u);

struct VerificationReport {
    struct Failure {
        Eigen::VectorXd u;
        std::string check;  // "sigma_vanishing" | "hurwitz" | "rank" | "nondegeneracy"
        double value = 0.0;
        std::string detail;
    };
    bool pass = false;
    int points = 0;
    std::vector<Failure> failures;
    // measured extrema of sigma_k(x, pi_hat) over the box, k = 1..n-s
    Eigen::VectorXd sigma_min, sigma_max;
    std::string summary() const;
};

// TFPV conditions on a box grid: (a) sigma_n = ... = sigma_{n-s+1} = 0 at
// pi_hat within 1e-9*scale, (b) Hurwitz stability of chi / tau^s,
// (c) rank D1h = n - s by singular-value gap 1e-6, (d) nondegeneracy of the
// leading sigma-hat values (threshold 1e-8*scale).
VerificationReport verify_tfpv(const Scenario& sc, int points_per_axis = 101);

struct OrderCheckReport {
    bool pass = false;
    // per slow eigenvalue: lambda/eps at the two smallest eps and their ratio
    std::vector<std::array<double, 3>> slow_ratios;
    // fast eigenvalues at smallest eps vs roots of chi/tau^s at eps=0
    double fast_max_rel_err = 0.0;
};

// Checks lambda_i = eps * lambda_hat_i for the s slow eigenvalues (ratio
// stability within 10% across the two smallest scheduled eps) and convergence
// of the fast block to the eps = 0 limit.
OrderCheckReport eigenvalue_order_check(const Scenario& sc, const Eigen::VectorXd& u,
                                        const std::vector<double>& eps_list);

}  // namespace tfpv

#endif
