#ifndef TFPV_PARAMS_HPP
#define TFPV_PARAMS_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tfpv/scenario.hpp"

namespace tfpv {

struct ExtremeValue {
    double value = 0.0;
    Eigen::VectorXd arg;          // location on the box
    bool refined_off_grid = false;  // golden-section moved it off the grid
};

// sup/inf of |ratio| over the box: uniform grid then golden-section
// refinement (coordinate sweeps around the best grid point).
struct BoxExtrema {
    ExtremeValue sup, inf;
};
BoxExtrema box_extrema(const Scenario& sc,
                       const std::function<double(const Eigen::VectorXd&)>& ratio,
                       int points_per_axis = 101, int refine_passes = 3);

struct DistinguishedParams {
    // U = sup, L = inf of |sigma_hat_{n-s+1} / (sigma_1 sigma_{n-s})|;
    // eps_star = eps*U and eps_lower = eps*L at eps = eps_ref.
    ExtremeValue U, L;
    double eps_ref = 1.0;
    double eps_star = 0.0, eps_lower = 0.0;
    // s = 1 only: mu_star = eps * sup |sigma_hat_n sigma_{n-2} / sigma_{n-1}^2|
    std::optional<ExtremeValue> mu_sup;
    double mu_star = 0.0;
    bool mu_gate_all_real = false;         // sigma_1^2 - 4 sigma_2 >= 0 on box (n = 3)
    bool mu_gate_essentially_real = false; // sigma_1^2 - 2 sigma_2 > 0 on box
    bool mu_certified = false;             // gate satisfied somewhere on the ray
    // kappa disparity bounds (s = 1, n >= 3: sigma_2/sigma_1^2 at pi_hat,
    // gauging the spread of the fast block; s = 2, n = 3:
    // sigma_1 sigma_hat_3 / sigma_hat_2^2, gauging the slow-eigenvalue spread)
    std::optional<double> kappa_star_lo, kappa_star_hi;
    // aliases of the kappa extrema for the 2D reductions (s = 2)
    std::optional<double> nu_lo, nu_hi;
    // s > 1: (delta_{j*}, delta_j*) for j = 2..s
    std::vector<std::pair<double, double>> delta_js;
    bool lower_uninformative = false;  // L ~ 0: the lower estimate carries no information
};

// Distinguished parameters from the sigma expansion along the scenario ray.
// eps_ref defaults to the largest scheduled eps (1.0 when no schedule).
DistinguishedParams distinguished_params(const Scenario& sc, int points_per_axis = 101,
                                         std::optional<double> eps_ref = std::nullopt);

// Convenience wrappers mirroring the individual quantities.
std::pair<double, double> eps_star_generic(const Scenario& sc, int points_per_axis = 101);
double mu_star_generic(const Scenario& sc, int points_per_axis = 101);
std::pair<double, double> kappa_bounds(const Scenario& sc, int points_per_axis = 101);
std::vector<std::pair<double, double>> delta_family(const Scenario& sc, int points_per_axis = 101);

struct ClosedFormCatalog {
    std::string network;
    std::map<std::string, double> values;
    double at(const std::string& key) const;
    bool has(const std::string& key) const { return values.count(key) > 0; }
};

// Closed-form timescale-ratio bounds for the built-in mechanisms, evaluated
// at a raw parameter point.  network_id in {"mm.irrev", "mm.rev", "coop",
// "uncomp", "comp"}.
ClosedFormCatalog closed_forms(const std::string& network_id, const ParameterPoint& pi);

struct RegimeFlags {
    bool eqApre_holds = false;       // competitive-inhibition monotonicity condition
    bool near_invariant = false;     // an invariant subspace is nearly present
    double near_ratio = 0.0;         // the ratio driving near-invariance
    bool mu_large_eps_small = false; // mu > 1 while eps < 1e-2: long-time validity unclear
    bool three_timescale_hint = false;  // kappa bound << 1
};

RegimeFlags diagnose_regime(const std::string& network_id, const ParameterPoint& pi);

}  // namespace tfpv

#endif
