#ifndef TFPV_REDUCE_HPP
#define TFPV_REDUCE_HPP

#include <functional>
#include <string>
#include <vector>

#include "tfpv/scenario.hpp"

namespace tfpv {

// Projection onto ker J along im J, built spectrally from singular bases.
struct Projector {
    Eigen::MatrixXd Pi;      // n x n, Pi^2 = Pi, Pi * J = 0
    int rank = 0;            // dim ker J = s
    Eigen::MatrixXd kernel;  // n x s orthonormal basis of ker J
    Eigen::MatrixXd image;   // n x (n-s) orthonormal basis of im J
    double cond = 0.0;       // condition number of [kernel | image]
};

// Requires exactly s singular values below 1e-6 * sigma_max; throws a
// degeneracy error when the rank differs or the kernel/image split is
// ill-conditioned (condition number > 1e12, transversality failure).
Projector spectral_projector(const Eigen::MatrixXd& J, int s);

// First-order perturbation h1(x) = d/deps h(x, pi_hat + eps*rho) at eps = 0,
// differentiated exactly through the polynomial parameter dependence.
Eigen::VectorXd h1_field(const Scenario& sc, const Eigen::VectorXd& x);

// Slow vector field Pi(x) . h1(x) at a full-state point x on the critical
// manifold (all n components; the slow coordinates carry the reduced flow).
Eigen::VectorXd reduce_numeric(const Scenario& sc, const Eigen::VectorXd& x);

struct ReducedModel {
    std::string id;
    std::vector<std::string> states;  // slow coordinates, in rhs order
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> rhs;
};

// Closed-form reduced models.  Ids: "mm.irrev.e0", "mm.rev.e0",
// "mm.slowprod.k2" (aggregate variable x = s + c), "mm.slowprod.k2.s"
// (substrate form), "coop.e0", "uncomp.e0", "uncomp.k1km3", "comp.e0",
// "comp.k1k3km3".  The parameter point holds the perturbed constants at
// their raw (folded) values; the model is linear in each perturbed constant,
// so evaluating at the ray direction gives the per-unit-eps field.
ReducedModel closed_form_reduction(const std::string& model_id, const ParameterPoint& pi);

// Two-stage reduction of the competitive mechanism when substrate binding is
// much slower than inhibitor binding.
struct CascadeModel {
    ParameterPoint pi;
    double c2_tilde = 0.0;  // stationary bound-inhibitor level of stage 1
    ReducedModel stage1;    // states {s, c2}: s frozen, c2 relaxes
    ReducedModel stage2;    // state {s}: very-slow decay at c2 = c2_tilde
};

// Requires k1, km1, k2, k3, km3, km2, e0, i0 in pi ("km2" is the constant
// appearing in the stage-2 denominator km2 + km1; it must be supplied
// explicitly, see README).
CascadeModel cascade_reduction(const ParameterPoint& pi);

// Stationary point of k3 (e0 - c)(i0 - c) - km3 c on (0, min(e0, i0)),
// computed by the subtraction-safe closed form.
double cascade_c2_tilde(double k3, double km3, double e0, double i0);

// Closed-form model id for a built-in (fixture, scenario) pair, e.g.
// ("coop", "e0") -> "coop.e0"; throws for scenarios without a closed form.
std::string reduction_id(const std::string& fixture, const std::string& scenario);

}  // namespace tfpv

#endif
