#ifndef TFPV_LYAP_HPP
#define TFPV_LYAP_HPP

#include "tfpv/sim.hpp"

namespace tfpv {

// Convention for the approach-distance parameter eps_L = factor * kappa/gamma.
// The sqrt(2) factor comes from the quadratic-form derivation; the factor 2
// variant makes eps_L / e0 coincide exactly with eps_PE.
enum class LyapConvention { Sqrt2, Two };

struct LyapEstimate {
    double gamma = 0.0;     // contraction rate toward the slow manifold (1/time)
    double kappa = 0.0;     // drive bound from the slow motion (conc/time)
    double eps_L = 0.0;     // asymptotic distance bound (concentration)
    double eps_L_normalized = 0.0;  // eps_L / e0 (dimensionless)
    double eps_L_alt = 0.0;         // the other convention's value
    double eps_PE = 0.0;
    double eps_inf = 0.0;   // long-term discrepancy bound (dimensionless)
    double V0 = 0.0;        // (s0 - h_plus(s0))^2
    double t_onset = 0.0;   // (1/gamma) log(gamma^2 V0 / kappa^2)
    LyapConvention convention = LyapConvention::Sqrt2;
};

// Geometry of the slow manifold in aggregate coordinates x = s + c, y = s.
struct SlowProductGeometry {
    double KS = 0.0;  // km1 / k1
    double e0 = 0.0;
    double q(double x) const;       // sqrt((KS + e0 - x)^2 + 4 KS x)
    double h_plus(double x) const;  // attracting branch
    double h_minus(double x) const;
};

SlowProductGeometry slowprod_geometry(double k1, double km1, double e0);

// gamma = sqrt(k1 e0 km1), kappa = k2 e0, and derived quantities.  k2 may be
// zero (exactly invariant slow manifold); the remaining inputs must be
// positive.
LyapEstimate lyap_estimate(double k1, double km1, double k2, double e0, double s0,
                           LyapConvention conv = LyapConvention::Sqrt2);

// Full system in (x, y) coordinates: xdot = -k2 (x - y),
// ydot = -k1 (y - h_minus(x)) (y - h_plus(x)).
OdeSystem slowprod_xy_system(double k1, double km1, double k2, double e0);

struct VDecayReport {
    bool pass = false;            // V(t) <= 1.05 * envelope at every output time
    bool post_onset_pass = false; // sqrt(V) <= 1.05 * sqrt(2) kappa/gamma after t_onset
    double max_ratio = 0.0;       // max V / envelope
    double max_post = 0.0;        // max sqrt(V) after t_onset
    int points = 0;
};

// Checks V(t) = (y - h_plus(x))^2 against the decay envelope
// V0 e^{-gamma t} + (kappa/gamma)^2 (1 - e^{-gamma t}) along a trajectory of
// slowprod_xy_system (states must be {"x", "y"}).
VDecayReport verify_V_decay(const Trajectory& traj, const LyapEstimate& est,
                            const SlowProductGeometry& geom);

}  // namespace tfpv

#endif
