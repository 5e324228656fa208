#include "tfpv/params.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tfpv {

namespace {

constexpr double kGolden = 0.6180339887498949;  // 1/phi

// Golden-section extremum of f on [lo, hi] (maximize or minimize).
// Returns (arg, value).  The bracket is one grid cell wide, so f is
// effectively unimodal there.
std::pair<double, double> golden_section(const std::function<double(double)>& f, double lo,
                                         double hi, bool maximize) {
    double a = lo, b = hi;
    double x1 = b - kGolden * (b - a);
    double x2 = a + kGolden * (b - a);
    double f1 = f(x1), f2 = f(x2);
    auto better = [&](double u, double v) { return maximize ? u > v : u < v; };
    for (int it = 0; it < 60 && (b - a) > 1e-12 * (hi - lo + 1.0); ++it) {
        if (better(f1, f2)) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kGolden * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kGolden * (b - a);
            f2 = f(x2);
        }
    }
    double xm = 0.5 * (a + b);
    return {xm, f(xm)};
}

void refine_extremum(const Scenario& sc,
                     const std::function<double(const Eigen::VectorXd&)>& ratio, ExtremeValue& ev,
                     int points_per_axis, int refine_passes, bool maximize) {
    int dim = static_cast<int>(sc.box.size());
    Eigen::VectorXd x = ev.arg;
    for (int pass = 0; pass < refine_passes; ++pass) {
        for (int d = 0; d < dim; ++d) {
            double lo = sc.box[d][0], hi = sc.box[d][1];
            if (!(hi > lo)) continue;
            double h = (hi - lo) / std::max(1, points_per_axis - 1);
            double a = std::max(lo, x(d) - h);
            double b = std::min(hi, x(d) + h);
            auto f1 = [&](double t) {
                Eigen::VectorXd y = x;
                y(d) = t;
                double v = ratio(y);
                if (!std::isfinite(v))
                    return maximize ? -std::numeric_limits<double>::infinity()
                                    : std::numeric_limits<double>::infinity();
                return v;
            };
            auto [arg, val] = golden_section(f1, a, b, maximize);
            if (std::isfinite(val) && (maximize ? val > ev.value : val < ev.value)) {
                x(d) = arg;
                ev.value = val;
                if (std::abs(arg - ev.arg(d)) > 1e-10 * (hi - lo + 1.0)) ev.refined_off_grid = true;
            }
        }
    }
    ev.arg = x;
}

double get(const ParameterPoint& pi, const std::string& key) {
    auto it = pi.find(key);
    if (it == pi.end())
        throw std::invalid_argument("closed_forms: missing parameter '" + key + "'");
    return it->second;
}

}  // namespace

BoxExtrema box_extrema(const Scenario& sc,
                       const std::function<double(const Eigen::VectorXd&)>& ratio,
                       int points_per_axis, int refine_passes) {
    auto grid = box_grid(sc, points_per_axis);
    BoxExtrema ex;
    ex.sup.value = -std::numeric_limits<double>::infinity();
    ex.inf.value = std::numeric_limits<double>::infinity();
    for (const auto& u : grid) {
        double v = ratio(u);
        if (!std::isfinite(v)) continue;
        if (v > ex.sup.value) {
            ex.sup.value = v;
            ex.sup.arg = u;
        }
        if (v < ex.inf.value) {
            ex.inf.value = v;
            ex.inf.arg = u;
        }
    }
    if (!std::isfinite(ex.sup.value))
        throw std::runtime_error("box_extrema: ratio not finite anywhere on the box (scenario " +
                                 sc.id + ")");
    refine_extremum(sc, ratio, ex.sup, points_per_axis, refine_passes, /*maximize=*/true);
    refine_extremum(sc, ratio, ex.inf, points_per_axis, refine_passes, /*maximize=*/false);
    return ex;
}

DistinguishedParams distinguished_params(const Scenario& sc, int points_per_axis,
                                         std::optional<double> eps_ref) {
    const int n = sc.field.n();
    const int s = sc.s;
    if (s < 1 || s >= n)
        throw std::invalid_argument("distinguished_params: need 1 <= s < n");

    DistinguishedParams dp;
    dp.eps_ref = eps_ref.value_or(
        sc.eps_schedule.empty() ? 1.0
                                : *std::max_element(sc.eps_schedule.begin(), sc.eps_schedule.end()));

    // All ratios below are dimensionless combinations of the sigma_k
    // (index sums of numerator and denominator agree).
    if (!check_dimensionless({n - s + 1}, {1, n - s}, n))
        throw std::logic_error("distinguished_params: eps ratio not dimensionless");

    // |sigma_hat_{n-s+1} / (sigma_1 sigma_{n-s})| at pi_hat
    auto eps_ratio = [&](const Eigen::VectorXd& u) {
        SigmaExpansion se = sigma_expansion(sc, u);
        double num = se.sigma_hat0(n - s);  // sigma_hat_{n-s+1}
        double den = se.sigma_at_pi_hat(0) * (n - s >= 1 ? se.sigma_at_pi_hat(n - s - 1) : 1.0);
        return std::abs(num / den);
    };
    BoxExtrema eps_ex = box_extrema(sc, eps_ratio, points_per_axis);
    dp.U = eps_ex.sup;
    dp.L = eps_ex.inf;
    dp.eps_star = dp.eps_ref * dp.U.value;
    dp.eps_lower = dp.eps_ref * dp.L.value;
    dp.lower_uninformative = dp.L.value <= 1e-12 * std::max(1.0, dp.U.value);

    if (s == 1) {
        if (!check_dimensionless({n, std::max(0, n - 2)}, {n - 1, n - 1}, n))
            throw std::logic_error("distinguished_params: mu ratio not dimensionless");
        // |sigma_hat_n sigma_{n-2} / sigma_{n-1}^2| (sigma_0 = 1)
        auto mu_ratio = [&](const Eigen::VectorXd& u) {
            SigmaExpansion se = sigma_expansion(sc, u);
            double num = se.sigma_hat0(n - 1);
            double s_nm2 = (n == 2) ? 1.0 : se.sigma_at_pi_hat(n - 3);
            double den = se.sigma_at_pi_hat(n - 2);
            return std::abs(num * s_nm2 / (den * den));
        };
        BoxExtrema mu_ex = box_extrema(sc, mu_ratio, points_per_axis);
        dp.mu_sup = mu_ex.sup;
        dp.mu_star = dp.eps_ref * mu_ex.sup.value;

        // Realness gates for the fast block tau^{n-s} + sigma_1 tau^{n-s-1} + ...
        if (n - s <= 1) {
            dp.mu_gate_all_real = true;
            dp.mu_gate_essentially_real = true;
        } else if (n - s == 2) {
            bool all_real = true, ess_real = true;
            for (const auto& u : box_grid(sc, points_per_axis)) {
                SigmaExpansion se = sigma_expansion(sc, u);
                double s1 = se.sigma_at_pi_hat(0), s2 = se.sigma_at_pi_hat(1);
                if (s1 * s1 - 4.0 * s2 < 0.0) all_real = false;
                if (!(s1 * s1 - 2.0 * s2 > 0.0)) ess_real = false;
            }
            dp.mu_gate_all_real = all_real;
            dp.mu_gate_essentially_real = ess_real;
        } else {
            // higher fast blocks: check the spectrum directly at pi_hat
            bool all_real = true, ess_real = true;
            for (const auto& u : box_grid(sc, points_per_axis)) {
                SigmaExpansion se = sigma_expansion(sc, u);
                Spectrum sp = classify_spectrum(poly_roots(se.sigma_at_pi_hat.head(n - s)));
                all_real = all_real && sp.all_real;
                ess_real = ess_real && sp.essentially_real;
            }
            dp.mu_gate_all_real = all_real;
            dp.mu_gate_essentially_real = ess_real;
        }
        dp.mu_certified = dp.mu_gate_all_real || dp.mu_gate_essentially_real;

        if (n >= 3) {
            // fast-block spread: sigma_2 / sigma_1^2 at pi_hat
            if (!check_dimensionless({2}, {1, 1}, n))
                throw std::logic_error("distinguished_params: kappa ratio not dimensionless");
            auto kappa_ratio = [&](const Eigen::VectorXd& u) {
                SigmaExpansion se = sigma_expansion(sc, u);
                double s1 = se.sigma_at_pi_hat(0);
                return std::abs(se.sigma_at_pi_hat(1) / (s1 * s1));
            };
            BoxExtrema kx = box_extrema(sc, kappa_ratio, points_per_axis);
            dp.kappa_star_hi = kx.sup.value;
            dp.kappa_star_lo = kx.inf.value;
        }
    }

    if (s >= 2) {
        // delta_j = eps * |sigma_hat_{n-s+j} / (sigma_hat_{n-s+j-1} sigma_1)|, j = 2..s
        for (int j = 2; j <= s; ++j) {
            if (!check_dimensionless({n - s + j}, {n - s + j - 1, 1}, n))
                throw std::logic_error("distinguished_params: delta ratio not dimensionless");
            auto delta_ratio = [&, j](const Eigen::VectorXd& u) {
                SigmaExpansion se = sigma_expansion(sc, u);
                double num = se.sigma_hat0(n - s + j - 1);
                double den = se.sigma_hat0(n - s + j - 2) * se.sigma_at_pi_hat(0);
                return std::abs(num / den);
            };
            BoxExtrema dx = box_extrema(sc, delta_ratio, points_per_axis);
            dp.delta_js.emplace_back(dp.eps_ref * dx.inf.value, dp.eps_ref * dx.sup.value);
        }
        if (s == 2 && n == 3) {
            // slow-eigenvalue spread: sigma_1 sigma_hat_3 / sigma_hat_2^2 (eps-free)
            if (!check_dimensionless({1, 3}, {2, 2}, n))
                throw std::logic_error("distinguished_params: nu ratio not dimensionless");
            auto nu_ratio = [&](const Eigen::VectorXd& u) {
                SigmaExpansion se = sigma_expansion(sc, u);
                double num = se.sigma_at_pi_hat(0) * se.sigma_hat0(2);
                double den = se.sigma_hat0(1);
                return std::abs(num / (den * den));
            };
            BoxExtrema nx = box_extrema(sc, nu_ratio, points_per_axis);
            dp.kappa_star_hi = nx.sup.value;
            dp.kappa_star_lo = nx.inf.value;
            dp.nu_hi = nx.sup.value;
            dp.nu_lo = nx.inf.value;
        }
    }
    return dp;
}

std::pair<double, double> eps_star_generic(const Scenario& sc, int points_per_axis) {
    DistinguishedParams dp = distinguished_params(sc, points_per_axis);
    return {dp.eps_star, dp.eps_lower};
}

double mu_star_generic(const Scenario& sc, int points_per_axis) {
    if (sc.s != 1) throw std::invalid_argument("mu_star_generic: defined for s = 1 only");
    return distinguished_params(sc, points_per_axis).mu_star;
}

std::pair<double, double> kappa_bounds(const Scenario& sc, int points_per_axis) {
    DistinguishedParams dp = distinguished_params(sc, points_per_axis);
    if (!dp.kappa_star_lo || !dp.kappa_star_hi)
        throw std::runtime_error("kappa_bounds: not defined for this scenario");
    return {*dp.kappa_star_lo, *dp.kappa_star_hi};
}

std::vector<std::pair<double, double>> delta_family(const Scenario& sc, int points_per_axis) {
    return distinguished_params(sc, points_per_axis).delta_js;
}

double ClosedFormCatalog::at(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end())
        throw std::out_of_range("closed form '" + key + "' not available for network '" + network +
                                "'");
    return it->second;
}

ClosedFormCatalog closed_forms(const std::string& network_id, const ParameterPoint& pi) {
    ClosedFormCatalog cat;
    cat.network = network_id;
    auto& v = cat.values;

    auto sq = [](double x) { return x * x; };

    if (network_id == "mm.irrev" || network_id == "mm.rev" || network_id == "coop" ||
        network_id == "uncomp" || network_id == "comp") {
        double k1 = get(pi, "k1"), km1 = get(pi, "km1"), k2 = get(pi, "k2"), e0 = get(pi, "e0");
        double eps_MM = e0 * k1 * k2 / sq(km1 + k2);
        v["eps_MM"] = eps_MM;

        if (network_id == "mm.irrev") {
            double s0 = get(pi, "s0");
            v["eps_RS"] = k1 * e0 / (km1 + k2);
            v["eps_BH"] = e0 / s0;
            v["eps_SSl"] = k1 * e0 / (km1 + k2 + k1 * s0);
            v["eps_MM_lower"] = e0 * k1 * k2 / sq(k1 * s0 + km1 + k2);
            double eps_PE = 2.0 * k2 / std::sqrt(km1 * k1 * e0);
            v["eps_PE"] = eps_PE;
            v["eps_inf"] = (k1 * e0 + km1) / (k1 * e0) * eps_PE;
        } else if (network_id == "mm.rev") {
            double s0 = get(pi, "s0"), km2 = get(pi, "km2");
            v["eps_MMR"] =
                e0 * (k1 * km2 * s0 + k1 * k2 + km1 * km2) / sq(km1 + k2 + km2 * s0);
        } else if (network_id == "coop") {
            double k3 = get(pi, "k3"), km3 = get(pi, "km3"), k4 = get(pi, "k4"),
                   s0 = get(pi, "s0");
            double d1 = km1 + k2, d2 = km3 + k4, dall = km1 + k2 + km3 + k4;
            v["eps_C"] = eps_MM * (k3 * k4 * s0 * d1 / (k2 * dall * d2) + d1 / dall);
            v["eps_C_lower"] = eps_MM * d1 / dall;  // the ratio at s = 0
            v["mu_C"] = eps_MM * ((k3 * k4 * s0 + k2 * d2) / (k2 * d2)) *
                        (((k1 + k3) * s0 + dall) / d2);
            v["mu_C_lower"] = eps_MM * dall / d2;
        } else if (network_id == "uncomp") {
            double k3 = get(pi, "k3"), km3 = get(pi, "km3"), s0 = get(pi, "s0"),
                   i0 = get(pi, "i0");
            double d1 = km1 + k2;
            v["eps_U"] = eps_MM * d1 / (k3 * i0 + km3 + d1);
            v["mu_U"] = eps_MM * (k3 * i0 + k2 + km1 + km3) / km3;
            // 2D reduction (s = 2) bounds; the lower ones assume e0 > i0
            v["delta_star"] = (k1 * (k3 * i0 * (e0 + s0) + k2 * e0) + km3 * d1) / sq(d1);
            v["delta_lower"] = (k1 * k2 * (e0 - i0) + km3 * d1) / sq(d1 + k3 * i0);
            v["nu_star"] =
                (d1 + k3 * i0) * k1 * km3 * k2 * e0 / sq(k1 * k2 * e0 + km3 * d1);
            v["nu_lower"] = d1 * k1 * km3 * k2 * (e0 - i0) /
                            sq(k1 * (k3 * i0 * (e0 + s0) + k2 * e0) + km3 * d1);
        } else {  // comp
            double k3 = get(pi, "k3"), km3 = get(pi, "km3"), s0 = get(pi, "s0"),
                   i0 = get(pi, "i0");
            double d1 = km1 + k2;
            double f0 = k3 * i0 + km3;  // sigma-vanishing block of the inhibitor branch
            v["eps_I"] = eps_MM * d1 / (d1 + f0);
            double mu_I1 = eps_MM * (d1 + f0) / f0;
            v["mu_I1"] = mu_I1;
            double mu_I2_den = 4.0 * km3 * (k3 * i0 * d1 - km3 * f0);
            if (mu_I2_den > 0.0)
                v["mu_I2"] = k2 * k1 * e0 * f0 / mu_I2_den;
            // sup of the mu ratio over [0, s0]: attained at s = 0 iff the
            // monotonicity condition below holds, else at the interior
            // critical point (clamped to s0)
            double sigma10 = d1 + f0;
            double sigma20 = f0 * d1;
            bool eqApre = 2.0 * km3 * f0 + km3 * d1 >= d1 * i0 * k3;
            if (eqApre) {
                v["mu_I"] = mu_I1;
            } else {
                double s_star = (sigma20 - 2.0 * km3 * sigma10) / (km3 * k1);
                if (s_star <= s0 && v.count("mu_I2")) {
                    v["mu_I"] = v["mu_I2"];
                } else {
                    double s1 = k1 * s0 + sigma10;
                    double s2 = km3 * k1 * s0 + sigma20;
                    v["mu_I"] = k2 * k1 * e0 * f0 * s1 / sq(s2);
                }
            }
            v["mu_I_tilde"] = eps_MM * (k1 * s0 + d1 + f0) / f0;
            // 2D reduction (s = 2) bounds; the lower ones assume e0 > i0
            v["eps2_star"] = (k1 * k2 * e0 + (k3 * (e0 + i0) + km3) * d1) / sq(d1);
            v["eps2_lower"] = (k1 * k2 * (e0 - i0) + (k3 * (e0 - i0) + km3) * d1) / sq(d1);
            v["nu2_star"] = k1 * k2 * e0 * (k3 * (e0 + i0) + km3) * d1 /
                            sq(k1 * k2 * (e0 - i0) + (k3 * (e0 - i0) + km3) * d1);
            v["nu2_lower"] = k1 * k2 * (e0 - i0) * (k3 * (e0 - i0) + km3) * d1 /
                             sq(k1 * k2 * e0 + (k3 * (e0 + i0) + km3) * d1);
        }
        return cat;
    }
    throw std::invalid_argument("closed_forms: unknown network '" + network_id + "'");
}

RegimeFlags diagnose_regime(const std::string& network_id, const ParameterPoint& pi) {
    RegimeFlags rf;
    ClosedFormCatalog cat = closed_forms(network_id, pi);

    double mu_value = 0.0, eps_value = 0.0;
    if (network_id == "mm.irrev" || network_id == "mm.rev") {
        eps_value = cat.at("eps_MM");
        mu_value = 0.0;
    } else if (network_id == "coop") {
        eps_value = cat.at("eps_C");
        mu_value = cat.at("mu_C");
        // near-invariance of the single-bound plane when the second binding
        // step is slow relative to the first exit rates
        rf.near_ratio = get(pi, "k3") * get(pi, "s0") / (get(pi, "km1") + get(pi, "k2"));
        rf.near_invariant = rf.near_ratio <= 1e-3;
    } else if (network_id == "uncomp" || network_id == "comp") {
        eps_value = network_id == "uncomp" ? cat.at("eps_U") : cat.at("eps_I");
        mu_value = network_id == "uncomp" ? cat.at("mu_U") : cat.at("mu_I");
        // the inhibitor-free subspace is nearly invariant when binding is
        // slow relative to unbinding
        rf.near_ratio = get(pi, "k3") * get(pi, "i0") / get(pi, "km3");
        rf.near_invariant = rf.near_ratio <= 1e-3;
        if (network_id == "comp") {
            double d1 = get(pi, "km1") + get(pi, "k2");
            double f0 = get(pi, "k3") * get(pi, "i0") + get(pi, "km3");
            rf.eqApre_holds =
                2.0 * get(pi, "km3") * f0 + get(pi, "km3") * d1 >= d1 * get(pi, "i0") * get(pi, "k3");
        }
        // three-timescale hint from the 2D slow-eigenvalue spread
        double nu = network_id == "uncomp" ? cat.at("nu_star") : cat.at("nu2_star");
        rf.three_timescale_hint = nu <= 1e-2;
    }
    rf.mu_large_eps_small = mu_value > 1.0 && eps_value < 1e-2;
    return rf;
}

}  // namespace tfpv
