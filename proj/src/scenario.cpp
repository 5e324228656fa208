#include "tfpv/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace tfpv {

using json = nlohmann::json;

Eigen::VectorXd Scenario::param_vector_at(double eps) const {
    return pi_hat_vector() + eps * rho_vector();
}

ParameterPoint Scenario::params_at(double eps) const {
    ParameterPoint p = pi_hat;
    for (const auto& [k, v] : rho) p[k] += eps * v;
    return p;
}

Scenario load_scenario(const json& doc, const std::string& base_dir) {
    Scenario sc;
    sc.id = doc.value("id", "");
    std::string src;
    if (doc.contains("network_source")) {
        src = doc.at("network_source").get<std::string>();
    } else {
        std::string path = doc.at("network").get<std::string>();
        if (!path.empty() && path[0] != '/' && !base_dir.empty()) path = base_dir + "/" + path;
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open network file " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        src = ss.str();
    }
    sc.net = parse_network(src);

    std::map<std::string, std::string> totals;
    if (doc.contains("eliminate"))
        for (auto& [k, v] : doc.at("eliminate").items()) totals[k] = v.get<std::string>();
    sc.field = eliminate_conservation(sc.net, totals);

    for (auto& [k, v] : doc.at("pi_hat").items()) sc.pi_hat[k] = v.get<double>();
    for (auto& [k, v] : doc.at("rho").items()) sc.rho[k] = v.get<double>();
    sc.s = doc.at("s").get<int>();
    if (sc.s < 1 || sc.s >= sc.field.n())
        throw std::runtime_error("scenario: manifold dimension s out of range");

    const json& chart = doc.at("chart");
    for (auto& name : chart.at("slow")) {
        std::string sn = name.get<std::string>();
        if (sc.field.state_index(sn) < 0)
            throw std::runtime_error("chart slow coordinate '" + sn + "' is not a state");
        sc.chart.slow.push_back(sn);
    }
    if (static_cast<int>(sc.chart.slow.size()) != sc.s)
        throw std::runtime_error("chart must have exactly s slow coordinates");
    sc.chart.coordinate_subspace = true;
    if (chart.contains("graph"))
        for (auto& [k, v] : chart.at("graph").items()) {
            if (sc.field.state_index(k) < 0)
                throw std::runtime_error("chart graph coordinate '" + k + "' is not a state");
            Expr e = Expr::parse(v.get<std::string>());
            if (v.get<std::string>() != "0") sc.chart.coordinate_subspace = false;
            sc.chart.graph[k] = std::move(e);
        }
    for (const auto& st : sc.field.states) {
        bool is_slow = std::find(sc.chart.slow.begin(), sc.chart.slow.end(), st) !=
                       sc.chart.slow.end();
        if (!is_slow && !sc.chart.graph.count(st))
            throw std::runtime_error("chart missing graph expression for fast state " + st);
    }

    // Box bounds may be numbers or expressions over the parameters at pi_hat.
    auto bound = [&](const json& b) -> double {
        if (b.is_number()) return b.get<double>();
        return Expr::parse(b.get<std::string>()).eval([&](const std::string& n) {
            auto it = sc.pi_hat.find(n);
            if (it == sc.pi_hat.end()) throw std::runtime_error("box bound: unknown parameter " + n);
            return it->second;
        });
    };
    const json& box = doc.at("box");
    for (const auto& sn : sc.chart.slow) {
        if (!box.contains(sn)) throw std::runtime_error("box missing interval for " + sn);
        sc.box.push_back({bound(box.at(sn).at(0)), bound(box.at(sn).at(1))});
    }

    if (doc.contains("eps"))
        for (auto& e : doc.at("eps")) sc.eps_schedule.push_back(e.get<double>());
    sc.eps_max = sc.eps_schedule.empty()
                     ? 0.0
                     : *std::max_element(sc.eps_schedule.begin(), sc.eps_schedule.end());
    for (double e : sc.eps_schedule)
        for (const auto& [k, v] : sc.pi_hat)
            if (v + e * (sc.rho.count(k) ? sc.rho.at(k) : 0.0) < 0.0)
                throw std::runtime_error("scenario: pi_hat + eps*rho negative for " + k);
    return sc;
}

Eigen::VectorXd chart_point(const Scenario& sc, const Eigen::VectorXd& u, bool newton_refine) {
    const auto& f = sc.field;
    if (u.size() != sc.s) throw std::invalid_argument("chart_point: wrong slow dimension");
    Eigen::VectorXd x = Eigen::VectorXd::Zero(f.n());
    auto lookup = [&](const std::string& name) -> double {
        for (size_t i = 0; i < sc.chart.slow.size(); ++i)
            if (sc.chart.slow[i] == name) return u(static_cast<int>(i));
        auto it = sc.pi_hat.find(name);
        if (it != sc.pi_hat.end()) return it->second;
        throw std::runtime_error("chart expression: unknown identifier " + name);
    };
    for (int i = 0; i < f.n(); ++i) {
        const std::string& st = f.states[i];
        auto g = sc.chart.graph.find(st);
        if (g != sc.chart.graph.end())
            x(i) = g->second.eval(lookup);
        else
            x(i) = lookup(st);
    }
    if (!newton_refine) return x;

    // Gauss-Newton on the fast coordinates, slow coordinates pinned.
    std::vector<int> fast;
    for (int i = 0; i < f.n(); ++i)
        if (std::find(sc.chart.slow.begin(), sc.chart.slow.end(), f.states[i]) ==
            sc.chart.slow.end())
            fast.push_back(i);
    Eigen::VectorXd p = sc.pi_hat_vector();
    for (int it = 0; it < 50; ++it) {
        Eigen::VectorXd h = f.eval(x, p);
        Eigen::MatrixXd J = f.jacobian(x, p);
        double scale = std::max(1.0, J.cwiseAbs().rowwise().sum().maxCoeff());
        if (h.cwiseAbs().maxCoeff() <= 1e-12 * scale) break;
        Eigen::MatrixXd Jf(f.n(), fast.size());
        for (size_t c = 0; c < fast.size(); ++c) Jf.col(c) = J.col(fast[c]);
        Eigen::VectorXd step = Jf.colPivHouseholderQr().solve(-h);
        for (size_t c = 0; c < fast.size(); ++c) x(fast[c]) += step(c);
    }
    return x;
}

std::vector<Eigen::VectorXd> box_grid(const Scenario& sc, int points_per_axis) {
    int dims = sc.s;
    long total = 1;
    int res = std::max(2, points_per_axis);
    for (int d = 0; d < dims; ++d) total *= res;
    while (total > 1000000) {
        res = res / 2 + 1;
        total = 1;
        for (int d = 0; d < dims; ++d) total *= res;
    }
    std::vector<Eigen::VectorXd> pts;
    pts.reserve(total);
    std::vector<int> idx(dims, 0);
    for (;;) {
        Eigen::VectorXd u(dims);
        for (int d = 0; d < dims; ++d) {
            double lo = sc.box[d][0], hi = sc.box[d][1];
            u(d) = lo + (hi - lo) * idx[d] / static_cast<double>(res - 1);
        }
        pts.push_back(u);
        int d = dims - 1;
        while (d >= 0 && ++idx[d] == res) idx[d--] = 0;
        if (d < 0) break;
    }
    return pts;
}

SigmaExpansion sigma_expansion(const Scenario& sc, const Eigen::VectorXd& u) {
    const auto& f = sc.field;
    int n = f.n();
    Eigen::VectorXd x = chart_point(sc, u, !sc.chart.coordinate_subspace);
    Eigen::VectorXd pi0 = sc.pi_hat_vector();
    Eigen::VectorXd rho = sc.rho_vector();

    SigmaExpansion ex;
    Eigen::MatrixXd J0 = f.jacobian(x, pi0);
    ex.scale = std::max(1.0, J0.cwiseAbs().rowwise().sum().maxCoeff());
    ex.sigma_at_pi_hat = charpoly_coeffs(J0).sigma;

    int pdeg = f.param_degree();
    int dmax = n * pdeg;
    // Chebyshev nodes on [-1,1]; sigma_i is a genuine polynomial in eps, so
    // sampling outside the physical eps range is legitimate and well
    // conditioned.
    int m = dmax + 1;
    Eigen::VectorXd nodes(m);
    for (int j = 0; j < m; ++j)
        nodes(j) = std::cos(std::numbers::pi * (2.0 * j + 1.0) / (2.0 * m));
    Eigen::MatrixXd samples(m, n);
    for (int j = 0; j < m; ++j) {
        Eigen::MatrixXd J = f.jacobian(x, pi0 + nodes(j) * rho);
        samples.row(j) = charpoly_coeffs(J).sigma.transpose();
    }
    Eigen::MatrixXd V(m, dmax + 1);
    for (int j = 0; j < m; ++j) {
        double pw = 1.0;
        for (int k = 0; k <= dmax; ++k) {
            V(j, k) = pw;
            pw *= nodes(j);
        }
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(V);

    ex.coeffs.resize(n);
    ex.vanishing_order.resize(n);
    ex.sigma_hat0.resize(n);
    for (int i = 1; i <= n; ++i) {
        int di = std::min(i * pdeg, dmax);
        Eigen::VectorXd c = qr.solve(samples.col(i - 1));
        c.conservativeResize(dmax + 1);
        // zero out everything beyond the structural degree bound
        for (int k = di + 1; k <= dmax; ++k) c(k) = 0.0;
        ex.coeffs[i - 1] = c;
        double mag = std::max(1.0, c.cwiseAbs().maxCoeff());
        // dimension-consistent floor: sigma_i ~ scale^i
        double tol = 1e-10 * std::max(mag, std::pow(ex.scale, i));
        int order = dmax + 1;
        for (int k = 0; k <= dmax; ++k)
            if (std::abs(c(k)) > tol) {
                order = k;
                break;
            }
        ex.vanishing_order[i - 1] = order;
        int expected = std::max(0, i - (n - sc.s));
        ex.sigma_hat0(i - 1) = (expected == 0) ? ex.sigma_at_pi_hat(i - 1) : c(expected);
    }
    return ex;
}

std::string VerificationReport::summary() const {
    std::ostringstream os;
    os << (pass ? "PASS" : "FAIL") << " (" << points << " grid points";
    if (!failures.empty()) {
        os << "; " << failures.size() << " failures, first: " << failures.front().check << " at (";
        for (int i = 0; i < failures.front().u.size(); ++i)
            os << (i ? ", " : "") << failures.front().u(i);
        os << ") " << failures.front().detail;
    }
    os << ")";
    return os.str();
}

VerificationReport verify_tfpv(const Scenario& sc, int points_per_axis) {
    const auto& f = sc.field;
    int n = f.n();
    int s = sc.s;
    VerificationReport rep;
    auto grid = box_grid(sc, points_per_axis);
    if (grid.empty()) throw std::runtime_error("verify_tfpv: empty box");
    rep.points = static_cast<int>(grid.size());
    rep.sigma_min = Eigen::VectorXd::Constant(n - s, std::numeric_limits<double>::infinity());
    rep.sigma_max = Eigen::VectorXd::Constant(n - s, -std::numeric_limits<double>::infinity());
    Eigen::VectorXd pi0 = sc.pi_hat_vector();

    auto add_failure = [&](const Eigen::VectorXd& u, const std::string& check, double val,
                           const std::string& detail) {
        if (rep.failures.size() < 50)
            rep.failures.push_back({u, check, val, detail});
    };

    for (const auto& u : grid) {
        Eigen::VectorXd x = chart_point(sc, u, !sc.chart.coordinate_subspace);
        Eigen::MatrixXd J = f.jacobian(x, pi0);
        double scale = std::max(1.0, J.cwiseAbs().rowwise().sum().maxCoeff());
        Eigen::VectorXd h = f.eval(x, pi0);
        if (h.cwiseAbs().maxCoeff() > 1e-9 * scale) {
            add_failure(u, "chart", h.cwiseAbs().maxCoeff(), "chart point is not an equilibrium");
            continue;
        }
        SigmaExpansion ex = sigma_expansion(sc, u);
        const Eigen::VectorXd& sig = ex.sigma_at_pi_hat;

        // (a) vanishing of the top s coefficients at pi_hat
        for (int i = n - s + 1; i <= n; ++i) {
            double tol = 1e-9 * std::max(1.0, std::pow(scale, i));
            if (std::abs(sig(i - 1)) > tol)
                add_failure(u, "sigma_vanishing", sig(i - 1),
                            "sigma_" + std::to_string(i) + " nonzero at pi_hat");
        }
        // (b) Hurwitz stability of chi / tau^s
        Eigen::VectorXd reduced = sig.head(n - s);
        if (!routh_hurwitz_stable(reduced))
            add_failure(u, "hurwitz", reduced.minCoeff(), "chi/tau^s not Hurwitz");
        // (c) rank of D1h equals n-s with a clean singular value gap
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
        Eigen::VectorXd sv = svd.singularValues();
        double smax = sv(0);
        int below = 0;
        for (int i = 0; i < n; ++i)
            if (sv(i) < 1e-6 * std::max(smax, 1.0)) ++below;
        if (below != s)
            add_failure(u, "rank", static_cast<double>(n - below),
                        "rank D1h != n-s (singular value gap)");
        // (d) nondegeneracy of the sigma-hat leading values
        {
            // sigma_{n-s} must stay away from 0 at pi_hat
            double tol = 1e-8 * std::max(1.0, std::pow(scale, n - s));
            if (!(sig(n - s - 1) > tol))
                add_failure(u, "nondegeneracy", sig(n - s - 1), "sigma_{n-s}(pi_hat) ~ 0");
            // sigma_hat_n(x, 0) must be nonzero: compare the expected-order
            // coefficient against the polynomial's own magnitude
            const Eigen::VectorXd& cn = ex.coeffs[n - 1];
            double mag = std::max(1.0, cn.cwiseAbs().maxCoeff());
            if (std::abs(ex.sigma_hat0(n - 1)) <= 1e-8 * mag)
                add_failure(u, "nondegeneracy", ex.sigma_hat0(n - 1), "sigma_hat_n(x,0) ~ 0");
            // and the detected vanishing order must match Lemma-level forcing
            if (ex.vanishing_order[n - 1] < s)
                add_failure(u, "nondegeneracy", static_cast<double>(ex.vanishing_order[n - 1]),
                            "sigma_n vanishing order below s");
        }
        for (int k = 0; k < n - s; ++k) {
            rep.sigma_min(k) = std::min(rep.sigma_min(k), sig(k));
            rep.sigma_max(k) = std::max(rep.sigma_max(k), sig(k));
        }
    }
    rep.pass = rep.failures.empty();
    return rep;
}

OrderCheckReport eigenvalue_order_check(const Scenario& sc, const Eigen::VectorXd& u,
                                        const std::vector<double>& eps_list) {
    if (eps_list.size() < 2)
        throw std::invalid_argument("eigenvalue_order_check: need at least two eps values");
    std::vector<double> eps = eps_list;
    std::sort(eps.begin(), eps.end());
    double e1 = eps[0], e2 = eps[1];

    const auto& f = sc.field;
    int n = f.n();
    int s = sc.s;
    Eigen::VectorXd x = chart_point(sc, u, !sc.chart.coordinate_subspace);

    auto spec_at = [&](double e) {
        return eigenvalues(f.jacobian(x, sc.param_vector_at(e)));
    };
    Spectrum sp1 = spec_at(e1), sp2 = spec_at(e2);
    // slow block: the s smallest-|lambda| eigenvalues (spectrum is sorted by
    // descending |Re|, slow ones are at the tail)
    auto slow_sorted = [&](const Spectrum& sp) {
        std::vector<std::complex<double>> v(sp.lambda.end() - s, sp.lambda.end());
        std::sort(v.begin(), v.end(), [](auto a, auto b) {
            return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
        });
        return v;
    };
    auto s1 = slow_sorted(sp1), s2 = slow_sorted(sp2);

    OrderCheckReport rep;
    rep.pass = true;
    for (int i = 0; i < s; ++i) {
        std::complex<double> h1 = s1[i] / e1, h2 = s2[i] / e2;
        double ratio = std::abs(h1 - h2) / std::max(1e-300, std::abs(h2));
        rep.slow_ratios.push_back({std::abs(h1), std::abs(h2), ratio});
        if (ratio > 0.10) rep.pass = false;
    }
    // fast block convergence to roots of chi/tau^s at eps = 0
    Eigen::VectorXd sig0 = charpoly_coeffs(f.jacobian(x, sc.pi_hat_vector())).sigma;
    auto limit = poly_roots(sig0.head(n - s));
    double worst = 0.0;
    for (int i = 0; i < n - s; ++i) {
        const auto& l = sp1.lambda[i];
        double best = std::numeric_limits<double>::infinity();
        for (const auto& r : limit)
            best = std::min(best, std::abs(l - r) / std::max(1.0, std::abs(r)));
        worst = std::max(worst, best);
    }
    rep.fast_max_rel_err = worst;
    if (worst > 0.10) rep.pass = false;
    return rep;
}

}  // namespace tfpv
