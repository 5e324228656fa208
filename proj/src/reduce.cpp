#include "tfpv/reduce.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tfpv {

namespace {

double get(const ParameterPoint& pi, const std::string& key) {
    auto it = pi.find(key);
    if (it == pi.end())
        throw std::invalid_argument("closed_form_reduction: missing parameter '" + key + "'");
    return it->second;
}

}  // namespace

Projector spectral_projector(const Eigen::MatrixXd& J, int s) {
    if (J.rows() != J.cols()) throw std::invalid_argument("spectral_projector: non-square matrix");
    const int n = static_cast<int>(J.rows());
    if (s < 0 || s > n) throw std::invalid_argument("spectral_projector: bad kernel dimension");

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    double smax = sv.size() > 0 ? sv(0) : 0.0;
    double gap = 1e-6 * std::max(smax, 1e-300);
    int null_count = 0;
    for (int i = 0; i < n; ++i)
        if (sv(i) < gap) ++null_count;
    if (null_count != s)
        throw std::runtime_error("spectral_projector: numerical rank " + std::to_string(n - null_count) +
                                 ", expected " + std::to_string(n - s));

    Projector pr;
    pr.rank = s;
    pr.kernel = svd.matrixV().rightCols(s);   // null space of J
    pr.image = svd.matrixU().leftCols(n - s); // column space of J
    Eigen::MatrixXd B(n, n);
    B << pr.kernel, pr.image;

    Eigen::JacobiSVD<Eigen::MatrixXd> bsvd(B);
    double bmin = bsvd.singularValues()(n - 1);
    pr.cond = bmin > 0.0 ? bsvd.singularValues()(0) / bmin
                         : std::numeric_limits<double>::infinity();
    if (!(pr.cond <= 1e12))
        throw std::runtime_error(
            "spectral_projector: kernel/image split ill-conditioned (transversality failure)");

    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    D.topLeftCorner(s, s).setIdentity();
    pr.Pi = B * D * B.partialPivLu().solve(Eigen::MatrixXd::Identity(n, n));
    return pr;
}

Eigen::VectorXd h1_field(const Scenario& sc, const Eigen::VectorXd& x) {
    // d/deps h(x, pi_hat + eps*rho) at eps = 0.  h is polynomial in the
    // parameters (rate constants times conserved totals), so a five-point
    // central stencil differentiates exactly up to quartic eps-dependence.
    const Eigen::VectorXd p0 = sc.pi_hat_vector();
    const Eigen::VectorXd r = sc.rho_vector();
    auto h = [&](double e) { return sc.field.eval(x, p0 + e * r); };
    return (8.0 * (h(1.0) - h(-1.0)) - (h(2.0) - h(-2.0))) / 12.0;
}

Eigen::VectorXd reduce_numeric(const Scenario& sc, const Eigen::VectorXd& x) {
    Eigen::MatrixXd J = sc.field.jacobian(x, sc.pi_hat_vector());
    Projector pr = spectral_projector(J, sc.s);
    return pr.Pi * h1_field(sc, x);
}

ReducedModel closed_form_reduction(const std::string& model_id, const ParameterPoint& pi) {
    ReducedModel m;
    m.id = model_id;

    if (model_id == "mm.irrev.e0") {
        double k1 = get(pi, "k1"), km1 = get(pi, "km1"), k2 = get(pi, "k2"), e0 = get(pi, "e0");
        m.states = {"s"};
        m.rhs = [=](const Eigen::VectorXd& u) {
            Eigen::VectorXd out(1);
            out(0) = -k1 * k2 * e0 * u(0) / (km1 + k2 + k1 * u(0));
            return out;
        };
    } else if (model_id == "mm.rev.e0") {
        double k1 = get(pi, "k1"), km1 = get(pi, "km1"), k2 = get(pi, "k2"),
               km2 = get(pi, "km2"), e0 = get(pi, "e0"), s0 = get(pi, "s0");
        m.states = {"s"};
        m.rhs = [=](const Eigen::VectorXd& u) {
            double s = u(0);
            Eigen::VectorXd out(1);
            out(0) = -e0 * (s * (k1 * k2 + km1 * km2) - km1 * km2 * s0) /
                     (k1 * s + km1 + k2 + km2 * (s0 - s));
            return out;
        };
    } else if (model_id == "mm.slowprod.k2") {
        // aggregate variable x = s + c; substrate + complex decays via product
        double k1 = get(pi, "k1"), km1 = get(pi, "km1"), k2 = get(pi, "k2"), e0 = get(pi, "e0");
        double KS = km1 / k1;
        m.states = {"x"};
        m.rhs = [=](const Eigen::VectorXd& u) {
            double x = u(0);
            Eigen::VectorXd out(1);
            out(0) = -0.5 * k2 *
                     ((KS + e0 + x) - std::sqrt((KS + e0 - x) * (KS + e0 - x) + 4.0 * KS * x));
            return out;
        };
    } else if (model_id == "mm.slowprod.k2.s") {
        double k1 = get(pi, "k1"), km1 = get(pi, "km1"), k2 = get(pi, "k2"), e0 = get(pi, "e0");
        double KS = km1 / k1;
        m.states = {"s"};
        m.rhs = [=](const Eigen::VectorXd& u) {
            double s = u(0);
            Eigen::VectorXd out(1);
            out(0) = -k2 * e0 * s * (s + KS) / (KS * e0 + (s + KS) * (s + KS));
            return out;
        };
    } else if (model_id == "coop.e0") {
        double k1 = get(pi, "k1"), km1 = get(pi, "km1"), k2 = get(pi, "k2"), k3 = get(pi, "k3"),
               km3 = get(pi, "km3"), k4 = get(pi, "k4"), e0 = get(pi, "e0");
        m.states = {"s"};
        m.rhs = [=](const Eigen::VectorXd& u) {
            double s = u(0);
            Eigen::VectorXd out(1);
            out(0) = -k1 * e0 * s * (k3 * k4 * s + k2 * (km3 + k4)) /
                     ((k1 * s + km1 + k2) * (km3 + k4) + k1 * k3 * s * s);
            return out;
        };
    } else if (model_id == "uncomp.e0") {
        double k1 = get(pi, "k1"), km1 = get(pi, "km1"), k2 = get(pi, "k2"), k3 = get(pi, "k3"),
               km3 = get(pi, "km3"), e0 = get(pi, "e0"), i0 = get(pi, "i0");
        m.states = {"s"};
        m.rhs = [=](const Eigen::VectorXd& u) {
            double s = u(0);
            Eigen::VectorXd out(1);
            out(0) = -k1 * e0 * k2 * km3 * s /
                     ((k1 * s + k2 + km1) * km3 + i0 * k1 * k3 * s);
            return out;
        };
    } else if (model_id == "uncomp.k1km3") {
        // 2D reduction for slow substrate binding and slow complex-inhibitor
        // unbinding; states (s, c2)
        double k1 = get(pi, "k1"), km1 = get(pi, "km1"), k2 = get(pi, "k2"), k3 = get(pi, "k3"),
               km3 = get(pi, "km3"), e0 = get(pi, "e0"), i0 = get(pi, "i0");
        m.states = {"s", "c2"};
        m.rhs = [=](const Eigen::VectorXd& u) {
            double s = u(0), c2 = u(1);
            double den = km1 + k2 + k3 * (i0 - c2);
            Eigen::VectorXd out(2);
            out(0) = (-k1 * (e0 - c2) * (k2 + k3 * (i0 - c2)) * s + km3 * km1 * c2) / den;
            out(1) = (k1 * k3 * (e0 - c2) * (i0 - c2) * s - km3 * (km1 + k2) * c2) / den;
            return out;
        };
    } else if (model_id == "comp.e0") {
        double k1 = get(pi, "k1"), km1 = get(pi, "km1"), k2 = get(pi, "k2"), k3 = get(pi, "k3"),
               km3 = get(pi, "km3"), e0 = get(pi, "e0"), i0 = get(pi, "i0");
        m.states = {"s"};
        m.rhs = [=](const Eigen::VectorXd& u) {
            double s = u(0);
            Eigen::VectorXd out(1);
            out(0) = -k1 * km3 * k2 * e0 * s /
                     ((k1 * s + km1 + k2) * km3 + k3 * i0 * (km1 + k2));
            return out;
        };
    } else if (model_id == "comp.k1k3km3") {
        // 2D reduction for slow binding/unbinding of both ligands
        double k1 = get(pi, "k1"), km1 = get(pi, "km1"), k2 = get(pi, "k2"), k3 = get(pi, "k3"),
               km3 = get(pi, "km3"), e0 = get(pi, "e0"), i0 = get(pi, "i0");
        m.states = {"s", "c2"};
        m.rhs = [=](const Eigen::VectorXd& u) {
            double s = u(0), c2 = u(1);
            Eigen::VectorXd out(2);
            out(0) = -k1 * k2 * (e0 - c2) * s / (km1 + k2);
            out(1) = k3 * (e0 - c2) * (i0 - c2) - km3 * c2;
            return out;
        };
    } else {
        throw std::invalid_argument("closed_form_reduction: unknown model id '" + model_id + "'");
    }
    return m;
}

std::string reduction_id(const std::string& fixture, const std::string& scenario) {
    if (fixture == "mm.irrev" && scenario == "e0") return "mm.irrev.e0";
    if (fixture == "mm.irrev" && scenario == "slowprod") return "mm.slowprod.k2.s";
    if (fixture == "mm.rev" && scenario == "e0") return "mm.rev.e0";
    if (fixture == "coop" && scenario == "e0") return "coop.e0";
    if (fixture == "uncomp" && scenario == "e0") return "uncomp.e0";
    if (fixture == "uncomp" && scenario == "k1km3") return "uncomp.k1km3";
    if (fixture == "comp" && scenario == "e0") return "comp.e0";
    if (fixture == "comp" && scenario == "k1k3km3") return "comp.k1k3km3";
    throw std::invalid_argument("no closed-form reduction for " + fixture + "/" + scenario);
}

double cascade_c2_tilde(double k3, double km3, double e0, double i0) {
    if (k3 < 0.0 || km3 < 0.0 || e0 < 0.0 || i0 < 0.0)
        throw std::invalid_argument("cascade_c2_tilde: negative input");
    double b = k3 * (e0 + i0) + km3;
    double disc = b * b - 4.0 * k3 * k3 * e0 * i0;
    if (disc < 0.0) throw std::runtime_error("cascade_c2_tilde: negative discriminant");
    // subtraction-safe root: divide out the cancelling branch
    double denom = b + std::sqrt(disc);
    return denom > 0.0 ? 2.0 * e0 * i0 * k3 / denom : 0.0;
}

CascadeModel cascade_reduction(const ParameterPoint& pi) {
    CascadeModel cm;
    cm.pi = pi;
    double k1 = get(pi, "k1"), km1 = get(pi, "km1"), k2 = get(pi, "k2"), k3 = get(pi, "k3"),
           km3 = get(pi, "km3"), km2 = get(pi, "km2"), e0 = get(pi, "e0"), i0 = get(pi, "i0");
    (void)k2;
    cm.c2_tilde = cascade_c2_tilde(k3, km3, e0, i0);

    cm.stage1.id = "comp.cascade.stage1";
    cm.stage1.states = {"s", "c2"};
    cm.stage1.rhs = [=](const Eigen::VectorXd& u) {
        double c2 = u(1);
        Eigen::VectorXd out(2);
        out(0) = 0.0;  // substrate frozen on this timescale
        out(1) = k3 * (e0 - c2) * (i0 - c2) - km3 * c2;
        return out;
    };

    double c2t = cm.c2_tilde;
    cm.stage2.id = "comp.cascade.stage2";
    cm.stage2.states = {"s"};
    cm.stage2.rhs = [=](const Eigen::VectorXd& u) {
        Eigen::VectorXd out(1);
        out(0) = -k2 * k1 * (e0 - c2t) * u(0) / (km2 + km1);
        return out;
    };
    return cm;
}

}  // namespace tfpv
