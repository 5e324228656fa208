#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "tfpv/catalog.hpp"
#include "tfpv/lyap.hpp"
#include "tfpv/params.hpp"
#include "tfpv/reduce.hpp"
#include "tfpv/sim.hpp"

namespace py = pybind11;
using namespace tfpv;

namespace {

Scenario resolve_scenario(const std::string& fixture, const std::string& scenario,
                          const std::string& figure) {
    if (!figure.empty()) return figure_scenario(figure_set(figure));
    return fixture_scenario(fixture, scenario);
}

py::list vec_to_list(const Eigen::VectorXd& v) {
    py::list out;
    for (int i = 0; i < v.size(); ++i) out.append(v(i));
    return out;
}

Eigen::VectorXd list_to_vec(const std::vector<double>& v) {
    Eigen::VectorXd x(v.size());
    for (size_t i = 0; i < v.size(); ++i) x(i) = v[i];
    return x;
}

py::dict traj_to_dict(const Trajectory& tr) {
    py::dict d;
    d["states"] = tr.states;
    d["t"] = tr.t;
    py::list rows;
    for (const auto& x : tr.x) rows.append(vec_to_list(x));
    d["x"] = rows;
    d["T"] = tr.T;
    d["stiff_steps"] = tr.stiff_steps;
    d["explicit_steps"] = tr.explicit_steps;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "timescale analysis and Fenichel reduction for mass-action networks";

    m.def("data_dir", &data_dir);
    m.def("fixtures", &list_fixtures);
    m.def("figures", [] {
        std::vector<std::string> out;
        for (const auto& f : figure_sets()) out.push_back(f.figure);
        return out;
    });

    m.def(
        "verify",
        [](const std::string& fixture, const std::string& scenario, const std::string& figure,
           int points) {
            Scenario sc = resolve_scenario(fixture, scenario, figure);
            VerificationReport rep = verify_tfpv(sc, points);
            py::dict d;
            d["pass"] = rep.pass;
            d["points"] = rep.points;
            d["summary"] = rep.summary();
            py::list fails;
            for (const auto& f : rep.failures) {
                py::dict fd;
                fd["check"] = f.check;
                fd["value"] = f.value;
                fd["detail"] = f.detail;
                fails.append(fd);
            }
            d["failures"] = fails;
            return d;
        },
        py::arg("fixture") = "", py::arg("scenario") = "", py::arg("figure") = "",
        py::arg("points") = 101);

    m.def(
        "distinguished_params",
        [](const std::string& fixture, const std::string& scenario, const std::string& figure,
           int points, std::optional<double> eps_ref) {
            Scenario sc = resolve_scenario(fixture, scenario, figure);
            DistinguishedParams dp = distinguished_params(sc, points, eps_ref);
            py::dict d;
            d["eps_star"] = dp.eps_star;
            d["eps_lower"] = dp.eps_lower;
            d["eps_ref"] = dp.eps_ref;
            d["lower_uninformative"] = dp.lower_uninformative;
            if (dp.mu_sup) {
                d["mu_star"] = dp.mu_star;
                d["mu_gate_all_real"] = dp.mu_gate_all_real;
                d["mu_gate_essentially_real"] = dp.mu_gate_essentially_real;
                d["mu_certified"] = dp.mu_certified;
            }
            if (dp.kappa_star_lo) d["kappa_lo"] = *dp.kappa_star_lo;
            if (dp.kappa_star_hi) d["kappa_hi"] = *dp.kappa_star_hi;
            if (dp.nu_lo) d["nu_lo"] = *dp.nu_lo;
            if (dp.nu_hi) d["nu_hi"] = *dp.nu_hi;
            py::list deltas;
            for (const auto& [lo, hi] : dp.delta_js) deltas.append(py::make_tuple(lo, hi));
            d["delta_js"] = deltas;
            return d;
        },
        py::arg("fixture") = "", py::arg("scenario") = "", py::arg("figure") = "",
        py::arg("points") = 101, py::arg("eps_ref") = py::none());

    m.def(
        "closed_forms",
        [](const std::string& network, const std::map<std::string, double>& params) {
            return closed_forms(network, ParameterPoint(params.begin(), params.end())).values;
        },
        py::arg("network"), py::arg("params"));

    m.def(
        "diagnose_regime",
        [](const std::string& network, const std::map<std::string, double>& params) {
            RegimeFlags f = diagnose_regime(network, ParameterPoint(params.begin(), params.end()));
            py::dict d;
            d["eqApre_holds"] = f.eqApre_holds;
            d["near_invariant"] = f.near_invariant;
            d["near_ratio"] = f.near_ratio;
            d["mu_large_eps_small"] = f.mu_large_eps_small;
            d["three_timescale_hint"] = f.three_timescale_hint;
            return d;
        },
        py::arg("network"), py::arg("params"));

    m.def(
        "reduce_rhs",
        [](const std::string& fixture, const std::string& scenario, const std::string& figure,
           const std::vector<double>& u) {
            Scenario sc = resolve_scenario(fixture, scenario, figure);
            Eigen::VectorXd x = chart_point(sc, list_to_vec(u), true);
            Eigen::VectorXd r = reduce_numeric(sc, x);
            py::list out;
            for (const auto& name : sc.chart.slow) out.append(r(sc.field.state_index(name)));
            return out;
        },
        py::arg("fixture") = "", py::arg("scenario") = "", py::arg("figure") = "",
        py::arg("u") = std::vector<double>{});

    m.def(
        "closed_form_rhs",
        [](const std::string& model_id, const std::map<std::string, double>& params,
           const std::vector<double>& u) {
            ReducedModel mdl =
                closed_form_reduction(model_id, ParameterPoint(params.begin(), params.end()));
            return vec_to_list(mdl.rhs(list_to_vec(u)));
        },
        py::arg("model_id"), py::arg("params"), py::arg("u"));

    m.def(
        "simulate",
        [](const std::string& fixture, const std::string& scenario, const std::string& figure,
           double eps, double t1, double rtol) {
            Scenario sc = resolve_scenario(fixture, scenario, figure);
            IntegrateOptions opt;
            opt.rtol = rtol;
            Trajectory tr = integrate(full_system(sc, eps), initial_state(sc, eps), 0.0, t1, opt);
            return traj_to_dict(tr);
        },
        py::arg("fixture") = "", py::arg("scenario") = "", py::arg("figure") = "",
        py::arg("eps") = 1.0, py::arg("t1") = 1.0, py::arg("rtol") = 1e-8);

    m.def(
        "compare",
        [](const std::string& figure, const std::vector<double>& eps, double rtol, int jobs) {
            FigureSet fs = figure_set(figure);
            Scenario sc = figure_scenario(fs);
            std::string rid = reduction_id(fs.fixture, fs.scenario);
            CompareOptions opt;
            opt.rtol = rtol;
            opt.jobs = jobs;
            ComparisonReport rep = compare(
                sc,
                [rid](const ParameterPoint& pi) { return closed_form_reduction(rid, pi); },
                eps.empty() ? sc.eps_schedule : eps, opt);
            py::dict d;
            py::list rows;
            for (const auto& r : rep.rows) {
                py::dict rd;
                rd["eps"] = r.eps;
                rd["eps_star"] = r.eps_star;
                rd["mu_star"] = r.mu_star;
                rd["t_c"] = r.t_c;
                rd["err_post"] = r.err_post;
                rd["err_full"] = r.err_full;
                rows.append(rd);
            }
            d["rows"] = rows;
            d["slope"] = rep.slope;
            return d;
        },
        py::arg("figure"), py::arg("eps") = std::vector<double>{}, py::arg("rtol") = 1e-9,
        py::arg("jobs") = 1);

    m.def(
        "lyap",
        [](double k1, double km1, double k2, double e0, double s0, const std::string& conv) {
            LyapConvention c = conv == "two" ? LyapConvention::Two : LyapConvention::Sqrt2;
            LyapEstimate est = lyap_estimate(k1, km1, k2, e0, s0, c);
            py::dict d;
            d["gamma"] = est.gamma;
            d["kappa"] = est.kappa;
            d["eps_L"] = est.eps_L;
            d["eps_L_normalized"] = est.eps_L_normalized;
            d["eps_L_alt"] = est.eps_L_alt;
            d["eps_PE"] = est.eps_PE;
            d["eps_inf"] = est.eps_inf;
            d["V0"] = est.V0;
            d["t_onset"] = est.t_onset;
            return d;
        },
        py::arg("k1"), py::arg("km1"), py::arg("k2"), py::arg("e0"), py::arg("s0"),
        py::arg("convention") = "sqrt2");

    m.def("cascade_c2_tilde", &cascade_c2_tilde, py::arg("k3"), py::arg("km3"), py::arg("e0"),
          py::arg("i0"));

    m.def(
        "cascade",
        [](const std::string& figure, double rtol) {
            FigureSet fs = figure_set(figure);
            if (!fs.cascade_km2)
                throw std::invalid_argument("figure '" + figure + "' has no cascade block");
            Scenario sc = figure_scenario(fs);
            ParameterPoint raw = fs.raw_params();
            raw["km2"] = *fs.cascade_km2;
            CascadeModel cm = cascade_reduction(raw);
            CompareOptions opt;
            opt.rtol = rtol;
            CascadeReport rep = three_timescale_run(sc, cm, fs.eps_ref, opt);
            py::dict d;
            d["c2_tilde"] = rep.c2_tilde;
            d["t_fast_end"] = rep.t_fast_end;
            d["t_slow_end"] = rep.t_slow_end;
            d["T"] = rep.T;
            d["err_c2_slow"] = rep.err_c2_slow;
            d["err_s_veryslow"] = rep.err_s_veryslow;
            return d;
        },
        py::arg("figure"), py::arg("rtol") = 1e-9);
}
