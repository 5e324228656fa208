#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "tfpv/catalog.hpp"
#include "tfpv/csv.hpp"
#include "tfpv/lyap.hpp"
#include "tfpv/params.hpp"
#include "tfpv/reduce.hpp"
#include "tfpv/sim.hpp"

using json = nlohmann::json;

namespace {

struct CommonOpts {
    std::string fixture, scenario = "e0", figure, network_path, out, format = "csv";
    int grid = 101;
    double rtol = 1e-9;
    std::vector<double> eps;
    int jobs = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--fixture", o.fixture, "built-in fixture id");
    cmd->add_option("--scenario", o.scenario, "scenario id within the fixture");
    cmd->add_option("--figure", o.figure, "figure parameter set (overrides pi_hat/rho/eps)");
    cmd->add_option("--network", o.network_path, "scenario JSON file (instead of a fixture)");
    cmd->add_option("--out", o.out, "output file (default: stdout)");
    cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--grid", o.grid, "points per box axis");
    cmd->add_option("--rtol", o.rtol, "integration tolerance");
    cmd->add_option("--eps", o.eps, "eps values (overrides the scenario schedule)")
        ->delimiter(',');
    int default_jobs = 1;
    if (const char* env = std::getenv("TFPV_LAB_JOBS"); env && *env)
        default_jobs = std::max(1, std::atoi(env));
    o.jobs = default_jobs;
    cmd->add_option("--jobs", o.jobs, "parallel sweep workers (env TFPV_LAB_JOBS)");
}

tfpv::Scenario resolve_scenario(const CommonOpts& o, std::string* fixture_id = nullptr,
                                std::string* scenario_id = nullptr) {
    if (!o.figure.empty()) {
        tfpv::FigureSet fs = tfpv::figure_set(o.figure);
        if (fixture_id) *fixture_id = fs.fixture;
        if (scenario_id) *scenario_id = fs.scenario;
        tfpv::Scenario sc = tfpv::figure_scenario(fs);
        if (!o.eps.empty()) sc.eps_schedule = o.eps;
        return sc;
    }
    if (!o.network_path.empty()) {
        std::ifstream in(o.network_path);
        if (!in) throw std::invalid_argument("cannot open " + o.network_path);
        json doc = json::parse(in);
        std::string base = o.network_path.substr(0, o.network_path.find_last_of('/'));
        if (base == o.network_path) base = ".";
        tfpv::Scenario sc = tfpv::load_scenario(doc, base);
        if (!o.eps.empty()) sc.eps_schedule = o.eps;
        return sc;
    }
    if (o.fixture.empty())
        throw std::invalid_argument("one of --fixture, --figure or --network is required");
    if (fixture_id) *fixture_id = o.fixture == "mm.degenerate" ? "mm.irrev"
                                  : o.fixture == "coop.degenerate" ? "coop"
                                                                   : o.fixture;
    if (scenario_id)
        *scenario_id = (o.fixture == "mm.degenerate" || o.fixture == "coop.degenerate")
                           ? "degenerate"
                           : o.scenario;
    tfpv::Scenario sc = tfpv::fixture_scenario(o.fixture, o.scenario);
    if (!o.eps.empty()) sc.eps_schedule = o.eps;
    return sc;
}

void emit(const CommonOpts& o, const std::string& text) {
    if (o.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(o.out);
    if (!out) throw std::runtime_error("cannot write " + o.out);
    out << text;
}

json params_json(const tfpv::DistinguishedParams& dp) {
    json j;
    j["U"] = dp.U.value;
    j["L"] = dp.L.value;
    j["eps_ref"] = dp.eps_ref;
    j["eps_star"] = dp.eps_star;
    j["eps_lower"] = dp.eps_lower;
    j["lower_uninformative"] = dp.lower_uninformative;
    auto loc = [](const tfpv::ExtremeValue& ev) {
        json a = json::array();
        for (int i = 0; i < ev.arg.size(); ++i) a.push_back(ev.arg(i));
        return json{{"arg", a}, {"refined_off_grid", ev.refined_off_grid}};
    };
    j["eps_star_at"] = loc(dp.U);
    j["eps_lower_at"] = loc(dp.L);
    if (dp.mu_sup) {
        j["mu_star"] = dp.mu_star;
        j["mu_star_at"] = loc(*dp.mu_sup);
        j["mu_gate_all_real"] = dp.mu_gate_all_real;
        j["mu_gate_essentially_real"] = dp.mu_gate_essentially_real;
        j["mu_certified"] = dp.mu_certified;
    }
    if (dp.kappa_star_hi) j["kappa_star_hi"] = *dp.kappa_star_hi;
    if (dp.kappa_star_lo) j["kappa_star_lo"] = *dp.kappa_star_lo;
    if (dp.nu_hi) j["nu_hi"] = *dp.nu_hi;
    if (dp.nu_lo) j["nu_lo"] = *dp.nu_lo;
    if (!dp.delta_js.empty()) {
        json a = json::array();
        for (auto& [lo, hi] : dp.delta_js) a.push_back({{"lower", lo}, {"upper", hi}});
        j["delta_js"] = a;
    }
    return j;
}

int run(int argc, char** argv) {
    CLI::App app{"timescale analysis and Fenichel reduction for mass-action networks"};
    app.require_subcommand(1);

    CommonOpts o;
    std::string model_id, observed = "s";
    double lyap_k1 = 1, lyap_km1 = 1, lyap_k2 = 0.01, lyap_e0 = 1, lyap_s0 = 1;
    std::string lyap_conv = "sqrt2";
    long seed = 0;

    auto* validate = app.add_subcommand("validate", "parse a scenario and verify the TFPV conditions");
    add_common(validate, o);
    auto* analyze = app.add_subcommand("analyze", "distinguished parameters, closed forms, regime flags");
    add_common(analyze, o);
    auto* reduce_cmd = app.add_subcommand("reduce", "reduced right-hand side over the box grid");
    add_common(reduce_cmd, o);
    auto* simulate = app.add_subcommand("simulate", "integrate the full system; trajectory CSV");
    add_common(simulate, o);
    auto* compare_cmd = app.add_subcommand("compare", "full vs reduced error sweep");
    add_common(compare_cmd, o);
    compare_cmd->add_option("--model", model_id, "closed-form reduced model id");
    compare_cmd->add_option("--observed", observed, "observed coordinate");
    auto* sweep = app.add_subcommand("sweep", "alias of compare over the scenario eps schedule");
    add_common(sweep, o);
    sweep->add_option("--model", model_id, "closed-form reduced model id");
    sweep->add_option("--observed", observed, "observed coordinate");
    auto* cascade_cmd = app.add_subcommand("cascade", "three-timescale run (competitive mechanism)");
    add_common(cascade_cmd, o);
    auto* lyap_cmd = app.add_subcommand("lyap", "Lyapunov approach estimates for the slow-product system");
    lyap_cmd->add_option("--k1", lyap_k1);
    lyap_cmd->add_option("--km1", lyap_km1);
    lyap_cmd->add_option("--k2", lyap_k2);
    lyap_cmd->add_option("--e0", lyap_e0);
    lyap_cmd->add_option("--s0", lyap_s0);
    lyap_cmd->add_option("--convention", lyap_conv)->check(CLI::IsMember({"sqrt2", "2"}));
    lyap_cmd->add_option("--out", o.out);
    auto* fixtures_cmd = app.add_subcommand("fixtures", "list built-in fixtures and scenarios");
    app.add_option("--seed", seed, "reserved for deterministic sampling");

    CLI11_PARSE(app, argc, argv);

    if (fixtures_cmd->parsed()) {
        std::ostringstream os;
        for (const auto& id : tfpv::list_fixtures()) {
            tfpv::Fixture fx = tfpv::load_fixture(id);
            os << id << ":";
            for (const auto& s : fx.scenario_ids) os << " " << s;
            os << "\n";
        }
        emit(o, os.str());
        return 0;
    }

    if (lyap_cmd->parsed()) {
        auto conv = lyap_conv == "2" ? tfpv::LyapConvention::Two : tfpv::LyapConvention::Sqrt2;
        tfpv::LyapEstimate est = tfpv::lyap_estimate(lyap_k1, lyap_km1, lyap_k2, lyap_e0, lyap_s0, conv);
        json j{{"gamma", est.gamma},       {"kappa", est.kappa},
               {"eps_L", est.eps_L},       {"eps_L_normalized", est.eps_L_normalized},
               {"eps_L_alt", est.eps_L_alt}, {"eps_PE", est.eps_PE},
               {"eps_inf", est.eps_inf},   {"t_onset", est.t_onset},
               {"V0", est.V0},             {"convention", lyap_conv}};
        emit(o, j.dump(2) + "\n");
        return 0;
    }

    std::string fixture_id, scenario_id;
    tfpv::Scenario sc = resolve_scenario(o, &fixture_id, &scenario_id);

    if (validate->parsed()) {
        tfpv::VerificationReport rep = tfpv::verify_tfpv(sc, o.grid);
        std::cout << sc.id << ": " << rep.summary() << "\n";
        return rep.pass ? 0 : 1;
    }

    if (analyze->parsed()) {
        tfpv::DistinguishedParams dp = tfpv::distinguished_params(sc, o.grid);
        json j;
        j["scenario"] = sc.id;
        j["params"] = params_json(dp);
        if (!fixture_id.empty()) {
            try {
                double eref = dp.eps_ref;
                tfpv::ParameterPoint raw = sc.params_at(eref);
                tfpv::ClosedFormCatalog cat = tfpv::closed_forms(fixture_id, raw);
                j["closed_forms"] = json::object();
                for (const auto& [k, v] : cat.values) j["closed_forms"][k] = v;
                tfpv::RegimeFlags rf = tfpv::diagnose_regime(fixture_id, raw);
                j["regime"] = {{"eqApre_holds", rf.eqApre_holds},
                               {"near_invariant", rf.near_invariant},
                               {"near_ratio", rf.near_ratio},
                               {"mu_large_eps_small", rf.mu_large_eps_small},
                               {"three_timescale_hint", rf.three_timescale_hint}};
            } catch (const std::invalid_argument&) {
                // custom networks have no closed-form catalog
            }
        }
        // flatten the headline values for easy consumption
        j["eps_star"] = dp.eps_star;
        if (dp.mu_sup) j["mu_star"] = dp.mu_star;
        emit(o, j.dump(2) + "\n");
        return 0;
    }

    if (reduce_cmd->parsed()) {
        std::ostringstream os;
        os << "";
        std::string header;
        for (const auto& s : sc.chart.slow) header += (header.empty() ? "" : ",") + s;
        for (const auto& s : sc.chart.slow) header += ",d" + s;
        os << header << "\n";
        for (const auto& u : tfpv::box_grid(sc, o.grid)) {
            Eigen::VectorXd x = tfpv::chart_point(sc, u, !sc.chart.coordinate_subspace);
            Eigen::VectorXd r = tfpv::reduce_numeric(sc, x);
            std::string line;
            for (int i = 0; i < u.size(); ++i)
                line += (line.empty() ? "" : ",") + tfpv::format_double(u(i));
            for (const auto& s : sc.chart.slow)
                line += "," + tfpv::format_double(r(sc.field.state_index(s)));
            os << line << "\n";
        }
        emit(o, os.str());
        return 0;
    }

    if (simulate->parsed()) {
        double eps = sc.eps_schedule.empty() ? 1.0 : sc.eps_schedule.front();
        if (!o.eps.empty()) eps = o.eps.front();
        tfpv::OdeSystem sys = tfpv::full_system(sc, eps);
        tfpv::IntegrateOptions io;
        io.rtol = o.rtol;
        // horizon: reduced decay when a closed form exists, else fixed span
        double T = 10.0;
        tfpv::CompareOptions co;
        co.rtol = o.rtol;
        try {
            std::string rid = tfpv::reduction_id(fixture_id, scenario_id);
            tfpv::ComparisonReport rep = tfpv::compare(
                sc,
                [&](const tfpv::ParameterPoint& pp) { return tfpv::closed_form_reduction(rid, pp); },
                {eps}, co);
            T = rep.rows.front().T;
        } catch (const std::invalid_argument&) {
        }
        tfpv::Trajectory tr = tfpv::integrate(sys, tfpv::initial_state(sc, eps), 0.0, T, io);
        emit(o, tfpv::trajectory_csv(tr));
        return 0;
    }

    if (compare_cmd->parsed() || sweep->parsed()) {
        std::string rid = model_id.empty() ? tfpv::reduction_id(fixture_id, scenario_id) : model_id;
        std::vector<double> eps_list = o.eps.empty() ? sc.eps_schedule : o.eps;
        if (eps_list.empty()) throw std::invalid_argument("no eps values given");
        tfpv::CompareOptions co;
        co.rtol = o.rtol;
        co.observed = observed;
        co.jobs = o.jobs;
        tfpv::ComparisonReport rep = tfpv::compare(
            sc,
            [&](const tfpv::ParameterPoint& pp) { return tfpv::closed_form_reduction(rid, pp); },
            eps_list, co);
        emit(o, tfpv::comparison_csv(rep));
        return 0;
    }

    if (cascade_cmd->parsed()) {
        double eps = sc.eps_schedule.empty() ? 1.0 : sc.eps_schedule.front();
        tfpv::ParameterPoint raw = sc.params_at(eps);
        if (!raw.count("km2")) {
            if (!o.figure.empty()) {
                tfpv::FigureSet fs = tfpv::figure_set(o.figure);
                if (fs.cascade_km2) raw["km2"] = *fs.cascade_km2;
            }
            if (!raw.count("km2"))
                throw std::invalid_argument(
                    "cascade needs the stage-2 constant km2 (see README on the printed "
                    "denominator km2 + km1)");
        }
        tfpv::CascadeModel cm = tfpv::cascade_reduction(raw);
        tfpv::CompareOptions co;
        co.rtol = o.rtol;
        tfpv::CascadeReport rep = tfpv::three_timescale_run(sc, cm, eps, co);
        std::string base = o.out.empty() ? "cascade" : o.out;
        auto dump = [](const std::string& path, const std::string& text) {
            std::ofstream f(path);
            if (!f) throw std::runtime_error("cannot write " + path);
            f << text;
        };
        dump(base + ".full.csv", tfpv::trajectory_csv(rep.full));
        dump(base + ".stage1.csv", tfpv::trajectory_csv(rep.stage1));
        dump(base + ".stage2.csv", tfpv::trajectory_csv(rep.stage2));
        json j{{"c2_tilde", rep.c2_tilde},
               {"t_fast_end", rep.t_fast_end},
               {"t_slow_end", rep.t_slow_end},
               {"T", rep.T},
               {"err_c2_slow", rep.err_c2_slow},
               {"err_s_veryslow", rep.err_s_veryslow}};
        std::cout << j.dump(2) << "\n";
        return 0;
    }

    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
