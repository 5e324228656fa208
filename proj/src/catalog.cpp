#include "tfpv/catalog.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;

#ifndef TFPV_LAB_DEFAULT_DATA_DIR
#define TFPV_LAB_DEFAULT_DATA_DIR ""
#endif

namespace tfpv {

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json load_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

// "mm.degenerate" and "coop.degenerate" are presented as fixture ids on the
// command line; they resolve to degenerate scenarios of real fixtures.
std::pair<std::string, std::string> resolve_alias(const std::string& fixture_id,
                                                  const std::string& scenario_id) {
    if (fixture_id == "mm.degenerate") return {"mm.irrev", "degenerate"};
    if (fixture_id == "coop.degenerate") return {"coop", "degenerate"};
    return {fixture_id, scenario_id};
}

}  // namespace

std::string data_dir() {
    if (const char* env = std::getenv("TFPV_LAB_DATA"); env && *env) return env;
    std::string def = TFPV_LAB_DEFAULT_DATA_DIR;
    if (def.empty() || !fs::exists(def))
        throw std::runtime_error(
            "fixture data directory not found; set TFPV_LAB_DATA to the data/ directory");
    return def;
}

std::vector<std::string> list_fixtures() {
    std::vector<std::string> out;
    fs::path root = fs::path(data_dir()) / "fixtures";
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.is_directory() && fs::exists(entry.path() / "network.crn"))
            out.push_back(entry.path().filename().string());
    std::sort(out.begin(), out.end());
    return out;
}

Fixture load_fixture(const std::string& id) {
    auto [fid, unused] = resolve_alias(id, "");
    (void)unused;
    Fixture fx;
    fx.id = fid;
    fx.dir = (fs::path(data_dir()) / "fixtures" / fid).string();
    if (!fs::exists(fs::path(fx.dir) / "network.crn"))
        throw std::invalid_argument("unknown fixture '" + id + "'");
    fx.net = parse_network(slurp(fs::path(fx.dir) / "network.crn"));
    for (const auto& entry : fs::directory_iterator(fx.dir))
        if (entry.path().extension() == ".json")
            fx.scenario_ids.push_back(entry.path().stem().string());
    std::sort(fx.scenario_ids.begin(), fx.scenario_ids.end());
    return fx;
}

Scenario fixture_scenario(const std::string& fixture_id, const std::string& scenario_id) {
    auto [fid, sid] = resolve_alias(fixture_id, scenario_id);
    fs::path dir = fs::path(data_dir()) / "fixtures" / fid;
    fs::path file = dir / (sid + ".json");
    if (!fs::exists(file))
        throw std::invalid_argument("unknown scenario '" + scenario_id + "' for fixture '" +
                                    fixture_id + "'");
    return load_scenario(load_json(file), dir.string());
}

ParameterPoint FigureSet::raw_params() const {
    ParameterPoint p = pi_hat;
    for (const auto& [k, v] : rho) p[k] += eps_ref * v;
    return p;
}

std::vector<FigureSet> figure_sets() {
    nlohmann::json doc = load_json(fs::path(data_dir()) / "figures.json");
    std::vector<FigureSet> out;
    for (const auto& j : doc) {
        FigureSet f;
        f.figure = j.at("figure").get<std::string>();
        f.fixture = j.at("fixture").get<std::string>();
        f.scenario = j.at("scenario").get<std::string>();
        for (auto& [k, v] : j.at("pi_hat").items()) f.pi_hat[k] = v.get<double>();
        for (auto& [k, v] : j.at("rho").items()) f.rho[k] = v.get<double>();
        for (auto& e : j.at("eps")) f.eps_schedule.push_back(e.get<double>());
        f.eps_ref = j.value("eps_ref", 1.0);
        if (j.contains("expected_closed"))
            for (auto& [k, v] : j.at("expected_closed").items())
                f.expected_closed[k] = v.get<double>();
        if (j.contains("expected_generic"))
            for (auto& [k, v] : j.at("expected_generic").items())
                f.expected_generic[k] = v.get<double>();
        if (j.contains("expected_flags"))
            for (auto& [k, v] : j.at("expected_flags").items())
                f.expected_flags[k] = v.get<bool>();
        if (j.contains("cascade")) {
            f.cascade_km2 = j.at("cascade").at("km2").get<double>();
            if (j.at("cascade").contains("c2_tilde"))
                f.cascade_c2_tilde = j.at("cascade").at("c2_tilde").get<double>();
        }
        out.push_back(std::move(f));
    }
    return out;
}

FigureSet figure_set(const std::string& figure) {
    for (auto& f : figure_sets())
        if (f.figure == figure) return f;
    throw std::invalid_argument("unknown figure '" + figure + "'");
}

Scenario figure_scenario(const FigureSet& fs_) {
    fs::path dir = fs::path(data_dir()) / "fixtures" / fs_.fixture;
    nlohmann::json doc = load_json(dir / (fs_.scenario + ".json"));
    doc["pi_hat"] = nlohmann::json::object();
    for (const auto& [k, v] : fs_.pi_hat) doc["pi_hat"][k] = v;
    doc["rho"] = nlohmann::json::object();
    for (const auto& [k, v] : fs_.rho) doc["rho"][k] = v;
    doc["eps"] = fs_.eps_schedule;
    doc["id"] = fs_.fixture + "/" + fs_.figure;
    Scenario sc = load_scenario(doc, dir.string());
    return sc;
}

}  // namespace tfpv
