#ifndef TFPV_CATALOG_HPP
#define TFPV_CATALOG_HPP

#include <optional>
#include <string>
#include <vector>

#include "tfpv/scenario.hpp"

namespace tfpv {

// Root of the shipped fixture data; TFPV_LAB_DATA overrides the compiled-in
// default so relocated installs keep working.
std::string data_dir();

struct Fixture {
    std::string id;                           // e.g. "coop"
    std::string dir;                          // absolute fixture directory
    Network net;
    std::vector<std::string> scenario_ids;    // JSON files next to the network
};

std::vector<std::string> list_fixtures();
Fixture load_fixture(const std::string& id);

// Scenario from a fixture directory ("coop", "e0").  Aliases
// "mm.degenerate" and "coop.degenerate" resolve to the corresponding
// degenerate scenarios.
Scenario fixture_scenario(const std::string& fixture_id, const std::string& scenario_id);

// One figure-caption parameter set from figures.json.
struct FigureSet {
    std::string figure;    // "fig1", ...
    std::string fixture;   // network id, doubles as closed-form catalog id
    std::string scenario;  // base scenario within the fixture
    ParameterPoint pi_hat, rho;
    std::vector<double> eps_schedule;
    double eps_ref = 1.0;
    // caption values, keyed by closed-form name or by the generic
    // distinguished-parameter field (eps_star / eps_lower / mu_star)
    std::map<std::string, double> expected_closed;
    std::map<std::string, double> expected_generic;
    std::map<std::string, bool> expected_flags;
    std::optional<double> cascade_km2;       // stage-2 denominator constant
    std::optional<double> cascade_c2_tilde;  // caption stationary level

    // pi_hat + eps_ref * rho: the raw parameter point the caption refers to
    ParameterPoint raw_params() const;
};

std::vector<FigureSet> figure_sets();
FigureSet figure_set(const std::string& figure);

// Scenario for a figure: the base scenario with pi_hat, rho and the eps
// schedule replaced by the figure's values.
Scenario figure_scenario(const FigureSet& fs);

}  // namespace tfpv

#endif
