#include "doctest.h"

#include <algorithm>

#include "tfpv/catalog.hpp"

using namespace tfpv;

TEST_CASE("the shipped fixtures are discoverable") {
    auto ids = list_fixtures();
    for (const char* want : {"mm.irrev", "mm.rev", "coop", "uncomp", "comp"})
        CHECK(std::find(ids.begin(), ids.end(), want) != ids.end());

    Fixture coop = load_fixture("coop");
    CHECK(coop.net.species_index("c2") >= 0);
    CHECK(std::find(coop.scenario_ids.begin(), coop.scenario_ids.end(), "e0") !=
          coop.scenario_ids.end());
    CHECK(std::find(coop.scenario_ids.begin(), coop.scenario_ids.end(), "degenerate") !=
          coop.scenario_ids.end());
    CHECK_THROWS_AS(load_fixture("nope"), std::invalid_argument);
}

TEST_CASE("degenerate aliases resolve to their fixture scenarios") {
    Scenario a = fixture_scenario("mm.degenerate", "");
    Scenario b = fixture_scenario("mm.irrev", "degenerate");
    CHECK(a.pi_hat == b.pi_hat);
    CHECK(a.rho == b.rho);
}

TEST_CASE("figure catalog entries carry caption expectations") {
    auto sets = figure_sets();
    CHECK(sets.size() >= 17);

    FigureSet f1 = figure_set("fig1");
    CHECK(f1.fixture == "coop");
    CHECK(f1.scenario == "e0");
    CHECK(f1.expected_generic.at("eps_star") == doctest::Approx(0.125));

    FigureSet f17 = figure_set("fig17A");
    CHECK(f17.eps_ref == doctest::Approx(0.1));
    CHECK(f17.expected_closed.count("delta_star") == 1);

    FigureSet f333 = figure_set("fig333");
    REQUIRE(f333.cascade_km2.has_value());
    CHECK(*f333.cascade_km2 == doctest::Approx(2000.0));
    REQUIRE(f333.cascade_c2_tilde.has_value());

    CHECK_THROWS_AS(figure_set("fig999"), std::invalid_argument);
}

TEST_CASE("raw parameters fold the ray at the reference eps") {
    FigureSet f17 = figure_set("fig17A");
    ParameterPoint raw = f17.raw_params();
    // pi_hat has k1 = km3 = 0; the ray contributes eps_ref * rho
    CHECK(raw.at("k1") == doctest::Approx(0.1));
    CHECK(raw.at("km3") == doctest::Approx(0.1));
    CHECK(raw.at("km1") == doctest::Approx(f17.pi_hat.at("km1")));
}

TEST_CASE("figure scenarios override the base scenario ray") {
    FigureSet f2 = figure_set("fig2");
    Scenario sc = figure_scenario(f2);
    CHECK(sc.pi_hat == f2.pi_hat);
    CHECK(sc.rho == f2.rho);
    CHECK(sc.eps_schedule == f2.eps_schedule);
    CHECK(sc.id.find("fig2") != std::string::npos);
    // the chart/box structure comes from the base scenario
    CHECK(sc.chart.slow == std::vector<std::string>{"s"});
    CHECK(sc.s == 1);
}

TEST_CASE("every figure references a loadable scenario") {
    for (const auto& f : figure_sets()) {
        INFO(f.figure);
        Scenario sc = figure_scenario(f);
        CHECK(sc.field.n() > 0);
        CHECK(!sc.box.empty());
    }
}
