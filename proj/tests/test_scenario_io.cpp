#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <string>

#include "ce/report.hpp"
#include "ce/scenario.hpp"

using ce::Scenario;
using ce::ScenarioError;
using ce::ScenarioKind;

namespace {

std::string minimal_ranking = R"({
  "format_version": 1,
  "kind": "ranking",
  "entities": [
    {"id": "A", "utility": 1.0, "click_prob": 0.4, "abandon_prob": 0.1},
    {"id": "B", "utility": 2.0, "click_prob": 0.3, "abandon_prob": 0.2}
  ]
})";

struct TempFile {
    std::filesystem::path path;
    explicit TempFile(const char* name)
        : path(std::filesystem::temp_directory_path() / name) {}
    ~TempFile() { std::remove(path.string().c_str()); }
};

} // namespace

TEST_CASE("loading scenarios") {
    SUBCASE("minimal ranking scenario") {
        const Scenario s = ce::load_scenario_from_string(minimal_ranking);
        CHECK(s.kind == ScenarioKind::ranking);
        CHECK(s.size() == 2);
        CHECK(s.entities[1].id == "B");
    }

    SUBCASE("invariant violations are rejected with the field path") {
        const std::string bad = R"({
          "format_version": 1, "kind": "ranking",
          "entities": [{"id": "A", "utility": 1.0, "click_prob": 0.7, "abandon_prob": 0.5}]
        })";
        CHECK_THROWS_WITH_AS(ce::load_scenario_from_string(bad),
                             "entities[0]: entity 'A': click_prob + abandon_prob exceeds 1",
                             ScenarioError);
    }

    SUBCASE("auction scenarios need bids") {
        const std::string missing = R"({
          "format_version": 1, "kind": "auction",
          "advertisers": [{"id": "a", "value": 1.0, "ctr": 0.5, "abandon_prob": 0.1}]
        })";
        CHECK_THROWS_WITH_AS(ce::load_scenario_from_string(missing),
                             "scenario: auction scenarios require 'bids'", ScenarioError);
    }

    SUBCASE("malformed json is a parse error") {
        CHECK_THROWS_AS(ce::load_scenario_from_string("{nope"), ScenarioError);
    }

    SUBCASE("unknown kind and wrong version are rejected") {
        CHECK_THROWS_AS(
            ce::load_scenario_from_string(
                R"({"format_version": 1, "kind": "poetry", "entities": []})"),
            ScenarioError);
        CHECK_THROWS_AS(
            ce::load_scenario_from_string(
                R"({"format_version": 2, "kind": "ranking", "entities": []})"),
            ScenarioError);
    }

    SUBCASE("empty entity lists are rejected") {
        CHECK_THROWS_WITH_AS(
            ce::load_scenario_from_string(
                R"({"format_version": 1, "kind": "ranking", "entities": []})"),
            "scenario.entities: expected a non-empty array", ScenarioError);
    }

    SUBCASE("diversity requires similarity or adjacency") {
        const std::string bare = R"({
          "format_version": 1, "kind": "diversity",
          "entities": [{"id": "A", "utility": 1.0, "click_prob": 0.4, "abandon_prob": 0.1}]
        })";
        CHECK_THROWS_AS(ce::load_scenario_from_string(bare), ScenarioError);
    }

    SUBCASE("missing file") {
        CHECK_THROWS_AS(ce::load_scenario("/nonexistent/path.json"), ScenarioError);
    }
}

TEST_CASE("scenario round-trip through disk") {
    const Scenario s = ce::load_scenario_from_string(minimal_ranking);
    TempFile tmp("ce_scenario_roundtrip.json");
    ce::save_scenario(s, tmp.path);
    const Scenario reloaded = ce::load_scenario(tmp.path);
    CHECK(ce::scenario_to_json(reloaded) == ce::scenario_to_json(s));
}

TEST_CASE("instance generation") {
    ce::RandomInstanceSpec spec;
    spec.kind = ScenarioKind::auction;
    spec.count = 200;
    spec.n_min = 2;
    spec.n_max = 8;
    spec.seed = 99;

    SUBCASE("deterministic given the seed") {
        const auto a = ce::generate_instances(spec);
        const auto b = ce::generate_instances(spec);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            CHECK(ce::scenario_to_json(a[i]) == ce::scenario_to_json(b[i]));
    }

    SUBCASE("every instance is in range and satisfies the invariants") {
        for (const Scenario& s : ce::generate_instances(spec)) {
            CHECK(s.size() >= 2);
            CHECK(s.size() <= 8);
            // Re-validating through the loader exercises every invariant.
            CHECK_NOTHROW(ce::scenario_from_json(ce::scenario_to_json(s)));
        }
    }

    SUBCASE("all kinds generate loadable scenarios") {
        for (ScenarioKind kind : {ScenarioKind::ranking, ScenarioKind::equilibrium,
                                  ScenarioKind::diversity}) {
            spec.kind = kind;
            spec.count = 20;
            for (const Scenario& s : ce::generate_instances(spec))
                CHECK_NOTHROW(ce::scenario_from_json(ce::scenario_to_json(s)));
        }
    }
}

TEST_CASE("report writing") {
    ce::Report report;
    report.data["format_version"] = 1;
    report.data["command"] = "rank";
    report.data["expected_utility"] = 0.1 + 0.2; // deliberately non-round double
    report.data["positions"] = ce::Json::array(
        {ce::Json{{"position", 1},
                  {"id", "A"},
                  {"score", 0.8},
                  {"price", nullptr},
                  {"click_prob", 0.4},
                  {"contribution", 1.0 / 3.0}}});

    SUBCASE("structured reports round-trip losslessly") {
        TempFile tmp("ce_report_roundtrip.json");
        ce::write_report(report, tmp.path, ce::ReportFormat::structured);
        const ce::Report reloaded = ce::load_report(tmp.path);
        CHECK(reloaded.data == report.data);
        CHECK(reloaded.data["expected_utility"].get<double>() == 0.1 + 0.2);
        CHECK(reloaded.data["positions"][0]["contribution"].get<double>() == 1.0 / 3.0);
    }

    SUBCASE("tabular format has a header and one row per position") {
        const std::string text = ce::format_report(report, ce::ReportFormat::tabular);
        CHECK(text.find("position\tid\tscore\tprice\tclick_prob\tcontribution\n")
              == 0);
        CHECK(text.find("1\tA\t0.80000000000000004\t-\t") != std::string::npos);
        // 17 significant digits keep the double exact.
        CHECK(text.find("0.33333333333333331") != std::string::npos);
        std::size_t rows = 0;
        for (char ch : text)
            if (ch == '\n') ++rows;
        CHECK(rows == 2); // header + one position
    }
}
