#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "lyapmax/pipeline.hpp"
#include "lyapmax/svg.hpp"
#include "test_support.hpp"

using namespace lyapmax;
using nlohmann::json;

namespace {

json minimal_config() {
    return json{{"name", "probe"},
                {"matrices", json::array({json{5, 2, 2, 1}, json{1, 2, 2, 5}})}};
}

// Small parameter block so pipeline-level tests stay fast.
json trimmed_config() {
    json j = minimal_config();
    j["parameters"] = json{{"n_max", 6},
                           {"L_max", 6},
                           {"epsilons", json{0.05}},
                           {"n_list", json{4, 6}},
                           {"windows", json{1, 2}}};
    return j;
}

std::filesystem::path temp_file(const char* stem) {
    return std::filesystem::temp_directory_path() / stem;
}

long count_occurrences(const std::string& hay, const std::string& needle) {
    long n = 0;
    for (std::size_t at = hay.find(needle); at != std::string::npos;
         at = hay.find(needle, at + needle.size()))
        ++n;
    return n;
}

const AnalysisReport& cached_trimmed_report() {
    static const AnalysisReport rep = run_analyze(parse_config(trimmed_config()));
    return rep;
}

}  // namespace

TEST_CASE("config parsing is strict about shape and keys") {
    CHECK_NOTHROW(parse_config(minimal_config()));
    CHECK_THROWS_AS(parse_config(json::array()), InputError);
    CHECK_THROWS_AS(parse_config(json{{"name", "x"}}), InputError);  // no matrices

    json unknown_top = minimal_config();
    unknown_top["colour"] = 3;
    CHECK_THROWS_AS(parse_config(unknown_top), InputError);

    json unknown_param = minimal_config();
    unknown_param["parameters"] = json{{"n_mxa", 4}};
    CHECK_THROWS_AS(parse_config(unknown_param), InputError);

    json short_row = minimal_config();
    short_row["matrices"][0] = json{1, 2, 3};
    CHECK_THROWS_AS(parse_config(short_row), InputError);

    json singular = minimal_config();
    singular["matrices"][0] = json{1, 2, 2, 4};  // det = 0
    CHECK_THROWS_AS(parse_config(singular), InputError);

    json bad_transitions = minimal_config();
    bad_transitions["transitions"] = json::array({json{1, 1}, json{1, 2}});
    CHECK_THROWS_AS(parse_config(bad_transitions), InputError);

    // A null transitions field means "full shift" (that is how the effective
    // form renders the default), so it must parse.
    json null_transitions = minimal_config();
    null_transitions["transitions"] = nullptr;
    CHECK_FALSE(parse_config(null_transitions).transitions.has_value());
}

TEST_CASE("config parsing validates parameters and twisting queries") {
    json odd = minimal_config();
    odd["parameters"] = json{{"barabanov_vertices", 721}};
    CHECK_THROWS_AS(parse_config(odd), InputError);
    odd["parameters"]["barabanov_vertices"] = 6;  // even but too small
    CHECK_THROWS_AS(parse_config(odd), InputError);
    odd["parameters"]["barabanov_vertices"] = 720;
    CHECK_NOTHROW(parse_config(odd));

    json tiny_n = minimal_config();
    tiny_n["parameters"] = json{{"n_list", json{1}}};
    CHECK_THROWS_AS(parse_config(tiny_n), InputError);

    json neg = minimal_config();
    neg["parameters"] = json{{"seed_radius", -0.1}};
    CHECK_THROWS_AS(parse_config(neg), InputError);

    json empty_eps = minimal_config();
    empty_eps["parameters"] = json{{"epsilons", json::array()}};
    CHECK_THROWS_AS(parse_config(empty_eps), InputError);

    json tw = minimal_config();
    tw["twisting"] = json::array({json{{"f_angle", 3.3}, {"g_angles", json{0.3}}}});
    const AnalysisConfig cfg = parse_config(tw);
    REQUIRE(cfg.twisting.size() == 1);
    // Angles are reduced to the projective fundamental domain on ingestion.
    CHECK(cfg.twisting[0].f_angle == doctest::Approx(wrap_pi(3.3)).epsilon(1e-15));

    json tw_missing = minimal_config();
    tw_missing["twisting"] = json::array({json{{"f_angle", 0.2}}});
    CHECK_THROWS_AS(parse_config(tw_missing), InputError);

    json tw_empty = minimal_config();
    tw_empty["twisting"] = json::array({json{{"f_angle", 0.2}, {"g_angles", json::array()}}});
    CHECK_THROWS_AS(parse_config(tw_empty), InputError);

    json tw_extra = minimal_config();
    tw_extra["twisting"] =
        json::array({json{{"f_angle", 0.2}, {"g_angles", json{0.3}}, {"hint", 1}}});
    CHECK_THROWS_AS(parse_config(tw_extra), InputError);
}

TEST_CASE("bundled configs load and survive the effective-form round trip") {
    const std::string dir = LYAPMAX_BUNDLED_CONFIG_DIR;
    for (const char* name : {"noc_pair", "equal_pair", "rotation", "single_matrix",
                             "golden_mean_subshift"}) {
        const AnalysisConfig cfg = load_config(dir + "/" + name + ".json");
        CHECK(cfg.name == name);
        // The effective form materializes every default; re-parsing it must
        // reproduce itself exactly (a report embeds this form, so a report
        // alone can reproduce its own run).
        const json effective = config_json(cfg);
        CHECK(config_json(parse_config(effective)) == effective);
    }

    const AnalysisConfig noc = load_config(dir + "/noc_pair.json");
    CHECK(noc.matrices.size() == 2);
    CHECK_FALSE(noc.transitions.has_value());
    CHECK(noc.n_max == 8);
    CHECK(noc.epsilons == std::vector<double>{0.05, 0.02});
    CHECK(noc.n_list == std::vector<int>{6, 8, 10, 12});
    CHECK(noc.windows == std::vector<int>{1, 2, 4, 6});
    CHECK(noc.barabanov_vertices == 720);

    const AnalysisConfig gm = load_config(dir + "/golden_mean_subshift.json");
    REQUIRE(gm.transitions.has_value());
    CHECK(gm.transitions->allows(1, 1));
    CHECK_FALSE(gm.transitions->allows(2, 2));

    CHECK_THROWS_AS(load_config(dir + "/does_not_exist.json"), InputError);
}

TEST_CASE("analysis reports are deterministic and reload byte-exactly") {
    const AnalysisConfig cfg = parse_config(trimmed_config());
    const AnalysisReport& first = cached_trimmed_report();
    const AnalysisReport second = run_analyze(cfg);
    CHECK(first.dump() == second.dump());  // no timestamps, no volatile fields

    CHECK(first.doc["schema_version"] == kReportSchemaVersion);
    CHECK(first.doc["command"] == "analyze");
    CHECK_FALSE(first.has_stage_failures());
    CHECK(first.doc["summary"]["failed"] == 0);

    // The near-optimal-set stage carries a ready-to-plot CSV rendering.
    const std::string csv = first.doc["stages"]["entropy_curve"]["csv"];
    CHECK(csv.rfind("n,epsilon,survivors,entropy\n", 0) == 0);
    CHECK(count_occurrences(csv, "\n") == 1 + 2);  // header + one row per (eps, n) cell

    // Round trip through disk.
    const auto path = temp_file("lyapmax_report_roundtrip.json");
    {
        std::ofstream out(path);
        out << first.dump();
    }
    const AnalysisReport back = load_report(path.string());
    CHECK(back.doc == first.doc);
    std::filesystem::remove(path);
}

TEST_CASE("report loading rejects other schema majors and malformed files") {
    const auto bad_version = temp_file("lyapmax_report_v2.json");
    {
        std::ofstream out(bad_version);
        out << json{{"schema_version", "2.0"}}.dump();
    }
    CHECK_THROWS_WITH_AS(load_report(bad_version.string()),
                         doctest::Contains("unsupported report schema version"), InputError);
    std::filesystem::remove(bad_version);

    const auto no_version = temp_file("lyapmax_report_nv.json");
    {
        std::ofstream out(no_version);
        out << json{{"command", "analyze"}}.dump();
    }
    CHECK_THROWS_AS(load_report(no_version.string()), InputError);
    std::filesystem::remove(no_version);

    const auto not_json = temp_file("lyapmax_report_nj.json");
    {
        std::ofstream out(not_json);
        out << "not json at all {";
    }
    CHECK_THROWS_AS(load_report(not_json.string()), InputError);
    std::filesystem::remove(not_json);

    CHECK_THROWS_AS(load_report("/nonexistent/path/report.json"), InputError);
}

TEST_CASE("comparison on a single matrix is equal at every window with no gap") {
    json j = json{{"name", "single"}, {"matrices", json::array({json{5, 2, 2, 1}})},
                  {"parameters", json{{"windows", json{1, 2}}, {"L_max", 4}}}};
    const AnalysisReport rep = run_compare(parse_config(j));
    CHECK(rep.doc["status"] == "ok");
    CHECK(rep.doc["first_equal_window"] == 1);
    for (const json& row : rep.doc["table"]) {
        CHECK(row["verdict"] == "equal");
        CHECK(row["defect"].get<double>() <= 1e-12);
        // Only one necklace value exists, so there is no spectral gap; the
        // report stores the non-finite gap as null rather than Inf.
        CHECK(row["gap"].is_null());
        CHECK(row["orbit_maximizers"] == row["potential_maximizers"]);
    }
}

TEST_CASE("comparison without a dominated splitting is skipped with a reason") {
    const std::string dir = LYAPMAX_BUNDLED_CONFIG_DIR;
    const AnalysisReport rep = run_compare(load_config(dir + "/rotation.json"));
    CHECK(rep.doc["status"] == "skipped");
    const std::string reason = rep.doc["reason"];
    CHECK(reason.find("no invariant multicone") != std::string::npos);
    CHECK_FALSE(rep.has_stage_failures());  // skipped is not failed
}

TEST_CASE("multicone rendering matches the golden five-component plot") {
    const double t = 0.3;
    const Mat2 stretch{2.0, 0.0, 0.0, 1.0};
    const Mat2 rot{std::cos(t), -std::sin(t), std::sin(t), std::cos(t)};
    const OneStepCocycle A({stretch, rot}, TransitionMatrix::full_shift(2));
    std::vector<Arc> arcs;
    for (double s : {0.0, 0.55, 1.1, 1.65, 2.2}) arcs.emplace_back(s, 0.2);
    const std::string svg = render_multicone_svg(A, Multicone{arcs}, "five components");

    CHECK(count_occurrences(svg, "class=\"cone-arc\"") == 5);
    CHECK(count_occurrences(svg, "class=\"image-arc\"") == 10);  // 2 generators x 5
    CHECK(count_occurrences(svg, "marker-end") == 10);           // one arrow per image
    // Only the diagonal generator has real eigendirections; the rotation
    // contributes no ticks.
    CHECK(count_occurrences(svg, "class=\"eig-unstable\"") == 1);
    CHECK(count_occurrences(svg, "class=\"eig-stable\"") == 1);

    const std::string golden_path = std::string(LYAPMAX_GOLDEN_DIR) + "/five_component.svg";
    std::ifstream in(golden_path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "missing golden file ", golden_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    CHECK(svg == buf.str());
}

TEST_CASE("report rendering requires an invariant multicone") {
    // A rotation never admits one, so its report cannot be plotted.
    json j = json{{"name", "spin"},
                  {"matrices", json::array({json{0.6, -0.8, 0.8, 0.6}})},
                  {"parameters", json{{"n_max", 4},
                                      {"L_max", 4},
                                      {"epsilons", json{0.05}},
                                      {"n_list", json{4}},
                                      {"windows", json{1}}}}};
    const AnalysisConfig cfg = parse_config(j);
    const AnalysisReport rep = run_analyze(cfg);
    CHECK_THROWS_WITH_AS(render_report_svg(cfg, rep),
                         doctest::Contains("no invariant multicone"), InputError);

    // The trimmed separated-pair report does render, with both components.
    const AnalysisConfig good = parse_config(trimmed_config());
    const std::string svg = render_report_svg(good, cached_trimmed_report());
    CHECK(count_occurrences(svg, "class=\"cone-arc\"") == 2);
    CHECK(svg.find("probe") != std::string::npos);  // titled by config name
}
