// Command-line front end: analyze / plot / compare / selfcheck.
// Exit codes: 0 = completed, 1 = configuration or usage error, 2 = completed
// with stage failures (or failed self-checks).

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "lyapmax/pipeline.hpp"
#include "lyapmax/svg.hpp"

namespace {

using lyapmax::AnalysisConfig;
using lyapmax::AnalysisReport;
using nlohmann::json;

bool write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << content;
    return static_cast<bool>(out);
}

int cmd_analyze(const std::string& config_path, const std::string& out_path) {
    AnalysisConfig cfg;
    try {
        cfg = lyapmax::load_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }
    AnalysisReport rep = lyapmax::run_analyze(cfg);
    if (out_path.empty()) {
        std::cout << rep.dump();
    } else {
        if (!write_file(out_path, rep.dump())) {
            std::cerr << "cannot write report to " << out_path << "\n";
            return 1;
        }
        const json& s = rep.doc["summary"];
        std::cout << "report written to " << out_path << " (stages ok: " << s["ok"]
                  << ", skipped: " << s["skipped"] << ", failed: " << s["failed"] << ")\n";
    }
    return rep.has_stage_failures() ? 2 : 0;
}

int cmd_plot(const std::string& config_path, const std::string& report_path,
             const std::string& out_path) {
    try {
        AnalysisConfig cfg = lyapmax::load_config(config_path);
        AnalysisReport rep = lyapmax::load_report(report_path);
        const std::string svg = lyapmax::render_report_svg(cfg, rep);
        if (!write_file(out_path, svg)) {
            std::cerr << "cannot write figure to " << out_path << "\n";
            return 1;
        }
        std::cout << "figure written to " << out_path << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "plot error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_compare(const std::string& config_path, const std::string& out_path) {
    AnalysisConfig cfg;
    try {
        cfg = lyapmax::load_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }
    AnalysisReport rep = lyapmax::run_compare(cfg);
    const json& doc = rep.doc;
    if (doc["status"] == "skipped") {
        std::cout << "comparison skipped: " << doc["reason"].get<std::string>() << "\n";
    } else if (doc["status"] == "failed") {
        std::cout << "comparison failed: " << doc["reason"].get<std::string>() << "\n";
    } else {
        std::printf("%8s  %14s  %14s  %s\n", "window", "defect", "gap", "verdict");
        for (const json& row : doc["table"]) {
            const double gap =
                row["gap"].is_null() ? std::numeric_limits<double>::infinity()
                                     : row["gap"].get<double>();
            std::printf("%8d  %14.6e  %14.6e  %s\n", row["window"].get<int>(),
                        row["defect"].get<double>(), gap,
                        row["verdict"].get<std::string>().c_str());
        }
        if (!doc["first_equal_window"].is_null())
            std::printf("maximizers agree from window %d on\n",
                        doc["first_equal_window"].get<int>());
    }
    if (!out_path.empty() && !write_file(out_path, rep.dump())) {
        std::cerr << "cannot write comparison to " << out_path << "\n";
        return 1;
    }
    return rep.has_stage_failures() ? 2 : 0;
}

// ---------------------------------------------------------------------------
// selfcheck: runs the bundled configs and asserts their headline facts.

struct Checker {
    int failures = 0;

    void check(bool ok, const std::string& what) {
        std::printf("[%s] %s\n", ok ? "  ok  " : " FAIL ", what.c_str());
        if (!ok) ++failures;
    }
};

const json& stage(const AnalysisReport& rep, const char* name) {
    return rep.doc["stages"][name];
}

bool near(double x, double target, double tol) { return std::abs(x - target) <= tol; }

int cmd_selfcheck() {
    const std::string dir = LYAPMAX_BUNDLED_CONFIG_DIR;
    Checker ck;
    try {
        {
            AnalysisConfig cfg = lyapmax::load_config(dir + "/noc_pair.json");
            AnalysisReport rep = lyapmax::run_analyze(cfg);
            ck.check(!rep.has_stage_failures(), "noc_pair: all stages complete");
            ck.check(stage(rep, "noc").value("passed", false),
                     "noc_pair: forward and backward no-overlap certificates pass");
            ck.check(near(stage(rep, "maximizers")["value"].get<double>(),
                          1.7627471740390861, 1e-9),
                     "noc_pair: maximal periodic exponent is log(3 + 2*sqrt(2))");
            ck.check(stage(rep, "maximizers")["orbits"] == json{{1}, {2}},
                     "noc_pair: maximizers are the two fixed necklaces");
            ck.check(stage(rep, "entropy_curve")["final_entropy"].get<double>() <= 0.05,
                     "noc_pair: finest near-optimal word set has entropy <= 0.05");
            ck.check(stage(rep, "barabanov")["residual"].get<double>() <= 1e-3,
                     "noc_pair: extremal norm residual <= 1e-3");
            ck.check(stage(rep, "cross_ratio").value("passed", false),
                     "noc_pair: cross-ratio certificate passes");
            ck.check(!stage(rep, "cuneo")["first_equal_window"].is_null() &&
                         stage(rep, "cuneo")["first_equal_window"].get<int>() <= 6,
                     "noc_pair: potential maximizers match by window 6");
        }
        {
            AnalysisConfig cfg = lyapmax::load_config(dir + "/equal_pair.json");
            AnalysisReport rep = lyapmax::run_analyze(cfg);
            ck.check(!stage(rep, "noc").value("passed", true),
                     "equal_pair: no-overlap certificate correctly fails");
            ck.check(near(stage(rep, "maximizers")["value"].get<double>(), std::log(2.0),
                          1e-9),
                     "equal_pair: maximal exponent is log 2");
            bool all_log2 = true;
            for (const json& cell : stage(rep, "entropy_curve")["cells"])
                all_log2 = all_log2 &&
                           near(cell["entropy"].get<double>(), std::log(2.0), 1e-9);
            ck.check(all_log2, "equal_pair: every near-optimal word set has entropy log 2");
        }
        {
            AnalysisConfig cfg = lyapmax::load_config(dir + "/rotation.json");
            AnalysisReport rep = lyapmax::run_analyze(cfg);
            ck.check(!rep.has_stage_failures(), "rotation: all stages complete");
            ck.check(!stage(rep, "domination")["dominated"].get<bool>(),
                     "rotation: domination correctly refuted");
            ck.check(!stage(rep, "pinching")["found"].get<bool>(),
                     "rotation: no pinching witness exists");
            ck.check(near(stage(rep, "barabanov")["beta_hat"].get<double>(), 0.0, 1e-9),
                     "rotation: extremal growth rate is 0");
            ck.check(stage(rep, "barabanov")["residual"].get<double>() <= 1e-12,
                     "rotation: the Euclidean ball is exactly extremal");
        }
        {
            AnalysisConfig cfg = lyapmax::load_config(dir + "/single_matrix.json");
            AnalysisReport rep = lyapmax::run_compare(cfg);
            bool all_equal = rep.doc["status"] == "ok";
            if (all_equal)
                for (const json& row : rep.doc["table"])
                    all_equal = all_equal && row["verdict"] == "equal";
            ck.check(all_equal, "single_matrix: maximizers agree at every window");
        }
        {
            AnalysisConfig cfg = lyapmax::load_config(dir + "/golden_mean_subshift.json");
            AnalysisReport rep = lyapmax::run_analyze(cfg);
            ck.check(!rep.has_stage_failures(), "golden_mean_subshift: all stages complete");
            ck.check(stage(rep, "multicone_family").value("found", false),
                     "golden_mean_subshift: transition-respecting cone family found");
            ck.check(stage(rep, "noc")["subshift"]["verdict"] == "pass",
                     "golden_mean_subshift: subshift no-overlap certificate passes");
        }
    } catch (const std::exception& e) {
        std::cerr << "selfcheck aborted: " << e.what() << "\n";
        return 2;
    }
    std::printf("%d check(s) failed\n", ck.failures);
    return ck.failures == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lyapunov-exponent optimization toolkit for 2x2 one-step cocycles"};
    app.require_subcommand(1);

    std::string config_path, out_path, report_path;

    CLI::App* analyze = app.add_subcommand(
        "analyze", "Run the full certification pipeline on a config");
    analyze->add_option("config", config_path, "JSON configuration file")->required();
    analyze->add_option("--out", out_path, "write the JSON report here (default: stdout)");

    CLI::App* plot = app.add_subcommand("plot", "Render a report's multicone as SVG");
    plot->add_option("config", config_path, "JSON configuration file")->required();
    plot->add_option("--report", report_path, "report produced by analyze")->required();
    plot->add_option("--out", out_path, "output SVG path")->required();

    CLI::App* compare = app.add_subcommand(
        "compare", "Compare product maximizers with potential maximizers");
    compare->add_option("config", config_path, "JSON configuration file")->required();
    compare->add_option("--out", out_path, "also write the table as JSON here");

    app.add_subcommand("selfcheck", "Run the bundled example configs and verify them");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;  // --help is not an error
    }

    if (analyze->parsed()) return cmd_analyze(config_path, out_path);
    if (plot->parsed()) return cmd_plot(config_path, report_path, out_path);
    if (compare->parsed()) return cmd_compare(config_path, out_path);
    return cmd_selfcheck();
}
