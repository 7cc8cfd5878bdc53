#pragma once

// Orchestration: configuration ingestion (strict JSON), the staged analysis
// pipeline assembling every certificate into one deterministic report, and
// the maximizer-comparison table.  Reports are plain JSON documents with
// sorted keys and no volatile fields, so identical configs produce
// byte-identical bytes on disk.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lyapmax/cocycle.hpp"
#include "lyapmax/mat2.hpp"
#include "lyapmax/symbolics.hpp"

namespace lyapmax {

inline constexpr const char* kToolName = "lyapmax";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kReportSchemaVersion = "1.0";

// Can the semigroup move direction f_angle off every direction in g_angles?
struct TwistingQuery {
    double f_angle = 0.0;
    std::vector<double> g_angles;
};

struct AnalysisConfig {
    std::string name = "analysis";
    std::vector<Mat2> matrices;
    std::optional<TransitionMatrix> transitions;  // absent: full shift

    // Scan cutoffs.
    int n_max = 8;  // bracket, pinching, twisting, multiplicativity scans
    int L_max = 8;  // maximizing-necklace scans

    // Near-optimal word-set grid.
    std::vector<double> epsilons{0.05, 0.02};
    std::vector<int> n_list{6, 8, 10, 12};

    // Potential windows for the maximizer comparison.
    std::vector<int> windows{1, 2, 4, 6};

    // Multicone search.
    int multicone_word_len = 3;
    double seed_radius = 0.05;
    double margin = 1e-3;

    // Tolerances (each recorded next to the verdict it decided).
    double tol_angle = defaults::tol_angle;
    double tie_tol = defaults::tie_tol;
    double tol_pinch = defaults::tol_pinch;
    double barabanov_tol = defaults::barabanov_tol;
    int barabanov_vertices = defaults::barabanov_vertices;

    // Empty: one query is synthesized from the pinching witness.
    std::vector<TwistingQuery> twisting;

    OneStepCocycle cocycle() const;
};

// Strict parse: unknown fields anywhere are rejected, matrices must be
// invertible, every parameter positive.  Throws InputError.
AnalysisConfig parse_config(const nlohmann::json& j);
AnalysisConfig load_config(const std::string& path);

// Effective configuration with all defaults materialized (this is what the
// report embeds, so a report alone suffices to reproduce itself).
nlohmann::json config_json(const AnalysisConfig& cfg);

struct AnalysisReport {
    nlohmann::json doc;

    bool has_stage_failures() const;
    std::string dump() const;  // 2-space indent, trailing newline
};

// Runs every stage in dependency order, recording per stage one of
// status "ok" / "skipped" (unmet prerequisite, with reason) / "failed"
// (stage raised, with reason), and never aborting the pipeline on a stage
// failure.  Deterministic for a fixed config.
AnalysisReport run_analyze(const AnalysisConfig& cfg);

// Maximizer-comparison table: for each configured window m, the measured
// shadowing defect, the spectral gap, and the equality verdict.
AnalysisReport run_compare(const AnalysisConfig& cfg);

// Parses a persisted report, rejecting unknown schema major versions.
AnalysisReport load_report(const std::string& path);

}  // namespace lyapmax
