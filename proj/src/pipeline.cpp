#include "lyapmax/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <utility>

#include "lyapmax/certify.hpp"
#include "lyapmax/mather.hpp"
#include "lyapmax/polygon.hpp"
#include "lyapmax/projcone.hpp"

namespace lyapmax {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Config parsing helpers

void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                    const char* where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        const bool known = std::any_of(allowed.begin(), allowed.end(),
                                       [&](const char* k) { return it.key() == k; });
        if (!known)
            throw InputError("unknown field \"" + it.key() + "\" in " + where);
    }
}

double as_number(const json& v, const std::string& what) {
    if (!v.is_number()) throw InputError(what + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw InputError(what + " must be finite");
    return x;
}

double as_positive(const json& v, const std::string& what) {
    const double x = as_number(v, what);
    if (!(x > 0.0)) throw InputError(what + " must be positive");
    return x;
}

int as_positive_int(const json& v, const std::string& what) {
    if (!v.is_number_integer()) throw InputError(what + " must be an integer");
    const long long x = v.get<long long>();
    if (x < 1 || x > 1000000) throw InputError(what + " must be in [1, 1000000]");
    return static_cast<int>(x);
}

// null when not finite, so reports never carry unserializable doubles.
json jfinite(double x) { return std::isfinite(x) ? json(x) : json(); }

// ---------------------------------------------------------------------------
// Report serialization helpers

json jword(const Word& w) { return json(w.syms); }

json jwords(const std::vector<Word>& ws) {
    json a = json::array();
    for (const auto& w : ws) a.push_back(jword(w));
    return a;
}

json jorbits(const std::vector<CyclicWord>& cs) {
    json a = json::array();
    for (const auto& c : cs) a.push_back(jword(c.word()));
    return a;
}

json jarc(const Arc& a) { return json{{"start", a.start}, {"length", a.length}}; }

json jmulticone(const Multicone& mc) {
    json arcs = json::array();
    for (const auto& a : mc.arcs()) arcs.push_back(jarc(a));
    return json{{"arcs", arcs},
                {"components", mc.components()},
                {"total_length", mc.total_length()}};
}

json jnoc(const NocReport& r) {
    json s{{"verdict", to_string(r.verdict)}, {"min_gap", r.min_gap}};
    if (!r.reason.empty()) s["reason"] = r.reason;
    return s;
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// AnalysisConfig

OneStepCocycle AnalysisConfig::cocycle() const { return {matrices, transitions}; }

AnalysisConfig parse_config(const json& j) {
    if (!j.is_object()) throw InputError("config root must be a JSON object");
    reject_unknown(j, {"name", "matrices", "transitions", "parameters", "twisting"},
                   "config");
    AnalysisConfig cfg;

    if (j.contains("name")) {
        if (!j["name"].is_string()) throw InputError("\"name\" must be a string");
        cfg.name = j["name"].get<std::string>();
    }

    if (!j.contains("matrices")) throw InputError("config needs a \"matrices\" field");
    const json& mats = j["matrices"];
    if (!mats.is_array() || mats.empty())
        throw InputError("\"matrices\" must be a nonempty array");
    for (std::size_t i = 0; i < mats.size(); ++i) {
        const json& row = mats[i];
        const std::string what = "matrix " + std::to_string(i + 1);
        if (!row.is_array() || row.size() != 4)
            throw InputError(what + " must be a 4-element row-major array [a, b, c, d]");
        Mat2 m{as_number(row[0], what), as_number(row[1], what), as_number(row[2], what),
               as_number(row[3], what)};
        if (!(std::abs(m.det()) > 0.0)) throw InputError(what + " is singular");
        cfg.matrices.push_back(m);
    }
    const int k = static_cast<int>(cfg.matrices.size());

    if (j.contains("transitions") && !j["transitions"].is_null()) {
        const json& t = j["transitions"];
        if (!t.is_array() || static_cast<int>(t.size()) != k)
            throw InputError("\"transitions\" must be a " + std::to_string(k) + "x" +
                             std::to_string(k) + " 0/1 matrix");
        std::vector<std::uint8_t> bits;
        bits.reserve(static_cast<std::size_t>(k) * k);
        for (const json& row : t) {
            if (!row.is_array() || static_cast<int>(row.size()) != k)
                throw InputError("\"transitions\" rows must have " + std::to_string(k) +
                                 " entries");
            for (const json& cell : row) {
                if (!cell.is_number_integer() ||
                    (cell.get<long long>() != 0 && cell.get<long long>() != 1))
                    throw InputError("\"transitions\" entries must be 0 or 1");
                bits.push_back(static_cast<std::uint8_t>(cell.get<long long>()));
            }
        }
        cfg.transitions = TransitionMatrix::subshift(k, std::move(bits));
    }

    if (j.contains("parameters")) {
        const json& p = j["parameters"];
        if (!p.is_object()) throw InputError("\"parameters\" must be an object");
        reject_unknown(p,
                       {"n_max", "L_max", "epsilons", "n_list", "windows",
                        "multicone_word_len", "seed_radius", "margin", "tol_angle",
                        "tie_tol", "tol_pinch", "barabanov_tol", "barabanov_vertices"},
                       "parameters");
        if (p.contains("n_max")) cfg.n_max = as_positive_int(p["n_max"], "n_max");
        if (p.contains("L_max")) cfg.L_max = as_positive_int(p["L_max"], "L_max");
        if (p.contains("epsilons")) {
            if (!p["epsilons"].is_array() || p["epsilons"].empty())
                throw InputError("\"epsilons\" must be a nonempty array");
            cfg.epsilons.clear();
            for (const json& e : p["epsilons"])
                cfg.epsilons.push_back(as_positive(e, "epsilons entry"));
        }
        if (p.contains("n_list")) {
            if (!p["n_list"].is_array() || p["n_list"].empty())
                throw InputError("\"n_list\" must be a nonempty array");
            cfg.n_list.clear();
            for (const json& e : p["n_list"]) {
                const int n = as_positive_int(e, "n_list entry");
                if (n < 2) throw InputError("n_list entries must be >= 2");
                cfg.n_list.push_back(n);
            }
        }
        if (p.contains("windows")) {
            if (!p["windows"].is_array() || p["windows"].empty())
                throw InputError("\"windows\" must be a nonempty array");
            cfg.windows.clear();
            for (const json& e : p["windows"])
                cfg.windows.push_back(as_positive_int(e, "windows entry"));
        }
        if (p.contains("multicone_word_len"))
            cfg.multicone_word_len =
                as_positive_int(p["multicone_word_len"], "multicone_word_len");
        if (p.contains("seed_radius"))
            cfg.seed_radius = as_positive(p["seed_radius"], "seed_radius");
        if (p.contains("margin")) cfg.margin = as_positive(p["margin"], "margin");
        if (p.contains("tol_angle")) cfg.tol_angle = as_positive(p["tol_angle"], "tol_angle");
        if (p.contains("tie_tol")) cfg.tie_tol = as_positive(p["tie_tol"], "tie_tol");
        if (p.contains("tol_pinch"))
            cfg.tol_pinch = as_positive(p["tol_pinch"], "tol_pinch");
        if (p.contains("barabanov_tol"))
            cfg.barabanov_tol = as_positive(p["barabanov_tol"], "barabanov_tol");
        if (p.contains("barabanov_vertices")) {
            cfg.barabanov_vertices =
                as_positive_int(p["barabanov_vertices"], "barabanov_vertices");
            if (cfg.barabanov_vertices < 8 || cfg.barabanov_vertices % 2 != 0)
                throw InputError("barabanov_vertices must be even and >= 8");
        }
    }

    if (j.contains("twisting")) {
        if (!j["twisting"].is_array()) throw InputError("\"twisting\" must be an array");
        for (const json& q : j["twisting"]) {
            if (!q.is_object()) throw InputError("twisting queries must be objects");
            reject_unknown(q, {"f_angle", "g_angles"}, "twisting query");
            if (!q.contains("f_angle") || !q.contains("g_angles"))
                throw InputError("twisting queries need \"f_angle\" and \"g_angles\"");
            TwistingQuery tq;
            tq.f_angle = wrap_pi(as_number(q["f_angle"], "f_angle"));
            if (!q["g_angles"].is_array() || q["g_angles"].empty())
                throw InputError("\"g_angles\" must be a nonempty array");
            for (const json& g : q["g_angles"])
                tq.g_angles.push_back(wrap_pi(as_number(g, "g_angles entry")));
            cfg.twisting.push_back(std::move(tq));
        }
    }
    return cfg;
}

AnalysisConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InputError("config file " + path + " is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

json config_json(const AnalysisConfig& cfg) {
    json mats = json::array();
    for (const Mat2& m : cfg.matrices) mats.push_back(json{m.a, m.b, m.c, m.d});
    json trans;
    if (cfg.transitions) {
        trans = json::array();
        for (int a = 1; a <= cfg.transitions->size(); ++a) {
            json row = json::array();
            for (int b = 1; b <= cfg.transitions->size(); ++b)
                row.push_back(cfg.transitions->allows(a, b) ? 1 : 0);
            trans.push_back(std::move(row));
        }
    }
    json tw = json::array();
    for (const auto& q : cfg.twisting)
        tw.push_back(json{{"f_angle", q.f_angle}, {"g_angles", q.g_angles}});
    return json{{"name", cfg.name},
                {"matrices", mats},
                {"transitions", trans},
                {"parameters",
                 json{{"n_max", cfg.n_max},
                      {"L_max", cfg.L_max},
                      {"epsilons", cfg.epsilons},
                      {"n_list", cfg.n_list},
                      {"windows", cfg.windows},
                      {"multicone_word_len", cfg.multicone_word_len},
                      {"seed_radius", cfg.seed_radius},
                      {"margin", cfg.margin},
                      {"tol_angle", cfg.tol_angle},
                      {"tie_tol", cfg.tie_tol},
                      {"tol_pinch", cfg.tol_pinch},
                      {"barabanov_tol", cfg.barabanov_tol},
                      {"barabanov_vertices", cfg.barabanov_vertices}}},
                {"twisting", tw}};
}

// ---------------------------------------------------------------------------
// AnalysisReport

bool AnalysisReport::has_stage_failures() const {
    if (doc.contains("summary") && doc["summary"].contains("failed"))
        return doc["summary"]["failed"].get<int>() > 0;
    if (doc.contains("status")) return doc["status"] == "failed";
    return false;
}

std::string AnalysisReport::dump() const { return doc.dump(2) + "\n"; }

AnalysisReport load_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read report file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InputError("report file " + path + " is not valid JSON: " + e.what());
    }
    if (!j.is_object() || !j.contains("schema_version") || !j["schema_version"].is_string())
        throw InputError("report has no schema_version field");
    const std::string v = j["schema_version"].get<std::string>();
    const std::string major = v.substr(0, v.find('.'));
    const std::string expected(kReportSchemaVersion);
    if (major != expected.substr(0, expected.find('.')))
        throw InputError("unsupported report schema version " + v + " (expected major " +
                         expected.substr(0, expected.find('.')) + ")");
    return AnalysisReport{std::move(j)};
}

// ---------------------------------------------------------------------------
// Pipeline

namespace {

// Rows of the maximizer-comparison table, shared by analyze and compare.
json comparison_rows(const OneStepCocycle& A, const Multicone& mc,
                     const AnalysisConfig& cfg, std::optional<int>& first_equal) {
    json rows = json::array();
    for (int m : cfg.windows) {
        AdditivePotential f = cuneo_potential(A, mc, m);
        MaximizerComparison cmp = compare_maximizers(A, f, cfg.L_max, cfg.tie_tol);
        rows.push_back(json{{"window", m},
                            {"lambda_hat", f.lambda_hat},
                            {"defect", cmp.defect},
                            {"gap", jfinite(cmp.gap)},
                            {"verdict", to_string(cmp.verdict)},
                            {"orbit_maximizers", jorbits(cmp.orbit_maximizers)},
                            {"potential_maximizers", jorbits(cmp.potential_maximizers)}});
        if (!first_equal && cmp.equal()) first_equal = m;
    }
    return rows;
}

}  // namespace

AnalysisReport run_analyze(const AnalysisConfig& cfg) {
    const OneStepCocycle A = cfg.cocycle();
    json stages = json::object();
    int n_ok = 0, n_skipped = 0, n_failed = 0;

    const auto run_stage = [&](const char* name, const std::function<json()>& body) {
        try {
            json s = body();
            s["status"] = "ok";
            stages[name] = std::move(s);
            ++n_ok;
            return true;
        } catch (const std::exception& e) {
            stages[name] = json{{"status", "failed"}, {"reason", e.what()}};
            ++n_failed;
            return false;
        }
    };
    const auto skip_stage = [&](const char* name, const std::string& reason) {
        stages[name] = json{{"status", "skipped"}, {"reason", reason}};
        ++n_skipped;
    };

    // Certified enclosure of the maximal exponent.
    std::optional<ExponentBracket> bracket;
    run_stage("bracket", [&] {
        bracket.emplace(exponent_bracket(A, cfg.n_max, cfg.n_max, cfg.tie_tol));
        return json{{"lower", bracket->lower},
                    {"upper", bracket->upper},
                    {"width", bracket->width()},
                    {"midpoint", bracket->midpoint()},
                    {"n_lower", bracket->n_lower},
                    {"n_upper", bracket->n_upper},
                    {"witness", jword(bracket->witness)},
                    {"co_witnesses", jwords(bracket->co_witnesses)},
                    {"tie_tol", cfg.tie_tol}};
    });

    // Singular-value-ratio decay.
    run_stage("domination", [&] {
        DominationReport dom = check_domination_rate(A, cfg.n_max);
        return json{{"table", dom.table},
                    {"c_fit", dom.c_fit},
                    {"tau_fit", dom.tau_fit},
                    {"dominated", dom.dominated},
                    {"monotone_tail", dom.monotone_tail},
                    {"n_max", cfg.n_max}};
    });

    // Shared invariant multicone.  Not finding one is a result, not a
    // failure; dependent stages are skipped with that reason.
    std::optional<Multicone> mc;
    run_stage("multicone", [&] {
        MulticoneSearchResult r = find_invariant_multicone(
            A, cfg.multicone_word_len, cfg.seed_radius, cfg.margin);
        json s{{"found", r.found()},
               {"iterations", r.iterations},
               {"word_len", cfg.multicone_word_len},
               {"seed_radius", cfg.seed_radius},
               {"margin", cfg.margin}};
        if (r.found()) {
            mc = r.cone;
            s["cone"] = jmulticone(*mc);
        } else {
            s["diagnostic"] = r.diagnostic;
        }
        return s;
    });

    // Per-symbol family: only meaningful when transitions were configured.
    std::optional<MulticoneFamily> family;
    if (cfg.transitions) {
        run_stage("multicone_family", [&] {
            FamilySearchResult r = find_invariant_family(
                A, cfg.multicone_word_len, cfg.seed_radius, cfg.margin);
            json s{{"found", r.found()},
                   {"iterations", r.iterations},
                   {"mode", r.mode},
                   {"margin", cfg.margin}};
            if (r.found()) {
                family = r.family;
                json cones = json::array();
                for (const Multicone& c : family->cones) cones.push_back(jmulticone(c));
                s["cones"] = cones;
            } else {
                s["diagnostic"] = r.diagnostic;
            }
            return s;
        });
    } else {
        skip_stage("multicone_family", "full shift: the shared multicone covers all symbols");
    }

    // No-overlap certificates.
    if (mc) {
        run_stage("noc", [&] {
            NocReport fw = check_forward_noc(A, *mc, cfg.margin, cfg.tol_angle);
            // The backward certificate is witness-dependent: the complement of
            // a tightly refined forward multicone is wide, and the inverse
            // images of a wide cone tend to overlap even when a certificate
            // exists.  Prefer the inverse cocycle's own attracting multicone
            // as the witness, falling back to the complement when the search
            // does not converge.
            std::vector<Mat2> inv_gens;
            inv_gens.reserve(A.generators.size());
            for (const Mat2& g : A.generators) inv_gens.push_back(g.inverse());
            const OneStepCocycle A_inv(std::move(inv_gens), dual_subshift(A.transitions));
            const MulticoneSearchResult rinv = find_invariant_multicone(
                A_inv, cfg.multicone_word_len, cfg.seed_radius, cfg.margin);
            const bool own_witness = rinv.found();
            const NocReport bw =
                own_witness ? check_forward_noc(A_inv, *rinv.cone, cfg.margin, cfg.tol_angle)
                            : check_backward_noc(A, *mc, cfg.margin, cfg.tol_angle);
            json s{{"forward", jnoc(fw)},
                   {"backward", jnoc(bw)},
                   {"backward_witness", own_witness ? "inverse_multicone" : "forward_complement"},
                   {"passed", fw.passed() && bw.passed()},
                   {"delta", cfg.margin},
                   {"tol_angle", cfg.tol_angle}};
            if (family) {
                NocReport sub = check_subshift_noc(A, *family, cfg.margin, cfg.tol_angle);
                double fattening = 0.0;
                if (!sub.passed()) {
                    // The refined family is the tightest forward witness, but
                    // the certificate's backward half works on the complement
                    // and wants a fat one.  Any strictly invariant family is a
                    // legitimate witness, so search uniform fattenings of the
                    // refined one; the check re-verifies invariance itself, so
                    // the search cannot manufacture a false positive.
                    const auto fat_family = [&](double grow) -> std::optional<MulticoneFamily> {
                        MulticoneFamily fat;
                        for (const Multicone& c : family->cones) {
                            std::vector<Arc> comp;
                            const Multicone whole = complementary(c);
                            for (const Arc& a : whole.arcs()) {
                                const double len = a.length - 2.0 * grow;
                                if (len > 1e-9) comp.emplace_back(wrap_pi(a.start + grow), len);
                            }
                            if (comp.empty()) return std::nullopt;  // would cover the circle
                            fat.cones.push_back(complementary(Multicone(std::move(comp))));
                        }
                        return fat;
                    };
                    double lo = 0.0, hi = 1.55;  // family found => invariant at 0
                    for (int it = 0; it < 48; ++it) {
                        const double mid = 0.5 * (lo + hi);
                        const auto cand = fat_family(mid);
                        (cand && is_family_invariant(A, *cand, cfg.margin)) ? lo = mid : hi = mid;
                    }
                    for (double frac : {0.95, 0.875, 0.75, 0.625, 0.5, 0.375, 0.25, 0.125}) {
                        const double grow = frac * lo;
                        const auto cand = fat_family(grow);
                        if (!cand) continue;
                        NocReport r = check_subshift_noc(A, *cand, cfg.margin, cfg.tol_angle);
                        if (r.passed() && (!sub.passed() || r.min_gap > sub.min_gap)) {
                            sub = r;
                            fattening = grow;
                        }
                    }
                }
                s["subshift"] = jnoc(sub);
                s["subshift_witness_fattening"] = fattening;
            }
            return s;
        });
    } else {
        skip_stage("noc", "no invariant multicone");
    }

    // Pinching witness.
    std::optional<PinchingResult> pinch;
    run_stage("pinching", [&] {
        pinch.emplace(check_pinching(A, cfg.n_max, cfg.tol_pinch));
        json s{{"found", pinch->witness.has_value()},
               {"ratio", pinch->ratio},
               {"tol_pinch", cfg.tol_pinch},
               {"max_len", cfg.n_max}};
        if (pinch->witness) s["witness"] = jword(*pinch->witness);
        return s;
    });

    // Twisting queries; with none configured, ask whether the semigroup can
    // move the pinching witness's fast direction off itself.
    std::vector<TwistingQuery> queries = cfg.twisting;
    bool synthesized = false;
    if (queries.empty() && pinch && pinch->witness) {
        const ScaledMat2 p = scaled_word_product(A, *pinch->witness);
        const double fast = act(p.m, p.m.top_right_singular_direction());
        queries.push_back({fast, {fast}});
        synthesized = true;
    }
    if (!queries.empty()) {
        run_stage("twisting", [&] {
            json results = json::array();
            bool all = true;
            for (const auto& q : queries) {
                TwistingResult r = check_twisting(A, q.f_angle, q.g_angles, cfg.n_max,
                                                  cfg.tol_angle);
                json e{{"f_angle", q.f_angle},
                       {"g_angles", q.g_angles},
                       {"conclusive", r.conclusive()},
                       {"min_distance", r.min_distance}};
                if (r.witness) e["witness"] = jword(*r.witness);
                all = all && r.conclusive();
                results.push_back(std::move(e));
            }
            return json{{"queries", results},
                        {"all_conclusive", all},
                        {"synthesized", synthesized},
                        {"max_len", cfg.n_max},
                        {"tol_angle", cfg.tol_angle}};
        });
    } else {
        skip_stage("twisting",
                   "no queries configured and no pinching witness to synthesize one");
    }

    // Extremal polygonal norm.  Defined without a multicone, so a rotation
    // cocycle still gets its (Euclidean-ball) norm.
    std::optional<PolygonalNorm> norm;
    if (bracket) {
        run_stage("barabanov", [&] {
            BarabanovResult r = barabanov_norm(A, *bracket, cfg.barabanov_vertices,
                                               cfg.barabanov_tol);
            norm = r.norm;
            return json{{"beta_hat", r.norm.beta_hat},
                        {"residual", r.residual},
                        {"iterations", r.iterations},
                        {"bisection_steps", r.bisection_steps},
                        {"reducible_warning", r.reducible_warning},
                        {"vertices", static_cast<int>(r.norm.vertices.size())},
                        {"norm_equivalence_constant", norm_equivalence_constant(r.norm)},
                        {"beta_in_bracket",
                         r.norm.beta_hat >= bracket->lower - cfg.barabanov_tol &&
                             r.norm.beta_hat <= bracket->upper + cfg.barabanov_tol},
                        {"tol", cfg.barabanov_tol}};
        });
    } else {
        skip_stage("barabanov", "no exponent bracket");
    }

    // Maximizing necklaces.
    run_stage("maximizers", [&] {
        MaximizingOrbits mo = maximizing_orbits(A, cfg.L_max, cfg.tie_tol);
        return json{{"value", mo.value},
                    {"orbits", jorbits(mo.orbits)},
                    {"count", static_cast<int>(mo.orbits.size())},
                    {"max_len", cfg.L_max},
                    {"tie_tol", cfg.tie_tol}};
    });

    // Submultiplicativity defect constant.
    run_stage("almost_multiplicativity", [&] {
        AlmostMultiplicativity am = almost_multiplicativity_constant(A, cfg.n_max);
        return json{{"kappa", am.kappa},
                    {"arg_u", jword(am.arg_u)},
                    {"arg_v", jword(am.arg_v)},
                    {"exhaustive", am.exhaustive},
                    {"pairs_examined", am.pairs_examined},
                    {"n_max", cfg.n_max}};
    });

    // Entropy of the near-optimal word sets.
    if (bracket) {
        run_stage("entropy_curve", [&] {
            const PolygonalNorm* np = norm ? &*norm : nullptr;
            EntropyCurve curve =
                entropy_scaling_curve(A, np, *bracket, cfg.n_list, cfg.epsilons);
            json cells = json::array();
            std::string csv = "n,epsilon,survivors,entropy\n";
            for (const EntropyCell& c : curve.cells) {
                cells.push_back(json{{"n", c.n},
                                     {"epsilon", c.epsilon},
                                     {"survivors", c.survivors},
                                     {"entropy", c.entropy}});
                csv += std::to_string(c.n) + "," + format_double(c.epsilon) + "," +
                       std::to_string(c.survivors) + "," + format_double(c.entropy) + "\n";
            }
            return json{{"cells", cells},
                        {"csv", csv},
                        {"norm_filter", np != nullptr},
                        {"final_entropy", curve.cells.back().entropy}};
        });
    } else {
        skip_stage("entropy_curve", "no exponent bracket");
    }

    // Optimal pairs and their certificates.
    std::vector<OptimalPair> pairs;
    bool pairs_ok = false;
    if (mc) {
        pairs_ok = run_stage("optimal_pairs", [&] {
            pairs = build_optimal_pairs(A, *mc, cfg.L_max, cfg.tie_tol);
            json arr = json::array();
            for (const auto& p : pairs)
                arr.push_back(json{{"orbit", jword(p.orbit.word())},
                                   {"v_angle", p.v_angle},
                                   {"e2_angle", p.e2_angle},
                                   {"splitting_ok", p.splitting_ok}});
            return json{{"pairs", arr},
                        {"count", static_cast<int>(pairs.size())},
                        {"max_len", cfg.L_max},
                        {"tie_tol", cfg.tie_tol}};
        });
    } else {
        skip_stage("optimal_pairs", "no invariant multicone");
    }

    std::vector<OptimalPair> good_pairs;
    for (const auto& p : pairs)
        if (p.splitting_ok) good_pairs.push_back(p);

    if (pairs_ok && !good_pairs.empty()) {
        run_stage("cross_ratio", [&] {
            CrossRatioCertificate cert = verify_cross_ratio_certificate(good_pairs);
            json s{{"pairs_checked", cert.pairs_checked},
                   {"pairs_skipped", cert.pairs_skipped},
                   {"passed", cert.passed()},
                   {"tol", 1e-6}};
            if (cert.pairs_checked > 0) s["min_abs"] = cert.min_abs;
            return s;
        });
    } else {
        skip_stage("cross_ratio", pairs_ok ? "no optimal pair with a converged splitting"
                                           : "no optimal pairs");
    }

    if (norm && mc && !good_pairs.empty()) {
        run_stage("monotonicity", [&] {
            static constexpr double kSteps[] = {-0.5, -0.1, 0.1, 0.5};
            json checks = json::array();
            bool all = true;
            for (const auto& p : good_pairs) {
                for (double t : kSteps) {
                    const Vec2 e2{std::cos(p.e2_angle), std::sin(p.e2_angle)};
                    const Vec2 u{p.v[0] + t * e2[0], p.v[1] + t * e2[1]};
                    MonotonicityCheck chk = verify_norm_monotonicity(*norm, p, *mc, u);
                    checks.push_back(json{{"orbit", jword(p.orbit.word())},
                                          {"t", t},
                                          {"passed", chk.passed},
                                          {"u_in_cone", chk.u_in_cone},
                                          {"gauge_v", chk.gauge_v},
                                          {"gauge_u", chk.gauge_u}});
                    all = all && chk.passed;
                }
            }
            return json{{"checks", checks}, {"all_passed", all}, {"tol", 1e-9}};
        });
    } else {
        skip_stage("monotonicity", !norm ? "no extremal norm"
                                  : !mc  ? "no invariant multicone"
                                         : "no optimal pair with a converged splitting");
    }

    // Birkhoff-average maximizers vs product maximizers.
    if (mc) {
        run_stage("cuneo", [&] {
            std::optional<int> first_equal;
            json rows = comparison_rows(A, *mc, cfg, first_equal);
            return json{{"rows", rows},
                        {"first_equal_window", first_equal ? json(*first_equal) : json()},
                        {"max_len", cfg.L_max},
                        {"tie_tol", cfg.tie_tol}};
        });
    } else {
        skip_stage("cuneo", "no invariant multicone");
    }

    json doc{{"schema_version", kReportSchemaVersion},
             {"generator", json{{"name", kToolName}, {"version", kToolVersion}}},
             {"command", "analyze"},
             {"config", config_json(cfg)},
             {"stages", stages},
             {"summary", json{{"ok", n_ok}, {"skipped", n_skipped}, {"failed", n_failed}}}};
    return AnalysisReport{std::move(doc)};
}

AnalysisReport run_compare(const AnalysisConfig& cfg) {
    json doc{{"schema_version", kReportSchemaVersion},
             {"generator", json{{"name", kToolName}, {"version", kToolVersion}}},
             {"command", "compare"},
             {"config", config_json(cfg)}};
    try {
        const OneStepCocycle A = cfg.cocycle();
        MulticoneSearchResult r = find_invariant_multicone(
            A, cfg.multicone_word_len, cfg.seed_radius, cfg.margin);
        if (!r.found()) {
            doc["status"] = "skipped";
            doc["reason"] = "no invariant multicone (domination not certified): " +
                            r.diagnostic;
            return AnalysisReport{std::move(doc)};
        }
        std::optional<int> first_equal;
        doc["table"] = comparison_rows(A, *r.cone, cfg, first_equal);
        doc["first_equal_window"] = first_equal ? json(*first_equal) : json();
        doc["max_len"] = cfg.L_max;
        doc["tie_tol"] = cfg.tie_tol;
        doc["status"] = "ok";
    } catch (const std::exception& e) {
        doc["status"] = "failed";
        doc["reason"] = e.what();
    }
    return AnalysisReport{std::move(doc)};
}

}  // namespace lyapmax
