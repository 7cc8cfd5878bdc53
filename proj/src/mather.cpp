#include "lyapmax/mather.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace lyapmax {

// ---------------------------------------------------------------------------
// Maximizing periodic orbits

MaximizingOrbits maximizing_orbits(const OneStepCocycle& A, int max_len, double tie_tol) {
    if (max_len < 1) throw InputError("orbit scan needs max length >= 1");
    MaximizingOrbits out;
    std::vector<std::pair<double, CyclicWord>> all;
    for_each_cyclic_word(A.transitions, max_len, [&](const CyclicWord& c) {
        const double pe = periodic_exponent(A, c);
        all.emplace_back(pe, c);
        out.value = std::max(out.value, pe);
    });
    for (auto& [pe, c] : all)
        if (pe >= out.value - tie_tol) out.orbits.push_back(std::move(c));
    return out;
}

// ---------------------------------------------------------------------------
// Near-optimal word set

namespace {

void scan_products(const OneStepCocycle& A, int n,
                   const std::function<void(const Word&, const ScaledMat2&)>& visit) {
    std::function<void(int, int, Word&, const ScaledMat2&)> rec =
        [&](int last, int depth, Word& w, const ScaledMat2& prod) {
            if (depth == n) {
                visit(w, prod);
                return;
            }
            for (int s = 1; s <= A.alphabet_size(); ++s) {
                if (last != 0 && !A.transitions.allows(last, s)) continue;
                w.syms.push_back(s);
                ScaledMat2 next = prod;
                next.apply_left(A.generator(s));
                rec(s, depth + 1, w, next);
                w.syms.pop_back();
            }
        };
    Word w;
    w.syms.reserve(static_cast<std::size_t>(n));
    rec(0, 0, w, ScaledMat2::identity());
}

Word prefix_word(const Word& w, int len) {
    return Word(std::vector<int>(w.syms.begin(), w.syms.begin() + len));
}

Word suffix_word(const Word& w, int len) {
    return Word(std::vector<int>(w.syms.end() - len, w.syms.end()));
}

}  // namespace

MatherApprox mather_word_set(const OneStepCocycle& A, const PolygonalNorm* norm,
                             const ExponentBracket& bracket, int n, double epsilon) {
    if (n < 2) throw InputError("word-set approximation needs n >= 2");
    if (!(epsilon > 0.0)) throw InputError("word-set approximation needs epsilon > 0");

    MatherApprox out;
    out.n = n;
    out.epsilon = epsilon;
    out.beta_hat = bracket.midpoint();
    out.threshold = out.beta_hat - (epsilon + bracket.width());
    out.norm_filter = norm != nullptr;

    std::optional<PolygonGauge> gauge;
    if (norm) gauge.emplace(norm->vertices);
    scan_products(A, n, [&](const Word& w, const ScaledMat2& p) {
        const double log_nu = gauge ? std::log(gauge->operator_norm(p.m)) + p.log_scale
                                    : p.log_norm();
        if (log_nu >= n * out.threshold) out.survivors.push_back(w);
    });
    if (out.survivors.empty())
        throw InputError(
            "no admissible word survives the near-optimality filter; increase epsilon");

    // Overlap (de Bruijn) graph: states are the (n-1)-prefixes/suffixes,
    // each survivor is the edge prefix -> suffix.
    std::map<Word, int> index;
    for (const auto& w : out.survivors) {
        index.emplace(prefix_word(w, n - 1), 0);
        index.emplace(suffix_word(w, n - 1), 0);
    }
    int m = 0;
    for (auto& [state, id] : index) id = m++;
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(m) * m, 0);
    for (const auto& w : out.survivors) {
        const int i = index[prefix_word(w, n - 1)];
        const int j = index[suffix_word(w, n - 1)];
        bits[static_cast<std::size_t>(i) * m + j] = 1;
    }

    // Trim to the bi-infinite part: repeatedly drop states missing an
    // incoming or outgoing edge.  What survives carries every cycle, so the
    // entropy of the trimmed graph equals that of the full one.
    std::vector<bool> alive(static_cast<std::size_t>(m), true);
    bool changed = true;
    while (changed) {
        changed = false;
        for (int i = 0; i < m; ++i) {
            if (!alive[static_cast<std::size_t>(i)]) continue;
            bool has_out = false, has_in = false;
            for (int j = 0; j < m; ++j) {
                if (!alive[static_cast<std::size_t>(j)]) continue;
                has_out = has_out || bits[static_cast<std::size_t>(i) * m + j] != 0;
                has_in = has_in || bits[static_cast<std::size_t>(j) * m + i] != 0;
            }
            if (!has_out || !has_in) {
                alive[static_cast<std::size_t>(i)] = false;
                changed = true;
            }
        }
    }
    std::vector<int> keep;
    for (const auto& [state, id] : index)
        if (alive[static_cast<std::size_t>(id)]) {
            out.states.push_back(state);
            keep.push_back(id);
        }
    if (out.states.empty()) {
        out.entropy_estimate = 0.0;  // survivors form no cycle: finite word set
        return out;
    }
    const int t = static_cast<int>(keep.size());
    std::vector<std::uint8_t> tbits(static_cast<std::size_t>(t) * t, 0);
    for (int i = 0; i < t; ++i)
        for (int j = 0; j < t; ++j)
            tbits[static_cast<std::size_t>(i) * t + j] =
                bits[static_cast<std::size_t>(keep[static_cast<std::size_t>(i)]) * m +
                     keep[static_cast<std::size_t>(j)]];
    out.graph = TransitionMatrix(t, std::move(tbits));
    out.entropy_estimate = topological_entropy(*out.graph);
    return out;
}

EntropyCurve entropy_scaling_curve(const OneStepCocycle& A, const PolygonalNorm* norm,
                                   const ExponentBracket& bracket,
                                   const std::vector<int>& n_list,
                                   const std::vector<double>& eps_list) {
    if (n_list.empty() || eps_list.empty())
        throw InputError("entropy curve needs nonempty n and epsilon lists");
    EntropyCurve curve;
    for (double eps : eps_list) {
        for (int n : n_list) {
            MatherApprox approx = mather_word_set(A, norm, bracket, n, eps);
            curve.cells.push_back({n, eps, static_cast<long>(approx.survivors.size()),
                                   approx.entropy_estimate});
        }
    }
    return curve;
}

// ---------------------------------------------------------------------------
// Cross-ratio certificates

double cross_ratio(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const double ac = cross2(a, c);
    const double ad = cross2(a, d);
    const double bd = cross2(b, d);
    const double bc = cross2(b, c);
    const double scale_ad = norm2(a) * norm2(d);
    const double scale_bc = norm2(b) * norm2(c);
    if (std::abs(ad) <= 1e-14 * scale_ad || std::abs(bc) <= 1e-14 * scale_bc)
        throw InputError("cross ratio denominator vanishes (collinear arguments)");
    return (ac / ad) * (bd / bc);
}

namespace {

// Eigendirection of the eigenvalue of largest magnitude; nullopt for a
// complex pair or a scalar matrix.
std::optional<double> top_eigendirection(const Mat2& m) {
    const double scale = std::max(m.max_abs(), 1e-300);
    if (std::abs(m.b) <= 1e-14 * scale && std::abs(m.c) <= 1e-14 * scale &&
        std::abs(m.a - m.d) <= 1e-14 * scale)
        return std::nullopt;
    const double tr = m.trace();
    const double disc = tr * tr - 4.0 * m.det();
    if (disc < 0.0) return std::nullopt;
    const double sq = std::sqrt(disc);
    const double lp = 0.5 * (tr + sq), lm = 0.5 * (tr - sq);
    const double lam = std::abs(lp) >= std::abs(lm) ? lp : lm;
    const double r1x = m.a - lam, r1y = m.b;
    const double r2x = m.c, r2y = m.d - lam;
    double vx, vy;
    if (std::hypot(r1x, r1y) >= std::hypot(r2x, r2y)) {
        vx = -r1y;
        vy = r1x;
    } else {
        vx = -r2y;
        vy = r2x;
    }
    if (std::hypot(vx, vy) <= 1e-13 * std::max(1.0, scale)) return std::nullopt;
    return wrap_pi(std::atan2(vy, vx));
}

}  // namespace

std::vector<OptimalPair> build_optimal_pairs(const OneStepCocycle& A, const Multicone& mc,
                                             int max_len, double tie_tol, int window) {
    if (window < 1) throw InputError("optimal pairs need a positive splitting window");
    MaximizingOrbits orbits = maximizing_orbits(A, max_len, tie_tol);
    std::vector<OptimalPair> pairs;
    for (const auto& c : orbits.orbits) {
        const ScaledMat2 prod = scaled_word_product(A, c.word());
        const auto dir = top_eigendirection(prod.m);
        if (!dir) continue;  // no real dominant direction at this orbit
        OptimalPair p{c};
        p.v_angle = *dir;
        p.v = {std::cos(*dir), std::sin(*dir)};
        SplittingSample s = compute_splitting(A, mc, window, window, c);
        p.e2_angle = s.e2;
        p.splitting_ok = s.ok;
        pairs.push_back(std::move(p));
    }
    return pairs;
}

CrossRatioCertificate verify_cross_ratio_certificate(const std::vector<OptimalPair>& pairs) {
    CrossRatioCertificate cert;
    for (const auto& x : pairs) {
        for (const auto& y : pairs) {
            const Vec2 v1 = x.v;
            const Vec2 v2{std::cos(x.e2_angle), std::sin(x.e2_angle)};
            const Vec2 w1 = y.v;
            const Vec2 w2{std::cos(y.e2_angle), std::sin(y.e2_angle)};
            // Degenerate alignment (v1 along w2, or w1 along v2) cannot be
            // scored; the fast direction of one orbit coinciding with the
            // slow direction of another signals a broken splitting anyway.
            if (std::abs(cross2(v1, w2)) <= 1e-12 || std::abs(cross2(w1, v2)) <= 1e-12) {
                ++cert.pairs_skipped;
                continue;
            }
            cert.min_abs = std::min(cert.min_abs, std::abs(cross_ratio(v1, w1, v2, w2)));
            ++cert.pairs_checked;
        }
    }
    return cert;
}

MonotonicityCheck verify_norm_monotonicity(const PolygonalNorm& norm, const OptimalPair& sample,
                                           const Multicone& mc, const Vec2& u, double tol) {
    if (norm2(u) <= 1e-14) throw InputError("monotonicity probe vector vanishes");
    const Vec2 e2{std::cos(sample.e2_angle), std::sin(sample.e2_angle)};
    const Vec2 diff{u[0] - sample.v[0], u[1] - sample.v[1]};
    const double dn = norm2(diff);
    if (dn > 1e-14 && std::abs(cross2(diff, e2)) > 1e-9 * dn)
        throw InputError("probe vector must differ from v along the contracting direction only");

    PolygonGauge gauge(norm.vertices);
    MonotonicityCheck check;
    check.gauge_v = gauge.gauge(sample.v);
    check.gauge_u = gauge.gauge(u);
    check.u_in_cone = mc.contains(wrap_pi(std::atan2(u[1], u[0])));
    check.passed = check.gauge_v <= check.gauge_u + tol;
    return check;
}

// ---------------------------------------------------------------------------
// Maximizer comparison

const char* to_string(MaximizerComparison::Verdict v) {
    switch (v) {
        case MaximizerComparison::Verdict::Equal: return "equal";
        case MaximizerComparison::Verdict::Unequal: return "unequal";
        case MaximizerComparison::Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

MaximizerComparison compare_maximizers(const OneStepCocycle& A, const AdditivePotential& f,
                                       int max_len, double tie_tol) {
    if (max_len < 1) throw InputError("maximizer comparison needs max length >= 1");
    MaximizerComparison cmp;

    struct Row {
        CyclicWord c;
        double pe;
        double favg;
    };
    std::vector<Row> rows;
    double pe_max = -infinity(), favg_max = -infinity();
    for_each_cyclic_word(A.transitions, max_len, [&](const CyclicWord& c) {
        const double pe = periodic_exponent(A, c);
        const double favg = birkhoff_sum(f, c) / c.length();
        pe_max = std::max(pe_max, pe);
        favg_max = std::max(favg_max, favg);
        cmp.defect = std::max(cmp.defect, std::abs(pe - favg));
        rows.push_back({c, pe, favg});
    });

    // Spectral gap: best distinct exponent value minus the next one.
    double second = -infinity();
    for (const auto& r : rows)
        if (r.pe < pe_max - tie_tol) second = std::max(second, r.pe);
    cmp.gap = second > -infinity() ? pe_max - second : infinity();

    // The potential's averages of exactly-tied orbits drift apart by up to
    // the window defect each, so the potential side widens its tie tolerance
    // accordingly; the defect-vs-gap gate below keeps this sound.
    const double f_tie = tie_tol + 2.0 * cmp.defect;
    for (const auto& r : rows) {
        if (r.pe >= pe_max - tie_tol) cmp.orbit_maximizers.push_back(r.c);
        if (r.favg >= favg_max - f_tie) cmp.potential_maximizers.push_back(r.c);
    }

    const bool same = cmp.orbit_maximizers == cmp.potential_maximizers;
    if (!(cmp.defect < 0.5 * cmp.gap))
        cmp.verdict = MaximizerComparison::Verdict::Inconclusive;
    else
        cmp.verdict = same ? MaximizerComparison::Verdict::Equal
                           : MaximizerComparison::Verdict::Unequal;
    return cmp;
}

}  // namespace lyapmax
