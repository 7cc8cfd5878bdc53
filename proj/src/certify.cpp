#include "lyapmax/certify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace lyapmax {

namespace {

// ---------------------------------------------------------------------------
// Raw arc systems.  Arc construction enforces length in (0, pi); the search
// loops below routinely produce over-fat intermediates, so they work on
// plain (start, length) pairs and only build Arcs once a system is sane.

struct RawArc {
    double start;
    double length;
};

// Merge overlapping/touching arcs into a disjoint system.  Returns nullopt
// when the union (nearly) covers the projective circle.
std::optional<std::vector<RawArc>> merge_raw_arcs(std::vector<RawArc> raw) {
    if (raw.empty()) return std::nullopt;
    constexpr double touch = 1e-12;
    constexpr double covered = 1e-9;
    for (auto& a : raw) a.start = wrap_pi(a.start);
    std::sort(raw.begin(), raw.end(),
              [](const RawArc& a, const RawArc& b) { return a.start < b.start; });
    std::vector<RawArc> merged;
    merged.push_back(raw.front());
    for (std::size_t i = 1; i < raw.size(); ++i) {
        RawArc& back = merged.back();
        const double off = raw[i].start - back.start;  // >= 0 by sorting
        if (off <= back.length + touch)
            back.length = std::max(back.length, off + raw[i].length);
        else
            merged.push_back(raw[i]);
    }
    while (merged.size() > 1) {
        RawArc& back = merged.back();
        const RawArc& front = merged.front();
        const double off = front.start + pi - back.start;
        if (off <= back.length + touch) {
            back.length = std::max(back.length, off + front.length);
            merged.erase(merged.begin());
        } else {
            break;
        }
    }
    double total = 0.0;
    for (const auto& a : merged) {
        if (a.length >= pi - covered) return std::nullopt;
        total += a.length;
    }
    if (total >= pi - covered) return std::nullopt;
    return merged;
}

Multicone raw_to_multicone(const std::vector<RawArc>& raw) {
    std::vector<Arc> arcs;
    arcs.reserve(raw.size());
    for (const auto& a : raw) arcs.emplace_back(a.start, a.length);
    return Multicone(std::move(arcs));
}

// Wrap-aware endpointwise comparison of two disjoint arc systems.
bool raw_arcs_stable(const std::vector<RawArc>& prev, const std::vector<RawArc>& cur,
                     double tol) {
    if (prev.size() != cur.size()) return false;
    std::vector<bool> used(prev.size(), false);
    for (const auto& c : cur) {
        bool matched = false;
        for (std::size_t j = 0; j < prev.size(); ++j) {
            if (used[j]) continue;
            if (angular_distance(c.start, prev[j].start) <= tol &&
                std::abs(c.length - prev[j].length) <= tol) {
                used[j] = true;
                matched = true;
                break;
            }
        }
        if (!matched) return false;
    }
    return true;
}

// Depth-first scan over admissible words with running products; sequential
// by design (certification scans are small enough that determinism beats
// parallel speed here).
void scan_products_rec(const OneStepCocycle& A, int depth_left, int last, Word& w,
                       const ScaledMat2& prod,
                       const std::function<void(const Word&, const ScaledMat2&)>& visit) {
    if (depth_left == 0) {
        visit(w, prod);
        return;
    }
    const int k = A.alphabet_size();
    for (int s = 1; s <= k; ++s) {
        if (last != 0 && !A.transitions.allows(last, s)) continue;
        w.syms.push_back(s);
        ScaledMat2 next = prod;
        next.apply_left(A.generator(s));
        scan_products_rec(A, depth_left - 1, s, w, next, visit);
        w.syms.pop_back();
    }
}

void for_each_product(const OneStepCocycle& A, int n,
                      const std::function<void(const Word&, const ScaledMat2&)>& visit) {
    Word w;
    w.syms.reserve(static_cast<std::size_t>(n));
    scan_products_rec(A, n, 0, w, ScaledMat2::identity(), visit);
}

}  // namespace

// ---------------------------------------------------------------------------
// Invariant multicone search

namespace {

// One fatten-and-merge sweep: images of `cur` under the listed generator
// applications, each padded by `pad` on both sides.
struct SweepFailure {
    std::string diagnostic;
};

std::optional<std::vector<RawArc>> sweep_images(const std::vector<std::pair<Mat2, const std::vector<RawArc>*>>& jobs,
                                                double pad, SweepFailure& fail) {
    std::vector<RawArc> next;
    for (const auto& [gen, arcs] : jobs) {
        for (const auto& ra : *arcs) {
            Arc a(ra.start, ra.length);
            Arc img(0.0, 1.0);
            try {
                img = image_arc(gen, a);
            } catch (const NumericError& e) {
                fail.diagnostic = std::string("degenerate arc image: ") + e.what();
                return std::nullopt;
            }
            next.push_back({wrap_pi(img.start - pad), img.length + 2.0 * pad});
        }
    }
    auto merged = merge_raw_arcs(std::move(next));
    if (!merged) fail.diagnostic = "image arcs grew to cover the projective circle";
    return merged;
}

}  // namespace

MulticoneSearchResult find_invariant_multicone(const OneStepCocycle& A, int word_len,
                                               double seed_radius, double margin, int budget) {
    if (word_len < 1) throw InputError("multicone search needs word length >= 1");
    if (!(seed_radius > 0.0)) throw InputError("multicone search needs a positive seed radius");
    if (!(margin > 0.0)) throw InputError("multicone search needs a positive margin");
    if (budget < 1) throw InputError("multicone search needs a positive iteration budget");

    MulticoneSearchResult res;

    std::vector<RawArc> seeds;
    for_each_product(A, word_len, [&](const Word&, const ScaledMat2& p) {
        const double v1 = p.m.top_right_singular_direction();
        const double u1 = act(p.m, v1);
        seeds.push_back({wrap_pi(u1 - seed_radius), 2.0 * seed_radius});
    });
    auto merged = merge_raw_arcs(std::move(seeds));
    if (!merged) {
        res.diagnostic = "seed arcs cover the projective circle";
        return res;
    }
    std::vector<RawArc> cur = std::move(*merged);

    bool stable = false;
    const int k = A.alphabet_size();
    for (int iter = 1; iter <= budget; ++iter) {
        res.iterations = iter;
        std::vector<std::pair<Mat2, const std::vector<RawArc>*>> jobs;
        jobs.reserve(static_cast<std::size_t>(k));
        for (int s = 1; s <= k; ++s) jobs.emplace_back(A.generator(s), &cur);
        SweepFailure fail;
        auto next = sweep_images(jobs, seed_radius, fail);
        if (!next) {
            res.diagnostic = fail.diagnostic + " (iteration " + std::to_string(iter) + ")";
            return res;
        }
        stable = raw_arcs_stable(cur, *next, 1e-9);
        cur = std::move(*next);
        if (stable) break;
    }
    if (!stable) {
        res.diagnostic = "arc iteration did not stabilize within the budget";
        return res;
    }

    Multicone mc = raw_to_multicone(cur);
    if (!is_strictly_forward_invariant(A, mc, margin)) {
        res.diagnostic = "stabilized arc system misses the strict-invariance margin";
        return res;
    }
    res.cone = std::move(mc);
    res.verified = true;
    return res;
}

FamilySearchResult find_invariant_family(const OneStepCocycle& A, int word_len,
                                         double seed_radius, double margin, int budget) {
    if (word_len < 1) throw InputError("family search needs word length >= 1");
    if (!(seed_radius > 0.0)) throw InputError("family search needs a positive seed radius");
    if (!(margin > 0.0)) throw InputError("family search needs a positive margin");

    FamilySearchResult res;
    const int k = A.alphabet_size();
    const TransitionMatrix& Q = A.transitions;

    // Per-symbol attempt: cone for symbol b is seeded from products of
    // admissible words ending in b, then absorbs A_b-images of the cones of
    // all allowed predecessors.
    std::vector<std::vector<RawArc>> cones(static_cast<std::size_t>(k));
    bool seeded_ok = true;
    {
        std::vector<std::vector<RawArc>> seeds(static_cast<std::size_t>(k));
        for_each_product(A, word_len, [&](const Word& w, const ScaledMat2& p) {
            const double u1 = act(p.m, p.m.top_right_singular_direction());
            seeds[static_cast<std::size_t>(w.syms.back() - 1)].push_back(
                {wrap_pi(u1 - seed_radius), 2.0 * seed_radius});
        });
        for (int b = 0; b < k; ++b) {
            if (seeds[static_cast<std::size_t>(b)].empty()) {
                res.diagnostic = "no admissible seed words end in symbol " + std::to_string(b + 1);
                seeded_ok = false;
                break;
            }
            auto merged = merge_raw_arcs(std::move(seeds[static_cast<std::size_t>(b)]));
            if (!merged) {
                res.diagnostic = "seed arcs for symbol " + std::to_string(b + 1) +
                                 " cover the projective circle";
                seeded_ok = false;
                break;
            }
            cones[static_cast<std::size_t>(b)] = std::move(*merged);
        }
    }

    bool per_symbol_ok = false;
    if (seeded_ok) {
        bool stable = false;
        std::string sweep_diag;
        for (int iter = 1; iter <= budget && sweep_diag.empty(); ++iter) {
            res.iterations = iter;
            std::vector<std::vector<RawArc>> next(static_cast<std::size_t>(k));
            for (int b = 1; b <= k; ++b) {
                std::vector<std::pair<Mat2, const std::vector<RawArc>*>> jobs;
                for (int a = 1; a <= k; ++a)
                    if (Q.allows(a, b))
                        jobs.emplace_back(A.generator(b), &cones[static_cast<std::size_t>(a - 1)]);
                if (jobs.empty()) {
                    sweep_diag = "symbol " + std::to_string(b) + " has no allowed predecessor";
                    break;
                }
                SweepFailure fail;
                auto swept = sweep_images(jobs, seed_radius, fail);
                if (!swept) {
                    sweep_diag = "cone for symbol " + std::to_string(b) + ": " + fail.diagnostic;
                    break;
                }
                next[static_cast<std::size_t>(b - 1)] = std::move(*swept);
            }
            if (!sweep_diag.empty()) break;
            stable = true;
            for (int b = 0; b < k; ++b)
                stable = stable && raw_arcs_stable(cones[static_cast<std::size_t>(b)],
                                                   next[static_cast<std::size_t>(b)], 1e-9);
            cones = std::move(next);
            if (stable) break;
        }
        if (stable) {
            std::vector<Multicone> mcs;
            mcs.reserve(static_cast<std::size_t>(k));
            for (const auto& c : cones) mcs.push_back(raw_to_multicone(c));
            MulticoneFamily family{std::move(mcs)};
            if (is_family_invariant(A, family, margin)) {
                res.family = std::move(family);
                res.verified = true;
                res.mode = "per_symbol";
                per_symbol_ok = true;
            } else {
                res.diagnostic = "per-symbol cones stabilized but miss the invariance margin";
            }
        } else if (res.diagnostic.empty()) {
            res.diagnostic = sweep_diag.empty()
                                 ? "per-symbol iteration did not stabilize within the budget"
                                 : sweep_diag;
        }
    }
    if (per_symbol_ok) return res;

    // Fallback: one shared multicone found for the free semigroup, used for
    // every symbol, re-verified against the actual transition set.
    OneStepCocycle free(A.generators);
    MulticoneSearchResult shared = find_invariant_multicone(free, word_len, seed_radius,
                                                            margin, budget);
    if (shared.found()) {
        MulticoneFamily family{std::vector<Multicone>(static_cast<std::size_t>(k), *shared.cone)};
        if (is_family_invariant(A, family, margin)) {
            res.family = std::move(family);
            res.verified = true;
            res.mode = "inherited";
            res.diagnostic += res.diagnostic.empty() ? "" : "; ";
            res.diagnostic += "fell back to the shared full-shift multicone";
            return res;
        }
        res.diagnostic += "; shared multicone is not invariant for the restricted transitions";
    } else {
        res.diagnostic += "; shared multicone search failed: " + shared.diagnostic;
    }
    return res;
}

// ---------------------------------------------------------------------------
// Domination rate

DominationReport check_domination_rate(const OneStepCocycle& A, int n_max) {
    if (n_max < 2) throw InputError("domination table needs n_max >= 2");
    DominationReport rep;
    rep.table.assign(static_cast<std::size_t>(n_max), 0.0);

    // One DFS to full depth collects the per-length maxima along the way.
    std::function<void(int, int, const ScaledMat2&)> rec = [&](int last, int depth,
                                                               const ScaledMat2& prod) {
        if (depth > 0) {
            double& g = rep.table[static_cast<std::size_t>(depth - 1)];
            g = std::max(g, prod.singular_ratio());
        }
        if (depth == n_max) return;
        for (int s = 1; s <= A.alphabet_size(); ++s) {
            if (last != 0 && !A.transitions.allows(last, s)) continue;
            ScaledMat2 next = prod;
            next.apply_left(A.generator(s));
            rec(s, depth + 1, next);
        }
    };
    rec(0, 0, ScaledMat2::identity());

    // Least squares on log g(n) = log C + n log tau.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int n = 1; n <= n_max; ++n) {
        const double x = n;
        const double y = std::log(rep.table[static_cast<std::size_t>(n - 1)]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double den = n_max * sxx - sx * sx;
    const double slope = (n_max * sxy - sx * sy) / den;
    const double intercept = (sy - slope * sx) / n_max;
    rep.tau_fit = std::exp(slope);
    rep.c_fit = std::exp(intercept);

    rep.monotone_tail = true;
    for (int n = std::max(1, n_max / 2); n < n_max; ++n) {
        if (rep.table[static_cast<std::size_t>(n)] >
            rep.table[static_cast<std::size_t>(n - 1)] * (1.0 + 1e-12))
            rep.monotone_tail = false;
    }
    rep.dominated = rep.tau_fit < 1.0 - 1e-9 && rep.monotone_tail;
    return rep;
}

// ---------------------------------------------------------------------------
// Splitting

namespace {

ScaledMat2 span_product(const OneStepCocycle& A, const std::vector<int>& syms, std::size_t begin,
                        std::size_t count) {
    ScaledMat2 p = ScaledMat2::identity();
    for (std::size_t i = 0; i < count; ++i) p.apply_left(A.generator(syms[begin + i]));
    return p;
}

// Inverse of span_product over the same span, accumulated from generator
// inverses with per-step rescaling.  Inverting the finished product instead
// would hit its underflowed normalized determinant once the window is long
// enough for the singular values to split by ~1e-14.
ScaledMat2 inv_span_product(const OneStepCocycle& A, const std::vector<int>& syms,
                            std::size_t begin, std::size_t count) {
    ScaledMat2 p = ScaledMat2::identity();
    for (std::size_t i = count; i > 0; --i) p.apply_left(A.generator(syms[begin + i - 1]).inverse());
    return p;
}

}  // namespace

SplittingSample compute_splitting(const OneStepCocycle& A, const Multicone& mc, int past_len,
                                  int future_len, const Word& context, double tol) {
    if (past_len < 1 || future_len < 1)
        throw InputError("splitting needs past and future windows of length >= 1");
    validate_symbols(context, A.alphabet_size());
    if (!is_admissible(A.transitions, context))
        throw InputError("splitting context word is not admissible");
    const int L = context.length();
    if (L < past_len + future_len)
        throw InputError("splitting context shorter than past + future windows");

    SplittingSample s;
    s.context = context;
    s.past_len = past_len;
    s.future_len = future_len;

    const Arc& first = mc.arcs().front();
    const double seed1a = first.midpoint();
    const double seed1b = mc.components() > 1 ? mc.arcs().back().midpoint()
                                              : wrap_pi(first.start + 0.25 * first.length);
    const Multicone comp = complementary(mc);
    const Arc& cfirst = comp.arcs().front();
    const double seed2a = cfirst.midpoint();
    const double seed2b = comp.components() > 1 ? comp.arcs().back().midpoint()
                                                : wrap_pi(cfirst.start + 0.25 * cfirst.length);

    const auto& syms = context.syms;
    const std::size_t p = static_cast<std::size_t>(past_len);
    const std::size_t q = static_cast<std::size_t>(future_len);

    const Mat2 past = span_product(A, syms, 0, p).m;
    const Mat2 future_inv = inv_span_product(A, syms, p, q).m;
    s.e1 = act(past, seed1a);
    s.e2 = act(future_inv, seed2a);
    const double sens1 = angular_distance(s.e1, act(past, seed1b));
    const double sens2 = angular_distance(s.e2, act(future_inv, seed2b));

    s.residual_e1 = sens1;
    s.residual_e2 = sens2;
    if (L >= past_len + future_len + 1) {
        // Shift the whole construction one symbol forward and compare with
        // pushing today's estimates through the symbol being consumed.
        const Mat2& step = A.generator(syms[p]);
        const double e1_shift = act(span_product(A, syms, 1, p).m, seed1a);
        const double e2_shift = act(inv_span_product(A, syms, p + 1, q).m, seed2a);
        s.residual_e1 = std::max(sens1, angular_distance(act(step, s.e1), e1_shift));
        s.residual_e2 = std::max(sens2, angular_distance(act(step, s.e2), e2_shift));
        s.has_residual = true;
    }
    s.ok = s.residual_e1 <= tol && s.residual_e2 <= tol &&
           s.separation() > defaults::tol_angle;
    return s;
}

SplittingSample compute_splitting(const OneStepCocycle& A, const Multicone& mc, int past_len,
                                  int future_len, const CyclicWord& context, double tol) {
    if (past_len < 1 || future_len < 1)
        throw InputError("splitting needs past and future windows of length >= 1");
    const int need = past_len + future_len + 1;
    const int n = context.length();
    const int reps = (need + n - 1) / n + 1;
    Word unrolled;
    unrolled.syms.reserve(static_cast<std::size_t>(reps * n));
    for (int r = 0; r < reps; ++r)
        unrolled.syms.insert(unrolled.syms.end(), context.word().syms.begin(),
                             context.word().syms.end());
    return compute_splitting(A, mc, past_len, future_len, unrolled, tol);
}

// ---------------------------------------------------------------------------
// Pinching and twisting

PinchingResult check_pinching(const OneStepCocycle& A, int max_len, double tol_pinch) {
    if (max_len < 1) throw InputError("pinching search needs max length >= 1");
    PinchingResult res;
    for (int len = 1; len <= max_len; ++len) {
        bool found = false;
        for_each_product(A, len, [&](const Word& w, const ScaledMat2& p) {
            if (found) return;
            const double sr = p.singular_ratio();  // sigma2 / sigma1 <= 1
            const double ratio = sr > 0.0 ? 1.0 / sr : infinity();
            res.ratio = std::max(res.ratio, ratio);
            if (ratio > 1.0 + tol_pinch) {
                res.witness = w;
                res.ratio = ratio;
                found = true;
            }
        });
        if (found) return res;
    }
    return res;
}

TwistingResult check_twisting(const OneStepCocycle& A, double F, const std::vector<double>& G,
                              int max_len, double tol_angle) {
    if (G.empty()) throw InputError("twisting check needs a nonempty avoidance set");
    if (max_len < 1) throw InputError("twisting search needs max length >= 1");

    auto dist_to_G = [&](double angle) {
        double d = infinity();
        for (double g : G) d = std::min(d, angular_distance(angle, wrap_pi(g)));
        return d;
    };

    TwistingResult res;
    const int k = A.alphabet_size();

    // Greedy: repeatedly apply the generator that pushes the running
    // direction farthest from G.
    {
        double cur = wrap_pi(F);
        int last = 0;
        Word w;
        for (int step = 1; step <= max_len; ++step) {
            int best_s = -1;
            double best_d = -1.0, best_angle = 0.0;
            for (int s = 1; s <= k; ++s) {
                if (last != 0 && !A.transitions.allows(last, s)) continue;
                const double a = act(A.generator(s), cur);
                const double d = dist_to_G(a);
                if (d > best_d) {
                    best_d = d;
                    best_s = s;
                    best_angle = a;
                }
            }
            if (best_s < 0) break;
            w.syms.push_back(best_s);
            cur = best_angle;
            last = best_s;
            res.min_distance = std::max(res.min_distance, best_d);
            if (best_d > tol_angle) {
                res.witness = w;
                res.min_distance = best_d;
                return res;
            }
        }
    }

    // Exhaustive by increasing length, lexicographic within a length.
    for (int len = 1; len <= max_len; ++len) {
        bool found = false;
        Word w;
        std::function<void(int, int, double)> rec = [&](int last, int depth, double angle) {
            if (found) return;
            if (depth == len) {
                const double d = dist_to_G(angle);
                res.min_distance = std::max(res.min_distance, d);
                if (d > tol_angle) {
                    res.witness = w;
                    res.min_distance = d;
                    found = true;
                }
                return;
            }
            for (int s = 1; s <= k && !found; ++s) {
                if (last != 0 && !A.transitions.allows(last, s)) continue;
                w.syms.push_back(s);
                rec(s, depth + 1, act(A.generator(s), angle));
                w.syms.pop_back();
            }
        };
        rec(0, 0, wrap_pi(F));
        if (found) return res;
    }
    return res;
}

// ---------------------------------------------------------------------------
// Barabanov-type polygonal extremal norms

namespace {

// Real invariant directions of a single matrix: 0 (complex pair), 1
// (defective), or 2; scalar multiples of the identity fix everything and
// report none here.
std::vector<double> real_eigendirections(const Mat2& m) {
    const double scale = m.max_abs();
    const bool scalar = std::abs(m.b) <= 1e-14 * scale && std::abs(m.c) <= 1e-14 * scale &&
                        std::abs(m.a - m.d) <= 1e-14 * scale;
    if (scalar) return {};
    const double tr = m.trace();
    const double disc = tr * tr - 4.0 * m.det();
    if (disc < 0.0) return {};
    const double sq = std::sqrt(disc);
    std::vector<double> dirs;
    for (double lam : {0.5 * (tr + sq), 0.5 * (tr - sq)}) {
        // (m - lam I) v = 0; pick the better-conditioned row.
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
        if (std::hypot(vx, vy) <= 1e-14 * std::max(1.0, scale)) continue;
        const double dir = wrap_pi(std::atan2(vy, vx));
        bool dup = false;
        for (double d : dirs) dup = dup || angular_distance(d, dir) <= 1e-12;
        if (!dup) dirs.push_back(dir);
    }
    return dirs;
}

bool is_scalar_matrix(const Mat2& m) {
    const double scale = m.max_abs();
    return std::abs(m.b) <= 1e-14 * scale && std::abs(m.c) <= 1e-14 * scale &&
           std::abs(m.a - m.d) <= 1e-14 * scale;
}

bool generators_share_eigendirection(const OneStepCocycle& A) {
    std::vector<double> candidates;
    bool all_scalar = true;
    for (const auto& g : A.generators) {
        if (is_scalar_matrix(g)) continue;
        all_scalar = false;
        candidates = real_eigendirections(g);
        break;
    }
    if (all_scalar) return true;  // every direction is invariant
    for (double theta : candidates) {
        bool shared = true;
        for (const auto& g : A.generators) {
            if (is_scalar_matrix(g)) continue;
            shared = shared && angular_distance(act(g, theta), theta) <= 1e-10;
        }
        if (shared) return true;
    }
    return false;
}

struct BallAttempt {
    enum class Kind { Converged, Collapse, Blowup, Degenerate, Drift } kind;
    std::vector<Vec2> hull;
    int iterations = 0;
    double mean_log_radius = 0.0;
};

BallAttempt iterate_ball(const OneStepCocycle& A, double beta, int half, int budget,
                         double tol) {
    const double grid_step = pi / half;
    std::vector<double> r(static_cast<std::size_t>(half), 1.0);
    std::vector<double> r_new(static_cast<std::size_t>(half));
    std::vector<double> cs(static_cast<std::size_t>(half)), sn(static_cast<std::size_t>(half));
    for (int j = 0; j < half; ++j) {
        cs[static_cast<std::size_t>(j)] = std::cos(j * grid_step);
        sn[static_cast<std::size_t>(j)] = std::sin(j * grid_step);
    }
    auto rebuild = [&](const std::vector<double>& rad) {
        std::vector<Vec2> pts(static_cast<std::size_t>(2 * half));
        for (int j = 0; j < half; ++j) {
            const double x = rad[static_cast<std::size_t>(j)] * cs[static_cast<std::size_t>(j)];
            const double y = rad[static_cast<std::size_t>(j)] * sn[static_cast<std::size_t>(j)];
            pts[static_cast<std::size_t>(j)] = {x, y};
            pts[static_cast<std::size_t>(j + half)] = {-x, -y};
        }
        return convex_hull_angular(std::move(pts));
    };

    std::vector<Vec2> hull = rebuild(r);
    const double e_beta = std::exp(beta);
    BallAttempt out{BallAttempt::Kind::Drift, {}, 0, 0.0};
    for (int it = 1; it <= budget; ++it) {
        out.iterations = it;
        if (hull.size() < 4) {
            out.kind = BallAttempt::Kind::Degenerate;
            out.hull = hull;
            return out;
        }
        PolygonGauge gauge(hull);
        double diff = 0.0, rmax = 0.0, rmin = infinity();
        for (int j = 0; j < half; ++j) {
            const std::size_t ju = static_cast<std::size_t>(j);
            double denom = 0.0;
            for (const auto& g : A.generators) {
                const auto [x, y] = g.apply(cs[ju], sn[ju]);
                denom = std::max(denom, gauge.gauge({x, y}));
            }
            r_new[ju] = e_beta / denom;
            diff = std::max(diff, std::abs(r_new[ju] - r[ju]));
            rmax = std::max(rmax, r_new[ju]);
            rmin = std::min(rmin, r_new[ju]);
        }
        r.swap(r_new);
        if (rmin / rmax < 1e-10) {
            out.kind = BallAttempt::Kind::Degenerate;
            return out;
        }
        if (rmax < 1e-6) {
            out.kind = BallAttempt::Kind::Collapse;
            return out;
        }
        if (rmin > 1e6) {
            out.kind = BallAttempt::Kind::Blowup;
            return out;
        }
        hull = rebuild(r);
        if (diff <= tol) {
            out.kind = BallAttempt::Kind::Converged;
            out.hull = hull;
            return out;
        }
    }
    double mean = 0.0;
    for (double v : r) mean += std::log(v);
    out.mean_log_radius = mean / half;
    out.kind = BallAttempt::Kind::Drift;
    return out;
}

}  // namespace

BarabanovResult barabanov_norm(const OneStepCocycle& A, const ExponentBracket& bracket,
                               int n_vertices, double tol, int budget) {
    if (n_vertices < 8 || n_vertices % 2 != 0)
        throw InputError("extremal-norm polygon needs an even vertex count >= 8");
    if (!(tol > 0.0)) throw InputError("extremal-norm tolerance must be positive");
    if (budget < 1) throw InputError("extremal-norm iteration budget must be positive");

    BarabanovResult res;
    res.reducible_warning = generators_share_eigendirection(A);
    const int half = n_vertices / 2;

    double lo = bracket.lower - std::max(tol, 1e-9);
    double hi = bracket.upper + std::max(tol, 1e-9);
    std::string last_behavior = "never attempted";
    for (int bstep = 1; bstep <= 80; ++bstep) {
        const double beta = 0.5 * (lo + hi);
        BallAttempt att = iterate_ball(A, beta, half, budget, tol);
        res.bisection_steps = bstep;
        switch (att.kind) {
            case BallAttempt::Kind::Converged: {
                res.iterations = att.iterations;
                res.norm.vertices = std::move(att.hull);
                res.norm.beta_hat = beta;
                res.norm.validate();
                res.residual = extremal_residual(res.norm, A,
                                                 static_cast<int>(res.norm.vertices.size()));
                return res;
            }
            case BallAttempt::Kind::Degenerate: {
                std::string msg =
                    "extremal ball degenerated to a needle at growth rate " +
                    std::to_string(beta);
                if (res.reducible_warning)
                    msg += " (generators share an invariant direction: no such norm exists)";
                throw NumericError(msg);
            }
            case BallAttempt::Kind::Collapse:
                lo = beta;
                last_behavior = "collapse at " + std::to_string(beta);
                break;
            case BallAttempt::Kind::Blowup:
                hi = beta;
                last_behavior = "blow-up at " + std::to_string(beta);
                break;
            case BallAttempt::Kind::Drift:
                if (att.mean_log_radius < 0.0) {
                    lo = beta;
                    last_behavior = "slow collapse at " + std::to_string(beta);
                } else {
                    hi = beta;
                    last_behavior = "slow blow-up at " + std::to_string(beta);
                }
                break;
        }
        if (hi - lo < 1e-14) break;
    }
    throw NumericError("no stable extremal ball inside the exponent bracket [" +
                       std::to_string(bracket.lower) + ", " + std::to_string(bracket.upper) +
                       "]; last behavior: " + last_behavior);
}

double extremal_residual(const PolygonalNorm& norm, const OneStepCocycle& A, int n_grid) {
    if (n_grid < 1) throw InputError("residual grid must be nonempty");
    PolygonGauge gauge(norm.vertices);
    auto residual_at = [&](const Vec2& u) {
        double best = 0.0;
        for (const auto& g : A.generators) {
            const auto [x, y] = g.apply(u[0], u[1]);
            best = std::max(best, gauge.gauge({x, y}));
        }
        return std::abs(std::log(best) - norm.beta_hat - std::log(gauge.gauge(u)));
    };
    double res = 0.0;
    if (n_grid == static_cast<int>(norm.vertices.size())) {
        for (const auto& v : norm.vertices) res = std::max(res, residual_at(v));
    } else {
        for (int l = 0; l < n_grid; ++l) {
            const double theta = l * pi / n_grid;
            const Vec2 raw{std::cos(theta), std::sin(theta)};
            const double g0 = gauge.gauge(raw);
            res = std::max(res, residual_at({raw[0] / g0, raw[1] / g0}));
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Additive potential

double AdditivePotential::value(const Word& w) const {
    auto it = std::lower_bound(table.begin(), table.end(), w,
                               [](const std::pair<Word, double>& p, const Word& key) {
                                   return p.first < key;
                               });
    if (it == table.end() || !(it->first == w))
        throw InputError("window is not in the potential's admissible-word table");
    return it->second;
}

AdditivePotential cuneo_potential(const OneStepCocycle& A, const Multicone& mc, int window) {
    if (window < 1) throw InputError("potential window must be >= 1");
    if (!is_strictly_forward_invariant(A, mc, defaults::tol_angle))
        throw InputError(
            "multicone is not strictly forward invariant: potential needs domination");

    AdditivePotential f;
    f.window = window;
    f.ref_angle = mc.arcs().front().midpoint();

    for_each_word(A.transitions, window, [&](const Word& w) {
        double v = f.ref_angle;
        if (window > 1) {
            ScaledMat2 past = ScaledMat2::identity();
            for (int i = 0; i + 1 < window; ++i)
                past.apply_left(A.generator(w.syms[static_cast<std::size_t>(i)]));
            v = act(past.m, f.ref_angle);
        }
        const Mat2& g = A.generator(w.syms.back());
        const auto [x, y] = g.apply(std::cos(v), std::sin(v));
        f.table.emplace_back(w, 0.5 * std::log(x * x + y * y));
    });
    if (f.table.empty()) throw InputError("no admissible words at the requested window length");

    double d0 = 0.0;
    for (const auto& a : mc.arcs()) d0 = std::max(d0, a.length);
    f.lambda_hat = 1.0;
    if (window >= 2) {
        double dm = 0.0;
        for_each_product(A, window - 1, [&](const Word&, const ScaledMat2& p) {
            const MulticoneImage img = image_multicone(p.m, mc);
            for (const auto& a : img.cone.arcs()) dm = std::max(dm, a.length);
        });
        f.lambda_hat = std::pow(dm / d0, 1.0 / (window - 1));
    }
    return f;
}

double birkhoff_sum(const AdditivePotential& f, const Word& w) {
    const int L = w.length();
    const int m = f.window;
    if (L < m)
        throw InputError("word shorter than the potential window");
    double sum = 0.0;
    Word win;
    win.syms.resize(static_cast<std::size_t>(m));
    for (int t = m; t <= L; ++t) {
        for (int i = 0; i < m; ++i)
            win.syms[static_cast<std::size_t>(i)] = w.syms[static_cast<std::size_t>(t - m + i)];
        sum += f.value(win);
    }
    return sum;
}

double birkhoff_sum(const AdditivePotential& f, const CyclicWord& c) {
    const int n = c.length();
    const int m = f.window;
    const auto& syms = c.word().syms;
    double sum = 0.0;
    Word win;
    win.syms.resize(static_cast<std::size_t>(m));
    for (int t = 0; t < n; ++t) {
        for (int i = 0; i < m; ++i) {
            int idx = (t - (m - 1) + i) % n;
            if (idx < 0) idx += n;
            win.syms[static_cast<std::size_t>(i)] = syms[static_cast<std::size_t>(idx)];
        }
        sum += f.value(win);
    }
    return sum;
}

}  // namespace lyapmax
