#include "lyapmax/projcone.hpp"

#include <algorithm>
#include <cmath>

namespace lyapmax {

Arc::Arc(double s, double len) : start(wrap_pi(s)), length(len) {
    if (!(length > 0.0) || !(length < pi))
        throw InputError("arc: length must lie strictly between 0 and pi");
}

bool Arc::contains(double angle, double slack) const {
    double offset = wrap_pi(angle - start);
    if (offset <= length + slack) return true;
    return pi - offset <= slack;  // slack can reach back across the start point
}

Multicone::Multicone(std::vector<Arc> arcs) : arcs_(std::move(arcs)) {
    if (arcs_.empty()) throw InputError("multicone: needs at least one arc");
    std::sort(arcs_.begin(), arcs_.end(),
              [](const Arc& x, const Arc& y) { return x.start < y.start; });
    double total = 0.0;
    for (std::size_t i = 0; i < arcs_.size(); ++i) {
        total += arcs_[i].length;
        const Arc& cur = arcs_[i];
        const Arc& nxt = arcs_[(i + 1) % arcs_.size()];
        double gap = wrap_pi(nxt.start - (cur.start + cur.length));
        if (arcs_.size() > 1 && !(gap > 0.0) )
            throw InputError("multicone: arc closures must be pairwise disjoint");
        if (arcs_.size() > 1) {
            // a gap that wraps past the next arc means the arcs interleave
            if (wrap_pi(nxt.start - cur.start) < cur.length)
                throw InputError("multicone: arcs overlap");
        }
    }
    if (!(total < pi)) throw InputError("multicone: arcs must not cover the circle");
}

double Multicone::total_length() const {
    double t = 0.0;
    for (const Arc& a : arcs_) t += a.length;
    return t;
}

bool Multicone::contains(double angle, double slack) const {
    for (const Arc& a : arcs_)
        if (a.contains(angle, slack)) return true;
    return false;
}

double act(const Mat2& m, double angle) {
    auto [x, y] = m.apply(std::cos(angle), std::sin(angle));
    return wrap_pi(std::atan2(y, x));
}

Arc image_arc(const Mat2& m, const Arc& a) {
    require_invertible(m);
    double p = act(m, a.start);
    double q = act(m, wrap_pi(a.start + a.length));
    double mid = act(m, a.midpoint());

    double len_pq = wrap_pi(q - p);
    // candidate 1 runs p -> q, candidate 2 runs q -> p; the true image
    // contains the midpoint image
    bool mid_in_1 = wrap_pi(mid - p) <= len_pq;
    double start = mid_in_1 ? p : q;
    double length = mid_in_1 ? len_pq : pi - len_pq;
    if (length <= 0.0 || length >= pi - 1e-12)
        throw NumericError("image_arc: image arc degenerated");
    return Arc(start, length);
}

double arc_gap(const Arc& a, const Arc& b) {
    double shift = wrap_pi(b.start - a.start);
    // b occupies [shift, shift+len_b] relative to a at [0, len_a], mod pi
    double overlap = 0.0;
    auto seg_overlap = [](double lo1, double hi1, double lo2, double hi2) {
        return std::max(0.0, std::min(hi1, hi2) - std::max(lo1, lo2));
    };
    overlap += seg_overlap(0.0, a.length, shift, shift + b.length);
    overlap += seg_overlap(0.0, a.length, shift - pi, shift - pi + b.length);
    if (overlap > 0.0) return -overlap;
    return std::min(shift - a.length, pi - shift - b.length);
}

MulticoneImage image_multicone(const Mat2& m, const Multicone& mc, double merge_tol) {
    std::vector<Arc> images;
    for (const Arc& a : mc.arcs()) images.push_back(image_arc(m, a));
    std::sort(images.begin(), images.end(),
              [](const Arc& x, const Arc& y) { return x.start < y.start; });

    bool merged = false;
    std::vector<Arc> out;
    for (const Arc& a : images) {
        if (!out.empty()) {
            double direct = wrap_pi(a.start - out.back().start);
            double gap = direct - out.back().length;
            if (gap < -merge_tol)
                throw NumericError("image_multicone: image arcs overlap");
            if (gap <= merge_tol) {
                // touching within tolerance: join into one arc
                double new_len = direct + a.length;
                if (new_len >= pi - 1e-12)
                    throw NumericError("image_multicone: merged image covers the circle");
                out.back() = Arc(out.back().start, new_len);
                merged = true;
                continue;
            }
        }
        out.push_back(a);
    }
    // wrap-around pair
    if (out.size() > 1) {
        double gap = wrap_pi(out.front().start - (out.back().start + out.back().length));
        if (gap <= merge_tol) {
            double new_len = wrap_pi(out.front().start - out.back().start) + out.front().length;
            if (new_len >= pi - 1e-12)
                throw NumericError("image_multicone: merged image covers the circle");
            Arc joined(out.back().start, new_len);
            out.pop_back();
            out.erase(out.begin());
            out.push_back(joined);
            merged = true;
        }
    }
    return {Multicone(std::move(out)), merged};
}

namespace {

// Clearance of `inner` inside `outer`: smallest end distance when contained,
// negative when it pokes out.  Containment judged by the midpoint.
double containment_clearance(const Arc& inner, const Multicone& outer) {
    double best = -infinity();
    for (const Arc& b : outer.arcs()) {
        if (!b.contains(inner.midpoint())) continue;
        double head = wrap_pi(inner.start - b.start);
        double tail = b.length - head - inner.length;
        best = std::max(best, std::min(head, tail));
    }
    return best;
}

}  // namespace

bool is_strictly_forward_invariant(const OneStepCocycle& A, const Multicone& mc,
                                   double delta) {
    if (!(delta > 0.0)) throw InputError("strict invariance: margin must be positive");
    for (int s = 1; s <= A.alphabet_size(); ++s) {
        for (const Arc& a : mc.arcs()) {
            Arc img = image_arc(A.generator(s), a);
            if (containment_clearance(img, mc) < delta) return false;
        }
    }
    return true;
}

Multicone complementary(const Multicone& mc) {
    const auto& arcs = mc.arcs();
    std::vector<Arc> gaps;
    for (std::size_t i = 0; i < arcs.size(); ++i) {
        const Arc& cur = arcs[i];
        const Arc& nxt = arcs[(i + 1) % arcs.size()];
        double gap_start = wrap_pi(cur.start + cur.length);
        double gap_len = wrap_pi(nxt.start - gap_start);
        if (arcs.size() == 1) gap_len = pi - cur.length;
        gaps.emplace_back(gap_start, gap_len);
    }
    return Multicone(std::move(gaps));
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        default: return "indeterminate";
    }
}

namespace {

// Smallest pairwise separation between the arcs of two multicones.
double multicone_separation(const Multicone& x, const Multicone& y) {
    double best = infinity();
    for (const Arc& a : x.arcs())
        for (const Arc& b : y.arcs()) best = std::min(best, arc_gap(a, b));
    return best;
}

NocReport pairwise_disjointness(const std::vector<Multicone>& images, double tol_angle) {
    NocReport rep{Verdict::Pass, infinity(), ""};
    for (std::size_t i = 0; i < images.size(); ++i)
        for (std::size_t j = i + 1; j < images.size(); ++j)
            rep.min_gap = std::min(rep.min_gap, multicone_separation(images[i], images[j]));
    if (images.size() < 2) {
        rep.reason = "single generator: no pairs to separate";
        return rep;
    }
    if (rep.min_gap < 0.0) {
        rep.verdict = Verdict::Fail;
        rep.reason = "image multicones overlap";
    } else if (rep.min_gap < tol_angle) {
        rep.verdict = Verdict::Indeterminate;
        rep.reason = "image separation below angular resolution";
    }
    return rep;
}

}  // namespace

NocReport check_forward_noc(const OneStepCocycle& A, const Multicone& mc, double delta,
                            double tol_angle) {
    if (!is_strictly_forward_invariant(A, mc, delta))
        return {Verdict::Fail, -infinity(), "multicone is not strictly forward invariant"};
    std::vector<Multicone> images;
    for (int s = 1; s <= A.alphabet_size(); ++s)
        images.push_back(image_multicone(A.generator(s), mc).cone);
    return pairwise_disjointness(images, tol_angle);
}

NocReport check_backward_noc(const OneStepCocycle& A, const Multicone& mc, double delta,
                             double tol_angle) {
    std::vector<Mat2> inverses;
    for (const Mat2& g : A.generators) inverses.push_back(g.inverse());
    OneStepCocycle B(std::move(inverses), dual_subshift(A.transitions));
    return check_forward_noc(B, complementary(mc), delta, tol_angle);
}

bool is_family_invariant(const OneStepCocycle& A, const MulticoneFamily& family,
                         double delta) {
    if (family.size() != A.alphabet_size())
        throw InputError("multicone family: one cone per symbol required");
    if (!(delta > 0.0)) throw InputError("family invariance: margin must be positive");
    for (int a = 1; a <= A.alphabet_size(); ++a) {
        for (int b = 1; b <= A.alphabet_size(); ++b) {
            if (!A.transitions.allows(a, b)) continue;
            for (const Arc& arc : family.cone(a).arcs()) {
                Arc img = image_arc(A.generator(b), arc);
                if (containment_clearance(img, family.cone(b)) < delta) return false;
            }
        }
    }
    return true;
}

NocReport check_subshift_noc(const OneStepCocycle& A, const MulticoneFamily& family,
                             double delta, double tol_angle) {
    if (!is_family_invariant(A, family, delta))
        return {Verdict::Fail, -infinity(), "family is not strictly invariant"};

    const int k = A.alphabet_size();
    NocReport rep{Verdict::Pass, infinity(), ""};

    // forward: images A_i(M_alpha), A_j(M_beta) for allowed alpha->i, beta->j, i != j
    std::vector<std::vector<std::optional<Multicone>>> img(k + 1);
    for (int a = 1; a <= k; ++a) {
        img[a].resize(k + 1);
        for (int i = 1; i <= k; ++i)
            if (A.transitions.allows(a, i))
                img[a][i] = image_multicone(A.generator(i), family.cone(a)).cone;
    }
    for (int a = 1; a <= k; ++a)
        for (int i = 1; i <= k; ++i) {
            if (!img[a][i]) continue;
            for (int b = 1; b <= k; ++b)
                for (int j = 1; j <= k; ++j) {
                    if (i >= j || !img[b][j]) continue;
                    rep.min_gap =
                        std::min(rep.min_gap, multicone_separation(*img[a][i], *img[b][j]));
                }
        }

    // backward: inverse of the consumed symbol acting on its complementary cone;
    // images for distinct consumed symbols must be disjoint
    std::vector<std::optional<Multicone>> back(k + 1);
    for (int t = 1; t <= k; ++t) {
        bool is_target = false;
        for (int s = 1; s <= k; ++s) is_target = is_target || A.transitions.allows(s, t);
        if (is_target)
            back[t] =
                image_multicone(A.generator(t).inverse(), complementary(family.cone(t))).cone;
    }
    for (int t = 1; t <= k; ++t)
        for (int u = t + 1; u <= k; ++u)
            if (back[t] && back[u])
                rep.min_gap = std::min(rep.min_gap, multicone_separation(*back[t], *back[u]));

    if (k < 2) {
        rep.reason = "single symbol: no pairs to separate";
        return rep;
    }
    if (rep.min_gap < 0.0) {
        rep.verdict = Verdict::Fail;
        rep.reason = "image multicones overlap";
    } else if (rep.min_gap < tol_angle) {
        rep.verdict = Verdict::Indeterminate;
        rep.reason = "image separation below angular resolution";
    }
    return rep;
}

}  // namespace lyapmax
