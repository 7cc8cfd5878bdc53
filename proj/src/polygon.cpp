#include "lyapmax/polygon.hpp"

#include <algorithm>
#include <cmath>

#include "lyapmax/common.hpp"

namespace lyapmax {

namespace {

constexpr double two_pi = 2.0 * pi;

double angle_of(const Vec2& v) {
    double a = std::atan2(v[1], v[0]);
    if (a < 0.0) a += two_pi;
    if (a >= two_pi) a = 0.0;
    return a;
}

}  // namespace

void PolygonalNorm::validate(double tol) const {
    const std::size_t n = vertices.size();
    if (n < 4 || n % 2 != 0)
        throw InputError("polygonal norm needs an even vertex count of at least 4");
    double scale = 0.0;
    for (const auto& v : vertices) scale = std::max(scale, std::max(std::abs(v[0]), std::abs(v[1])));
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw InputError("polygonal norm has non-finite or all-zero vertices");
    const std::size_t half = n / 2;
    for (std::size_t i = 0; i < half; ++i) {
        const Vec2& v = vertices[i];
        const Vec2& w = vertices[i + half];
        if (std::abs(v[0] + w[0]) > tol * scale || std::abs(v[1] + w[1]) > tol * scale)
            throw InputError("polygonal norm is not centrally symmetric");
    }
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = vertices[i];
        const Vec2& b = vertices[(i + 1) % n];
        const Vec2& c = vertices[(i + 2) % n];
        const Vec2 e1{b[0] - a[0], b[1] - a[1]};
        const Vec2 e2{c[0] - b[0], c[1] - b[1]};
        if (cross2(e1, e2) < -tol * scale * scale)
            throw InputError("polygonal norm is not convex");
        if (cross2(a, b) <= tol * scale * scale * 1e-6)
            throw InputError("polygonal norm does not wind positively around the origin");
    }
}

PolygonGauge::PolygonGauge(const std::vector<Vec2>& vertices) {
    if (vertices.size() < 3) throw InputError("gauge needs at least 3 polygon vertices");
    // Rotate the minimal angle to the front, then drop exact angular
    // duplicates (keeping the farther point) so the wedge search is clean.
    std::vector<std::pair<double, Vec2>> tagged;
    tagged.reserve(vertices.size());
    for (const auto& v : vertices) {
        if (!std::isfinite(v[0]) || !std::isfinite(v[1]))
            throw InputError("polygon vertex is not finite");
        if (norm2(v) <= 0.0) throw InputError("polygon vertex at the origin");
        tagged.emplace_back(angle_of(v), v);
    }
    std::size_t lo = 0;
    for (std::size_t i = 1; i < tagged.size(); ++i)
        if (tagged[i].first < tagged[lo].first) lo = i;
    std::rotate(tagged.begin(), tagged.begin() + static_cast<std::ptrdiff_t>(lo), tagged.end());
    for (std::size_t i = 0; i + 1 < tagged.size(); ++i) {
        if (tagged[i + 1].first < tagged[i].first)
            throw InputError("polygon vertices are not in angular order");
    }
    for (const auto& [a, v] : tagged) {
        if (!angles_.empty() && a == angles_.back()) {
            if (norm2(v) > norm2(verts_.back())) verts_.back() = v;
            continue;
        }
        angles_.push_back(a);
        verts_.push_back(v);
    }
    if (verts_.size() < 3) throw InputError("polygon collapsed to fewer than 3 distinct directions");
}

double PolygonGauge::radial(double angle) const {
    double a = std::fmod(angle, two_pi);
    if (a < 0.0) a += two_pi;
    // Wedge containing the query direction: angles_[i] <= a < angles_[i+1],
    // with wrap-around below angles_[0] / above angles_.back().
    std::size_t i;
    if (a < angles_.front() || a >= angles_.back()) {
        i = angles_.size() - 1;
    } else {
        i = static_cast<std::size_t>(
                std::upper_bound(angles_.begin(), angles_.end(), a) - angles_.begin()) -
            1;
    }
    const Vec2& va = verts_[i];
    const Vec2& vb = verts_[(i + 1) % verts_.size()];
    const Vec2 e{std::cos(a), std::sin(a)};
    const Vec2 edge{vb[0] - va[0], vb[1] - va[1]};
    const double denom = cross2(e, edge);
    const double numer = cross2(va, vb);
    const double scale = std::max(norm2(va), norm2(vb));
    if (std::abs(denom) <= 1e-15 * scale) {
        // Edge is (numerically) radial; either endpoint bounds the ray.
        return scale;
    }
    const double s = numer / denom;
    if (!std::isfinite(s) || s <= 0.0) return scale;
    return s;
}

double PolygonGauge::gauge(const Vec2& x) const {
    const double r = norm2(x);
    if (r == 0.0) return 0.0;
    return r / radial(std::atan2(x[1], x[0]));
}

double PolygonGauge::operator_norm(const Mat2& m) const {
    double best = 0.0;
    for (const auto& v : verts_) {
        const auto [x, y] = m.apply(v[0], v[1]);
        best = std::max(best, gauge({x, y}));
    }
    return best;
}

double PolygonGauge::circumradius() const {
    double r = 0.0;
    for (const auto& v : verts_) r = std::max(r, norm2(v));
    return r;
}

double PolygonGauge::inradius() const {
    double r = infinity();
    const std::size_t n = verts_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = verts_[i];
        const Vec2& b = verts_[(i + 1) % n];
        const Vec2 edge{b[0] - a[0], b[1] - a[1]};
        const double len = norm2(edge);
        if (len <= 0.0) continue;
        r = std::min(r, std::abs(cross2(a, b)) / len);
    }
    return r;
}

double norm_equivalence_constant(const PolygonalNorm& norm) {
    PolygonGauge g(norm.vertices);
    const double r_out = g.circumradius();
    const double r_in = g.inradius();
    if (!(r_in > 0.0)) throw NumericError("degenerate polygonal norm: zero inradius");
    return std::max(r_out, 1.0 / r_in);
}

std::vector<Vec2> convex_hull_angular(std::vector<Vec2> points) {
    if (points.size() < 3) return points;
    std::vector<Vec2> pts = points;
    std::sort(pts.begin(), pts.end(), [](const Vec2& p, const Vec2& q) {
        return p[0] < q[0] || (p[0] == q[0] && p[1] < q[1]);
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;

    // Andrew monotone chain, strict turns (collinear points dropped).
    auto build = [](const std::vector<Vec2>& src, std::vector<Vec2>& out) {
        for (const auto& p : src) {
            while (out.size() >= 2) {
                const Vec2& a = out[out.size() - 2];
                const Vec2& b = out[out.size() - 1];
                if (cross2({b[0] - a[0], b[1] - a[1]}, {p[0] - a[0], p[1] - a[1]}) <= 0.0)
                    out.pop_back();
                else
                    break;
            }
            out.push_back(p);
        }
    };
    std::vector<Vec2> lower, upper;
    build(pts, lower);
    std::vector<Vec2> rev(pts.rbegin(), pts.rend());
    build(rev, upper);
    lower.pop_back();
    upper.pop_back();
    std::vector<Vec2> hull = lower;
    hull.insert(hull.end(), upper.begin(), upper.end());
    if (hull.size() < 3) return hull;

    // Counter-clockwise angular order starting at the smallest angle.
    std::size_t lo = 0;
    for (std::size_t i = 1; i < hull.size(); ++i)
        if (angle_of(hull[i]) < angle_of(hull[lo])) lo = i;
    std::rotate(hull.begin(), hull.begin() + static_cast<std::ptrdiff_t>(lo), hull.end());
    return hull;
}

}  // namespace lyapmax
