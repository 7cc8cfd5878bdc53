#pragma once

// Centrally symmetric polygonal unit balls and the gauge (Minkowski
// functional) they induce.  These are the finite approximations used for
// extremal norms: the unit ball is stored as its vertex list in angular
// order, and |x| = ||x||_2 / (radial extent of the boundary at x's angle).

#include <array>
#include <vector>

#include "lyapmax/mat2.hpp"

namespace lyapmax {

using Vec2 = std::array<double, 2>;

inline double cross2(const Vec2& u, const Vec2& v) { return u[0] * v[1] - u[1] * v[0]; }
inline double norm2(const Vec2& u) { return std::hypot(u[0], u[1]); }

// Polygonal norm: vertices of a centrally symmetric convex polygon (the unit
// ball) in angular order, plus the exponent the ball was balanced at.
struct PolygonalNorm {
    std::vector<Vec2> vertices;
    double beta_hat = 0.0;

    // Checks: even vertex count >= 4, central symmetry, convexity (collinear
    // chains allowed), origin strictly inside.
    void validate(double tol = 1e-9) const;
};

// Gauge evaluator with the angular preprocessing done once.  Works for any
// origin-star-shaped vertex list, so deliberately broken probe polygons can
// still be measured.
class PolygonGauge {
  public:
    explicit PolygonGauge(const std::vector<Vec2>& vertices);

    // Radial extent of the boundary at the given angle.
    double radial(double angle) const;
    // Minkowski functional: gauge(x) <= 1 iff x lies in the polygon.
    double gauge(const Vec2& x) const;
    // Induced operator norm: max over vertices u of gauge(M u).
    double operator_norm(const Mat2& m) const;

    double circumradius() const;
    double inradius() const;

  private:
    std::vector<Vec2> verts_;
    std::vector<double> angles_;  // ascending in [0, 2pi)
};

// max(circumradius, 1/inradius): the constant relating the polygonal norm to
// the Euclidean one on both sides.
double norm_equivalence_constant(const PolygonalNorm& norm);

// Convex hull of centrally symmetric points given in angular order; output
// keeps angular order and symmetry.
std::vector<Vec2> convex_hull_angular(std::vector<Vec2> points);

}  // namespace lyapmax
