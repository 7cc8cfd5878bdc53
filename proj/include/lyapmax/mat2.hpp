#pragma once

//  2x2 real matrix kernel.
//
//  Everything downstream (exponent brackets, cone images, extremal norms)
//  reduces to a handful of closed-form facts about a real 2x2 matrix
//  M = [[a, b], [c, d]]:
//
//    * singular values: with E=(a+d)/2, F=(a-d)/2, G=(b+c)/2, H=(b-c)/2 and
//      Q=hypot(E,H), R=hypot(F,G), the singular values are Q+R and |Q-R|.
//      This form is exact for either sign of det(M) and avoids cancellation
//      in M^T M.
//    * spectral radius: from trace t and determinant D,
//      disc = t^2 - 4D;  real case rho = (|t| + sqrt(disc))/2, complex case
//      rho = sqrt(D)  (D > 0 whenever the eigenvalues are non-real).
//    * top right-singular direction: half-angle of atan2(2(ab+cd),
//      (a^2+c^2)-(b^2+d^2)), the eigen-direction of M^T M.
//
//  Long products of generators overflow double range around length ~500, so
//  products are accumulated as ScaledMat2: a matrix with entries kept near
//  O(1) plus a separate accumulated log scale.

#include <array>
#include <cmath>

#include "lyapmax/common.hpp"

namespace lyapmax {

struct Mat2 {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;  // row-major [[a,b],[c,d]]

    constexpr double det() const { return a * d - b * c; }
    constexpr double trace() const { return a + d; }

    double max_abs() const {
        return std::max(std::max(std::abs(a), std::abs(b)),
                        std::max(std::abs(c), std::abs(d)));
    }

    // Largest singular value (operator 2-norm).
    double sigma1() const {
        double E = 0.5 * (a + d), F = 0.5 * (a - d);
        double G = 0.5 * (b + c), H = 0.5 * (b - c);
        return std::hypot(E, H) + std::hypot(F, G);
    }

    // Smallest singular value.
    double sigma2() const {
        double E = 0.5 * (a + d), F = 0.5 * (a - d);
        double G = 0.5 * (b + c), H = 0.5 * (b - c);
        return std::abs(std::hypot(E, H) - std::hypot(F, G));
    }

    std::array<double, 2> singular_values() const { return {sigma1(), sigma2()}; }

    // Largest eigenvalue modulus.
    double spectral_radius() const {
        double t = trace(), D = det();
        double disc = t * t - 4.0 * D;
        if (disc >= 0.0) return 0.5 * (std::abs(t) + std::sqrt(disc));
        return std::sqrt(D);  // complex pair: |lambda|^2 = det
    }

    // Direction (angle in [0,pi)) maximizing |M v| over unit v.  Arbitrary
    // (returns 0) when the matrix is a similarity, i.e. sigma1 == sigma2.
    double top_right_singular_direction() const {
        double num = 2.0 * (a * b + c * d);
        double den = (a * a + c * c) - (b * b + d * d);
        if (num == 0.0 && den == 0.0) return 0.0;
        return wrap_pi(0.5 * std::atan2(num, den));
    }

    Mat2 inverse() const {
        double D = det();
        if (D == 0.0) throw InputError("Mat2: singular matrix has no inverse");
        return {d / D, -b / D, -c / D, a / D};
    }

    Mat2 transpose() const { return {a, c, b, d}; }

    friend Mat2 operator*(const Mat2& x, const Mat2& y) {
        return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
                x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
    }
    friend Mat2 operator*(double s, const Mat2& m) {
        return {s * m.a, s * m.b, s * m.c, s * m.d};
    }

    std::array<double, 2> apply(double x, double y) const {
        return {a * x + b * y, c * x + d * y};
    }
};

// Rejects matrices that are singular relative to their own scale.
inline void require_invertible(const Mat2& m, double rel_tol = 1e-14) {
    double scale = m.max_abs();
    if (scale == 0.0 || std::abs(m.det()) <= rel_tol * scale * scale)
        throw InputError("matrix is singular or nearly singular");
}

// A matrix held as  exp(log_scale) * m  with entries of m kept near O(1).
struct ScaledMat2 {
    Mat2 m;
    double log_scale = 0.0;

    static ScaledMat2 identity() { return {}; }

    void renormalize() {
        double s = m.max_abs();
        if (s > 1e8 || (s > 0.0 && s < 1e-8)) {
            m = (1.0 / s) * m;
            log_scale += std::log(s);
        }
    }

    // Left-multiply by a generator: extends the word by one later symbol.
    void apply_left(const Mat2& g) {
        m = g * m;
        renormalize();
    }

    double log_norm() const { return std::log(m.sigma1()) + log_scale; }
    double log_spectral_radius() const { return std::log(m.spectral_radius()) + log_scale; }
    double log_det_abs() const { return std::log(std::abs(m.det())) + 2.0 * log_scale; }

    // sigma2/sigma1 of the underlying matrix; invariant under the scaling.
    double singular_ratio() const { return m.sigma2() / m.sigma1(); }

    // Collapses back to a plain matrix; may overflow for very long words.
    Mat2 to_mat2() const {
        double s = std::exp(log_scale);
        return s * m;
    }
};

}  // namespace lyapmax
