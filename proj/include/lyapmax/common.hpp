#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace lyapmax {

// Thrown when a caller hands us data that violates a documented precondition
// (bad transition matrix, singular generator, malformed config, ...).
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when an algorithm cannot reach its stated tolerance (iteration
// budget exhausted, degenerate geometry discovered mid-run, ...).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Default tolerances and budgets, collected in one place.  Individual
// operations take these as defaulted parameters so tests can tighten or
// loosen them without recompiling.
namespace defaults {
inline constexpr double tol_angle      = 1e-9;   // angular comparisons on the projective circle
inline constexpr double margin         = 1e-6;   // strict-invariance clearance
inline constexpr double tol_pinch      = 1e-6;   // singular-value ratio threshold
inline constexpr double tie_tol        = 1e-9;   // orbit-value ties
inline constexpr double barabanov_tol  = 1e-6;   // extremal-ball convergence (sup radial change)
inline constexpr int    barabanov_vertices = 720;
inline constexpr int    barabanov_budget   = 10000;
inline constexpr double entropy_tol    = 1e-12;  // Perron eigenvalue, relative
inline constexpr long   entropy_budget = 1000000;
inline constexpr double merge_tol      = 1e-12;  // arc-merge detection in image multicones
}  // namespace defaults

inline constexpr double pi = 3.14159265358979323846;

// Reduce an angle to the projective fundamental domain [0, pi).
inline double wrap_pi(double x) {
    double y = x - pi * std::floor(x / pi);
    if (y >= pi) y -= pi;      // guards the x = -eps rounding case
    if (y < 0.0) y = 0.0;
    return y;
}

// Distance between two projective directions, in [0, pi/2].
inline double angular_distance(double a, double b) {
    double d = wrap_pi(a - b);
    return std::min(d, pi - d);
}

inline constexpr double infinity() { return std::numeric_limits<double>::infinity(); }

}  // namespace lyapmax
