#pragma once

// Shared fixtures for the unit tests: the reference generator pairs that the
// bundled configs and most examples are built around.

#include <vector>

#include "lyapmax/cocycle.hpp"
#include "lyapmax/mat2.hpp"
#include "lyapmax/projcone.hpp"
#include "lyapmax/symbolics.hpp"

namespace testsupport {

// Hyperbolic pair with separated attractors: the workhorse example.  Both
// generators are symmetric with eigenvalues 3 +- 2*sqrt(2); the second is the
// coordinate-swap conjugate of the first.
inline lyapmax::OneStepCocycle separated_pair() {
    return lyapmax::OneStepCocycle({lyapmax::Mat2{5, 2, 2, 1}, lyapmax::Mat2{1, 2, 2, 5}});
}

// The same generators restricted by the golden-mean rule (no 2 after 2).
inline lyapmax::OneStepCocycle golden_mean_pair() {
    return lyapmax::OneStepCocycle(
        {lyapmax::Mat2{5, 2, 2, 1}, lyapmax::Mat2{1, 2, 2, 5}},
        lyapmax::TransitionMatrix::subshift(2, {1, 1, 1, 0}));
}

// Shared-eigendirection pair: both generators the same diagonal matrix.
inline lyapmax::OneStepCocycle degenerate_pair() {
    return lyapmax::OneStepCocycle({lyapmax::Mat2{2, 0, 0, 1}, lyapmax::Mat2{2, 0, 0, 1}});
}

inline lyapmax::Mat2 rotation(double t) {
    return {std::cos(t), -std::sin(t), std::sin(t), std::cos(t)};
}

// The quadrant of directions with equal component signs: the canonical fat
// invariant cone for positive-entry generator pairs.
inline lyapmax::Multicone quadrant_cone() {
    return lyapmax::Multicone({lyapmax::Arc(0.0, 0.5 * lyapmax::pi)});
}

// Frozen reference values (computed independently before the implementation
// was written; see the matching checks for what each one pins down).
namespace oracle {
inline constexpr double log_growth = 1.7627471740390861;  // log(3 + 2*sqrt(2))
inline constexpr double golden_entropy = 0.4812118250596035;  // log((1 + sqrt 5)/2)
inline constexpr double atan_2_5 = 0.3805063771123649;
inline constexpr double atan_1_2 = 0.4636476090008061;
inline constexpr double atan_2 = 1.1071487177940904;
inline constexpr double atan_5_2 = 1.1902899496825317;
inline constexpr double quadrant_noc_gap = 0.6435011087932843;  // atan 2 - atan(1/2)
}  // namespace oracle

}  // namespace testsupport
