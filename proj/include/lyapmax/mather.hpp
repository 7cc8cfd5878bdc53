#pragma once

// Ergodic optimization proper: the periodic orbits attaining the maximal
// exponent, a finite norm-thresholded approximation of the set of
// near-optimal trajectories together with its topological entropy, projective
// cross-ratio and norm-monotonicity certificates at optimal pairs, and the
// comparison between product maximizers and additive-potential maximizers.

#include <optional>
#include <vector>

#include "lyapmax/certify.hpp"
#include "lyapmax/cocycle.hpp"
#include "lyapmax/polygon.hpp"
#include "lyapmax/projcone.hpp"
#include "lyapmax/symbolics.hpp"

namespace lyapmax {

// ---------------------------------------------------------------------------
// Maximizing periodic orbits

struct MaximizingOrbits {
    double value = -infinity();      // the maximal periodic exponent found
    std::vector<CyclicWord> orbits;  // every necklace within tie_tol of it
};

// Exhaustive scan of primitive necklaces up to max_len.  The value agrees
// exactly with the certified lower exponent bound at the same cutoff.
MaximizingOrbits maximizing_orbits(const OneStepCocycle& A, int max_len,
                                   double tie_tol = defaults::tie_tol);

// ---------------------------------------------------------------------------
// Finite approximation of the near-optimal word set

struct MatherApprox {
    int n = 0;
    double epsilon = 0.0;
    double beta_hat = 0.0;     // rate the filter was anchored to (bracket midpoint)
    double threshold = 0.0;    // per-step cutoff actually applied (epsilon widened
                               // by the bracket width, so true maximizers survive)
    bool norm_filter = false;  // operator norm induced by a polygonal norm vs Euclidean
    std::vector<Word> survivors;
    // Overlap graph on (n-1)-word states, trimmed to its bi-infinite part;
    // absent when no survivor chains into a cycle.
    std::vector<Word> states;
    std::optional<TransitionMatrix> graph;
    double entropy_estimate = 0.0;
};

// Survivors are the admissible n-words whose per-step log operator norm
// reaches beta_hat - (epsilon + bracket width); consecutive survivors are
// chained by (n-1)-symbol overlaps (de Bruijn construction) and the entropy
// of the trimmed chain graph is the headline estimate.  Empty survivor sets
// raise an input error suggesting a larger epsilon.
MatherApprox mather_word_set(const OneStepCocycle& A, const PolygonalNorm* norm,
                             const ExponentBracket& bracket, int n, double epsilon);

struct EntropyCell {
    int n = 0;
    double epsilon = 0.0;
    long survivors = 0;
    double entropy = 0.0;
};

struct EntropyCurve {
    std::vector<EntropyCell> cells;  // ordered by epsilon list, then n list
};

EntropyCurve entropy_scaling_curve(const OneStepCocycle& A, const PolygonalNorm* norm,
                                   const ExponentBracket& bracket,
                                   const std::vector<int>& n_list,
                                   const std::vector<double>& eps_list);

// ---------------------------------------------------------------------------
// Cross-ratio and monotonicity certificates

// (a x c)/(a x d) * (b x d)/(b x c) with x the planar cross product; input
// error when a denominator vanishes (three arguments projectively collinear).
double cross_ratio(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

// A maximizing necklace with the vector realizing its growth (top
// eigendirection of the orbit product) and the contracting direction at the
// same point.
struct OptimalPair {
    CyclicWord orbit;
    Vec2 v{1.0, 0.0};
    double v_angle = 0.0;
    double e2_angle = 0.0;
    bool splitting_ok = false;  // the e2 construction converged
};

// Builds one pair per maximizing necklace: v from the orbit product's top
// eigendirection, e2 from long-window splitting along the periodic context.
// Orbits whose product has no real dominant eigendirection are skipped.
std::vector<OptimalPair> build_optimal_pairs(const OneStepCocycle& A, const Multicone& mc,
                                             int max_len,
                                             double tie_tol = defaults::tie_tol,
                                             int window = 24);

struct CrossRatioCertificate {
    double min_abs = infinity();  // min |cross ratio| over ordered pairs
    long pairs_checked = 0;
    long pairs_skipped = 0;  // degenerate alignments excluded with a warning

    bool passed(double tol = 1e-6) const {
        return pairs_checked > 0 && min_abs >= 1.0 - tol;
    }
};

// min over all ordered pairs ((x, v1), (y, w1)) — self-pairs included — of
// |[v1, w1; v2, w2]| where v2/w2 are the contracting directions.
CrossRatioCertificate verify_cross_ratio_certificate(const std::vector<OptimalPair>& pairs);

struct MonotonicityCheck {
    bool passed = false;
    bool u_in_cone = false;  // informational: u may leave the multicone
    double gauge_v = 0.0;
    double gauge_u = 0.0;
};

// Checks |||v||| <= |||u||| + tol for u = v + t * e2: the optimal vector
// minimizes the extremal norm along its contracting fiber.  u must differ
// from v only along e2 (input error otherwise); leaving the multicone is
// reported, not rejected.
MonotonicityCheck verify_norm_monotonicity(const PolygonalNorm& norm, const OptimalPair& sample,
                                           const Multicone& mc, const Vec2& u,
                                           double tol = 1e-9);

// ---------------------------------------------------------------------------
// Maximizer comparison

struct MaximizerComparison {
    enum class Verdict { Equal, Unequal, Inconclusive };
    Verdict verdict = Verdict::Inconclusive;
    double defect = 0.0;  // max |periodic exponent - potential average| over the scan
    double gap = infinity();  // best minus second-best distinct exponent value
    std::vector<CyclicWord> orbit_maximizers;
    std::vector<CyclicWord> potential_maximizers;

    bool equal() const { return verdict == Verdict::Equal; }
};

const char* to_string(MaximizerComparison::Verdict v);

// Compares the necklaces maximizing the periodic exponent with those
// maximizing the potential's per-step Birkhoff average, both over lengths
// <= max_len.  The potential side tolerates the measured finite-window
// defect on top of tie_tol (the defect shifts exactly-tied orbits apart);
// the verdict is only Equal/Unequal when the defect is below half the
// spectral gap, otherwise Inconclusive at this window.
MaximizerComparison compare_maximizers(const OneStepCocycle& A, const AdditivePotential& f,
                                       int max_len, double tie_tol = defaults::tie_tol);

}  // namespace lyapmax
