#pragma once

// Certification toolbox: invariant-multicone search (the computable face of
// domination), the fast/slow direction splitting with its equivariance
// defects, pinching and twisting witnesses, polygonal extremal-norm
// approximation with a bisected growth rate, and the finite-memory additive
// potential whose Birkhoff sums shadow log-norms of products.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lyapmax/cocycle.hpp"
#include "lyapmax/polygon.hpp"
#include "lyapmax/projcone.hpp"
#include "lyapmax/symbolics.hpp"

namespace lyapmax {

// ---------------------------------------------------------------------------
// Invariant multicone search

struct MulticoneSearchResult {
    std::optional<Multicone> cone;      // present only when verified
    bool verified = false;              // strict invariance re-checked with the margin
    int iterations = 0;
    std::string diagnostic;             // why the search failed, when it did

    bool found() const { return verified && cone.has_value(); }
};

// Seeds arcs of the given radius around the image directions of maximal
// stretch of all admissible length-N products, then iterates
// "fatten(union of generator images)" until the arc system stabilizes.
// The result is only reported as found after is_strictly_forward_invariant
// passes with the requested margin.  Failure (circle covered, budget
// exhausted, margin not met) is a diagnostic result, not an exception.
MulticoneSearchResult find_invariant_multicone(const OneStepCocycle& A, int word_len = 3,
                                               double seed_radius = 0.05, double margin = 1e-3,
                                               int budget = 256);

struct FamilySearchResult {
    std::optional<MulticoneFamily> family;
    bool verified = false;
    int iterations = 0;
    std::string mode;                   // "per_symbol" or "inherited"
    std::string diagnostic;

    bool found() const { return verified && family.has_value(); }
};

// Per-symbol version for subshifts: cone M_b is seeded from products of
// admissible words ending in b and absorbs A_b-images of every allowed
// predecessor's cone.  If the per-symbol iteration fails, falls back to the
// shared full-shift multicone ("inherited" mode) when that one is invariant
// for the restricted transitions.
FamilySearchResult find_invariant_family(const OneStepCocycle& A, int word_len = 3,
                                         double seed_radius = 0.05, double margin = 1e-3,
                                         int budget = 256);

// ---------------------------------------------------------------------------
// Domination rate

struct DominationReport {
    // g[n-1] = max over admissible n-words of sigma2/sigma1 of the product.
    std::vector<double> table;
    double c_fit = 0.0;    // least-squares intercept exp(fit) at n = 0
    double tau_fit = 1.0;  // fitted geometric ratio per step
    bool dominated = false;
    bool monotone_tail = false;
};

// Worst-case singular-value-ratio decay over all admissible words of length
// 1..n_max, with a least-squares geometric fit of the table.
DominationReport check_domination_rate(const OneStepCocycle& A, int n_max);

// ---------------------------------------------------------------------------
// Splitting samples

struct SplittingSample {
    Word context;
    int past_len = 0;
    int future_len = 0;
    double e1 = 0.0;   // fast direction estimate, angle in [0, pi)
    double e2 = 0.0;   // slow direction estimate
    // Equivariance defect over one shift plus seed sensitivity, per direction.
    double residual_e1 = infinity();
    double residual_e2 = infinity();
    bool has_residual = false;
    bool ok = false;   // residuals below tolerance and e1 separated from e2

    double separation() const { return angular_distance(e1, e2); }
};

// e1 = push a reference direction of mc through the product along the past
// window; e2 = pull a reference of the complementary multicone back through
// the inverse of the future-window product.  The residuals compare against
// the same construction shifted by one symbol (needs p+q+1 context symbols)
// and against a second seed; failure to converge is reported in the sample.
SplittingSample compute_splitting(const OneStepCocycle& A, const Multicone& mc, int past_len,
                                  int future_len, const Word& context,
                                  double tol = 1e-6);
SplittingSample compute_splitting(const OneStepCocycle& A, const Multicone& mc, int past_len,
                                  int future_len, const CyclicWord& context,
                                  double tol = 1e-6);

// ---------------------------------------------------------------------------
// Pinching and twisting

struct PinchingResult {
    std::optional<Word> witness;  // first word (shortest, then lexicographic)
    double ratio = 1.0;           // sigma1/sigma2 of the witness, or the best seen
};

// Breadth-first search for an admissible word whose product has singular
// value ratio above 1 + tol_pinch.
PinchingResult check_pinching(const OneStepCocycle& A, int max_len,
                              double tol_pinch = defaults::tol_pinch);

struct TwistingResult {
    std::optional<Word> witness;
    double min_distance = 0.0;  // min angular distance from the image of F to G
    bool conclusive() const { return witness.has_value(); }
};

// Searches for an admissible word moving direction F off every direction in
// G (min angular distance > tol_angle): greedy generator choice first, then
// exhaustive scan to max_len.  No witness up to max_len is "inconclusive",
// never a refutation.
TwistingResult check_twisting(const OneStepCocycle& A, double F, const std::vector<double>& G,
                              int max_len, double tol_angle = defaults::tol_angle);

// ---------------------------------------------------------------------------
// Extremal (Barabanov-type) polygonal norms

struct BarabanovResult {
    PolygonalNorm norm;
    int iterations = 0;        // radial iterations in the successful attempt
    int bisection_steps = 0;
    bool reducible_warning = false;  // generators share an eigendirection
    double residual = 0.0;           // extremal residual at the polygon vertices
};

// Balances a centrally symmetric polygon so that the best one-step growth
// max_i |||A_i u||| equals e^{beta_hat} |||u||| on the boundary, with
// beta_hat located by bisection inside the bracket: too small collapses the
// ball, too large blows it up.  A shared eigendirection among the generators
// downgrades to a warning (the iteration may still converge, e.g. for
// {A, A^-1}); a ball degenerating to a needle is a numeric error.
BarabanovResult barabanov_norm(const OneStepCocycle& A, const ExponentBracket& bracket,
                               int n_vertices = defaults::barabanov_vertices,
                               double tol = defaults::barabanov_tol,
                               int budget = defaults::barabanov_budget);

// Max over boundary sample points u of |log(max_i |||A_i u|||) - beta_hat|.
// When n_grid matches the vertex count the polygon's own vertices are used,
// so a converged norm scores at the level of the iteration tolerance.
double extremal_residual(const PolygonalNorm& norm, const OneStepCocycle& A,
                         int n_grid = defaults::barabanov_vertices);

// ---------------------------------------------------------------------------
// Additive potential

struct AdditivePotential {
    int window = 0;  // m: number of symbols each table entry depends on
    // Admissible m-words with their values, sorted by word for lookup.
    std::vector<std::pair<Word, double>> table;
    double lambda_hat = 1.0;  // measured multicone-diameter contraction per step
    double ref_angle = 0.0;   // reference direction the windows were pushed from

    double value(const Word& w) const;  // exact-window lookup
};

// Locally constant potential on m-windows: the last symbol of the window is
// the one applied, the first m-1 symbols are the immediate past (oldest
// first) used to push the reference direction to a finite-memory surrogate
// of the fast direction.  Birkhoff sums of the result shadow log-norms of
// products with an O(lambda_hat^m) per-step defect.
AdditivePotential cuneo_potential(const OneStepCocycle& A, const Multicone& mc, int window);

// Sum of table lookups over all length-m windows: a linear word of length L
// contributes L - m + 1 windows (input error if L < m); a cyclic word always
// contributes exactly its period, wrapping around.
double birkhoff_sum(const AdditivePotential& f, const Word& w);
double birkhoff_sum(const AdditivePotential& f, const CyclicWord& w);

}  // namespace lyapmax
