#pragma once

// Geometry on the projective circle: directions in [0, pi), closed arcs,
// multicones (disjoint unions of arcs), and the projective action of
// invertible 2x2 matrices.  All of the separation logic used by the
// no-overlap certificates lives here.

#include <optional>
#include <string>
#include <vector>

#include "lyapmax/cocycle.hpp"
#include "lyapmax/mat2.hpp"

namespace lyapmax {

// Closed arc [start, start + length] on the projective circle (period pi).
struct Arc {
    double start;   // in [0, pi)
    double length;  // in (0, pi)

    Arc(double s, double len);
    double end() const { return wrap_pi(start + length); }
    double midpoint() const { return wrap_pi(start + 0.5 * length); }
    bool contains(double angle, double slack = 0.0) const;
};

// Sorted union of arcs with pairwise disjoint closures, covering strictly
// less than the whole circle.
class Multicone {
  public:
    explicit Multicone(std::vector<Arc> arcs);

    const std::vector<Arc>& arcs() const { return arcs_; }
    int components() const { return static_cast<int>(arcs_.size()); }
    double total_length() const;
    bool contains(double angle, double slack = 0.0) const;

  private:
    std::vector<Arc> arcs_;
};

// Image direction of `angle` under the projective action of m.
double act(const Mat2& m, double angle);

// Image of an arc: endpoints map to endpoints; of the two candidate arcs
// joining them, the one containing the image of the midpoint is the image
// (this also resolves the orientation-reversing det < 0 case).  Throws
// NumericError if the image degenerates to (almost) the full circle.
Arc image_arc(const Mat2& m, const Arc& a);

struct MulticoneImage {
    Multicone cone;
    bool merged;  // true when two image arcs touched within merge_tol and were joined
};

// Componentwise image; arcs that touch within merge_tol are merged (flagged),
// genuine overlap beyond the tolerance raises NumericError.
MulticoneImage image_multicone(const Mat2& m, const Multicone& mc,
                               double merge_tol = defaults::merge_tol);

// Every generator must map mc into its interior with angular clearance >= delta
// at both ends of every image arc.
bool is_strictly_forward_invariant(const OneStepCocycle& A, const Multicone& mc,
                                   double delta);

// Closure of the complement; an involution (up to roundoff) with the same
// number of components.
Multicone complementary(const Multicone& mc);

enum class Verdict { Pass, Fail, Indeterminate };
const char* to_string(Verdict v);

// Outcome of a no-overlap check.  min_gap is the smallest angular separation
// between image arcs of distinct generators (negative = overlap by that
// amount); configurations with 0 <= min_gap < tol_angle are reported
// Indeterminate rather than guessed.
struct NocReport {
    Verdict verdict;
    double min_gap;
    std::string reason;
    bool passed() const { return verdict == Verdict::Pass; }
};

NocReport check_forward_noc(const OneStepCocycle& A, const Multicone& mc,
                            double delta = defaults::margin,
                            double tol_angle = defaults::tol_angle);

// Forward check for the inverse generators acting on the complementary
// multicone (the backward certificate).
NocReport check_backward_noc(const OneStepCocycle& A, const Multicone& mc,
                             double delta = defaults::margin,
                             double tol_angle = defaults::tol_angle);

// One multicone per symbol, indexed 1..k.
struct MulticoneFamily {
    std::vector<Multicone> cones;
    const Multicone& cone(int symbol) const { return cones[symbol - 1]; }
    int size() const { return static_cast<int>(cones.size()); }
};

// Transition-respecting invariance: alpha -> beta requires A_beta to map
// M_alpha strictly inside M_beta with clearance delta.
bool is_family_invariant(const OneStepCocycle& A, const MulticoneFamily& family,
                         double delta);

// Transition-refined no-overlap certificate: images A_i(M_alpha) and
// A_j(M_beta) must be disjoint for every pair of allowed transitions
// alpha -> i, beta -> j with i != j, plus the backward analogue (inverse
// generators on the complementary family, consumed symbols distinct).
// With a single shared multicone over the full shift this reduces exactly to
// check_forward_noc AND check_backward_noc.
NocReport check_subshift_noc(const OneStepCocycle& A, const MulticoneFamily& family,
                             double delta = defaults::margin,
                             double tol_angle = defaults::tol_angle);

// Signed separation of two arcs: smallest positive gap between their
// closures when disjoint, minus the overlap measure when they intersect.
double arc_gap(const Arc& a, const Arc& b);

}  // namespace lyapmax
