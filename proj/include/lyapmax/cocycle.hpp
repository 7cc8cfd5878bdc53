#pragma once

// One-step matrix cocycles over a finite-type shift, and the two-sided
// bracket on the maximal growth exponent.
//
// Product convention: a word w = (w_1, ..., w_n) lists symbols in the order
// they are read, and the associated product is A_w = A_{w_n} ... A_{w_1} --
// the matrix of the first symbol acts first (rightmost factor).

#include <functional>
#include <optional>
#include <vector>

#include "lyapmax/mat2.hpp"
#include "lyapmax/symbolics.hpp"

namespace lyapmax {

struct OneStepCocycle {
    std::vector<Mat2> generators;   // generators[i] drives symbol i+1
    TransitionMatrix transitions;   // defaults to the full shift

    OneStepCocycle(std::vector<Mat2> gens, std::optional<TransitionMatrix> Q = std::nullopt);

    int alphabet_size() const { return static_cast<int>(generators.size()); }
    const Mat2& generator(int symbol) const { return generators[symbol - 1]; }
};

// Two-sided enclosure of the maximal exponent: lower comes from a periodic
// orbit (certified), upper from a finite norm scan.
struct ExponentBracket {
    double lower;
    double upper;
    int n_lower;  // necklace length cutoff that produced `lower`
    int n_upper;  // word length cutoff that produced `upper`
    Word witness;                    // canonical representative of a best necklace
    std::vector<Word> co_witnesses;  // all necklaces tied within tie_tol

    ExponentBracket(double lo, double up, int nl, int nu, Word wit, std::vector<Word> cow);
    double width() const { return upper - lower; }
    double midpoint() const { return 0.5 * (lower + upper); }
};

// Heuristic enclosure of the *minimal* exponent.  The periodic value is a
// certified upper bound for the infimum; the word-norm value is only a
// heuristic lower estimate (min norms are not supermultiplicative), so this
// is deliberately not an ExponentBracket.
struct AlphaEstimate {
    double upper_certified;        // min over necklaces of the periodic exponent
    Word upper_witness;
    double lower_heuristic;        // (1/n) log min over admissible n-words of |A_w|
    int n;
};

ScaledMat2 scaled_word_product(const OneStepCocycle& A, const Word& w);
Mat2 word_product(const OneStepCocycle& A, const Word& w);

std::array<double, 2> singular_values(const Mat2& m);

// (1/n) log spectral_radius(A_c) for a cyclic word c of length n.
double periodic_exponent(const OneStepCocycle& A, const CyclicWord& c);

// (1/n) log max over admissible n-words of |A_w|.
double beta_upper(const OneStepCocycle& A, int n);

struct BetaLowerResult {
    double value;
    Word witness;                    // first-found (shortest, then lexicographic)
    std::vector<Word> co_witnesses;  // every necklace within tie_tol of the max
};

// max over primitive necklaces of length <= n of the periodic exponent.
BetaLowerResult beta_lower(const OneStepCocycle& A, int n,
                           double tie_tol = defaults::tie_tol);

// Certified enclosure: beta_lower(n_lower) <= beta <= min_{m <= n_upper} beta_upper(m).
ExponentBracket exponent_bracket(const OneStepCocycle& A, int n_lower, int n_upper,
                                 double tie_tol = defaults::tie_tol);

AlphaEstimate alpha_bounds(const OneStepCocycle& A, int n);

// min over admissible pairs (u, v) with |u|, |v| <= n and uv admissible of
// |A_{uv}| / (|A_u| |A_v|).  Exhaustive through n = exhaustive_up_to; beyond
// that the pair space is thinned to at most pair_budget pairs by a
// deterministic uniform stride.
struct AlmostMultiplicativity {
    double kappa;
    Word arg_u, arg_v;
    bool exhaustive;
    long pairs_examined;
};
AlmostMultiplicativity almost_multiplicativity_constant(const OneStepCocycle& A, int n,
                                                        int exhaustive_up_to = 5,
                                                        long pair_budget = 1024);

// Visits every admissible word of length exactly n together with its product,
// in lexicographic order, reusing prefix products.  Honors the THREADS
// environment variable (prefix partitioning; the visit callbacks of a single
// scan run on the partition owner's thread, and per-thread results are
// reduced deterministically by the callers in this module).
void scan_word_products(const OneStepCocycle& A, int n,
                        const std::function<void(const Word&, const ScaledMat2&)>& visit);

int worker_count();  // THREADS env var, clamped to [1, hardware]

}  // namespace lyapmax
