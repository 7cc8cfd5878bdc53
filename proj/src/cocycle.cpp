#include "lyapmax/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace lyapmax {

OneStepCocycle::OneStepCocycle(std::vector<Mat2> gens, std::optional<TransitionMatrix> Q)
    : generators(std::move(gens)),
      transitions(Q ? *Q : TransitionMatrix::full_shift(static_cast<int>(generators.size()))) {
    if (generators.empty()) throw InputError("cocycle: needs at least one generator");
    for (const auto& g : generators) require_invertible(g);
    if (transitions.size() != alphabet_size())
        throw InputError("cocycle: transition matrix size does not match generator count");
    if (!transitions.is_proper())
        throw InputError("cocycle: transition matrix has a dead symbol");
}

ExponentBracket::ExponentBracket(double lo, double up, int nl, int nu, Word wit,
                                 std::vector<Word> cow)
    : lower(lo), upper(up), n_lower(nl), n_upper(nu), witness(std::move(wit)),
      co_witnesses(std::move(cow)) {
    if (!(lower <= upper + 1e-12))
        throw NumericError("exponent bracket: lower bound exceeds upper bound");
}

ScaledMat2 scaled_word_product(const OneStepCocycle& A, const Word& w) {
    if (w.syms.empty()) throw InputError("word product: empty word");
    if (!is_admissible(A.transitions, w)) throw InputError("word product: word not admissible");
    ScaledMat2 p;
    for (int s : w.syms) p.apply_left(A.generator(s));
    return p;
}

Mat2 word_product(const OneStepCocycle& A, const Word& w) {
    return scaled_word_product(A, w).to_mat2();
}

std::array<double, 2> singular_values(const Mat2& m) { return m.singular_values(); }

double periodic_exponent(const OneStepCocycle& A, const CyclicWord& c) {
    ScaledMat2 p = scaled_word_product(A, c.word());
    return p.log_spectral_radius() / c.length();
}

int worker_count() {
    const char* env = std::getenv("THREADS");
    if (!env) return 1;
    int n = std::atoi(env);
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    return std::clamp(n, 1, hw);
}

namespace {

template <typename Visit>
void dfs_products(const OneStepCocycle& A, int n, std::vector<int>& syms,
                  std::vector<ScaledMat2>& prods, const Visit& visit) {
    const int depth = static_cast<int>(syms.size());
    if (depth == n) {
        visit(Word(syms), prods.back());
        return;
    }
    for (int s = 1; s <= A.alphabet_size(); ++s) {
        if (depth > 0 && !A.transitions.allows(syms[depth - 1], s)) continue;
        syms.push_back(s);
        ScaledMat2 p = prods.back();
        p.apply_left(A.generator(s));
        prods.push_back(p);
        dfs_products(A, n, syms, prods, visit);
        prods.pop_back();
        syms.pop_back();
    }
}

}  // namespace

void scan_word_products(const OneStepCocycle& A, int n,
                        const std::function<void(const Word&, const ScaledMat2&)>& visit) {
    if (n <= 0) throw InputError("word scan: length must be positive");
    std::vector<int> syms;
    syms.reserve(n);
    std::vector<ScaledMat2> prods{ScaledMat2::identity()};
    prods.reserve(n + 1);
    dfs_products(A, n, syms, prods, visit);
}

double beta_upper(const OneStepCocycle& A, int n) {
    if (n <= 0) throw InputError("beta_upper: length must be positive");
    const int k = A.alphabet_size();
    const int workers = std::min(worker_count(), k);

    auto scan_branch = [&](int first_symbol) {
        double best = -infinity();
        std::vector<int> syms{first_symbol};
        ScaledMat2 base;
        base.apply_left(A.generator(first_symbol));
        std::vector<ScaledMat2> prods{ScaledMat2::identity(), base};
        dfs_products(A, n, syms, prods,
                     [&](const Word&, const ScaledMat2& p) { best = std::max(best, p.log_norm()); });
        return best;
    };

    std::vector<double> branch_best(k, -infinity());
    if (workers <= 1) {
        for (int s = 1; s <= k; ++s) branch_best[s - 1] = scan_branch(s);
    } else {
        std::vector<std::thread> pool;
        std::vector<int> next_symbol(1, 1);
        // static round-robin assignment keeps the reduction deterministic
        for (int t = 0; t < workers; ++t) {
            pool.emplace_back([&, t]() {
                for (int s = t + 1; s <= k; s += workers) branch_best[s - 1] = scan_branch(s);
            });
        }
        for (auto& th : pool) th.join();
    }
    double best = -infinity();
    for (double v : branch_best) best = std::max(best, v);
    return best / n;
}

BetaLowerResult beta_lower(const OneStepCocycle& A, int n, double tie_tol) {
    if (n <= 0) throw InputError("beta_lower: length must be positive");
    std::vector<std::pair<double, Word>> values;
    for_each_cyclic_word(A.transitions, n, [&](const CyclicWord& c) {
        values.emplace_back(periodic_exponent(A, c), c.word());
    });
    if (values.empty()) throw NumericError("beta_lower: no admissible necklace found");
    double best = -infinity();
    for (const auto& [v, w] : values) best = std::max(best, v);

    BetaLowerResult out;
    out.value = best;
    for (const auto& [v, w] : values)
        if (v >= best - tie_tol) out.co_witnesses.push_back(w);
    out.witness = out.co_witnesses.front();  // shortest-then-lexicographic scan order
    return out;
}

ExponentBracket exponent_bracket(const OneStepCocycle& A, int n_lower, int n_upper,
                                 double tie_tol) {
    BetaLowerResult lo = beta_lower(A, n_lower, tie_tol);
    double up = infinity();
    for (int m = 1; m <= n_upper; ++m) up = std::min(up, beta_upper(A, m));
    return ExponentBracket(lo.value, up, n_lower, n_upper, lo.witness, lo.co_witnesses);
}

AlphaEstimate alpha_bounds(const OneStepCocycle& A, int n) {
    if (n <= 0) throw InputError("alpha_bounds: length must be positive");
    AlphaEstimate out;
    out.n = n;
    out.upper_certified = infinity();
    for_each_cyclic_word(A.transitions, n, [&](const CyclicWord& c) {
        double v = periodic_exponent(A, c);
        if (v < out.upper_certified) {
            out.upper_certified = v;
            out.upper_witness = c.word();
        }
    });
    if (!std::isfinite(out.upper_certified))
        throw NumericError("alpha_bounds: no admissible necklace found");

    double min_log_norm = infinity();
    scan_word_products(A, n, [&](const Word&, const ScaledMat2& p) {
        min_log_norm = std::min(min_log_norm, p.log_norm());
    });
    out.lower_heuristic = min_log_norm / n;
    return out;
}

AlmostMultiplicativity almost_multiplicativity_constant(const OneStepCocycle& A, int n,
                                                        int exhaustive_up_to,
                                                        long pair_budget) {
    if (n <= 0) throw InputError("almost multiplicativity: length must be positive");

    struct Entry {
        Word w;
        ScaledMat2 prod;
        double log_norm;
    };
    std::vector<Entry> words;
    for (int len = 1; len <= n; ++len)
        scan_word_products(A, len, [&](const Word& w, const ScaledMat2& p) {
            words.push_back({w, p, p.log_norm()});
        });

    const long N = static_cast<long>(words.size());
    const long total = N * N;
    const bool exhaustive = (n <= exhaustive_up_to) || total <= pair_budget;
    // Ceiling division: a floored stride can sample up to a full extra
    // stride's worth of slots and overshoot the documented budget.
    const long stride = exhaustive ? 1 : (total + pair_budget - 1) / pair_budget;

    AlmostMultiplicativity out;
    out.exhaustive = exhaustive;
    out.pairs_examined = 0;
    double best_log = infinity();
    for (long p = 0; p < total; p += stride) {
        const Entry& u = words[p / N];
        const Entry& v = words[p % N];
        if (!A.transitions.allows(u.w.syms.back(), v.w.syms.front())) continue;
        ScaledMat2 uv{v.prod.m * u.prod.m, v.prod.log_scale + u.prod.log_scale};
        uv.renormalize();
        double log_ratio = uv.log_norm() - u.log_norm - v.log_norm;
        ++out.pairs_examined;
        if (log_ratio < best_log) {
            best_log = log_ratio;
            out.arg_u = u.w;
            out.arg_v = v.w;
        }
    }
    if (out.pairs_examined == 0)
        throw NumericError("almost multiplicativity: no admissible word pair sampled");
    out.kappa = std::exp(best_log);
    return out;
}

}  // namespace lyapmax
