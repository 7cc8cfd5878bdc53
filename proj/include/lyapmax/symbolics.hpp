#pragma once

// Finite-type symbolic dynamics over the alphabet {1, ..., k}: admissible
// words, cyclic words up to rotation, and the growth rate (topological
// entropy) of the allowed-word language.  All entropies are in nats.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lyapmax/common.hpp"

namespace lyapmax {

// 0/1 matrix of allowed transitions: entry (a, b) == 1 means symbol a may be
// followed by symbol b.  Symbols are 1-based throughout.
class TransitionMatrix {
  public:
    TransitionMatrix() = default;
    TransitionMatrix(int k, std::vector<std::uint8_t> bits);

    // Named constructor for subshift input: additionally requires every row
    // and every column to contain a 1, so no symbol is a dead end.
    static TransitionMatrix subshift(int k, std::vector<std::uint8_t> bits);
    static TransitionMatrix full_shift(int k);

    int size() const { return k_; }
    bool allows(int a, int b) const { return bits_[(a - 1) * k_ + (b - 1)] != 0; }
    bool is_full() const;
    // True when no row and no column is all-zero (the subshift invariant).
    bool is_proper() const;

    TransitionMatrix transpose() const;

    bool operator==(const TransitionMatrix&) const = default;

  private:
    int k_ = 0;
    std::vector<std::uint8_t> bits_;
};

// Finite sequence over {1, ..., k}.
struct Word {
    std::vector<int> syms;

    Word() = default;
    explicit Word(std::vector<int> s) : syms(std::move(s)) {}

    int length() const { return static_cast<int>(syms.size()); }
    bool operator==(const Word&) const = default;
    auto operator<=>(const Word&) const = default;
};

// A word considered up to rotation, stored as its lexicographically minimal
// rotation.  Construction requires the cyclic closure (including the wrap
// transition last -> first) to be admissible.
class CyclicWord {
  public:
    CyclicWord(Word w, const TransitionMatrix& Q);

    const Word& word() const { return word_; }
    int length() const { return word_.length(); }

    bool is_primitive() const;  // not a power of a strictly shorter word
    // Representative of the same rotation class at its primitive period.
    CyclicWord primitive(const TransitionMatrix& Q) const;

    bool operator==(const CyclicWord&) const = default;
    auto operator<=>(const CyclicWord&) const = default;

  private:
    Word word_;
};

void validate_symbols(const Word& w, int k);
bool is_admissible(const TransitionMatrix& Q, const Word& w);
bool is_cyclically_admissible(const TransitionMatrix& Q, const Word& w);

// Streams the admissible words of exact length n in lexicographic order.
class WordStream {
  public:
    WordStream(const TransitionMatrix& Q, int n);
    std::optional<Word> next();

  private:
    const TransitionMatrix& Q_;
    int n_;
    std::vector<int> cur_;
    bool started_ = false;
    bool done_ = false;

    bool fill_smallest_from(int pos);
    bool advance();
};

// Visits every admissible word of exact length n, lexicographically.
void for_each_word(const TransitionMatrix& Q, int n,
                   const std::function<void(const Word&)>& visit);

// Visits each rotation class of cyclically admissible primitive words of
// length 1..n_max exactly once, by increasing length then lexicographic
// order of the canonical representative.
void for_each_cyclic_word(const TransitionMatrix& Q, int n_max,
                          const std::function<void(const CyclicWord&)>& visit);

std::vector<Word> enumerate_words(const TransitionMatrix& Q, int n);
std::vector<CyclicWord> enumerate_cyclic_words(const TransitionMatrix& Q, int n_max);

// log of the Perron eigenvalue of Q; equals the exponential growth rate of
// the number of admissible words.  Computed per strongly connected component
// (shifted power iteration on C + I, which is primitive when C is
// irreducible); the overall value is the max over components, which equals
// the spectral radius of the full matrix.  Throws NumericError if some
// component fails to converge within the iteration budget, InputError if the
// graph has no cycle at all.
double topological_entropy(const TransitionMatrix& Q,
                           double tol = defaults::entropy_tol,
                           long budget = defaults::entropy_budget);

// The time-reversed subshift: transitions transposed.
TransitionMatrix dual_subshift(const TransitionMatrix& Q);

// Compact rendering for reports: digits for k <= 9, comma-separated beyond.
std::string word_to_string(const Word& w, int k);
Word word_from_string(const std::string& s, int k);

}  // namespace lyapmax
