#include "lyapmax/symbolics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace lyapmax {

TransitionMatrix::TransitionMatrix(int k, std::vector<std::uint8_t> bits)
    : k_(k), bits_(std::move(bits)) {
    if (k_ <= 0) throw InputError("transition matrix: alphabet size must be positive");
    if (bits_.size() != static_cast<std::size_t>(k_) * k_)
        throw InputError("transition matrix: wrong number of entries");
    for (auto v : bits_)
        if (v != 0 && v != 1) throw InputError("transition matrix: entries must be 0 or 1");
}

TransitionMatrix TransitionMatrix::subshift(int k, std::vector<std::uint8_t> bits) {
    TransitionMatrix Q(k, std::move(bits));
    if (!Q.is_proper())
        throw InputError("transition matrix: every row and every column needs at least one 1");
    return Q;
}

TransitionMatrix TransitionMatrix::full_shift(int k) {
    return TransitionMatrix(k, std::vector<std::uint8_t>(static_cast<std::size_t>(k) * k, 1));
}

bool TransitionMatrix::is_full() const {
    return std::all_of(bits_.begin(), bits_.end(), [](std::uint8_t v) { return v == 1; });
}

bool TransitionMatrix::is_proper() const {
    for (int a = 1; a <= k_; ++a) {
        bool row = false, col = false;
        for (int b = 1; b <= k_; ++b) {
            row = row || allows(a, b);
            col = col || allows(b, a);
        }
        if (!row || !col) return false;
    }
    return true;
}

TransitionMatrix TransitionMatrix::transpose() const {
    std::vector<std::uint8_t> t(bits_.size());
    for (int a = 0; a < k_; ++a)
        for (int b = 0; b < k_; ++b) t[b * k_ + a] = bits_[a * k_ + b];
    return TransitionMatrix(k_, std::move(t));
}

void validate_symbols(const Word& w, int k) {
    for (int s : w.syms)
        if (s < 1 || s > k) throw InputError("word: symbol out of alphabet range");
}

bool is_admissible(const TransitionMatrix& Q, const Word& w) {
    validate_symbols(w, Q.size());
    for (std::size_t i = 0; i + 1 < w.syms.size(); ++i)
        if (!Q.allows(w.syms[i], w.syms[i + 1])) return false;
    return true;
}

bool is_cyclically_admissible(const TransitionMatrix& Q, const Word& w) {
    if (w.syms.empty()) return false;
    return is_admissible(Q, w) && Q.allows(w.syms.back(), w.syms.front());
}

namespace {

// Lexicographically smallest rotation (Booth-style scan is overkill for the
// short words handled here; direct comparison is fine).
Word minimal_rotation(const Word& w) {
    const int n = w.length();
    Word best = w;
    Word rot = w;
    for (int r = 1; r < n; ++r) {
        std::rotate(rot.syms.begin(), rot.syms.begin() + 1, rot.syms.end());
        if (rot.syms < best.syms) best = rot;
    }
    return best;
}

int minimal_period(const Word& w) {
    const int n = w.length();
    for (int p = 1; p <= n; ++p) {
        if (n % p != 0) continue;
        bool ok = true;
        for (int i = p; i < n && ok; ++i) ok = (w.syms[i] == w.syms[i - p]);
        if (ok) return p;
    }
    return n;
}

}  // namespace

CyclicWord::CyclicWord(Word w, const TransitionMatrix& Q) {
    if (w.syms.empty()) throw InputError("cyclic word: empty");
    if (!is_cyclically_admissible(Q, w))
        throw InputError("cyclic word: closure is not admissible");
    word_ = minimal_rotation(w);
}

bool CyclicWord::is_primitive() const { return minimal_period(word_) == word_.length(); }

CyclicWord CyclicWord::primitive(const TransitionMatrix& Q) const {
    int p = minimal_period(word_);
    Word head(std::vector<int>(word_.syms.begin(), word_.syms.begin() + p));
    return CyclicWord(head, Q);
}

WordStream::WordStream(const TransitionMatrix& Q, int n) : Q_(Q), n_(n) {
    if (n_ <= 0) throw InputError("word stream: length must be positive");
    cur_.resize(n_);
}

// Fills positions [pos, n) with the smallest admissible continuation.  Under
// the no-dead-symbol invariant a continuation always exists when the prefix
// symbol has any successor.
bool WordStream::fill_smallest_from(int pos) {
    for (int i = pos; i < n_; ++i) {
        int chosen = 0;
        for (int s = 1; s <= Q_.size(); ++s) {
            if (i == 0 || Q_.allows(cur_[i - 1], s)) {
                chosen = s;
                break;
            }
        }
        if (chosen == 0) return false;
        cur_[i] = chosen;
    }
    return true;
}

bool WordStream::advance() {
    for (int i = n_ - 1; i >= 0; --i) {
        for (int s = cur_[i] + 1; s <= Q_.size(); ++s) {
            if (i == 0 || Q_.allows(cur_[i - 1], s)) {
                cur_[i] = s;
                if (fill_smallest_from(i + 1)) return true;
            }
        }
    }
    return false;
}

std::optional<Word> WordStream::next() {
    if (done_) return std::nullopt;
    if (!started_) {
        started_ = true;
        if (!fill_smallest_from(0)) {
            done_ = true;
            return std::nullopt;
        }
    } else if (!advance()) {
        done_ = true;
        return std::nullopt;
    }
    return Word(cur_);
}

void for_each_word(const TransitionMatrix& Q, int n,
                   const std::function<void(const Word&)>& visit) {
    WordStream ws(Q, n);
    while (auto w = ws.next()) visit(*w);
}

void for_each_cyclic_word(const TransitionMatrix& Q, int n_max,
                          const std::function<void(const CyclicWord&)>& visit) {
    for (int n = 1; n <= n_max; ++n) {
        WordStream ws(Q, n);
        while (auto w = ws.next()) {
            if (!is_cyclically_admissible(Q, *w)) continue;
            if (minimal_period(*w) != n) continue;          // primitive only
            if (minimal_rotation(*w).syms != w->syms) continue;  // canonical rep only
            visit(CyclicWord(*w, Q));
        }
    }
}

std::vector<Word> enumerate_words(const TransitionMatrix& Q, int n) {
    std::vector<Word> out;
    for_each_word(Q, n, [&](const Word& w) { out.push_back(w); });
    return out;
}

std::vector<CyclicWord> enumerate_cyclic_words(const TransitionMatrix& Q, int n_max) {
    std::vector<CyclicWord> out;
    for_each_cyclic_word(Q, n_max, [&](const CyclicWord& c) { out.push_back(c); });
    return out;
}

namespace {

// Strongly connected components, iterative Tarjan.
std::vector<std::vector<int>> strongly_connected_components(
    int n, const std::vector<std::vector<int>>& adj) {
    std::vector<int> index(n, -1), low(n, 0), on_stack(n, 0), stack;
    std::vector<std::vector<int>> comps;
    int counter = 0;

    struct Frame {
        int v;
        std::size_t child;
    };
    for (int root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        std::vector<Frame> frames{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.child < adj[f.v].size()) {
                int w = adj[f.v][f.child++];
                if (index[w] == -1) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
            } else {
                if (low[f.v] == index[f.v]) {
                    std::vector<int> comp;
                    int w;
                    do {
                        w = stack.back();
                        stack.pop_back();
                        on_stack[w] = 0;
                        comp.push_back(w);
                    } while (w != f.v);
                    comps.push_back(std::move(comp));
                }
                int v = f.v;
                frames.pop_back();
                if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
            }
        }
    }
    return comps;
}

// Perron root of the nonnegative component submatrix C via power iteration on
// C + I.  The shift makes an irreducible component primitive, so the
// iteration converges geometrically even for periodic graphs (e.g. pure
// cycles, where unshifted iterates would oscillate forever).
double component_perron_root(const std::vector<int>& members,
                             const std::vector<std::vector<int>>& adj, double tol,
                             long budget) {
    const int n = static_cast<int>(members.size());
    std::vector<int> pos(adj.size(), -1);
    for (int i = 0; i < n; ++i) pos[members[i]] = i;

    std::vector<std::vector<int>> local(n);
    for (int i = 0; i < n; ++i)
        for (int w : adj[members[i]])
            if (pos[w] >= 0) local[i].push_back(pos[w]);

    std::vector<double> v(n, 1.0), w(n, 0.0);
    double lambda = 0.0;
    for (long it = 0; it < budget; ++it) {
        double sum_w = 0.0, sum_v = 0.0;
        for (int i = 0; i < n; ++i) {
            double acc = v[i];  // the +I shift
            for (int j : local[i]) acc += v[j];
            w[i] = acc;
            sum_w += acc;
            sum_v += v[i];
        }
        lambda = sum_w / sum_v;
        double resid = 0.0, scale = 0.0;
        for (int i = 0; i < n; ++i) {
            resid = std::max(resid, std::abs(w[i] - lambda * v[i]));
            scale = std::max(scale, std::abs(v[i]));
        }
        double inv = 1.0 / sum_w;
        for (int i = 0; i < n; ++i) v[i] = w[i] * inv;
        if (resid <= tol * lambda * scale) return lambda - 1.0;
    }
    throw NumericError("topological_entropy: power iteration did not converge; last estimate " +
                       std::to_string(lambda - 1.0));
}

}  // namespace

double topological_entropy(const TransitionMatrix& Q, double tol, long budget) {
    const int n = Q.size();
    std::vector<std::vector<int>> adj(n);
    for (int a = 1; a <= n; ++a)
        for (int b = 1; b <= n; ++b)
            if (Q.allows(a, b)) adj[a - 1].push_back(b - 1);

    double rho = 0.0;
    bool any_cycle = false;
    for (const auto& comp : strongly_connected_components(n, adj)) {
        bool nontrivial = comp.size() > 1;
        if (!nontrivial) {
            int v = comp[0];
            nontrivial = std::find(adj[v].begin(), adj[v].end(), v) != adj[v].end();
        }
        if (!nontrivial) continue;
        any_cycle = true;
        rho = std::max(rho, component_perron_root(comp, adj, tol, budget));
    }
    if (!any_cycle) throw InputError("topological_entropy: transition graph has no cycle");
    return std::log(rho);
}

TransitionMatrix dual_subshift(const TransitionMatrix& Q) { return Q.transpose(); }

std::string word_to_string(const Word& w, int k) {
    std::ostringstream os;
    for (std::size_t i = 0; i < w.syms.size(); ++i) {
        if (k > 9 && i > 0) os << ',';
        os << w.syms[i];
    }
    return os.str();
}

Word word_from_string(const std::string& s, int k) {
    Word w;
    if (k > 9) {
        std::istringstream is(s);
        std::string tok;
        while (std::getline(is, tok, ',')) w.syms.push_back(std::stoi(tok));
    } else {
        for (char ch : s) {
            if (ch < '1' || ch > '9') throw InputError("word string: bad character");
            w.syms.push_back(ch - '0');
        }
    }
    validate_symbols(w, k);
    return w;
}

}  // namespace lyapmax
