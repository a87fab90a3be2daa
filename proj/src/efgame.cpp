#include "efk/efgame.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <chrono>
#include <climits>
#include <deque>
#include <set>
#include <stdexcept>

namespace efk {

PartialMap PartialMap::from_pairs(std::vector<std::pair<int, int>> pairs) {
    std::sort(pairs.begin(), pairs.end());
    for (std::size_t i = 1; i < pairs.size(); ++i) {
        if (pairs[i].first == pairs[i - 1].first) {
            throw std::invalid_argument("partial map: duplicate source");
        }
    }
    std::set<int> targets;
    for (const auto& [src, dst] : pairs) {
        if (!targets.insert(dst).second) throw std::invalid_argument("partial map: duplicate target");
    }
    PartialMap f;
    f.pairs_ = std::move(pairs);
    return f;
}

std::optional<int> PartialMap::image(int src) const {
    auto it = std::lower_bound(pairs_.begin(), pairs_.end(), std::pair{src, INT_MIN});
    if (it != pairs_.end() && it->first == src) return it->second;
    return std::nullopt;
}

std::optional<int> PartialMap::preimage(int dst) const {
    for (const auto& [s, d] : pairs_) {
        if (d == dst) return s;
    }
    return std::nullopt;
}

PartialMap PartialMap::with(int src, int dst) const {
    if (auto img = image(src)) {
        if (*img != dst) throw std::invalid_argument("partial map: source already mapped");
        return *this;
    }
    if (has_dst(dst)) throw std::invalid_argument("partial map: target already taken");
    PartialMap out = *this;
    out.pairs_.insert(std::lower_bound(out.pairs_.begin(), out.pairs_.end(), std::pair{src, dst}),
                      {src, dst});
    return out;
}

bool PartialMap::extends(const PartialMap& base) const {
    return std::includes(pairs_.begin(), pairs_.end(), base.pairs_.begin(), base.pairs_.end());
}

std::vector<int> PartialMap::sources() const {
    std::vector<int> out;
    out.reserve(pairs_.size());
    for (const auto& [s, d] : pairs_) out.push_back(s);
    return out;
}

std::vector<int> PartialMap::targets() const {
    std::vector<int> out;
    out.reserve(pairs_.size());
    for (const auto& [s, d] : pairs_) out.push_back(d);
    std::sort(out.begin(), out.end());
    return out;
}

std::string winner_name(Winner w) {
    switch (w) {
        case Winner::protagonist: return "protagonist";
        case Winner::antagonist: return "antagonist";
        case Winner::undecided_budget: return "undecided:budget";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Dense per-game view of both structures, aligned per vocabulary symbol.

namespace detail {

struct DenseSym {
    SymbolKind kind;
    int arity;
    std::vector<char> bits1, bits2;  // relations, row-major over universe^arity
    const std::vector<int>* fun1 = nullptr;
    const std::vector<int>* fun2 = nullptr;
    int c1 = -1, c2 = -1;
};

struct DenseContext {
    int s1, s2;
    std::vector<DenseSym> syms;

    DenseContext(const FiniteStructure& m1, const FiniteStructure& m2, const Vocabulary& vocab)
        : s1(m1.size), s2(m2.size) {
        for (const Symbol& s : vocab.symbols()) {
            DenseSym d;
            d.kind = s.kind;
            d.arity = s.arity;
            switch (s.kind) {
                case SymbolKind::relation: {
                    d.bits1 = dense_rel(m1, s);
                    d.bits2 = dense_rel(m2, s);
                    break;
                }
                case SymbolKind::function: {
                    d.fun1 = &interp_fun(m1, s);
                    d.fun2 = &interp_fun(m2, s);
                    break;
                }
                case SymbolKind::constant: {
                    d.c1 = interp_const(m1, s);
                    d.c2 = interp_const(m2, s);
                    break;
                }
            }
            syms.push_back(std::move(d));
        }
    }

    static std::vector<char> dense_rel(const FiniteStructure& m, const Symbol& s) {
        auto it = m.relations.find(s.name);
        if (it == m.relations.end() || it->second.arity != s.arity) {
            throw std::invalid_argument("structure does not interpret relation '" + s.name + "'");
        }
        std::size_t cells = 1;
        for (int i = 0; i < s.arity; ++i) cells *= static_cast<std::size_t>(m.size);
        std::vector<char> bits(cells, 0);
        for (const auto& tup : it->second.tuples) {
            std::size_t idx = 0;
            for (int x : tup) idx = idx * static_cast<std::size_t>(m.size) + static_cast<std::size_t>(x);
            bits[idx] = 1;
        }
        return bits;
    }

    static const std::vector<int>& interp_fun(const FiniteStructure& m, const Symbol& s) {
        auto it = m.functions.find(s.name);
        if (it == m.functions.end() || it->second.arity != s.arity) {
            throw std::invalid_argument("structure does not interpret function '" + s.name + "'");
        }
        return it->second.table;
    }

    static int interp_const(const FiniteStructure& m, const Symbol& s) {
        auto it = m.constants.find(s.name);
        if (it == m.constants.end()) {
            throw std::invalid_argument("structure does not interpret constant '" + s.name + "'");
        }
        return it->second;
    }

    bool rel_at(const std::vector<char>& bits, int size, std::span<const int> args) const {
        std::size_t idx = 0;
        for (int x : args) idx = idx * static_cast<std::size_t>(size) + static_cast<std::size_t>(x);
        return bits[idx] != 0;
    }

    int fun_at(const std::vector<int>& table, int size, std::span<const int> args) const {
        std::size_t idx = 0;
        for (int x : args) idx = idx * static_cast<std::size_t>(size) + static_cast<std::size_t>(x);
        return table[idx];
    }

    /// Atomic agreement over all argument tuples drawn from the map.
    bool preserves(const PartialMap& f) const {
        const auto& pairs = f.pairs();
        std::size_t n = pairs.size();
        for (const DenseSym& d : syms) {
            switch (d.kind) {
                case SymbolKind::constant: {
                    for (const auto& [x, y] : pairs) {
                        if ((d.c1 == x) != (d.c2 == y)) return false;
                    }
                    break;
                }
                case SymbolKind::relation: {
                    if (!for_all_tuples(n, d.arity, [&](std::span<const std::size_t> pick) {
                            std::vector<int> a1(pick.size()), a2(pick.size());
                            for (std::size_t i = 0; i < pick.size(); ++i) {
                                a1[i] = pairs[pick[i]].first;
                                a2[i] = pairs[pick[i]].second;
                            }
                            return rel_at(d.bits1, s1, a1) == rel_at(d.bits2, s2, a2);
                        })) {
                        return false;
                    }
                    break;
                }
                case SymbolKind::function: {
                    if (!for_all_tuples(n, d.arity, [&](std::span<const std::size_t> pick) {
                            std::vector<int> a1(pick.size()), a2(pick.size());
                            for (std::size_t i = 0; i < pick.size(); ++i) {
                                a1[i] = pairs[pick[i]].first;
                                a2[i] = pairs[pick[i]].second;
                            }
                            int v1 = fun_at(*d.fun1, s1, a1);
                            int v2 = fun_at(*d.fun2, s2, a2);
                            for (const auto& [x, y] : pairs) {
                                if ((v1 == x) != (v2 == y)) return false;
                            }
                            return true;
                        })) {
                        return false;
                    }
                    break;
                }
            }
        }
        return true;
    }

    /// Agreement restricted to atom instances that involve the new pair,
    /// assuming the rest of the map already preserves.
    bool pair_consistent(const PartialMap& f, int src, int dst) const {
        const auto& pairs = f.pairs();
        std::size_t n = pairs.size();
        auto arg1 = [&](std::size_t i) { return i == n ? src : pairs[i].first; };
        auto arg2 = [&](std::size_t i) { return i == n ? dst : pairs[i].second; };
        for (const DenseSym& d : syms) {
            switch (d.kind) {
                case SymbolKind::constant: {
                    if ((d.c1 == src) != (d.c2 == dst)) return false;
                    break;
                }
                case SymbolKind::relation: {
                    if (!for_all_tuples(n + 1, d.arity, [&](std::span<const std::size_t> pick) {
                            bool has_new = false;
                            for (std::size_t p : pick) has_new |= (p == n);
                            if (!has_new) return true;
                            std::vector<int> a1(pick.size()), a2(pick.size());
                            for (std::size_t i = 0; i < pick.size(); ++i) {
                                a1[i] = arg1(pick[i]);
                                a2[i] = arg2(pick[i]);
                            }
                            return rel_at(d.bits1, s1, a1) == rel_at(d.bits2, s2, a2);
                        })) {
                        return false;
                    }
                    break;
                }
                case SymbolKind::function: {
                    if (!for_all_tuples(n + 1, d.arity, [&](std::span<const std::size_t> pick) {
                            bool has_new = false;
                            for (std::size_t p : pick) has_new |= (p == n);
                            std::vector<int> a1(pick.size()), a2(pick.size());
                            for (std::size_t i = 0; i < pick.size(); ++i) {
                                a1[i] = arg1(pick[i]);
                                a2[i] = arg2(pick[i]);
                            }
                            int v1 = fun_at(*d.fun1, s1, a1);
                            int v2 = fun_at(*d.fun2, s2, a2);
                            if (has_new) {
                                for (std::size_t i = 0; i <= n; ++i) {
                                    if ((v1 == arg1(i)) != (v2 == arg2(i))) return false;
                                }
                            } else {
                                // old args, new result position only
                                if ((v1 == src) != (v2 == dst)) return false;
                            }
                            return true;
                        })) {
                        return false;
                    }
                    break;
                }
            }
        }
        return true;
    }

    template <typename F>
    static bool for_all_tuples(std::size_t n, int arity, F&& check) {
        if (n == 0) return true;  // no argument tuples
        std::vector<std::size_t> pick(static_cast<std::size_t>(arity), 0);
        while (true) {
            if (!check(std::span<const std::size_t>(pick))) return false;
            std::size_t i = pick.size();
            while (i-- > 0) {
                if (++pick[i] < n) break;
                pick[i] = 0;
                if (i == 0) return true;
            }
            if (pick.empty()) return true;
        }
    }

    /// All minimal legal responses, canonical order.
    std::vector<PartialMap> responses(const PartialMap& f, const Challenge& ch) const {
        std::vector<PartialMap> out;
        std::vector<int> need_src;
        for (int a : ch.left) {
            if (!f.has_src(a)) need_src.push_back(a);
        }
        assign_sources(f, ch, need_src, 0, out);
        std::sort(out.begin(), out.end());
        return out;
    }

    void assign_sources(const PartialMap& f, const Challenge& ch, const std::vector<int>& need,
                        std::size_t i, std::vector<PartialMap>& out) const {
        if (i == need.size()) {
            std::vector<int> need_dst;
            for (int b : ch.right) {
                if (!f.has_dst(b)) need_dst.push_back(b);
            }
            assign_targets(f, need_dst, 0, out);
            return;
        }
        for (int dst = 0; dst < s2; ++dst) {
            if (f.has_dst(dst)) continue;
            if (!pair_consistent(f, need[i], dst)) continue;
            assign_sources(f.with(need[i], dst), ch, need, i + 1, out);
        }
    }

    void assign_targets(const PartialMap& f, const std::vector<int>& need, std::size_t i,
                        std::vector<PartialMap>& out) const {
        if (i == need.size()) {
            out.push_back(f);
            return;
        }
        if (f.has_dst(need[i])) {  // covered by an earlier source assignment
            assign_targets(f, need, i + 1, out);
            return;
        }
        for (int src = 0; src < s1; ++src) {
            if (f.has_src(src)) continue;
            if (!pair_consistent(f, src, need[i])) continue;
            assign_targets(f.with(src, need[i]), need, i + 1, out);
        }
    }
};

}  // namespace detail

bool preserves_atomics(const FiniteStructure& m1, const FiniteStructure& m2,
                       const Vocabulary& vocab, const PartialMap& f) {
    detail::DenseContext ctx(m1, m2, vocab);
    for (const auto& [src, dst] : f.pairs()) {
        if (src < 0 || src >= m1.size || dst < 0 || dst >= m2.size) {
            throw std::invalid_argument("partial map element outside universe");
        }
    }
    return ctx.preserves(f);
}

std::vector<PartialMap> legal_responses(const FiniteStructure& m1, const FiniteStructure& m2,
                                        const Vocabulary& vocab, const PartialMap& f,
                                        const Challenge& ch) {
    detail::DenseContext ctx(m1, m2, vocab);
    for (const auto& [src, dst] : f.pairs()) {
        if (src < 0 || src >= m1.size || dst < 0 || dst >= m2.size) {
            throw std::invalid_argument("position map element outside universe");
        }
    }
    if (!ctx.preserves(f)) throw std::invalid_argument("position map is not atomically preserving");
    for (int a : ch.left) {
        if (a < 0 || a >= m1.size) throw std::invalid_argument("challenge element outside universe");
    }
    for (int b : ch.right) {
        if (b < 0 || b >= m2.size) throw std::invalid_argument("challenge element outside universe");
    }
    return ctx.responses(f, ch);
}

// ---------------------------------------------------------------------------
// GameEngine

namespace {

std::vector<int> mask_elements(unsigned mask) {
    std::vector<int> out;
    for (int i = 0; mask != 0; ++i, mask >>= 1) {
        if (mask & 1u) out.push_back(i);
    }
    return out;
}

}  // namespace

GameEngine::GameEngine(const FiniteStructure& m1, const FiniteStructure& m2, Vocabulary vocab,
                       int budget, SolveOptions opts)
    : m1_(m1), m2_(m2), vocab_(std::move(vocab)), budget_(budget), opts_(opts) {
    if (budget_ < 0) throw std::invalid_argument("negative game budget");
    if (m1_.size < 1 || m2_.size < 1) throw std::invalid_argument("empty universe");
    if (m1_.size > 20 || m2_.size > 20) throw std::invalid_argument("universe too large for the solver");
    ctx_ = std::make_unique<detail::DenseContext>(m1_, m2_, vocab_);
}

GameEngine::~GameEngine() = default;
GameEngine::GameEngine(GameEngine&&) noexcept = default;
GameEngine& GameEngine::operator=(GameEngine&&) noexcept = default;

std::vector<Challenge> GameEngine::all_challenges() const {
    std::vector<Challenge> out;
    for (unsigned ma = 0; ma < (1u << m1_.size); ++ma) {
        int ca = std::popcount(ma);
        if (ca > budget_) continue;
        for (unsigned mb = 0; mb < (1u << m2_.size); ++mb) {
            if (ca + std::popcount(mb) > budget_) continue;
            out.push_back({mask_elements(ma), mask_elements(mb)});
        }
    }
    return out;
}

std::vector<Challenge> GameEngine::pruned_challenges(const PartialMap& f) const {
    unsigned dom = 0, rng = 0;
    for (const auto& [s, d] : f.pairs()) {
        dom |= 1u << s;
        rng |= 1u << d;
    }
    std::vector<Challenge> out;
    for (unsigned ma = 0; ma < (1u << m1_.size); ++ma) {
        int ca = std::popcount(ma);
        if (ca > budget_) continue;
        for (unsigned mb = 0; mb < (1u << m2_.size); ++mb) {
            if (ca + std::popcount(mb) > budget_) continue;
            if ((ma & ~dom) == 0 && (mb & ~rng) == 0) continue;  // fully covered
            out.push_back({mask_elements(ma), mask_elements(mb)});
        }
    }
    return out;
}

std::vector<PartialMap> GameEngine::responses(const PartialMap& f, const Challenge& ch) const {
    return ctx_->responses(f, ch);
}

bool GameEngine::position_wins(const PartialMap& f, int rounds_left) {
    if (rounds_left <= 0) return true;
    auto key = std::make_pair(rounds_left, f);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    if (memo_.size() >= opts_.node_cap) throw BudgetExceeded{};

    bool win = true;
    for (const Challenge& ch : pruned_challenges(f)) {
        bool answered = false;
        for (const PartialMap& r : ctx_->responses(f, ch)) {
            if (position_wins(r, rounds_left - 1)) {
                answered = true;
                break;
            }
        }
        if (!answered) {
            win = false;
            break;
        }
    }
    memo_.emplace(std::move(key), win);
    return win;
}

Winner GameEngine::winner() {
    try {
        return position_wins(PartialMap{}, rounds()) ? Winner::protagonist : Winner::antagonist;
    } catch (const BudgetExceeded&) {
        return Winner::undecided_budget;
    }
}

std::optional<PartialMap> GameEngine::respond(const PartialMap& f, int rounds_left,
                                              const Challenge& ch) {
    for (const PartialMap& r : responses(f, ch)) {
        if (position_wins(r, rounds_left - 1)) return r;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// solve_game and certificates

namespace {

ProtagonistCertificate build_protagonist_certificate(GameEngine& engine) {
    ProtagonistCertificate cert;
    std::set<std::pair<int, PartialMap>> seen;
    std::deque<std::pair<int, PartialMap>> queue;
    queue.push_back({engine.rounds(), PartialMap{}});
    seen.insert(queue.front());
    auto challenges = engine.all_challenges();
    while (!queue.empty()) {
        auto [r, f] = queue.front();
        queue.pop_front();
        for (const Challenge& ch : challenges) {
            auto resp = engine.respond(f, r, ch);
            if (!resp) throw std::logic_error("winning position has an unanswerable challenge");
            cert.response[{r, f, ch}] = *resp;
            if (r - 1 > 0 && seen.insert({r - 1, *resp}).second) {
                queue.push_back({r - 1, *resp});
            }
        }
    }
    return cert;
}

void build_antagonist_tree(GameEngine& engine, int rounds_left, const PartialMap& f,
                           AntagonistCertificate& cert) {
    auto key = std::make_pair(rounds_left, f);
    if (cert.challenge.count(key)) return;
    std::optional<Challenge> witness;
    std::vector<PartialMap> replies;
    for (const Challenge& ch : engine.pruned_challenges(f)) {
        auto rs = engine.responses(f, ch);
        bool all_lose = true;
        for (const PartialMap& r : rs) {
            if (engine.position_wins(r, rounds_left - 1)) {
                all_lose = false;
                break;
            }
        }
        if (all_lose) {
            witness = ch;
            replies = std::move(rs);
            break;
        }
    }
    if (!witness) throw std::logic_error("losing position has no refuting challenge");
    cert.challenge[key] = *witness;
    for (const PartialMap& r : replies) {
        if (rounds_left - 1 <= 0) throw std::logic_error("refuting challenge answered in last round");
        build_antagonist_tree(engine, rounds_left - 1, r, cert);
    }
}

}  // namespace

SolveResult solve_game(const FiniteStructure& m1, const FiniteStructure& m2,
                       const VocabularyChain& chain, int k, SolveOptions opts) {
    auto start = std::chrono::steady_clock::now();
    SolveResult result;
    GameEngine engine(m1, m2, chain.at_level(k), k, opts);
    result.winner = engine.winner();
    if (opts.certificates) {
        if (result.winner == Winner::protagonist) {
            result.strategy = build_protagonist_certificate(engine);
        } else if (result.winner == Winner::antagonist) {
            AntagonistCertificate cert;
            build_antagonist_tree(engine, engine.rounds(), PartialMap{}, cert);
            result.refutation = std::move(cert);
        }
    }
    result.stats.positions = engine.positions();
    result.stats.millis = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                              start)
            .count());
    return result;
}

namespace {

bool covers(const PartialMap& f, const Challenge& ch) {
    for (int a : ch.left) {
        if (!f.has_src(a)) return false;
    }
    for (int b : ch.right) {
        if (!f.has_dst(b)) return false;
    }
    return true;
}

bool verify_protagonist_at(const FiniteStructure& m1, const FiniteStructure& m2,
                           const Vocabulary& vocab, const ProtagonistCertificate& cert,
                           const std::vector<Challenge>& challenges, int rounds_left,
                           const PartialMap& f, std::set<std::pair<int, PartialMap>>& ok) {
    if (rounds_left <= 0) return true;
    if (ok.count({rounds_left, f})) return true;
    for (const Challenge& ch : challenges) {
        auto it = cert.response.find({rounds_left, f, ch});
        if (it == cert.response.end()) return false;
        const PartialMap& resp = it->second;
        if (!resp.extends(f)) return false;
        if (!covers(resp, ch)) return false;
        if (!preserves_atomics(m1, m2, vocab, resp)) return false;
        if (!verify_protagonist_at(m1, m2, vocab, cert, challenges, rounds_left - 1, resp, ok)) {
            return false;
        }
    }
    ok.insert({rounds_left, f});
    return true;
}

bool verify_antagonist_at(const FiniteStructure& m1, const FiniteStructure& m2,
                          const Vocabulary& vocab, const AntagonistCertificate& cert, int budget,
                          int rounds_left, const PartialMap& f,
                          std::set<std::pair<int, PartialMap>>& ok) {
    if (rounds_left <= 0) return false;  // protagonist completed every round
    if (ok.count({rounds_left, f})) return true;
    auto it = cert.challenge.find({rounds_left, f});
    if (it == cert.challenge.end()) return false;
    const Challenge& ch = it->second;
    if (ch.weight() > budget) return false;
    // Replies are the game's move set (minimal legal responses); a response
    // with gratuitous extra pairs restricts the protagonist strictly more.
    for (const PartialMap& r : legal_responses(m1, m2, vocab, f, ch)) {
        if (!verify_antagonist_at(m1, m2, vocab, cert, budget, rounds_left - 1, r, ok)) {
            return false;
        }
    }
    ok.insert({rounds_left, f});
    return true;
}

}  // namespace

bool verify_protagonist_certificate(const FiniteStructure& m1, const FiniteStructure& m2,
                                    const VocabularyChain& chain, int k,
                                    const ProtagonistCertificate& cert) {
    GameEngine engine(m1, m2, chain.at_level(k), k);
    std::set<std::pair<int, PartialMap>> ok;
    return verify_protagonist_at(m1, m2, chain.at_level(k), cert, engine.all_challenges(), k + 1,
                                 PartialMap{}, ok);
}

bool verify_antagonist_certificate(const FiniteStructure& m1, const FiniteStructure& m2,
                                   const VocabularyChain& chain, int k,
                                   const AntagonistCertificate& cert) {
    std::set<std::pair<int, PartialMap>> ok;
    return verify_antagonist_at(m1, m2, chain.at_level(k), cert, k, k + 1, PartialMap{}, ok);
}

// ---------------------------------------------------------------------------
// k-sequence

bool KSeqResult::complete() const {
    return std::all_of(values.begin(), values.end(),
                       [](const std::optional<int>& v) { return v.has_value(); });
}

std::vector<long long> KSeqResult::require_complete() const {
    std::vector<long long> out;
    out.reserve(values.size());
    for (const auto& v : values) {
        if (!v) throw std::runtime_error("k-sequence undecided at some index (node cap)");
        out.push_back(*v);
    }
    return out;
}

KSeqResult compute_k_seq(const ProblemSpec& spec, SolveOptions opts) {
    opts.certificates = false;
    KSeqResult result;
    for (int n = 0; n < spec.window_len(); ++n) {
        const auto& [m1, m2] = spec.pairs[static_cast<std::size_t>(n)];
        int max_win = -1;
        int undecided_above = -1;
        for (int k = 0; k <= n; ++k) {
            SolveResult r = solve_game(m1, m2, spec.chain, k, opts);
            result.stats.positions += r.stats.positions;
            result.stats.millis += r.stats.millis;
            if (r.winner == Winner::protagonist) {
                max_win = std::max(max_win, k);
            } else if (r.winner == Winner::undecided_budget) {
                undecided_above = std::max(undecided_above, k);
            }
        }
        // An undecided game only matters if it sits above every decided win.
        if (undecided_above > max_win) {
            result.values.push_back(std::nullopt);
        } else {
            result.values.push_back(max_win);  // k = 0 always wins, so max_win >= 0
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Relativized-truth check

bool check_ss1(const FiniteStructure& m1, const FiniteStructure& m2, const PartialMap& f,
               const Formula& phi, const Valuation& v) {
    std::vector<int> dom = f.sources();
    std::vector<int> rng = f.targets();
    Valuation image;
    for (const auto& [var, val] : v) {
        auto img = f.image(val);
        if (!img) throw std::invalid_argument("valuation element not in dom(f)");
        image[var] = *img;
    }
    return eval(m1, phi, v, dom) == eval(m2, phi, image, rng);
}

// ---------------------------------------------------------------------------
// Distinguishing sentences

namespace {

// One strictly atomic formula instance over tuple positions.
struct TypeAtom {
    FormulaKind kind;        // equal, rel, fun, konst
    const Symbol* sym = nullptr;
    std::vector<int> args;   // tuple positions
    int out = -1;            // tuple position of the result / rhs

    FormulaPtr to_formula() const {
        auto var = [](int i) { return "x" + std::to_string(i); };
        std::vector<std::string> names;
        for (int a : args) names.push_back(var(a));
        switch (kind) {
            case FormulaKind::equal: return f_equal(names[0], var(out));
            case FormulaKind::rel: return f_rel(sym->name, names);
            case FormulaKind::fun: return f_fun(sym->name, names, var(out));
            case FormulaKind::konst: return f_const(sym->name, var(out));
            default: throw std::logic_error("not an atom");
        }
    }

    bool truth(const FiniteStructure& m, std::span<const int> tuple) const {
        switch (kind) {
            case FormulaKind::equal:
                return tuple[static_cast<std::size_t>(args[0])] == tuple[static_cast<std::size_t>(out)];
            case FormulaKind::rel: {
                const RelationInterp& rel = m.relations.at(sym->name);
                std::vector<int> t;
                for (int a : args) t.push_back(tuple[static_cast<std::size_t>(a)]);
                return rel.tuples.count(t) > 0;
            }
            case FormulaKind::fun: {
                const FunctionInterp& fun = m.functions.at(sym->name);
                std::vector<int> t;
                for (int a : args) t.push_back(tuple[static_cast<std::size_t>(a)]);
                return fun.apply(t, m.size) == tuple[static_cast<std::size_t>(out)];
            }
            case FormulaKind::konst:
                return m.constants.at(sym->name) == tuple[static_cast<std::size_t>(out)];
            default:
                throw std::logic_error("not an atom");
        }
    }
};

std::vector<TypeAtom> atom_schema(const Vocabulary& vocab, int width) {
    std::vector<TypeAtom> out;
    for (int i = 0; i < width; ++i) {
        for (int j = i + 1; j < width; ++j) {
            out.push_back({FormulaKind::equal, nullptr, {i}, j});
        }
    }
    for (const Symbol& s : vocab.symbols()) {
        switch (s.kind) {
            case SymbolKind::relation: {
                std::vector<int> args(static_cast<std::size_t>(s.arity), 0);
                while (true) {
                    out.push_back({FormulaKind::rel, &s, args, -1});
                    std::size_t i = args.size();
                    bool done = true;
                    while (i-- > 0) {
                        if (++args[i] < width) {
                            done = false;
                            break;
                        }
                        args[i] = 0;
                    }
                    if (done) break;
                }
                break;
            }
            case SymbolKind::function: {
                std::vector<int> args(static_cast<std::size_t>(s.arity), 0);
                while (true) {
                    for (int o = 0; o < width; ++o) {
                        out.push_back({FormulaKind::fun, &s, args, o});
                    }
                    std::size_t i = args.size();
                    bool done = true;
                    while (i-- > 0) {
                        if (++args[i] < width) {
                            done = false;
                            break;
                        }
                        args[i] = 0;
                    }
                    if (done) break;
                }
                break;
            }
            case SymbolKind::constant:
                for (int o = 0; o < width; ++o) {
                    out.push_back({FormulaKind::konst, &s, {}, o});
                }
                break;
        }
    }
    return out;
}

std::vector<char> signature_at(const std::vector<TypeAtom>& schema, const FiniteStructure& m,
                               std::span<const int> tuple) {
    std::vector<char> sig(schema.size());
    for (std::size_t i = 0; i < schema.size(); ++i) sig[i] = schema[i].truth(m, tuple) ? 1 : 0;
    return sig;
}

template <typename F>
void for_each_injective_tuple(int size, int width, F&& fn) {
    std::vector<int> tuple;
    std::vector<char> used(static_cast<std::size_t>(size), 0);
    auto rec = [&](auto&& self) -> void {
        if (static_cast<int>(tuple.size()) == width) {
            fn(std::span<const int>(tuple));
            return;
        }
        for (int x = 0; x < size; ++x) {
            if (used[static_cast<std::size_t>(x)]) continue;
            used[static_cast<std::size_t>(x)] = 1;
            tuple.push_back(x);
            self(self);
            tuple.pop_back();
            used[static_cast<std::size_t>(x)] = 0;
        }
    };
    rec(rec);
}

FormulaPtr close_existentially(const std::vector<FormulaPtr>& literals, int width) {
    FormulaPtr body = literals.front();
    for (std::size_t i = 1; i < literals.size(); ++i) body = f_and(body, literals[i]);
    for (int i = width; i-- > 0;) body = f_exists("x" + std::to_string(i), body);
    return body;
}

/// Drops conjuncts greedily while the sentence still separates the pair in
/// the same direction.
FormulaPtr minimize_literals(std::vector<FormulaPtr> literals, int width,
                             const FiniteStructure& pos, const FiniteStructure& neg) {
    for (std::size_t i = 0; i < literals.size() && literals.size() > 1;) {
        std::vector<FormulaPtr> trial = literals;
        trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
        FormulaPtr sentence = close_existentially(trial, width);
        if (eval(pos, *sentence) && !eval(neg, *sentence)) {
            literals = std::move(trial);
        } else {
            ++i;
        }
    }
    return close_existentially(literals, width);
}

}  // namespace

DistinguishResult extract_distinguisher(const FiniteStructure& m1, const FiniteStructure& m2,
                                        const VocabularyChain& chain, int k, SolveOptions opts) {
    DistinguishResult result;
    result.width_cap = (k + 2) * (k + 1);
    opts.certificates = false;
    SolveResult gate = solve_game(m1, m2, chain, k + 1, opts);
    result.stats = gate.stats;
    if (gate.winner != Winner::antagonist) return result;  // none-found

    const Vocabulary& vocab = chain.at_level(k + 1);
    // Injective tuples suffice at every width: a type with repeated values is
    // realized exactly when its quotient by the equality pattern is, so any
    // separating type reduces to a separating injective type of width <= the
    // universe size.
    int max_width = std::min(result.width_cap, std::max(m1.size, m2.size));
    for (int w = 1; w <= max_width; ++w) {
        auto schema = atom_schema(vocab, w);
        for (int dir = 1; dir <= 2; ++dir) {
            const FiniteStructure& pos = dir == 1 ? m1 : m2;
            const FiniteStructure& neg = dir == 1 ? m2 : m1;
            if (w > pos.size) continue;
            std::set<std::vector<char>> neg_sigs;
            if (w <= neg.size) {
                for_each_injective_tuple(neg.size, w, [&](std::span<const int> t) {
                    neg_sigs.insert(signature_at(schema, neg, t));
                });
            }
            std::optional<std::vector<char>> found_sig;
            for_each_injective_tuple(pos.size, w, [&](std::span<const int> t) {
                if (found_sig) return;
                auto sig = signature_at(schema, pos, t);
                if (!neg_sigs.count(sig)) found_sig = std::move(sig);
            });
            if (!found_sig) continue;
            std::vector<FormulaPtr> literals;
            for (std::size_t i = 0; i < schema.size(); ++i) {
                FormulaPtr atom = schema[i].to_formula();
                literals.push_back((*found_sig)[i] ? atom : f_not(atom));
            }
            FormulaPtr sentence = minimize_literals(std::move(literals), w, pos, neg);
            if (!eval(pos, *sentence) || eval(neg, *sentence)) {
                throw std::logic_error("distinguisher failed its own verification");
            }
            result.found = true;
            result.sentence = std::move(sentence);
            result.direction = dir;
            result.width = w;
            return result;
        }
    }
    return result;
}

}  // namespace efk
