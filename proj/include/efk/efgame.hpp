#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "efk/formulas.hpp"
#include "efk/structures.hpp"

/// Exact solver for the budgeted Ehrenfeucht-Fraisse game: k+1 rounds, the
/// antagonist names element sets of total size <= k per round, the
/// protagonist maintains a partial injection preserving strictly atomic
/// formulas of the round-budget vocabulary level.
namespace efk {

namespace detail {
struct DenseContext;
}

/// Partial one-to-one map between two universes, canonform: pairs sorted by
/// source.  Insertion enforces injectivity.
class PartialMap {
public:
    PartialMap() = default;

    static PartialMap from_pairs(std::vector<std::pair<int, int>> pairs);

    std::optional<int> image(int src) const;
    std::optional<int> preimage(int dst) const;
    bool has_src(int src) const { return image(src).has_value(); }
    bool has_dst(int dst) const { return preimage(dst).has_value(); }

    /// Copy with (src, dst) added; throws if either side is already taken
    /// with a different partner.
    PartialMap with(int src, int dst) const;
    bool extends(const PartialMap& base) const;

    std::size_t size() const { return pairs_.size(); }
    bool empty() const { return pairs_.empty(); }
    const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }
    std::vector<int> sources() const;
    std::vector<int> targets() const;

    friend bool operator==(const PartialMap&, const PartialMap&) = default;
    friend auto operator<=>(const PartialMap&, const PartialMap&) = default;

private:
    std::vector<std::pair<int, int>> pairs_;
};

struct Challenge {
    std::vector<int> left;   // A: elements of M1
    std::vector<int> right;  // B: elements of M2

    int weight() const { return static_cast<int>(left.size() + right.size()); }

    friend bool operator==(const Challenge&, const Challenge&) = default;
    friend auto operator<=>(const Challenge&, const Challenge&) = default;
};

enum class Winner { protagonist, antagonist, undecided_budget };

std::string winner_name(Winner w);

struct SolveStats {
    std::uint64_t positions = 0;  // memoized game positions
    std::uint64_t millis = 0;
};

struct SolveOptions {
    std::uint64_t node_cap = 10'000'000;  // memoized positions before giving up
    bool certificates = false;
};

/// True iff f preserves every strictly atomic formula of `vocab` and its
/// negation, over arguments that all lie in dom(f).
bool preserves_atomics(const FiniteStructure& m1, const FiniteStructure& m2,
                       const Vocabulary& vocab, const PartialMap& f);

/// All minimal legal protagonist responses from position f to the challenge:
/// extensions covering ch.left in the domain and ch.right in the range, with
/// no gratuitous pairs, injective and atomically preserving.  Canonical
/// (lexicographic) order.
std::vector<PartialMap> legal_responses(const FiniteStructure& m1, const FiniteStructure& m2,
                                        const Vocabulary& vocab, const PartialMap& f,
                                        const Challenge& ch);

struct BudgetExceeded : std::runtime_error {
    BudgetExceeded() : std::runtime_error("solver node cap exceeded") {}
};

/// Memoizing solver for one game instance.  Game value depends only on
/// (rounds remaining, current map), which is the memo key.  Antagonist
/// challenge enumeration is restricted to challenges naming at least one
/// element outside dom(f) / range(f); fully covered challenges are answerable
/// by standing still and never help the antagonist.
class GameEngine {
public:
    GameEngine(const FiniteStructure& m1, const FiniteStructure& m2, Vocabulary vocab,
               int budget, SolveOptions opts = {});
    ~GameEngine();
    GameEngine(GameEngine&&) noexcept;
    GameEngine& operator=(GameEngine&&) noexcept;

    Winner winner();
    bool position_wins(const PartialMap& f, int rounds_left);

    int budget() const { return budget_; }
    int rounds() const { return budget_ + 1; }
    const Vocabulary& vocab() const { return vocab_; }
    const FiniteStructure& m1() const { return m1_; }
    const FiniteStructure& m2() const { return m2_; }
    std::uint64_t positions() const { return memo_.size(); }

    /// All challenges within the budget, canonical order.
    std::vector<Challenge> all_challenges() const;
    /// The restricted challenge set from position f (at least one new element).
    std::vector<Challenge> pruned_challenges(const PartialMap& f) const;
    std::vector<PartialMap> responses(const PartialMap& f, const Challenge& ch) const;

    /// Canonical winning response: first legal response (lexicographic) that
    /// keeps a winning position.  nullopt when none exists.
    std::optional<PartialMap> respond(const PartialMap& f, int rounds_left, const Challenge& ch);

private:
    FiniteStructure m1_, m2_;
    Vocabulary vocab_;
    int budget_;
    SolveOptions opts_;
    std::unique_ptr<detail::DenseContext> ctx_;
    std::map<std::pair<int, PartialMap>, bool> memo_;
};

/// Response table for a winning protagonist: canonical position + challenge
/// -> the strategy's reply, covering every budget-legal challenge at every
/// position the strategy can reach.
struct ProtagonistCertificate {
    std::map<std::tuple<int, PartialMap, Challenge>, PartialMap> response;
};

/// Losing-side witness: one challenge per reachable position such that every
/// legal protagonist reply stays losing.
struct AntagonistCertificate {
    std::map<std::pair<int, PartialMap>, Challenge> challenge;
};

struct SolveResult {
    Winner winner = Winner::undecided_budget;
    std::optional<ProtagonistCertificate> strategy;
    std::optional<AntagonistCertificate> refutation;
    SolveStats stats;
};

/// Solve the budget-k game between the pair over chain level min(k, top).
SolveResult solve_game(const FiniteStructure& m1, const FiniteStructure& m2,
                       const VocabularyChain& chain, int k, SolveOptions opts = {});

/// Replays a certificate against exhaustive opposition / every reply.
bool verify_protagonist_certificate(const FiniteStructure& m1, const FiniteStructure& m2,
                                    const VocabularyChain& chain, int k,
                                    const ProtagonistCertificate& cert);
bool verify_antagonist_certificate(const FiniteStructure& m1, const FiniteStructure& m2,
                                   const VocabularyChain& chain, int k,
                                   const AntagonistCertificate& cert);

struct KSeqResult {
    std::vector<std::optional<int>> values;  // nullopt: undecided at the node cap
    SolveStats stats;

    bool complete() const;
    /// Throws if any index is undecided.
    std::vector<long long> require_complete() const;
};

/// k_{m,n} = max{k <= n : protagonist wins the budget-k game at index n},
/// computed by solving every k <= n (no monotonicity assumed).
KSeqResult compute_k_seq(const ProblemSpec& spec, SolveOptions opts = {});

/// The relativized-truth biconditional: phi under dom(f) on the left agrees
/// with phi under range(f) on the right, at the f-image of the valuation.
/// `v` maps phi's free variables into dom(f).
bool check_ss1(const FiniteStructure& m1, const FiniteStructure& m2, const PartialMap& f,
               const Formula& phi, const Valuation& v);

struct DistinguishResult {
    bool found = false;
    FormulaPtr sentence;  // existentially closed boolean combination of atoms
    int direction = 0;    // 1 or 2: the side satisfying the sentence
    int width = 0;        // existential variables used
    int width_cap = 0;    // the search bound that applied
    SolveStats stats;
};

/// When the antagonist wins the budget-(k+1) game, searches for a sentence
/// (an existentially closed boolean combination of strictly atomic level-
/// (k+1) formulas, width <= (k+2)(k+1)) true in exactly one structure.  The
/// result is verified by eval before it is returned.
DistinguishResult extract_distinguisher(const FiniteStructure& m1, const FiniteStructure& m2,
                                        const VocabularyChain& chain, int k,
                                        SolveOptions opts = {});

}  // namespace efk
