#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "efk/efgame.hpp"
#include "efk/filterlab.hpp"

/// The approximation calculus at finite truncation: per-index play prefixes
/// of the budget-k_n games, protagonist steered by the solver's canonical
/// winning strategy, ordered by play-prefix extension on active windows.
namespace efk {

struct PlayRound {
    Challenge challenge;
    PartialMap response;

    friend bool operator==(const PlayRound&, const PlayRound&) = default;
};

using Play = std::vector<PlayRound>;

/// The finite stand-in for a filter-large set: {n in [n0, N) : k_n > c}.
/// c = -1 drops the k-condition (a plain co-bounded window).
struct Window {
    long long c = -1;
    long long n0 = 0;

    friend bool operator==(const Window&, const Window&) = default;
};

/// Shared evaluation state for one problem: the computed k-sequence and one
/// solved game per index.  Per-index engines are independent, so concurrent
/// use across different indices is safe; one index's engine is not.
class ProblemContext {
public:
    explicit ProblemContext(const ProblemSpec& spec, SolveOptions opts = {});
    ~ProblemContext();
    ProblemContext(ProblemContext&&) noexcept;
    ProblemContext& operator=(ProblemContext&&) noexcept;

    const ProblemSpec& spec() const { return *spec_; }
    const std::vector<long long>& kseq() const { return kseq_; }
    int window_len() const { return static_cast<int>(kseq_.size()); }
    KSeqSpec kseq_spec() const;  // computed window values + declared tail
    GameEngine& engine(int n);

    std::vector<int> window_indices(const Window& w) const;

private:
    const ProblemSpec* spec_;
    SolveOptions opts_;
    std::vector<long long> kseq_;
    std::vector<std::unique_ptr<GameEngine>> engines_;
};

struct Approximation {
    std::vector<Play> plays;  // one play prefix per window index

    int rounds(int n) const { return static_cast<int>(plays[static_cast<std::size_t>(n)].size()); }
    PartialMap map(int n) const;  // last response; empty map for empty plays

    friend bool operator==(const Approximation&, const Approximation&) = default;
};

long long slack(const ProblemContext& ctx, const Approximation& s, int n);

Approximation empty_approx(ProblemContext& ctx);

/// Replays every play against the engine: challenges within budget, each
/// response exactly the canonical strategy's reply.
bool is_valid_approx(ProblemContext& ctx, const Approximation& s);

/// s's plays are prefixes of t's on every index of the window.
bool leq_ap(const ProblemContext& ctx, const Approximation& s, const Approximation& t,
            const Window& w);

struct SlackWitness {
    long long sigma = 0;
    Window window;
};

/// Checked constructor: nullopt unless slack >= sigma on the whole window.
std::optional<SlackWitness> make_slack_witness(const ProblemContext& ctx, const Approximation& s,
                                               long long sigma, const Window& w);

/// One more round at every index that still has slack: challenge (w_n, {})
/// on side 1, ({}, w_n) on side 2, answered canonically.  Indices with zero
/// slack are untouched.  Requires slack >= 1 on the window and |w_n| <= k_n
/// everywhere; the result keeps slack >= sigma_floor on the window.
Approximation extend(ProblemContext& ctx, const Approximation& s, int side,
                     const std::vector<std::vector<int>>& w, const Window& window,
                     long long sigma_floor);

struct MergeResult {
    Approximation merged;
    std::vector<int> chosen;      // per-index position in the chain
    std::vector<long long> eta;   // per-index slack target
    /// Window indices where the merge extends chain member ell (the D_ell
    /// report): {n in window : chosen[n] >= ell}.
    std::vector<int> extends_member(int ell, const ProblemContext& ctx, const Window& w) const;
};

/// Upper bound of a finite leq_ap-increasing chain: per index the deepest
/// chain member whose prefix chain and slack admit eta(n) =
/// min(sigma_target, min over the chain of slack(n)).
MergeResult merge_chain(ProblemContext& ctx, std::span<const Approximation> chain,
                        long long sigma_target, const Window& w);

struct TaggedPair {
    std::vector<int> h1, h2;
    Window window;
};

struct PairFamily {
    std::vector<TaggedPair> pairs;
    std::vector<int> excluded;  // candidate positions with no matching window
};

/// Candidates whose pointwise equation f_{s,n}(h1(n)) = h2(n) holds on some
/// nonempty active window; each kept pair is tagged with the largest such
/// window (ties: smaller c, then smaller n0).
PairFamily h_pairs(const ProblemContext& ctx, const Approximation& s,
                   const std::vector<std::pair<std::vector<int>, std::vector<int>>>& candidates);

struct ElementaryViolation {
    int index = -1;
    FormulaPtr formula;
    Valuation valuation;
};

struct ElementaryReport {
    std::vector<ElementaryViolation> violations;
    long long checked = 0;

    bool clean() const { return violations.empty(); }
};

/// The relativized-truth biconditional for every formula of rank <= r and
/// every argument tuple from dom(f_{s,n}), at every index with slack >= r
/// whose vocabulary level interprets the formula.  Violations would indicate
/// an engine bug.
ElementaryReport check_partial_elementary(const ProblemContext& ctx, const Approximation& s,
                                          std::span<const FormulaPtr> formulas, int rank);

struct AssembleRow {
    int side = 0;                  // 1: given h1, matched image; 2: matched preimage, given h2
    std::vector<int> given;
    std::vector<int> matched;      // -1 outside the reported window
};

struct AssembleResult {
    Approximation final_approx;
    std::vector<AssembleRow> table;
    Window window;                 // where the table is total
    bool injective = false;
};

struct AssembleError : std::runtime_error {
    int shortfall_index;
    AssembleError(int index, const std::string& what)
        : std::runtime_error(what), shortfall_index(index) {}
};

/// Alternating extends down the two enumerations (side 1 entries into
/// domains, side 2 entries into ranges), then the induced pair table on the
/// window where the whole load fits the budget.
AssembleResult assemble(ProblemContext& ctx, const std::vector<std::vector<int>>& e1,
                        const std::vector<std::vector<int>>& e2);

std::uint64_t fnv1a(const std::string& data);
std::string problem_digest(const ProblemSpec& spec);

std::string serialize_approximation(const ProblemContext& ctx, const Approximation& s);

}  // namespace efk
