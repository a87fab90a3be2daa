#pragma once

#include <optional>
#include <string>
#include <vector>

#include "efk/structures.hpp"

/// The filter generated by co-bounded sets and the tails {n : k_n > c} of a
/// k-sequence, decided exactly on the boolean algebra of eventually periodic
/// subsets of omega.
namespace efk {

/// Explicit window values plus a declared tail rule.
struct KSeqSpec {
    std::vector<long long> prefix;
    TailClass tail;

    int window_len() const { return static_cast<int>(prefix.size()); }
    long long value_at(long long n) const;
    /// Period of the value rule beyond the window (1 for bounded/affine).
    long long tail_period() const;

    /// Prefix values >= 0, well-formed tail. Throws on violation.
    void validate() const;
};

KSeqSpec parse_kseq_file(const std::string& text);
KSeqSpec load_kseq_file(const std::string& path);

/// An eventually periodic subset of omega: explicit bits on [0, head_len),
/// then tail_bits[(n - head_len) % period] forever.  Closed under the boolean
/// operations; all decisions about such sets are exact.
class EventuallyPeriodicSet {
public:
    EventuallyPeriodicSet();  // empty set

    static EventuallyPeriodicSet finite(std::vector<long long> elements);
    static EventuallyPeriodicSet cofinite(std::vector<long long> missing);
    /// {n : n >= start}
    static EventuallyPeriodicSet from(long long start);
    /// Explicit head then cyclic tail.
    static EventuallyPeriodicSet periodic(std::vector<bool> head, std::vector<bool> tail_bits);

    bool contains(long long n) const;
    EventuallyPeriodicSet complement() const;
    EventuallyPeriodicSet intersect(const EventuallyPeriodicSet& other) const;
    EventuallyPeriodicSet unite(const EventuallyPeriodicSet& other) const;

    bool is_empty() const;
    bool is_finite() const;
    bool subset_of(const EventuallyPeriodicSet& other) const;
    /// Smallest element, if any.
    std::optional<long long> min_element() const;
    /// Some residue class (mod period()) that lies in the set from head_len()
    /// on; nullopt when the tail is empty.
    std::optional<long long> infinite_residue() const;

    long long head_len() const { return static_cast<long long>(head_.size()); }
    long long period() const { return static_cast<long long>(tail_.size()); }

    /// Semantic equality (representations are not canonical).
    bool same_set(const EventuallyPeriodicSet& other) const;

private:
    std::vector<bool> head_;
    std::vector<bool> tail_;  // nonempty
};

/// SetExpr textual syntax: fin{..}, cofin{..}, gen(c), evens, odds,
/// period(p,bits), from(n0), ~S, S & T, S | T, parentheses.  gen(c) needs the
/// k-sequence context.
EventuallyPeriodicSet parse_set_expr(const std::string& text, const KSeqSpec* kseq = nullptr);

/// The exact set {n : k_n > c}.
EventuallyPeriodicSet generator(const KSeqSpec& kseq, long long c);

enum class FilterClass { proper_nonprincipal, improper };

FilterClass classify(const KSeqSpec& kseq);

struct FilterDecision {
    bool member = false;
    // Witness when member: S contains {n >= n0 : k_n > c}.
    long long c = -1;
    long long n0 = 0;
    // Counterexample scheme when not a member: every n >= start with
    // n == residue (mod period) has n outside S while k_n is unbounded on the
    // class.
    long long residue = -1;
    long long period = 0;
    long long start = 0;
    std::string explanation;
};

/// Exact membership of S in the filter D_k.  For bounded tails the filter is
/// the full power set and everything is a member.
FilterDecision in_filter(const KSeqSpec& kseq, const EventuallyPeriodicSet& s);

/// "for D-almost-all n, n in P": definitional alias of in_filter.
FilterDecision forall_d(const KSeqSpec& kseq, const EventuallyPeriodicSet& p);

/// Independent confirmation of a decision by direct evaluation on an initial
/// segment long enough to cover every periodic behavior involved.
bool confirm_decision(const KSeqSpec& kseq, const EventuallyPeriodicSet& s,
                      const FilterDecision& d);

struct UltraproductClassification {
    bool is_ultraproduct_problem = false;
    bool consistent = true;  // tail rule vs computed window values on overlap
    std::vector<int> mismatches;  // overlapping indices where they disagree
};

/// Declared-tail classification of a problem whose window k-values have been
/// computed: ultraproduct iff the tail has limsup infinity, provided the tail
/// rule matches the computed values on every window index it claims to cover.
UltraproductClassification classify_problem(const ProblemSpec& spec,
                                            const std::vector<long long>& window_kseq);

/// Boolean form of classify_problem; a window/tail inconsistency is an error.
bool is_ultraproduct_problem(const ProblemSpec& spec,
                             const std::vector<long long>& window_kseq);

}  // namespace efk
