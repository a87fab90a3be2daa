#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

/// Finite vocabularies, vocabulary chains, finite structures and windowed
/// problem instances (a pair of structures per index plus a declared tail).
///
/// Universes are always initial segments of the naturals {0, ..., size-1};
/// external element names are not part of the model.
namespace efk {

enum class SymbolKind { relation, function, constant };

struct Symbol {
    std::string name;
    SymbolKind kind = SymbolKind::relation;
    int arity = 0;  // 0 for constants, >= 1 otherwise

    friend bool operator==(const Symbol&, const Symbol&) = default;
    friend auto operator<=>(const Symbol&, const Symbol&) = default;
};

/// A finite set of symbols with unique names.
class Vocabulary {
public:
    Vocabulary() = default;
    explicit Vocabulary(std::vector<Symbol> symbols);

    const std::vector<Symbol>& symbols() const { return symbols_; }
    const Symbol* find(const std::string& name) const;
    bool contains(const Symbol& s) const;
    bool subset_of(const Vocabulary& other) const;
    bool empty() const { return symbols_.empty(); }
    std::size_t size() const { return symbols_.size(); }

    friend bool operator==(const Vocabulary&, const Vocabulary&) = default;

private:
    std::vector<Symbol> symbols_;  // sorted by name, names unique
};

/// Increasing chain of vocabularies; level 0 is always empty.
struct VocabularyChain {
    std::vector<Vocabulary> levels;

    int top_level() const { return static_cast<int>(levels.size()) - 1; }
    /// Vocabulary used at level k; levels past the end clamp to the top
    /// (the chain's union, which is finite here).
    const Vocabulary& at_level(int k) const;
};

struct RelationInterp {
    int arity = 1;
    std::set<std::vector<int>> tuples;

    friend bool operator==(const RelationInterp&, const RelationInterp&) = default;
    friend auto operator<=>(const RelationInterp&, const RelationInterp&) = default;
};

struct FunctionInterp {
    int arity = 1;
    std::vector<int> table;  // row-major over universe^arity

    int apply(const std::vector<int>& args, int universe_size) const;

    friend bool operator==(const FunctionInterp&, const FunctionInterp&) = default;
    friend auto operator<=>(const FunctionInterp&, const FunctionInterp&) = default;
};

/// A finite structure: universe {0..size-1} plus named interpretations.
/// Interpretations are self-describing; which symbols *must* be present is
/// decided by the vocabulary the structure is validated or used against.
struct FiniteStructure {
    int size = 1;
    std::map<std::string, RelationInterp> relations;
    std::map<std::string, FunctionInterp> functions;
    std::map<std::string, int> constants;

    bool interprets(const Symbol& s) const;

    friend bool operator==(const FiniteStructure&, const FiniteStructure&) = default;
    friend auto operator<=>(const FiniteStructure&, const FiniteStructure&) = default;
};

/// Declared behavior of a k-sequence beyond (or, with `from` set, overlapping)
/// the explicit window. Affine terms evaluate as a*n + b at index n.
struct AffineTerm {
    long long a = 0;
    long long b = 0;

    long long value_at(long long n) const { return a * n + b; }
    friend bool operator==(const AffineTerm&, const AffineTerm&) = default;
};

struct TailClass {
    enum class Kind { bounded, affine, periodic };

    Kind kind = Kind::bounded;
    long long bound = 0;             // bounded: k_n = bound
    AffineTerm term;                 // affine: k_n = a*n + b, a >= 1
    std::vector<AffineTerm> pattern; // periodic: k_n = pattern[(n - start) % p](n)
    std::optional<long long> from;   // first index the rule claims to cover
                                     // (defaults to the window length)

    static TailClass bounded_tail(long long b);
    static TailClass affine_tail(long long a, long long b);
    static TailClass periodic_tail(std::vector<AffineTerm> pattern);

    /// Value of the tail rule at index n, where `start` is the index the
    /// rule starts from (periodic patterns cycle from there).
    long long value_at(long long n, long long start) const;
    bool limsup_infinite() const;

    friend bool operator==(const TailClass&, const TailClass&) = default;
};

/// A truncated ultraproduct problem: a window of structure pairs over a
/// vocabulary chain, with a declared tail for the k-sequence.
struct ProblemSpec {
    VocabularyChain chain;
    std::vector<std::pair<FiniteStructure, FiniteStructure>> pairs;
    std::optional<std::vector<long long>> size_bound;  // per-index cap, values >= 2
    TailClass kseq_tail;

    int window_len() const { return static_cast<int>(pairs.size()); }
};

struct Violation {
    std::string clause;   // which invariant failed
    std::string symbol;   // offending symbol name, if any
    int index = -1;       // window index, if any
    int side = 0;         // 1 or 2, if any
    std::string message;  // human-readable detail
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
};

ValidationReport validate_problem(const ProblemSpec& spec);

/// Finite analogue of kappa: the largest universe size in the window.
int kappa(const ProblemSpec& spec);

/// Restriction of a structure to the symbols of chain level j.
FiniteStructure reduct(const FiniteStructure& m, int level, const VocabularyChain& chain);

/// Strict line-oriented problem file format (see README).  Throws
/// std::runtime_error with a line number on any malformed input.
ProblemSpec parse_problem_file(const std::string& text);
ProblemSpec load_problem_file(const std::string& path);
std::string serialize_problem(const ProblemSpec& spec);

std::string tail_to_string(const TailClass& tail);
TailClass parse_tail(const std::string& text);

}  // namespace efk
