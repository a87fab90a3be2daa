#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "efk/structures.hpp"

/// First-order formulas over a finite vocabulary: AST, parser, Tarskian
/// evaluation with optional quantifier relativization, and a bounded
/// normal-form sentence enumerator used as a brute-force oracle.
namespace efk {

enum class FormulaKind { equal, rel, fun, konst, neg, conj, disj, exists, forall };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
    FormulaKind kind;
    std::string sym;                // rel/fun/const symbol name, or bound variable
    std::vector<std::string> args;  // atom arguments (equal: {x, y})
    std::string out;                // result variable of fun/const atoms
    FormulaPtr a, b;                // children (neg/quantifier: a; conj/disj: a, b)
};

FormulaPtr f_equal(std::string x, std::string y);
FormulaPtr f_rel(std::string sym, std::vector<std::string> args);
FormulaPtr f_fun(std::string sym, std::vector<std::string> args, std::string out);
FormulaPtr f_const(std::string sym, std::string out);
FormulaPtr f_not(FormulaPtr a);
FormulaPtr f_and(FormulaPtr a, FormulaPtr b);
FormulaPtr f_or(FormulaPtr a, FormulaPtr b);
FormulaPtr f_exists(std::string var, FormulaPtr body);
FormulaPtr f_forall(std::string var, FormulaPtr body);

bool structurally_equal(const Formula& a, const Formula& b);
/// Total order on ASTs; the tie-break order used everywhere outputs must be
/// deterministic.
int compare(const Formula& a, const Formula& b);

int quantifier_rank(const Formula& f);
bool is_strictly_atomic(const Formula& f);
std::set<std::string> free_vars(const Formula& f);
/// Names of all vocabulary symbols mentioned by atoms of f.
std::set<std::string> symbols_of(const Formula& f);

std::string print_formula(const Formula& f);

struct ParseError : std::runtime_error {
    std::size_t offset;
    ParseError(std::size_t offset, const std::string& what);
};

/// Recursive-descent parser for the grammar in the README.  When a
/// vocabulary is supplied, names are resolved against it (constants become
/// constant atoms, arities are checked); otherwise every unapplied name is a
/// variable.
FormulaPtr parse_formula(const std::string& text, const Vocabulary* vocab = nullptr);

using Valuation = std::map<std::string, int>;

/// Tarskian truth.  When `domain` is present every quantifier ranges over it
/// only (the relativized phi_D semantics); absent means the full universe.
bool eval(const FiniteStructure& m, const Formula& f, const Valuation& v = {},
          const std::optional<std::vector<int>>& domain = std::nullopt);

/// Flat, slot-based form of a formula bound to one structure, for fast
/// repeated evaluation over many variable bindings.
class CompiledFormula {
public:
    CompiledFormula(const Formula& f, const FiniteStructure& m,
                    std::span<const std::string> free_order);

    /// free_values must match free_order from construction.
    bool eval(std::span<const int> free_values) const;
    bool eval_restricted(std::span<const int> free_values, std::span<const int> domain) const;

private:
    struct Node {
        FormulaKind kind;
        int a = -1, b = -1;          // child node indices
        int slot = -1;               // quantifier slot / equal lhs / const out
        int slot2 = -1;              // equal rhs / fun out
        std::vector<int> arg_slots;  // rel/fun argument slots
        const std::vector<int>* fun_table = nullptr;
        std::vector<char> rel_bits;  // dense truth table for rel atoms
        int const_value = -1;
    };

    bool eval_node(int idx, std::vector<int>& slots, std::span<const int>* domain) const;
    int compile(const Formula& f, const FiniteStructure& m,
                std::vector<std::string>& scope);

    std::vector<Node> nodes_;
    int root_ = -1;
    int universe_ = 0;
    std::size_t num_slots_ = 0;
};

struct EnumerateOptions {
    /// Maximum number of units joined by one conjunction/disjunction inside
    /// quantifier bodies.
    int max_clause_size = 2;
    /// Same cap for the outermost boolean layer.  Defaults to 1 (no root
    /// combinations): truth of a root-level combination is determined
    /// componentwise by the emitted units, and closing the stream under them
    /// multiplies its size by the square.
    int max_root_clause_size = 1;
};

/// All sentences over `vocab` with quantifier rank <= rank_bound and at most
/// var_bound variable names, without structural duplicates, in a fixed
/// deterministic order, modulo this normal form: negation normal, negation on
/// atoms only; one boolean layer (duplicate-free conjunctions or disjunctions
/// of at most max_clause_size units in enumeration order, no complementary
/// literal pair) between quantifiers; the quantifier at nesting depth d
/// always binds v<d>, so alpha-variants and shadowed rebindings are emitted
/// once; no vacuous quantifiers; no reflexive equalities.  Cost grows
/// super-exponentially in both bounds; callers keep them tiny.
std::vector<FormulaPtr> enumerate_sentences(const Vocabulary& vocab, int rank_bound,
                                            int var_bound, EnumerateOptions opts = {});

/// Same family with free variables drawn from `free_pool` (each emitted
/// formula uses a subset of them).  enumerate_sentences == empty pool.
std::vector<FormulaPtr> enumerate_formulas(const Vocabulary& vocab, int rank_bound,
                                           int var_bound,
                                           const std::vector<std::string>& free_pool,
                                           EnumerateOptions opts = {});

}  // namespace efk
