#include "efk/formulas.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <stdexcept>

namespace efk {

namespace {

FormulaPtr make(Formula f) { return std::make_shared<const Formula>(std::move(f)); }

}  // namespace

FormulaPtr f_equal(std::string x, std::string y) {
    return make({FormulaKind::equal, "", {std::move(x), std::move(y)}, "", nullptr, nullptr});
}

FormulaPtr f_rel(std::string sym, std::vector<std::string> args) {
    return make({FormulaKind::rel, std::move(sym), std::move(args), "", nullptr, nullptr});
}

FormulaPtr f_fun(std::string sym, std::vector<std::string> args, std::string out) {
    return make({FormulaKind::fun, std::move(sym), std::move(args), std::move(out), nullptr, nullptr});
}

FormulaPtr f_const(std::string sym, std::string out) {
    return make({FormulaKind::konst, std::move(sym), {}, std::move(out), nullptr, nullptr});
}

FormulaPtr f_not(FormulaPtr a) {
    return make({FormulaKind::neg, "", {}, "", std::move(a), nullptr});
}

FormulaPtr f_and(FormulaPtr a, FormulaPtr b) {
    return make({FormulaKind::conj, "", {}, "", std::move(a), std::move(b)});
}

FormulaPtr f_or(FormulaPtr a, FormulaPtr b) {
    return make({FormulaKind::disj, "", {}, "", std::move(a), std::move(b)});
}

FormulaPtr f_exists(std::string var, FormulaPtr body) {
    return make({FormulaKind::exists, std::move(var), {}, "", std::move(body), nullptr});
}

FormulaPtr f_forall(std::string var, FormulaPtr body) {
    return make({FormulaKind::forall, std::move(var), {}, "", std::move(body), nullptr});
}

int compare(const Formula& a, const Formula& b) {
    if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
    if (int c = a.sym.compare(b.sym); c != 0) return c < 0 ? -1 : 1;
    if (a.args != b.args) return a.args < b.args ? -1 : 1;
    if (int c = a.out.compare(b.out); c != 0) return c < 0 ? -1 : 1;
    if ((a.a == nullptr) != (b.a == nullptr)) return a.a == nullptr ? -1 : 1;
    if (a.a && b.a) {
        if (int c = compare(*a.a, *b.a); c != 0) return c;
    }
    if ((a.b == nullptr) != (b.b == nullptr)) return a.b == nullptr ? -1 : 1;
    if (a.b && b.b) {
        if (int c = compare(*a.b, *b.b); c != 0) return c;
    }
    return 0;
}

bool structurally_equal(const Formula& a, const Formula& b) { return compare(a, b) == 0; }

int quantifier_rank(const Formula& f) {
    switch (f.kind) {
        case FormulaKind::equal:
        case FormulaKind::rel:
        case FormulaKind::fun:
        case FormulaKind::konst:
            return 0;
        case FormulaKind::neg:
            return quantifier_rank(*f.a);
        case FormulaKind::conj:
        case FormulaKind::disj:
            return std::max(quantifier_rank(*f.a), quantifier_rank(*f.b));
        case FormulaKind::exists:
        case FormulaKind::forall:
            return 1 + quantifier_rank(*f.a);
    }
    return 0;
}

bool is_strictly_atomic(const Formula& f) {
    switch (f.kind) {
        case FormulaKind::equal:
        case FormulaKind::rel:
        case FormulaKind::fun:
        case FormulaKind::konst:
            return true;
        default:
            return false;
    }
}

namespace {

void free_vars_into(const Formula& f, std::set<std::string>& bound, std::set<std::string>& out) {
    switch (f.kind) {
        case FormulaKind::equal:
        case FormulaKind::rel:
        case FormulaKind::fun:
            for (const auto& v : f.args)
                if (!bound.count(v)) out.insert(v);
            if (!f.out.empty() && !bound.count(f.out)) out.insert(f.out);
            break;
        case FormulaKind::konst:
            if (!bound.count(f.out)) out.insert(f.out);
            break;
        case FormulaKind::neg:
            free_vars_into(*f.a, bound, out);
            break;
        case FormulaKind::conj:
        case FormulaKind::disj:
            free_vars_into(*f.a, bound, out);
            free_vars_into(*f.b, bound, out);
            break;
        case FormulaKind::exists:
        case FormulaKind::forall: {
            bool inserted = bound.insert(f.sym).second;
            free_vars_into(*f.a, bound, out);
            if (inserted) bound.erase(f.sym);
            break;
        }
    }
}

}  // namespace

std::set<std::string> free_vars(const Formula& f) {
    std::set<std::string> bound, out;
    free_vars_into(f, bound, out);
    return out;
}

std::set<std::string> symbols_of(const Formula& f) {
    std::set<std::string> out;
    switch (f.kind) {
        case FormulaKind::equal:
            break;
        case FormulaKind::rel:
        case FormulaKind::fun:
        case FormulaKind::konst:
            out.insert(f.sym);
            break;
        case FormulaKind::neg:
        case FormulaKind::exists:
        case FormulaKind::forall: {
            out = symbols_of(*f.a);
            break;
        }
        case FormulaKind::conj:
        case FormulaKind::disj: {
            out = symbols_of(*f.a);
            auto rhs = symbols_of(*f.b);
            out.insert(rhs.begin(), rhs.end());
            break;
        }
    }
    return out;
}

namespace {

bool is_symbolic_name(const std::string& s) {
    return !s.empty() && std::string("<>=~^@%*+/").find(s[0]) != std::string::npos;
}

}  // namespace

namespace {

// quantifiers are grammar-level productions, so they need parentheses when
// they appear under a connective
std::string print_operand(const Formula& f) {
    if (f.kind == FormulaKind::exists || f.kind == FormulaKind::forall) {
        return "(" + print_formula(f) + ")";
    }
    return print_formula(f);
}

}  // namespace

std::string print_formula(const Formula& f) {
    std::ostringstream out;
    switch (f.kind) {
        case FormulaKind::equal:
            out << f.args[0] << " = " << f.args[1];
            break;
        case FormulaKind::rel:
            if (f.args.size() == 2 && is_symbolic_name(f.sym)) {
                out << f.args[0] << " " << f.sym << " " << f.args[1];
            } else {
                out << f.sym << "(";
                for (std::size_t i = 0; i < f.args.size(); ++i) out << (i ? ", " : "") << f.args[i];
                out << ")";
            }
            break;
        case FormulaKind::fun:
            out << f.sym << "(";
            for (std::size_t i = 0; i < f.args.size(); ++i) out << (i ? ", " : "") << f.args[i];
            out << ") = " << f.out;
            break;
        case FormulaKind::konst:
            out << f.sym << " = " << f.out;
            break;
        case FormulaKind::neg:
            if (f.a->kind == FormulaKind::exists || f.a->kind == FormulaKind::forall) {
                out << "!(" << print_formula(*f.a) << ")";
            } else {
                out << "!" << print_formula(*f.a);
            }
            break;
        case FormulaKind::conj:
            out << "(" << print_operand(*f.a) << " & " << print_operand(*f.b) << ")";
            break;
        case FormulaKind::disj:
            out << "(" << print_operand(*f.a) << " | " << print_operand(*f.b) << ")";
            break;
        case FormulaKind::exists:
            out << "exists " << f.sym << " . " << print_formula(*f.a);
            break;
        case FormulaKind::forall:
            out << "forall " << f.sym << " . " << print_formula(*f.a);
            break;
    }
    return out.str();
}

ParseError::ParseError(std::size_t offset_, const std::string& what_)
    : std::runtime_error("parse error at offset " + std::to_string(offset_) + ": " + what_),
      offset(offset_) {}

// ---------------------------------------------------------------------------
// Parser

namespace {

enum class Tok { name, symbolic, lparen, rparen, comma, dot, bang, amp, pipe, eq, impl, iff, end };

struct Token {
    Tok kind;
    std::string text;
    std::size_t pos;
};

std::vector<Token> tokenize(const std::string& s) {
    static const std::string sym_chars = "<>=~^@%*+/";
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            ++i;
            continue;
        }
        std::size_t start = i;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_' ||
                                    s[i] == '\'')) {
                ++i;
            }
            out.push_back({Tok::name, s.substr(start, i - start), start});
        } else if (sym_chars.find(c) != std::string::npos) {
            while (i < s.size() && sym_chars.find(s[i]) != std::string::npos) ++i;
            std::string t = s.substr(start, i - start);
            if (t == "=") out.push_back({Tok::eq, t, start});
            else if (t == "=>") out.push_back({Tok::impl, t, start});
            else if (t == "<=>") out.push_back({Tok::iff, t, start});
            else out.push_back({Tok::symbolic, t, start});
        } else {
            switch (c) {
                case '(': out.push_back({Tok::lparen, "(", start}); break;
                case ')': out.push_back({Tok::rparen, ")", start}); break;
                case ',': out.push_back({Tok::comma, ",", start}); break;
                case '.': out.push_back({Tok::dot, ".", start}); break;
                case '!': out.push_back({Tok::bang, "!", start}); break;
                case '&': out.push_back({Tok::amp, "&", start}); break;
                case '|': out.push_back({Tok::pipe, "|", start}); break;
                default:
                    throw ParseError(start, std::string("unexpected character '") + c + "'");
            }
            ++i;
        }
    }
    out.push_back({Tok::end, "", s.size()});
    return out;
}

class Parser {
public:
    Parser(std::vector<Token> tokens, const Vocabulary* vocab)
        : tokens_(std::move(tokens)), vocab_(vocab) {}

    FormulaPtr parse() {
        FormulaPtr f = formula();
        expect(Tok::end, "unexpected trailing input");
        return f;
    }

private:
    const Token& peek() const { return tokens_[pos_]; }
    Token next() { return tokens_[pos_++]; }
    void expect(Tok kind, const std::string& msg) {
        if (peek().kind != kind) throw ParseError(peek().pos, msg);
        ++pos_;
    }

    bool is_keyword(const Token& t) const {
        return t.kind == Tok::name && (t.text == "exists" || t.text == "forall");
    }

    const Symbol* lookup(const std::string& name) const {
        return vocab_ ? vocab_->find(name) : nullptr;
    }

    std::string variable(const Token& t) const {
        if (t.kind != Tok::name) throw ParseError(t.pos, "expected a variable");
        if (is_keyword(t)) throw ParseError(t.pos, "keyword used as variable");
        if (lookup(t.text) != nullptr) {
            throw ParseError(t.pos, "vocabulary symbol '" + t.text + "' used as a variable");
        }
        return t.text;
    }

    FormulaPtr formula() {
        if (is_keyword(peek())) {
            Token q = next();
            std::string var = variable(next());
            expect(Tok::dot, "expected '.' after quantified variable");
            FormulaPtr body = formula();
            return q.text == "exists" ? f_exists(var, std::move(body))
                                      : f_forall(var, std::move(body));
        }
        return iff_level();
    }

    FormulaPtr iff_level() {
        FormulaPtr lhs = impl_level();
        while (peek().kind == Tok::iff) {
            next();
            FormulaPtr rhs = impl_level();
            lhs = f_and(f_or(f_not(lhs), rhs), f_or(f_not(rhs), lhs));
        }
        return lhs;
    }

    FormulaPtr impl_level() {
        FormulaPtr lhs = disj();
        if (peek().kind == Tok::impl) {
            next();
            FormulaPtr rhs = impl_level();  // right-associative
            return f_or(f_not(std::move(lhs)), std::move(rhs));
        }
        return lhs;
    }

    FormulaPtr disj() {
        FormulaPtr lhs = conj();
        while (peek().kind == Tok::pipe) {
            next();
            lhs = f_or(std::move(lhs), conj());
        }
        return lhs;
    }

    FormulaPtr conj() {
        FormulaPtr lhs = neg();
        while (peek().kind == Tok::amp) {
            next();
            lhs = f_and(std::move(lhs), neg());
        }
        return lhs;
    }

    FormulaPtr neg() {
        if (peek().kind == Tok::bang) {
            next();
            return f_not(neg());
        }
        return prim();
    }

    FormulaPtr prim() {
        if (peek().kind == Tok::lparen) {
            next();
            FormulaPtr f = formula();
            expect(Tok::rparen, "expected ')'");
            return f;
        }
        return atom();
    }

    FormulaPtr atom() {
        Token head = peek();
        if (head.kind != Tok::name && head.kind != Tok::symbolic) {
            throw ParseError(head.pos, "expected an atom");
        }
        if (is_keyword(head)) throw ParseError(head.pos, "quantifier not allowed here; parenthesize");
        next();

        if (peek().kind == Tok::lparen) {
            next();
            std::vector<std::string> args;
            args.push_back(variable(next()));
            while (peek().kind == Tok::comma) {
                next();
                args.push_back(variable(next()));
            }
            expect(Tok::rparen, "expected ',' or ')'");
            const Symbol* sym = lookup(head.text);
            if (peek().kind == Tok::eq) {
                next();
                std::string out = variable(next());
                if (sym != nullptr) {
                    if (sym->kind != SymbolKind::function) {
                        throw ParseError(head.pos, "'" + head.text + "' is not a function symbol");
                    }
                    if (sym->arity != static_cast<int>(args.size())) {
                        throw ParseError(head.pos, "arity mismatch for '" + head.text + "'");
                    }
                }
                return f_fun(head.text, std::move(args), std::move(out));
            }
            if (sym != nullptr) {
                if (sym->kind != SymbolKind::relation) {
                    throw ParseError(head.pos, "'" + head.text + "' is not a relation symbol");
                }
                if (sym->arity != static_cast<int>(args.size())) {
                    throw ParseError(head.pos, "arity mismatch for '" + head.text + "'");
                }
            }
            return f_rel(head.text, std::move(args));
        }

        if (peek().kind == Tok::eq) {
            next();
            std::string rhs = variable(next());
            const Symbol* sym = lookup(head.text);
            if (head.kind == Tok::symbolic) {
                throw ParseError(head.pos, "symbolic name on the left of '='");
            }
            if (sym != nullptr) {
                if (sym->kind != SymbolKind::constant) {
                    throw ParseError(head.pos, "'" + head.text + "' cannot appear bare on the left of '='");
                }
                return f_const(head.text, std::move(rhs));
            }
            return f_equal(head.text, std::move(rhs));
        }

        if (peek().kind == Tok::symbolic || (peek().kind == Tok::name && !is_keyword(peek()) &&
                                             lookup(peek().text) != nullptr &&
                                             lookup(peek().text)->kind == SymbolKind::relation)) {
            // infix binary relation sugar: x < y
            Token op = next();
            std::string rhs = variable(next());
            std::string lhs_var;
            {
                if (head.kind != Tok::name) throw ParseError(head.pos, "expected a variable");
                if (lookup(head.text) != nullptr) {
                    throw ParseError(head.pos, "vocabulary symbol '" + head.text + "' used as a variable");
                }
                lhs_var = head.text;
            }
            const Symbol* sym = lookup(op.text);
            if (sym != nullptr && (sym->kind != SymbolKind::relation || sym->arity != 2)) {
                throw ParseError(op.pos, "infix '" + op.text + "' is not a binary relation");
            }
            return f_rel(op.text, {std::move(lhs_var), std::move(rhs)});
        }

        throw ParseError(peek().pos, "expected '(', '=' or an infix relation after '" + head.text + "'");
    }

    std::vector<Token> tokens_;
    const Vocabulary* vocab_;
    std::size_t pos_ = 0;
};

}  // namespace

FormulaPtr parse_formula(const std::string& text, const Vocabulary* vocab) {
    return Parser(tokenize(text), vocab).parse();
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

int value_of(const Valuation& v, const std::string& name) {
    auto it = v.find(name);
    if (it == v.end()) throw std::invalid_argument("unbound variable '" + name + "'");
    return it->second;
}

bool eval_impl(const FiniteStructure& m, const Formula& f, Valuation& v,
               const std::vector<int>* domain) {
    switch (f.kind) {
        case FormulaKind::equal:
            return value_of(v, f.args[0]) == value_of(v, f.args[1]);
        case FormulaKind::rel: {
            auto it = m.relations.find(f.sym);
            if (it == m.relations.end()) {
                throw std::invalid_argument("relation '" + f.sym + "' not interpreted");
            }
            if (it->second.arity != static_cast<int>(f.args.size())) {
                throw std::invalid_argument("arity mismatch for relation '" + f.sym + "'");
            }
            std::vector<int> tup;
            tup.reserve(f.args.size());
            for (const auto& a : f.args) tup.push_back(value_of(v, a));
            return it->second.tuples.count(tup) > 0;
        }
        case FormulaKind::fun: {
            auto it = m.functions.find(f.sym);
            if (it == m.functions.end()) {
                throw std::invalid_argument("function '" + f.sym + "' not interpreted");
            }
            if (it->second.arity != static_cast<int>(f.args.size())) {
                throw std::invalid_argument("arity mismatch for function '" + f.sym + "'");
            }
            std::vector<int> tup;
            tup.reserve(f.args.size());
            for (const auto& a : f.args) tup.push_back(value_of(v, a));
            return it->second.apply(tup, m.size) == value_of(v, f.out);
        }
        case FormulaKind::konst: {
            auto it = m.constants.find(f.sym);
            if (it == m.constants.end()) {
                throw std::invalid_argument("constant '" + f.sym + "' not interpreted");
            }
            return it->second == value_of(v, f.out);
        }
        case FormulaKind::neg:
            return !eval_impl(m, *f.a, v, domain);
        case FormulaKind::conj:
            return eval_impl(m, *f.a, v, domain) && eval_impl(m, *f.b, v, domain);
        case FormulaKind::disj:
            return eval_impl(m, *f.a, v, domain) || eval_impl(m, *f.b, v, domain);
        case FormulaKind::exists:
        case FormulaKind::forall: {
            bool want = f.kind == FormulaKind::exists;
            auto it = v.find(f.sym);
            std::optional<int> saved;
            if (it != v.end()) saved = it->second;
            bool result = !want;
            if (domain != nullptr) {
                for (int x : *domain) {
                    v[f.sym] = x;
                    if (eval_impl(m, *f.a, v, domain) == want) {
                        result = want;
                        break;
                    }
                }
            } else {
                for (int x = 0; x < m.size; ++x) {
                    v[f.sym] = x;
                    if (eval_impl(m, *f.a, v, domain) == want) {
                        result = want;
                        break;
                    }
                }
            }
            if (saved) v[f.sym] = *saved;
            else v.erase(f.sym);
            return result;
        }
    }
    throw std::logic_error("bad formula kind");
}

}  // namespace

bool eval(const FiniteStructure& m, const Formula& f, const Valuation& v,
          const std::optional<std::vector<int>>& domain) {
    if (domain) {
        for (int x : *domain) {
            if (x < 0 || x >= m.size) {
                throw std::invalid_argument("relativization domain element outside universe");
            }
        }
    }
    Valuation scratch = v;
    return eval_impl(m, f, scratch, domain ? &*domain : nullptr);
}

// ---------------------------------------------------------------------------
// Compiled evaluation

int CompiledFormula::compile(const Formula& f, const FiniteStructure& m,
                             std::vector<std::string>& scope) {
    auto slot_of = [&](const std::string& name) -> int {
        for (std::size_t i = scope.size(); i-- > 0;) {
            if (scope[i] == name) return static_cast<int>(i);
        }
        throw std::invalid_argument("unbound variable '" + name + "'");
    };
    Node node;
    node.kind = f.kind;
    switch (f.kind) {
        case FormulaKind::equal:
            node.slot = slot_of(f.args[0]);
            node.slot2 = slot_of(f.args[1]);
            break;
        case FormulaKind::rel: {
            auto it = m.relations.find(f.sym);
            if (it == m.relations.end()) {
                throw std::invalid_argument("relation '" + f.sym + "' not interpreted");
            }
            const RelationInterp& rel = it->second;
            if (rel.arity != static_cast<int>(f.args.size())) {
                throw std::invalid_argument("arity mismatch for relation '" + f.sym + "'");
            }
            for (const auto& a : f.args) node.arg_slots.push_back(slot_of(a));
            std::size_t cells = 1;
            for (int i = 0; i < rel.arity; ++i) cells *= static_cast<std::size_t>(m.size);
            node.rel_bits.assign(cells, 0);
            for (const auto& tup : rel.tuples) {
                std::size_t idx = 0;
                for (int x : tup) idx = idx * static_cast<std::size_t>(m.size) + static_cast<std::size_t>(x);
                node.rel_bits[idx] = 1;
            }
            break;
        }
        case FormulaKind::fun: {
            auto it = m.functions.find(f.sym);
            if (it == m.functions.end()) {
                throw std::invalid_argument("function '" + f.sym + "' not interpreted");
            }
            if (it->second.arity != static_cast<int>(f.args.size())) {
                throw std::invalid_argument("arity mismatch for function '" + f.sym + "'");
            }
            for (const auto& a : f.args) node.arg_slots.push_back(slot_of(a));
            node.fun_table = &it->second.table;
            node.slot2 = slot_of(f.out);
            break;
        }
        case FormulaKind::konst: {
            auto it = m.constants.find(f.sym);
            if (it == m.constants.end()) {
                throw std::invalid_argument("constant '" + f.sym + "' not interpreted");
            }
            node.const_value = it->second;
            node.slot = slot_of(f.out);
            break;
        }
        case FormulaKind::neg:
            node.a = compile(*f.a, m, scope);
            break;
        case FormulaKind::conj:
        case FormulaKind::disj:
            node.a = compile(*f.a, m, scope);
            node.b = compile(*f.b, m, scope);
            break;
        case FormulaKind::exists:
        case FormulaKind::forall: {
            node.slot = static_cast<int>(scope.size());
            scope.push_back(f.sym);
            num_slots_ = std::max(num_slots_, scope.size());
            node.a = compile(*f.a, m, scope);
            scope.pop_back();
            break;
        }
    }
    nodes_.push_back(std::move(node));
    return static_cast<int>(nodes_.size()) - 1;
}

CompiledFormula::CompiledFormula(const Formula& f, const FiniteStructure& m,
                                 std::span<const std::string> free_order)
    : universe_(m.size) {
    std::vector<std::string> scope(free_order.begin(), free_order.end());
    num_slots_ = scope.size();
    root_ = compile(f, m, scope);
}

bool CompiledFormula::eval_node(int idx, std::vector<int>& slots,
                                std::span<const int>* domain) const {
    const Node& n = nodes_[static_cast<std::size_t>(idx)];
    switch (n.kind) {
        case FormulaKind::equal:
            return slots[static_cast<std::size_t>(n.slot)] == slots[static_cast<std::size_t>(n.slot2)];
        case FormulaKind::rel: {
            std::size_t cell = 0;
            for (int s : n.arg_slots) {
                cell = cell * static_cast<std::size_t>(universe_) +
                       static_cast<std::size_t>(slots[static_cast<std::size_t>(s)]);
            }
            return n.rel_bits[cell] != 0;
        }
        case FormulaKind::fun: {
            std::size_t cell = 0;
            for (int s : n.arg_slots) {
                cell = cell * static_cast<std::size_t>(universe_) +
                       static_cast<std::size_t>(slots[static_cast<std::size_t>(s)]);
            }
            return (*n.fun_table)[cell] == slots[static_cast<std::size_t>(n.slot2)];
        }
        case FormulaKind::konst:
            return n.const_value == slots[static_cast<std::size_t>(n.slot)];
        case FormulaKind::neg:
            return !eval_node(n.a, slots, domain);
        case FormulaKind::conj:
            return eval_node(n.a, slots, domain) && eval_node(n.b, slots, domain);
        case FormulaKind::disj:
            return eval_node(n.a, slots, domain) || eval_node(n.b, slots, domain);
        case FormulaKind::exists:
        case FormulaKind::forall: {
            bool want = n.kind == FormulaKind::exists;
            auto& cell = slots[static_cast<std::size_t>(n.slot)];
            if (domain != nullptr) {
                for (int x : *domain) {
                    cell = x;
                    if (eval_node(n.a, slots, domain) == want) return want;
                }
            } else {
                for (int x = 0; x < universe_; ++x) {
                    cell = x;
                    if (eval_node(n.a, slots, domain) == want) return want;
                }
            }
            return !want;
        }
    }
    return false;
}

bool CompiledFormula::eval(std::span<const int> free_values) const {
    std::vector<int> slots(num_slots_, 0);
    std::copy(free_values.begin(), free_values.end(), slots.begin());
    return eval_node(root_, slots, nullptr);
}

bool CompiledFormula::eval_restricted(std::span<const int> free_values,
                                      std::span<const int> domain) const {
    for (int x : domain) {
        if (x < 0 || x >= universe_) {
            throw std::invalid_argument("relativization domain element outside universe");
        }
    }
    std::vector<int> slots(num_slots_, 0);
    std::copy(free_values.begin(), free_values.end(), slots.begin());
    return eval_node(root_, slots, &domain);
}

// ---------------------------------------------------------------------------
// Enumeration

namespace {

struct Enumerator {
    const Vocabulary& vocab;
    int var_bound;
    EnumerateOptions opts;

    std::vector<FormulaPtr> atoms(const std::vector<std::string>& avail) const {
        std::vector<FormulaPtr> out;
        for (std::size_t i = 0; i < avail.size(); ++i) {
            for (std::size_t j = i + 1; j < avail.size(); ++j) {
                out.push_back(f_equal(avail[i], avail[j]));
            }
        }
        for (const Symbol& s : vocab.symbols()) {
            switch (s.kind) {
                case SymbolKind::relation:
                    for_each_tuple(avail, s.arity, [&](const std::vector<std::string>& args) {
                        out.push_back(f_rel(s.name, args));
                    });
                    break;
                case SymbolKind::function:
                    for_each_tuple(avail, s.arity, [&](const std::vector<std::string>& args) {
                        for (const auto& y : avail) out.push_back(f_fun(s.name, args, y));
                    });
                    break;
                case SymbolKind::constant:
                    for (const auto& y : avail) out.push_back(f_const(s.name, y));
                    break;
            }
        }
        return out;
    }

    template <typename F>
    static void for_each_tuple(const std::vector<std::string>& avail, int arity, F&& fn) {
        if (avail.empty() && arity > 0) return;
        std::vector<std::string> args(static_cast<std::size_t>(arity));
        std::vector<std::size_t> idx(static_cast<std::size_t>(arity), 0);
        while (true) {
            for (std::size_t i = 0; i < idx.size(); ++i) args[i] = avail[idx[i]];
            fn(args);
            std::size_t i = idx.size();
            while (i-- > 0) {
                if (++idx[i] < avail.size()) break;
                idx[i] = 0;
                if (i == 0) return;
            }
            if (idx.empty()) return;
        }
    }

    static bool complementary(const Formula& a, const Formula& b) {
        if (a.kind == FormulaKind::neg && structurally_equal(*a.a, b)) return true;
        if (b.kind == FormulaKind::neg && structurally_equal(*b.a, a)) return true;
        return false;
    }

    std::vector<FormulaPtr> gen(int depth, int rank, const std::vector<std::string>& avail,
                                int clause_cap) const {
        std::vector<FormulaPtr> units;
        for (const FormulaPtr& atom : atoms(avail)) {
            units.push_back(atom);
            units.push_back(f_not(atom));
        }
        if (rank >= 1 && depth < var_bound) {
            std::string var = "v" + std::to_string(depth);
            std::vector<std::string> inner = avail;
            inner.push_back(var);
            auto bodies = gen(depth + 1, rank - 1, inner, opts.max_clause_size);
            for (const FormulaPtr& body : bodies) {
                if (!free_vars(*body).count(var)) continue;  // vacuous quantifier
                units.push_back(f_exists(var, body));
                units.push_back(f_forall(var, body));
            }
        }

        std::vector<FormulaPtr> out = units;
        if (clause_cap >= 2 && units.size() >= 2) {
            std::vector<std::size_t> pick;
            build_clauses(units, 0, clause_cap, pick, out);
        }
        return out;
    }

    void build_clauses(const std::vector<FormulaPtr>& units, std::size_t from, int cap,
                       std::vector<std::size_t>& pick, std::vector<FormulaPtr>& out) const {
        for (std::size_t i = from; i < units.size(); ++i) {
            bool clash = false;
            for (std::size_t p : pick) {
                if (complementary(*units[p], *units[i])) {
                    clash = true;
                    break;
                }
            }
            if (clash) continue;
            pick.push_back(i);
            if (pick.size() >= 2) {
                FormulaPtr conj = units[pick[0]];
                FormulaPtr disj = units[pick[0]];
                for (std::size_t j = 1; j < pick.size(); ++j) {
                    conj = f_and(conj, units[pick[j]]);
                    disj = f_or(disj, units[pick[j]]);
                }
                out.push_back(conj);
                out.push_back(disj);
            }
            if (static_cast<int>(pick.size()) < cap) {
                build_clauses(units, i + 1, cap, pick, out);
            }
            pick.pop_back();
        }
    }
};

void check_pool(const std::vector<std::string>& free_pool, int var_bound) {
    for (int d = 0; d < var_bound; ++d) {
        std::string v = "v" + std::to_string(d);
        if (std::find(free_pool.begin(), free_pool.end(), v) != free_pool.end()) {
            throw std::invalid_argument("free variable '" + v + "' collides with the bound pool");
        }
    }
}

}  // namespace

std::vector<FormulaPtr> enumerate_formulas(const Vocabulary& vocab, int rank_bound, int var_bound,
                                           const std::vector<std::string>& free_pool,
                                           EnumerateOptions opts) {
    if (rank_bound < 0 || var_bound < 0) throw std::invalid_argument("negative enumeration bound");
    check_pool(free_pool, var_bound);
    Enumerator e{vocab, var_bound, opts};
    return e.gen(0, rank_bound, free_pool, opts.max_root_clause_size);
}

std::vector<FormulaPtr> enumerate_sentences(const Vocabulary& vocab, int rank_bound, int var_bound,
                                            EnumerateOptions opts) {
    return enumerate_formulas(vocab, rank_bound, var_bound, {}, opts);
}

}  // namespace efk
