#include "efk/structures.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace efk {

Vocabulary::Vocabulary(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {
    std::sort(symbols_.begin(), symbols_.end(),
              [](const Symbol& a, const Symbol& b) { return a.name < b.name; });
    for (std::size_t i = 1; i < symbols_.size(); ++i) {
        if (symbols_[i].name == symbols_[i - 1].name) {
            throw std::invalid_argument("duplicate symbol name in vocabulary: " + symbols_[i].name);
        }
    }
}

const Symbol* Vocabulary::find(const std::string& name) const {
    auto it = std::lower_bound(symbols_.begin(), symbols_.end(), name,
                               [](const Symbol& s, const std::string& n) { return s.name < n; });
    if (it != symbols_.end() && it->name == name) return &*it;
    return nullptr;
}

bool Vocabulary::contains(const Symbol& s) const {
    const Symbol* found = find(s.name);
    return found != nullptr && *found == s;
}

bool Vocabulary::subset_of(const Vocabulary& other) const {
    return std::all_of(symbols_.begin(), symbols_.end(),
                       [&](const Symbol& s) { return other.contains(s); });
}

const Vocabulary& VocabularyChain::at_level(int k) const {
    if (levels.empty()) throw std::out_of_range("empty vocabulary chain");
    if (k < 0) throw std::out_of_range("negative vocabulary level");
    int j = std::min(k, top_level());
    return levels[static_cast<std::size_t>(j)];
}

int FunctionInterp::apply(const std::vector<int>& args, int universe_size) const {
    std::size_t idx = 0;
    for (int a : args) idx = idx * static_cast<std::size_t>(universe_size) + static_cast<std::size_t>(a);
    return table.at(idx);
}

bool FiniteStructure::interprets(const Symbol& s) const {
    switch (s.kind) {
        case SymbolKind::relation: {
            auto it = relations.find(s.name);
            return it != relations.end() && it->second.arity == s.arity;
        }
        case SymbolKind::function: {
            auto it = functions.find(s.name);
            return it != functions.end() && it->second.arity == s.arity;
        }
        case SymbolKind::constant:
            return constants.count(s.name) > 0;
    }
    return false;
}

TailClass TailClass::bounded_tail(long long b) {
    TailClass t;
    t.kind = Kind::bounded;
    t.bound = b;
    return t;
}

TailClass TailClass::affine_tail(long long a, long long b) {
    TailClass t;
    t.kind = Kind::affine;
    t.term = {a, b};
    return t;
}

TailClass TailClass::periodic_tail(std::vector<AffineTerm> pattern) {
    TailClass t;
    t.kind = Kind::periodic;
    t.pattern = std::move(pattern);
    return t;
}

long long TailClass::value_at(long long n, long long start) const {
    switch (kind) {
        case Kind::bounded:
            return bound;
        case Kind::affine:
            return term.value_at(n);
        case Kind::periodic: {
            if (pattern.empty()) throw std::logic_error("empty periodic tail pattern");
            auto p = static_cast<long long>(pattern.size());
            long long j = (n - start) % p;
            if (j < 0) j += p;
            return pattern[static_cast<std::size_t>(j)].value_at(n);
        }
    }
    throw std::logic_error("bad tail kind");
}

bool TailClass::limsup_infinite() const {
    switch (kind) {
        case Kind::bounded:
            return false;
        case Kind::affine:
            return term.a >= 1;
        case Kind::periodic:
            return std::any_of(pattern.begin(), pattern.end(),
                               [](const AffineTerm& t) { return t.a >= 1; });
    }
    return false;
}

namespace {

void check_structure(const FiniteStructure& m, const Vocabulary& top, int index, int side,
                     std::vector<Violation>& out) {
    auto add = [&](std::string clause, std::string symbol, std::string msg) {
        out.push_back({std::move(clause), std::move(symbol), index, side, std::move(msg)});
    };
    if (m.size < 1) {
        add("structure nonempty", "", "universe size must be >= 1, got " + std::to_string(m.size));
        return;  // range checks below would be meaningless
    }
    for (const Symbol& s : top.symbols()) {
        if (!m.interprets(s)) {
            add("symbol interpreted", s.name, "top-level symbol not interpreted (or wrong arity)");
        }
    }
    for (const auto& [name, rel] : m.relations) {
        const Symbol* s = top.find(name);
        if (s == nullptr || s->kind != SymbolKind::relation) {
            add("symbol known", name, "relation not in the top vocabulary level");
            continue;
        }
        for (const auto& tup : rel.tuples) {
            if (static_cast<int>(tup.size()) != rel.arity) {
                add("tuple arity", name, "tuple of wrong arity");
            }
            for (int v : tup) {
                if (v < 0 || v >= m.size) {
                    add("tuple in universe", name,
                        "tuple value " + std::to_string(v) + " outside universe of size " +
                            std::to_string(m.size));
                    break;
                }
            }
        }
    }
    for (const auto& [name, fun] : m.functions) {
        const Symbol* s = top.find(name);
        if (s == nullptr || s->kind != SymbolKind::function) {
            add("symbol known", name, "function not in the top vocabulary level");
            continue;
        }
        std::size_t expect = 1;
        for (int i = 0; i < fun.arity; ++i) expect *= static_cast<std::size_t>(m.size);
        if (fun.table.size() != expect) {
            add("function total", name,
                "table has " + std::to_string(fun.table.size()) + " entries, expected " +
                    std::to_string(expect));
        }
        for (int v : fun.table) {
            if (v < 0 || v >= m.size) {
                add("function in universe", name, "table value outside universe");
                break;
            }
        }
    }
    for (const auto& [name, value] : m.constants) {
        const Symbol* s = top.find(name);
        if (s == nullptr || s->kind != SymbolKind::constant) {
            add("symbol known", name, "constant not in the top vocabulary level");
            continue;
        }
        if (value < 0 || value >= m.size) {
            add("constant in universe", name, "constant outside universe");
        }
    }
}

void check_tail(const TailClass& tail, long long window_len, std::vector<Violation>& out) {
    auto add = [&](std::string msg) { out.push_back({"tail well-formed", "", -1, 0, std::move(msg)}); };
    long long start = tail.from.value_or(window_len);
    if (start < 0 || start > window_len) {
        add("tail start index " + std::to_string(start) + " outside [0, N]");
        return;
    }
    switch (tail.kind) {
        case TailClass::Kind::bounded:
            if (tail.bound < 0) add("bounded tail value must be >= 0");
            break;
        case TailClass::Kind::affine:
            if (tail.term.a < 1) add("affine tail requires a >= 1");
            if (tail.term.value_at(start) < 0) add("affine tail negative at its start index");
            break;
        case TailClass::Kind::periodic: {
            if (tail.pattern.empty()) {
                add("periodic tail pattern must be nonempty");
                break;
            }
            for (std::size_t j = 0; j < tail.pattern.size(); ++j) {
                const AffineTerm& t = tail.pattern[j];
                if (t.a < 0) add("periodic tail term a must be >= 0");
                long long first = start + static_cast<long long>(j);
                if (t.value_at(first) < 0) add("periodic tail term negative at its first index");
            }
            break;
        }
    }
}

}  // namespace

ValidationReport validate_problem(const ProblemSpec& spec) {
    ValidationReport report;
    auto& out = report.violations;

    if (spec.chain.levels.empty()) {
        out.push_back({"chain nonempty", "", -1, 0, "vocabulary chain has no levels"});
        return report;
    }
    if (!spec.chain.levels.front().empty()) {
        out.push_back({"tau_0 empty", "", -1, 0, "level 0 vocabulary must be empty"});
    }
    for (std::size_t j = 0; j + 1 < spec.chain.levels.size(); ++j) {
        if (!spec.chain.levels[j].subset_of(spec.chain.levels[j + 1])) {
            out.push_back({"chain increasing", "", static_cast<int>(j), 0,
                           "level " + std::to_string(j) + " not included in level " +
                               std::to_string(j + 1)});
        }
    }
    for (std::size_t j = 0; j < spec.chain.levels.size(); ++j) {
        for (const Symbol& s : spec.chain.levels[j].symbols()) {
            if (s.kind == SymbolKind::constant && s.arity != 0) {
                out.push_back({"constant arity", s.name, static_cast<int>(j), 0,
                               "constants must have arity 0"});
            }
            if (s.kind != SymbolKind::constant && s.arity < 1) {
                out.push_back({"symbol arity", s.name, static_cast<int>(j), 0,
                               "relations and functions must have arity >= 1"});
            }
        }
    }

    if (spec.pairs.empty()) {
        out.push_back({"window nonempty", "", -1, 0, "window length must be >= 1"});
    }
    const Vocabulary& top = spec.chain.levels.back();
    for (std::size_t n = 0; n < spec.pairs.size(); ++n) {
        check_structure(spec.pairs[n].first, top, static_cast<int>(n), 1, out);
        check_structure(spec.pairs[n].second, top, static_cast<int>(n), 2, out);
    }

    if (spec.size_bound) {
        const auto& f = *spec.size_bound;
        if (f.size() != spec.pairs.size()) {
            out.push_back({"size bound length", "", -1, 0,
                           "size_bound must have one entry per window index"});
        }
        for (std::size_t n = 0; n < f.size() && n < spec.pairs.size(); ++n) {
            if (f[n] < 2) {
                out.push_back({"size bound >= 2", "", static_cast<int>(n), 0,
                               "size_bound values must be >= 2"});
            }
            if (spec.pairs[n].first.size > f[n]) {
                out.push_back({"size bound", "", static_cast<int>(n), 1,
                               "structure exceeds declared size bound"});
            }
            if (spec.pairs[n].second.size > f[n]) {
                out.push_back({"size bound", "", static_cast<int>(n), 2,
                               "structure exceeds declared size bound"});
            }
        }
    }

    check_tail(spec.kseq_tail, spec.window_len(), out);
    return report;
}

int kappa(const ProblemSpec& spec) {
    int best = 0;
    for (const auto& [m1, m2] : spec.pairs) best = std::max({best, m1.size, m2.size});
    return best;
}

FiniteStructure reduct(const FiniteStructure& m, int level, const VocabularyChain& chain) {
    if (level < 0 || level > chain.top_level()) {
        throw std::out_of_range("reduct level out of range");
    }
    const Vocabulary& vocab = chain.levels[static_cast<std::size_t>(level)];
    FiniteStructure out;
    out.size = m.size;
    for (const Symbol& s : vocab.symbols()) {
        switch (s.kind) {
            case SymbolKind::relation:
                if (auto it = m.relations.find(s.name); it != m.relations.end())
                    out.relations.emplace(*it);
                break;
            case SymbolKind::function:
                if (auto it = m.functions.find(s.name); it != m.functions.end())
                    out.functions.emplace(*it);
                break;
            case SymbolKind::constant:
                if (auto it = m.constants.find(s.name); it != m.constants.end())
                    out.constants.emplace(*it);
                break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Problem file format

namespace {

[[noreturn]] void parse_fail(int line, const std::string& msg) {
    throw std::runtime_error("problem file, line " + std::to_string(line) + ": " + msg);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

long long parse_int(const std::string& s, int line) {
    try {
        std::size_t pos = 0;
        long long v = std::stoll(s, &pos);
        if (pos != s.size()) parse_fail(line, "trailing characters in integer '" + s + "'");
        return v;
    } catch (const std::invalid_argument&) {
        parse_fail(line, "expected integer, got '" + s + "'");
    } catch (const std::out_of_range&) {
        parse_fail(line, "integer out of range: '" + s + "'");
    }
}

std::pair<std::string, std::string> parse_kv(const std::string& tok, int line) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) parse_fail(line, "expected key=value, got '" + tok + "'");
    return {tok.substr(0, eq), tok.substr(eq + 1)};
}

std::vector<AffineTerm> parse_pattern(const std::string& body, int line) {
    std::vector<AffineTerm> terms;
    std::size_t i = 0;
    while (i < body.size()) {
        if (body[i] == ',') {
            ++i;
            continue;
        }
        if (body[i] != '(') parse_fail(line, "expected '(' in periodic pattern");
        auto close = body.find(')', i);
        if (close == std::string::npos) parse_fail(line, "unterminated term in periodic pattern");
        std::string inner = body.substr(i + 1, close - i - 1);
        auto comma = inner.find(',');
        if (comma == std::string::npos) parse_fail(line, "periodic term needs 'a,b'");
        terms.push_back({parse_int(inner.substr(0, comma), line), parse_int(inner.substr(comma + 1), line)});
        i = close + 1;
    }
    if (terms.empty()) parse_fail(line, "empty periodic pattern");
    return terms;
}

TailClass parse_tail_at(const std::string& text, int line) {
    std::string body = text;
    std::optional<long long> from;
    if (auto at = body.rfind('@'); at != std::string::npos) {
        from = parse_int(body.substr(at + 1), line);
        body = body.substr(0, at);
    }
    TailClass tail;
    if (body.rfind("bounded(", 0) == 0 && body.back() == ')') {
        tail = TailClass::bounded_tail(parse_int(body.substr(8, body.size() - 9), line));
    } else if (body.rfind("affine(", 0) == 0 && body.back() == ')') {
        std::string inner = body.substr(7, body.size() - 8);
        auto comma = inner.find(',');
        if (comma == std::string::npos) parse_fail(line, "affine tail needs 'a,b'");
        tail = TailClass::affine_tail(parse_int(inner.substr(0, comma), line),
                                      parse_int(inner.substr(comma + 1), line));
    } else if (body.rfind("periodic(", 0) == 0 && body.back() == ')') {
        tail = TailClass::periodic_tail(parse_pattern(body.substr(9, body.size() - 10), line));
    } else {
        parse_fail(line, "unknown tail class '" + body + "'");
    }
    tail.from = from;
    return tail;
}

SymbolKind parse_kind(const std::string& s, int line) {
    if (s == "rel") return SymbolKind::relation;
    if (s == "fun") return SymbolKind::function;
    if (s == "const") return SymbolKind::constant;
    parse_fail(line, "unknown symbol kind ':" + s + "'");
}

std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct RawLine {
    int number;
    std::string text;
};

void parse_interpretation(FiniteStructure& m, const Symbol& sym, const std::string& rest,
                          int lineno) {
    if (m.relations.count(sym.name) || m.functions.count(sym.name) || m.constants.count(sym.name)) {
        parse_fail(lineno, "duplicate interpretation of '" + sym.name + "'");
    }
    switch (sym.kind) {
        case SymbolKind::constant: {
            auto toks = split_ws(rest);
            if (toks.size() != 1) parse_fail(lineno, "constant needs exactly one value");
            int v = static_cast<int>(parse_int(toks[0], lineno));
            if (v < 0 || v >= m.size) parse_fail(lineno, "constant outside universe");
            m.constants.emplace(sym.name, v);
            break;
        }
        case SymbolKind::relation: {
            RelationInterp rel;
            rel.arity = sym.arity;
            for (const std::string& part : split_on(rest, ';')) {
                std::string p = trim(part);
                if (p.empty()) continue;
                std::vector<int> tup;
                for (const auto& t : split_ws(p)) tup.push_back(static_cast<int>(parse_int(t, lineno)));
                if (static_cast<int>(tup.size()) != rel.arity) {
                    parse_fail(lineno, "tuple arity mismatch for '" + sym.name + "' (declared /" +
                                           std::to_string(rel.arity) + ")");
                }
                for (int v : tup)
                    if (v < 0 || v >= m.size) parse_fail(lineno, "tuple value outside universe");
                rel.tuples.insert(std::move(tup));
            }
            m.relations.emplace(sym.name, std::move(rel));
            break;
        }
        case SymbolKind::function: {
            FunctionInterp fun;
            fun.arity = sym.arity;
            std::map<std::vector<int>, int> entries;
            for (const std::string& part : split_on(rest, ';')) {
                std::string p = trim(part);
                if (p.empty()) continue;
                auto arrow = p.find("->");
                if (arrow == std::string::npos) parse_fail(lineno, "function entry needs '->'");
                auto args = split_ws(p.substr(0, arrow));
                auto res = split_ws(p.substr(arrow + 2));
                if (res.size() != 1) parse_fail(lineno, "function entry needs one result value");
                if (static_cast<int>(args.size()) != fun.arity) {
                    parse_fail(lineno, "function argument arity mismatch for '" + sym.name + "'");
                }
                std::vector<int> key;
                for (const auto& a : args) key.push_back(static_cast<int>(parse_int(a, lineno)));
                for (int v : key)
                    if (v < 0 || v >= m.size) parse_fail(lineno, "function argument outside universe");
                int value = static_cast<int>(parse_int(res[0], lineno));
                if (value < 0 || value >= m.size) parse_fail(lineno, "function value outside universe");
                if (!entries.emplace(std::move(key), value).second) {
                    parse_fail(lineno, "duplicate function entry");
                }
            }
            std::size_t total = 1;
            for (int i = 0; i < fun.arity; ++i) total *= static_cast<std::size_t>(m.size);
            if (entries.size() != total) {
                parse_fail(lineno, "function table for '" + sym.name + "' is not total (" +
                                       std::to_string(entries.size()) + " of " +
                                       std::to_string(total) + " entries)");
            }
            fun.table.resize(total);
            for (const auto& [key, value] : entries) {
                std::size_t idx = 0;
                for (int a : key) idx = idx * static_cast<std::size_t>(m.size) + static_cast<std::size_t>(a);
                fun.table[idx] = value;
            }
            m.functions.emplace(sym.name, std::move(fun));
            break;
        }
    }
}

}  // namespace

TailClass parse_tail(const std::string& text) { return parse_tail_at(text, 0); }

ProblemSpec parse_problem_file(const std::string& text) {
    std::vector<RawLine> lines;
    {
        std::istringstream in(text);
        std::string raw;
        int lineno = 0;
        while (std::getline(in, raw)) {
            ++lineno;
            std::string line = trim(raw);
            if (!line.empty()) lines.push_back({lineno, std::move(line)});
        }
    }

    ProblemSpec spec;
    bool saw_problem = false;
    long long window = 0;
    std::map<int, std::vector<Symbol>> level_symbols;
    int max_level = 0;

    // pass 1: headers that define the problem shape and vocabulary
    for (const RawLine& rl : lines) {
        if (rl.text[0] != '#') continue;
        auto toks = split_ws(rl.text);
        const std::string& head = toks[0];
        if (head == "#problem") {
            if (saw_problem) parse_fail(rl.number, "duplicate #problem header");
            saw_problem = true;
            bool saw_n = false, saw_tail = false;
            for (std::size_t i = 1; i < toks.size(); ++i) {
                auto [k, v] = parse_kv(toks[i], rl.number);
                if (k == "N") {
                    window = parse_int(v, rl.number);
                    saw_n = true;
                } else if (k == "tail") {
                    spec.kseq_tail = parse_tail_at(v, rl.number);
                    saw_tail = true;
                } else {
                    parse_fail(rl.number, "unknown #problem key '" + k + "'");
                }
            }
            if (!saw_n || !saw_tail) parse_fail(rl.number, "#problem requires N= and tail=");
            if (window < 1) parse_fail(rl.number, "window length must be >= 1");
        } else if (head == "#vocab") {
            if (toks.size() < 2) parse_fail(rl.number, "#vocab requires level=");
            auto [lk, lv] = parse_kv(toks[1], rl.number);
            if (lk != "level") parse_fail(rl.number, "#vocab requires level= first");
            int level = static_cast<int>(parse_int(lv, rl.number));
            if (level < 1) {
                parse_fail(rl.number, "vocabulary additions start at level 1 (level 0 is empty)");
            }
            max_level = std::max(max_level, level);
            for (std::size_t i = 2; i < toks.size(); ++i) {
                std::string t = toks[i];
                SymbolKind kind = SymbolKind::relation;
                if (auto colon = t.rfind(':'); colon != std::string::npos) {
                    kind = parse_kind(t.substr(colon + 1), rl.number);
                    t = t.substr(0, colon);
                }
                auto slash = t.rfind('/');
                if (slash == std::string::npos) parse_fail(rl.number, "symbol needs name/arity");
                Symbol s{t.substr(0, slash), kind,
                         static_cast<int>(parse_int(t.substr(slash + 1), rl.number))};
                if (s.name.empty()) parse_fail(rl.number, "empty symbol name");
                level_symbols[level].push_back(s);
            }
        } else if (head != "#structure") {
            parse_fail(rl.number, "unknown header '" + head + "'");
        }
    }
    if (!saw_problem) throw std::runtime_error("problem file: missing #problem header");

    spec.chain.levels.resize(static_cast<std::size_t>(max_level) + 1);
    {
        std::vector<Symbol> acc;
        for (int level = 0; level <= max_level; ++level) {
            if (auto it = level_symbols.find(level); it != level_symbols.end()) {
                acc.insert(acc.end(), it->second.begin(), it->second.end());
            }
            spec.chain.levels[static_cast<std::size_t>(level)] = Vocabulary(acc);
        }
    }
    const Vocabulary& top = spec.chain.levels.back();

    // pass 2: structure blocks, interpretation lines resolved against the top level
    spec.pairs.resize(static_cast<std::size_t>(window));
    std::vector<bool> seen(static_cast<std::size_t>(window) * 2, false);
    FiniteStructure* current = nullptr;
    for (const RawLine& rl : lines) {
        if (rl.text[0] == '#') {
            auto toks = split_ws(rl.text);
            if (toks[0] != "#structure") {
                current = nullptr;
                continue;
            }
            int side = 0, index = -1, size = 0;
            for (std::size_t i = 1; i < toks.size(); ++i) {
                auto [k, v] = parse_kv(toks[i], rl.number);
                if (k == "side") side = static_cast<int>(parse_int(v, rl.number));
                else if (k == "index") index = static_cast<int>(parse_int(v, rl.number));
                else if (k == "size") size = static_cast<int>(parse_int(v, rl.number));
                else parse_fail(rl.number, "unknown #structure key '" + k + "'");
            }
            if (side != 1 && side != 2) parse_fail(rl.number, "side must be 1 or 2");
            if (index < 0 || index >= window) parse_fail(rl.number, "index out of range");
            if (size < 1) parse_fail(rl.number, "size must be >= 1");
            std::size_t slot = static_cast<std::size_t>(index) * 2 + static_cast<std::size_t>(side - 1);
            if (seen[slot]) parse_fail(rl.number, "duplicate structure block");
            seen[slot] = true;
            auto& pair = spec.pairs[static_cast<std::size_t>(index)];
            current = side == 1 ? &pair.first : &pair.second;
            current->size = size;
            continue;
        }
        if (current == nullptr) {
            parse_fail(rl.number, "interpretation line outside a #structure block");
        }
        auto colon = rl.text.find(':');
        if (colon == std::string::npos) parse_fail(rl.number, "expected 'name: ...'");
        std::string name = trim(rl.text.substr(0, colon));
        std::string rest = trim(rl.text.substr(colon + 1));
        const Symbol* sym = top.find(name);
        if (sym == nullptr) parse_fail(rl.number, "symbol '" + name + "' not declared in any #vocab line");
        parse_interpretation(*current, *sym, rest, rl.number);
    }

    for (long long n = 0; n < window; ++n) {
        for (int side = 1; side <= 2; ++side) {
            if (!seen[static_cast<std::size_t>(n) * 2 + static_cast<std::size_t>(side - 1)]) {
                throw std::runtime_error("problem file: missing structure side=" +
                                         std::to_string(side) + " index=" + std::to_string(n));
            }
        }
    }
    return spec;
}

ProblemSpec load_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open problem file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_problem_file(buf.str());
}

std::string tail_to_string(const TailClass& tail) {
    std::ostringstream out;
    switch (tail.kind) {
        case TailClass::Kind::bounded:
            out << "bounded(" << tail.bound << ")";
            break;
        case TailClass::Kind::affine:
            out << "affine(" << tail.term.a << "," << tail.term.b << ")";
            break;
        case TailClass::Kind::periodic: {
            out << "periodic(";
            for (std::size_t i = 0; i < tail.pattern.size(); ++i) {
                if (i) out << ",";
                out << "(" << tail.pattern[i].a << "," << tail.pattern[i].b << ")";
            }
            out << ")";
            break;
        }
    }
    if (tail.from) out << "@" << *tail.from;
    return out.str();
}

namespace {

std::string kind_suffix(SymbolKind kind) {
    switch (kind) {
        case SymbolKind::relation: return ":rel";
        case SymbolKind::function: return ":fun";
        case SymbolKind::constant: return ":const";
    }
    return "";
}

}  // namespace

std::string serialize_problem(const ProblemSpec& spec) {
    std::ostringstream out;
    out << "#problem N=" << spec.window_len() << " tail=" << tail_to_string(spec.kseq_tail) << "\n";
    for (std::size_t j = 1; j < spec.chain.levels.size(); ++j) {
        std::vector<Symbol> added;
        for (const Symbol& s : spec.chain.levels[j].symbols()) {
            if (!spec.chain.levels[j - 1].contains(s)) added.push_back(s);
        }
        if (added.empty()) continue;
        out << "#vocab level=" << j;
        for (const Symbol& s : added) out << " " << s.name << "/" << s.arity << kind_suffix(s.kind);
        out << "\n";
    }
    for (std::size_t n = 0; n < spec.pairs.size(); ++n) {
        for (int side = 1; side <= 2; ++side) {
            const FiniteStructure& m = side == 1 ? spec.pairs[n].first : spec.pairs[n].second;
            out << "#structure side=" << side << " index=" << n << " size=" << m.size << "\n";
            for (const auto& [name, rel] : m.relations) {
                out << name << ":";
                bool first = true;
                for (const auto& tup : rel.tuples) {
                    out << (first ? " " : "; ");
                    first = false;
                    for (std::size_t i = 0; i < tup.size(); ++i) out << (i ? " " : "") << tup[i];
                }
                out << "\n";
            }
            for (const auto& [name, fun] : m.functions) {
                out << name << ":";
                std::vector<int> args(static_cast<std::size_t>(fun.arity), 0);
                bool first = true;
                for (std::size_t idx = 0; idx < fun.table.size(); ++idx) {
                    out << (first ? " " : "; ");
                    first = false;
                    for (std::size_t i = 0; i < args.size(); ++i) out << (i ? " " : "") << args[i];
                    out << " -> " << fun.table[idx];
                    for (std::size_t i = args.size(); i-- > 0;) {
                        if (++args[i] < m.size) break;
                        args[i] = 0;
                    }
                }
                out << "\n";
            }
            for (const auto& [name, value] : m.constants) {
                out << name << ": " << value << "\n";
            }
        }
    }
    return out.str();
}

}  // namespace efk
