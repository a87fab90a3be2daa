#include "efk/filterlab.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace efk {

long long KSeqSpec::value_at(long long n) const {
    if (n < 0) throw std::invalid_argument("negative index");
    if (n < window_len()) return prefix[static_cast<std::size_t>(n)];
    return tail.value_at(n, tail.from.value_or(window_len()));
}

long long KSeqSpec::tail_period() const {
    return tail.kind == TailClass::Kind::periodic ? static_cast<long long>(tail.pattern.size()) : 1;
}

void KSeqSpec::validate() const {
    for (long long v : prefix) {
        if (v < 0) throw std::invalid_argument("k-sequence values must be >= 0");
    }
    long long start = tail.from.value_or(window_len());
    if (start < 0 || start > window_len()) {
        throw std::invalid_argument("tail start index outside [0, N]");
    }
    switch (tail.kind) {
        case TailClass::Kind::bounded:
            if (tail.bound < 0) throw std::invalid_argument("bounded tail value must be >= 0");
            break;
        case TailClass::Kind::affine:
            if (tail.term.a < 1) throw std::invalid_argument("affine tail requires a >= 1");
            if (tail.term.value_at(start) < 0) {
                throw std::invalid_argument("affine tail negative at its start");
            }
            break;
        case TailClass::Kind::periodic:
            if (tail.pattern.empty()) throw std::invalid_argument("empty periodic pattern");
            for (std::size_t j = 0; j < tail.pattern.size(); ++j) {
                const AffineTerm& t = tail.pattern[j];
                if (t.a < 0) throw std::invalid_argument("periodic term needs a >= 0");
                if (t.value_at(start + static_cast<long long>(j)) < 0) {
                    throw std::invalid_argument("periodic term negative at its first index");
                }
            }
            break;
    }
}

KSeqSpec parse_kseq_file(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    KSeqSpec spec;
    bool saw_header = false;
    long long window = -1;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (tok == "#kseq") {
            if (saw_header) throw std::runtime_error("kseq file: duplicate #kseq header");
            saw_header = true;
            std::string kv;
            while (ls >> kv) {
                auto eq = kv.find('=');
                if (eq == std::string::npos) throw std::runtime_error("kseq file: expected key=value");
                std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
                if (key == "N") window = std::stoll(value);
                else if (key == "tail") spec.tail = parse_tail(value);
                else throw std::runtime_error("kseq file: unknown key '" + key + "'");
            }
        } else if (tok[0] == '#') {
            throw std::runtime_error("kseq file: unknown header '" + tok + "'");
        } else {
            if (!saw_header) throw std::runtime_error("kseq file: values before #kseq header");
            spec.prefix.push_back(std::stoll(tok));
            long long v;
            while (ls >> v) spec.prefix.push_back(v);
        }
    }
    if (!saw_header) throw std::runtime_error("kseq file: missing #kseq header");
    if (window < 0 || window != spec.window_len()) {
        throw std::runtime_error("kseq file: N does not match the number of values");
    }
    spec.validate();
    return spec;
}

KSeqSpec load_kseq_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open kseq file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_kseq_file(buf.str());
}

// ---------------------------------------------------------------------------
// EventuallyPeriodicSet

namespace {

constexpr long long kMaxPeriod = 1'000'000;

long long lcm_checked(long long a, long long b) {
    long long l = std::lcm(a, b);
    if (l > kMaxPeriod) throw std::invalid_argument("combined period too large");
    return l;
}

}  // namespace

EventuallyPeriodicSet::EventuallyPeriodicSet() : tail_{false} {}

EventuallyPeriodicSet EventuallyPeriodicSet::finite(std::vector<long long> elements) {
    EventuallyPeriodicSet s;
    long long top = -1;
    for (long long e : elements) {
        if (e < 0) throw std::invalid_argument("negative element");
        top = std::max(top, e);
    }
    s.head_.assign(static_cast<std::size_t>(top + 1), false);
    for (long long e : elements) s.head_[static_cast<std::size_t>(e)] = true;
    s.tail_ = {false};
    return s;
}

EventuallyPeriodicSet EventuallyPeriodicSet::cofinite(std::vector<long long> missing) {
    return finite(std::move(missing)).complement();
}

EventuallyPeriodicSet EventuallyPeriodicSet::from(long long start) {
    if (start < 0) throw std::invalid_argument("negative start");
    EventuallyPeriodicSet s;
    s.head_.assign(static_cast<std::size_t>(start), false);
    s.tail_ = {true};
    return s;
}

EventuallyPeriodicSet EventuallyPeriodicSet::periodic(std::vector<bool> head,
                                                      std::vector<bool> tail_bits) {
    if (tail_bits.empty()) throw std::invalid_argument("empty period");
    if (static_cast<long long>(tail_bits.size()) > kMaxPeriod) {
        throw std::invalid_argument("period too large");
    }
    EventuallyPeriodicSet s;
    s.head_ = std::move(head);
    s.tail_ = std::move(tail_bits);
    return s;
}

bool EventuallyPeriodicSet::contains(long long n) const {
    if (n < 0) throw std::invalid_argument("negative index");
    if (n < head_len()) return head_[static_cast<std::size_t>(n)];
    return tail_[static_cast<std::size_t>((n - head_len()) % period())];
}

EventuallyPeriodicSet EventuallyPeriodicSet::complement() const {
    EventuallyPeriodicSet s = *this;
    s.head_.flip();
    s.tail_.flip();
    return s;
}

EventuallyPeriodicSet EventuallyPeriodicSet::intersect(const EventuallyPeriodicSet& other) const {
    long long head = std::max(head_len(), other.head_len());
    long long p = lcm_checked(period(), other.period());
    std::vector<bool> h(static_cast<std::size_t>(head));
    for (long long n = 0; n < head; ++n) {
        h[static_cast<std::size_t>(n)] = contains(n) && other.contains(n);
    }
    std::vector<bool> t(static_cast<std::size_t>(p));
    for (long long i = 0; i < p; ++i) {
        long long n = head + i;
        t[static_cast<std::size_t>(i)] = contains(n) && other.contains(n);
    }
    return periodic(std::move(h), std::move(t));
}

EventuallyPeriodicSet EventuallyPeriodicSet::unite(const EventuallyPeriodicSet& other) const {
    return complement().intersect(other.complement()).complement();
}

bool EventuallyPeriodicSet::is_empty() const {
    return std::none_of(head_.begin(), head_.end(), [](bool b) { return b; }) &&
           std::none_of(tail_.begin(), tail_.end(), [](bool b) { return b; });
}

bool EventuallyPeriodicSet::is_finite() const {
    return std::none_of(tail_.begin(), tail_.end(), [](bool b) { return b; });
}

bool EventuallyPeriodicSet::subset_of(const EventuallyPeriodicSet& other) const {
    return intersect(other.complement()).is_empty();
}

std::optional<long long> EventuallyPeriodicSet::min_element() const {
    for (long long n = 0; n < head_len(); ++n) {
        if (head_[static_cast<std::size_t>(n)]) return n;
    }
    for (long long i = 0; i < period(); ++i) {
        if (tail_[static_cast<std::size_t>(i)]) return head_len() + i;
    }
    return std::nullopt;
}

std::optional<long long> EventuallyPeriodicSet::infinite_residue() const {
    for (long long i = 0; i < period(); ++i) {
        if (tail_[static_cast<std::size_t>(i)]) return (head_len() + i) % period();
    }
    return std::nullopt;
}

bool EventuallyPeriodicSet::same_set(const EventuallyPeriodicSet& other) const {
    return subset_of(other) && other.subset_of(*this);
}

// ---------------------------------------------------------------------------
// Generator sets and the membership decision

namespace {

// First n with a*n + b > c (a >= 1).
long long crossing_point(long long a, long long b, long long c) {
    if (a < 1) throw std::logic_error("crossing point needs a growing term");
    if (b > c) return 0;
    return (c - b) / a + 1;
}

// Beyond this index the predicate k_n > c is periodic in n with the tail's
// period, for every c <= cap considered.
long long periodic_from(const KSeqSpec& kseq, long long c) {
    long long start = kseq.tail.from.value_or(kseq.window_len());
    long long e = std::max<long long>(kseq.window_len(), start);
    switch (kseq.tail.kind) {
        case TailClass::Kind::bounded:
            break;
        case TailClass::Kind::affine:
            e = std::max(e, crossing_point(kseq.tail.term.a, kseq.tail.term.b, c));
            break;
        case TailClass::Kind::periodic:
            for (const AffineTerm& t : kseq.tail.pattern) {
                if (t.a >= 1) e = std::max(e, crossing_point(t.a, t.b, c));
            }
            break;
    }
    return e;
}

}  // namespace

EventuallyPeriodicSet generator(const KSeqSpec& kseq, long long c) {
    if (c < 0) throw std::invalid_argument("generator threshold must be >= 0");
    long long e = periodic_from(kseq, c);
    long long p = kseq.tail_period();
    std::vector<bool> head(static_cast<std::size_t>(e));
    for (long long n = 0; n < e; ++n) head[static_cast<std::size_t>(n)] = kseq.value_at(n) > c;
    std::vector<bool> tail(static_cast<std::size_t>(p));
    for (long long i = 0; i < p; ++i) tail[static_cast<std::size_t>(i)] = kseq.value_at(e + i) > c;
    return EventuallyPeriodicSet::periodic(std::move(head), std::move(tail));
}

FilterClass classify(const KSeqSpec& kseq) {
    return kseq.tail.limsup_infinite() ? FilterClass::proper_nonprincipal : FilterClass::improper;
}

namespace {

long long improper_ceiling(const KSeqSpec& kseq) {
    long long c = 0;
    for (long long v : kseq.prefix) c = std::max(c, v);
    switch (kseq.tail.kind) {
        case TailClass::Kind::bounded:
            c = std::max(c, kseq.tail.bound);
            break;
        case TailClass::Kind::periodic:
            for (const AffineTerm& t : kseq.tail.pattern) c = std::max(c, t.b);
            break;
        case TailClass::Kind::affine:
            throw std::logic_error("affine tail is never improper");
    }
    return c;
}

// Smallest threshold that silences every constant class of the tail.
long long proper_threshold(const KSeqSpec& kseq) {
    long long c = 0;
    if (kseq.tail.kind == TailClass::Kind::periodic) {
        for (const AffineTerm& t : kseq.tail.pattern) {
            if (t.a == 0) c = std::max(c, t.b + 1);
        }
    }
    return c;
}

}  // namespace

FilterDecision in_filter(const KSeqSpec& kseq, const EventuallyPeriodicSet& s) {
    FilterDecision d;
    if (classify(kseq) == FilterClass::improper) {
        // limsup finite: some generator is empty and the filter is P(omega)
        d.member = true;
        d.c = improper_ceiling(kseq);
        d.n0 = 0;
        d.explanation = "bounded k-sequence: the filter is the full power set";
        return d;
    }
    long long c = proper_threshold(kseq);
    EventuallyPeriodicSet gen = generator(kseq, c);
    long long n0 = std::max(gen.head_len(), s.head_len());
    EventuallyPeriodicSet violations =
        gen.intersect(EventuallyPeriodicSet::from(n0)).intersect(s.complement());
    if (violations.is_empty()) {
        d.member = true;
        d.c = c;
        d.n0 = n0;
        d.explanation = "S contains {n >= n0 : k_n > c}";
        return d;
    }
    d.member = false;
    auto residue = violations.infinite_residue();
    // n0 sits past both explicit heads, so any violation set is purely
    // periodic and nonemptiness means an infinite class.
    if (!residue) throw std::logic_error("violation set has no infinite class");
    d.residue = *residue;
    d.period = violations.period();
    d.start = violations.head_len();
    d.explanation = "k_n is unbounded on a residue class outside S";
    return d;
}

FilterDecision forall_d(const KSeqSpec& kseq, const EventuallyPeriodicSet& p) {
    return in_filter(kseq, p);
}

bool confirm_decision(const KSeqSpec& kseq, const EventuallyPeriodicSet& s,
                      const FilterDecision& d) {
    long long p = std::max<long long>(1, std::lcm(kseq.tail_period(), s.period()));
    if (d.member) {
        long long horizon = std::max(d.n0, std::max<long long>(kseq.window_len(), s.head_len())) +
                            2 * p;
        for (long long n = d.n0; n < horizon; ++n) {
            if (kseq.value_at(n) > d.c && !s.contains(n)) return false;
        }
        return true;
    }
    if (d.period <= 0) return false;
    // find the first two class members at or past the scheme start and check
    // that both are outside S while k keeps growing along the class
    long long n = d.start;
    while (n % d.period != d.residue % d.period) ++n;
    long long m = n + d.period;
    if (s.contains(n) || s.contains(m)) return false;
    if (kseq.value_at(m) <= kseq.value_at(n)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// SetExpr parser

namespace {

struct SetParser {
    const std::string& text;
    const KSeqSpec* kseq;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& msg) {
        throw std::runtime_error("set expression, offset " + std::to_string(pos) + ": " + msg);
    }

    long long integer() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() && (std::isdigit(static_cast<unsigned char>(text[pos])) ||
                                     (pos == start && text[pos] == '-'))) {
            ++pos;
        }
        if (start == pos) fail("expected an integer");
        return std::stoll(text.substr(start, pos - start));
    }

    std::string word() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() && std::isalpha(static_cast<unsigned char>(text[pos]))) ++pos;
        return text.substr(start, pos - start);
    }

    EventuallyPeriodicSet expr() {
        EventuallyPeriodicSet lhs = term();
        while (true) {
            skip_ws();
            if (eat('|')) lhs = lhs.unite(term());
            else return lhs;
        }
    }

    EventuallyPeriodicSet term() {
        EventuallyPeriodicSet lhs = factor();
        while (true) {
            skip_ws();
            if (eat('&')) lhs = lhs.intersect(factor());
            else return lhs;
        }
    }

    EventuallyPeriodicSet factor() {
        skip_ws();
        if (eat('~')) return factor().complement();
        if (eat('(')) {
            EventuallyPeriodicSet s = expr();
            if (!eat(')')) fail("expected ')'");
            return s;
        }
        std::string name = word();
        if (name == "fin" || name == "cofin") {
            if (!eat('{')) fail("expected '{'");
            std::vector<long long> elements;
            skip_ws();
            if (!eat('}')) {
                elements.push_back(integer());
                while (eat(',')) elements.push_back(integer());
                if (!eat('}')) fail("expected '}'");
            }
            return name == "fin" ? EventuallyPeriodicSet::finite(std::move(elements))
                                 : EventuallyPeriodicSet::cofinite(std::move(elements));
        }
        if (name == "gen") {
            if (!eat('(')) fail("expected '('");
            long long c = integer();
            if (!eat(')')) fail("expected ')'");
            if (kseq == nullptr) fail("gen(c) needs a k-sequence context");
            return generator(*kseq, c);
        }
        if (name == "from") {
            if (!eat('(')) fail("expected '('");
            long long n0 = integer();
            if (!eat(')')) fail("expected ')'");
            return EventuallyPeriodicSet::from(n0);
        }
        if (name == "evens") return EventuallyPeriodicSet::periodic({}, {true, false});
        if (name == "odds") return EventuallyPeriodicSet::periodic({}, {false, true});
        if (name == "period") {
            if (!eat('(')) fail("expected '('");
            long long p = integer();
            if (!eat(',')) fail("expected ','");
            skip_ws();
            std::vector<bool> bits;
            while (pos < text.size() && (text[pos] == '0' || text[pos] == '1')) {
                bits.push_back(text[pos] == '1');
                ++pos;
            }
            if (!eat(')')) fail("expected ')'");
            if (static_cast<long long>(bits.size()) != p) fail("bitmask length differs from period");
            return EventuallyPeriodicSet::periodic({}, std::move(bits));
        }
        fail("unknown set constructor '" + name + "'");
    }
};

}  // namespace

EventuallyPeriodicSet parse_set_expr(const std::string& text, const KSeqSpec* kseq) {
    SetParser p{text, kseq};
    EventuallyPeriodicSet s = p.expr();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing input");
    return s;
}

// ---------------------------------------------------------------------------
// Problem classification

UltraproductClassification classify_problem(const ProblemSpec& spec,
                                            const std::vector<long long>& window_kseq) {
    if (static_cast<int>(window_kseq.size()) != spec.window_len()) {
        throw std::invalid_argument("window k-sequence length mismatch");
    }
    UltraproductClassification out;
    long long start = spec.kseq_tail.from.value_or(spec.window_len());
    for (long long n = start; n < spec.window_len(); ++n) {
        if (spec.kseq_tail.value_at(n, start) != window_kseq[static_cast<std::size_t>(n)]) {
            out.mismatches.push_back(static_cast<int>(n));
        }
    }
    out.consistent = out.mismatches.empty();
    out.is_ultraproduct_problem = out.consistent && spec.kseq_tail.limsup_infinite();
    return out;
}

bool is_ultraproduct_problem(const ProblemSpec& spec,
                             const std::vector<long long>& window_kseq) {
    UltraproductClassification r = classify_problem(spec, window_kseq);
    if (!r.consistent) {
        std::ostringstream msg;
        msg << "declared tail disagrees with the computed k-sequence at index";
        for (int n : r.mismatches) msg << " " << n;
        throw std::runtime_error(msg.str());
    }
    return r.is_ultraproduct_problem;
}

}  // namespace efk
