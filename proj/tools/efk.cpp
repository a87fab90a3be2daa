// efk: command-line front end for the EF-game toolkit.
//
// Subcommands: validate, kseq, solve, distinguish, filter, slalom, chain,
// assemble, oracle.  Exit codes: 0 success, 1 domain-level negative,
// 2 input error, 3 resource cap.

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "efk/backforth.hpp"
#include "efk/efgame.hpp"
#include "efk/filterlab.hpp"
#include "efk/slalom.hpp"
#include "efk/structures.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;
constexpr int kExitInput = 2;
constexpr int kExitResource = 3;

struct Output {
    bool records = false;
    bool with_timing = false;
    bool header_done = false;

    void emit(json j, const std::string& human) {
        if (records) {
            if (!header_done) {
                std::cout << "#efk-records v1\n";
                header_done = true;
            }
            if (!with_timing && j.contains("stats") && j["stats"].contains("millis")) {
                j["stats"].erase("millis");
            }
            std::cout << j.dump() << "\n";
        } else {
            std::cout << human << "\n";
        }
    }
};

json stats_json(const efk::SolveStats& stats) {
    return json{{"nodes", stats.positions}, {"millis", stats.millis}};
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::vector<int>> load_sequences(const std::string& path, int len) {
    std::vector<std::vector<int>> out;
    std::istringstream in(read_file(path));
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::vector<int> seq;
        int v;
        while (ls >> v) seq.push_back(v);
        if (seq.empty()) continue;
        if (static_cast<int>(seq.size()) != len) {
            throw std::runtime_error("sequence length " + std::to_string(seq.size()) +
                                     " does not match the window length " + std::to_string(len));
        }
        out.push_back(std::move(seq));
    }
    return out;
}

// per-index sets: indices ';'-separated, values ','-separated
std::vector<std::vector<int>> parse_wsets(const std::string& text, int len) {
    std::vector<std::vector<int>> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ';')) {
        std::vector<int> set;
        std::istringstream is(item);
        std::string v;
        while (std::getline(is, v, ',')) {
            if (!v.empty()) set.push_back(std::stoi(v));
        }
        out.push_back(std::move(set));
    }
    if (static_cast<int>(out.size()) != len) {
        throw std::runtime_error("challenge list has " + std::to_string(out.size()) +
                                 " entries, window needs " + std::to_string(len));
    }
    return out;
}

int expect_check(const std::string& expect, const std::string& actual) {
    if (expect.empty() || expect == actual) return kExitOk;
    std::cerr << "expect-failed: wanted '" << expect << "', got '" << actual << "'\n";
    return kExitNegative;
}

// ---------------------------------------------------------------------------

int cmd_validate(const std::string& path, Output& out) {
    efk::ProblemSpec spec = efk::load_problem_file(path);
    efk::ValidationReport report = efk::validate_problem(spec);
    json j{{"op", "validate"}, {"digest", efk::problem_digest(spec)}, {"ok", report.ok()}};
    json violations = json::array();
    std::ostringstream human;
    if (report.ok()) {
        human << "ok";
    } else {
        human << report.violations.size() << " violation(s)";
        for (const efk::Violation& v : report.violations) {
            violations.push_back({{"clause", v.clause},
                                  {"symbol", v.symbol},
                                  {"index", v.index},
                                  {"side", v.side},
                                  {"message", v.message}});
            human << "\n  [" << v.clause << "] index=" << v.index << " side=" << v.side
                  << (v.symbol.empty() ? "" : " symbol=" + v.symbol) << ": " << v.message;
        }
    }
    j["violations"] = violations;
    out.emit(j, human.str());
    return report.ok() ? kExitOk : kExitNegative;
}

int cmd_kseq(const std::string& path, efk::SolveOptions opts, int jobs,
             const std::string& expect, Output& out) {
    efk::ProblemSpec spec = efk::load_problem_file(path);
    int len = spec.window_len();
    std::vector<std::optional<int>> values(static_cast<std::size_t>(len));
    std::atomic<std::uint64_t> nodes{0};

    auto solve_index = [&](int n) {
        const auto& [m1, m2] = spec.pairs[static_cast<std::size_t>(n)];
        int max_win = -1;
        int undecided_above = -1;
        for (int k = 0; k <= n; ++k) {
            efk::SolveResult r = efk::solve_game(m1, m2, spec.chain, k, opts);
            nodes += r.stats.positions;
            if (r.winner == efk::Winner::protagonist) max_win = std::max(max_win, k);
            else if (r.winner == efk::Winner::undecided_budget) undecided_above = std::max(undecided_above, k);
        }
        if (undecided_above <= max_win) values[static_cast<std::size_t>(n)] = max_win;
    };

    if (jobs <= 1) {
        for (int n = 0; n < len; ++n) solve_index(n);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) {
            pool.emplace_back([&] {
                for (int n = next.fetch_add(1); n < len; n = next.fetch_add(1)) solve_index(n);
            });
        }
        for (auto& th : pool) th.join();
    }

    bool undecided = false;
    std::ostringstream human;
    json jv = json::array();
    for (int n = 0; n < len; ++n) {
        const auto& v = values[static_cast<std::size_t>(n)];
        if (n) human << " ";
        if (v) {
            human << *v;
            jv.push_back(*v);
        } else {
            human << "?";
            jv.push_back(nullptr);
            undecided = true;
        }
    }
    json j{{"op", "kseq"},
           {"digest", efk::problem_digest(spec)},
           {"kseq", jv},
           {"stats", {{"nodes", nodes.load()}}}};
    out.emit(j, human.str());
    if (undecided) return kExitResource;
    return expect_check(expect, human.str());
}

int cmd_solve(const std::string& path, int index, int k, efk::SolveOptions opts,
              const std::string& expect, Output& out) {
    efk::ProblemSpec spec = efk::load_problem_file(path);
    if (index < 0 || index >= spec.window_len()) throw std::runtime_error("index out of range");
    const auto& [m1, m2] = spec.pairs[static_cast<std::size_t>(index)];
    efk::SolveResult r = efk::solve_game(m1, m2, spec.chain, k, opts);
    std::string name = efk::winner_name(r.winner);
    json j{{"op", "solve"},     {"digest", efk::problem_digest(spec)},
           {"index", index},    {"k", k},
           {"winner", name},    {"stats", stats_json(r.stats)}};
    out.emit(j, "winner=" + name);
    if (r.winner == efk::Winner::undecided_budget) return kExitResource;
    return expect_check(expect, name);
}

int cmd_distinguish(const std::string& path, int index, int k, efk::SolveOptions opts,
                    const std::string& expect, Output& out) {
    efk::ProblemSpec spec = efk::load_problem_file(path);
    if (index < 0 || index >= spec.window_len()) throw std::runtime_error("index out of range");
    const auto& [m1, m2] = spec.pairs[static_cast<std::size_t>(index)];
    efk::DistinguishResult r = efk::extract_distinguisher(m1, m2, spec.chain, k, opts);
    json j{{"op", "distinguish"}, {"digest", efk::problem_digest(spec)},
           {"index", index},      {"k", k},
           {"found", r.found},    {"width_cap", r.width_cap},
           {"stats", stats_json(r.stats)}};
    std::ostringstream human;
    std::string outcome;
    if (r.found) {
        std::string text = efk::print_formula(*r.sentence);
        j["sentence"] = text;
        j["direction"] = r.direction;
        j["width"] = r.width;
        human << "direction=" << r.direction << " sentence: " << text;
        outcome = "found";
    } else {
        human << "none-found (width cap " << r.width_cap << ")";
        outcome = "none-found";
    }
    out.emit(j, human.str());
    return expect_check(expect, outcome);
}

int cmd_filter(const std::string& kseq_path, const std::string& problem_path,
               const std::string& set_expr, bool classify_only, efk::SolveOptions opts,
               const std::string& expect, Output& out) {
    efk::KSeqSpec kseq;
    if (!problem_path.empty()) {
        // derive the k-sequence from the problem window plus its declared tail
        efk::ProblemSpec spec = efk::load_problem_file(problem_path);
        efk::KSeqResult computed = efk::compute_k_seq(spec, opts);
        kseq.prefix = computed.require_complete();
        kseq.tail = spec.kseq_tail;
        kseq.validate();
        if (classify_only) {
            auto r = efk::classify_problem(spec, kseq.prefix);
            json j{{"op", "filter.problem"},
                   {"digest", efk::problem_digest(spec)},
                   {"ultraproduct_problem", r.is_ultraproduct_problem},
                   {"consistent", r.consistent},
                   {"mismatches", r.mismatches}};
            std::ostringstream human;
            human << "ultraproduct_problem=" << (r.is_ultraproduct_problem ? "true" : "false");
            if (!r.consistent) {
                human << " INCONSISTENT at indices";
                for (int n : r.mismatches) human << " " << n;
            }
            out.emit(j, human.str());
            if (!r.consistent) return kExitNegative;
            return expect_check(expect, r.is_ultraproduct_problem ? "yes" : "no");
        }
    } else {
        kseq = efk::load_kseq_file(kseq_path);
    }
    std::string cls = efk::classify(kseq) == efk::FilterClass::proper_nonprincipal
                          ? "proper-nonprincipal"
                          : "improper";
    if (classify_only) {
        json j{{"op", "filter.classify"}, {"class", cls}};
        out.emit(j, "class=" + cls);
        return expect_check(expect, cls);
    }
    efk::EventuallyPeriodicSet s = efk::parse_set_expr(set_expr, &kseq);
    efk::FilterDecision d = efk::in_filter(kseq, s);
    bool confirmed = efk::confirm_decision(kseq, s, d);
    json j{{"op", "filter.member"},
           {"set", set_expr},
           {"class", cls},
           {"member", d.member},
           {"confirmed", confirmed}};
    std::ostringstream human;
    human << "in_filter=" << (d.member ? "true" : "false");
    if (d.member) {
        j["witness"] = {{"c", d.c}, {"n0", d.n0}};
        human << " witness: c=" << d.c << " n0=" << d.n0;
    } else {
        j["counterexample"] = {{"residue", d.residue}, {"period", d.period}, {"start", d.start}};
        human << " counterexample class: n == " << d.residue << " (mod " << d.period
              << "), n >= " << d.start;
    }
    human << (confirmed ? " [confirmed]" : " [CONFIRMATION FAILED]");
    out.emit(j, human.str());
    if (!confirmed) return kExitNegative;
    return expect_check(expect, d.member ? "member" : "nonmember");
}

efk::CoverMode make_mode(const std::string& mode_text, const efk::KSeqSpec* kseq) {
    if (mode_text == "everywhere" || mode_text.empty()) return efk::CoverMode::everywhere();
    // filtered:c=<c>,n0=<n0>
    if (mode_text.rfind("filtered:", 0) == 0) {
        long long c = 0, n0 = 0;
        std::string rest = mode_text.substr(9);
        std::istringstream in(rest);
        std::string kv;
        while (std::getline(in, kv, ',')) {
            auto eq = kv.find('=');
            if (eq == std::string::npos) throw std::runtime_error("bad mode parameter: " + kv);
            std::string key = kv.substr(0, eq);
            long long value = std::stoll(kv.substr(eq + 1));
            if (key == "c") c = value;
            else if (key == "n0") n0 = value;
            else throw std::runtime_error("unknown mode key: " + key);
        }
        if (kseq == nullptr) throw std::runtime_error("filtered mode needs --kseq");
        return efk::CoverMode::filtered(c, n0, *kseq);
    }
    throw std::runtime_error("unknown mode: " + mode_text);
}

std::vector<efk::Slalom> load_slaloms(const std::string& path,
                                      const std::vector<long long>& capacity, int len) {
    std::vector<efk::Slalom> out;
    std::istringstream in(read_file(path));
    std::string line;
    int lineno = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream probe(line);
        std::string tok;
        if (!(probe >> tok)) continue;
        if (tok == "#slaloms") {
            saw_header = true;
            continue;
        }
        if (tok[0] == '#') throw std::runtime_error("slaloms file: unknown header " + tok);
        efk::Slalom s;
        s.capacity = capacity;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ';')) {
            std::vector<int> values;
            std::istringstream cs(cell);
            std::string v;
            while (std::getline(cs, v, ',')) {
                std::string t;
                for (char ch : v) {
                    if (!std::isspace(static_cast<unsigned char>(ch))) t.push_back(ch);
                }
                if (!t.empty()) values.push_back(std::stoi(t));
            }
            std::sort(values.begin(), values.end());
            s.cells.push_back(std::move(values));
        }
        if (static_cast<int>(s.cells.size()) != len) {
            throw std::runtime_error("slaloms file, line " + std::to_string(lineno) +
                                     ": expected " + std::to_string(len) + " cells");
        }
        out.push_back(std::move(s));
    }
    if (!saw_header) throw std::runtime_error("slaloms file: missing #slaloms header");
    return out;
}

int cmd_slalom(const std::string& family_path, const std::string& op,
               const std::string& slaloms_path, const std::string& mode_text,
               const std::string& kseq_path, const std::string& expect, Output& out) {
    efk::FamilyFile ff = efk::load_family_file(family_path);
    std::optional<efk::KSeqSpec> kseq;
    if (!kseq_path.empty()) kseq = efk::load_kseq_file(kseq_path);
    efk::CoverMode mode = make_mode(mode_text, kseq ? &*kseq : nullptr);

    auto cells_json = [](const efk::Slalom& s) {
        json cells = json::array();
        for (const auto& cell : s.cells) cells.push_back(cell);
        return cells;
    };

    if (op == "check") {
        if (slaloms_path.empty()) throw std::runtime_error("check needs --slaloms");
        auto family = load_slaloms(slaloms_path, ff.capacity, ff.family.length);
        efk::CoverReport report = efk::check_cover(ff.family, family, mode);
        json j{{"op", "slalom.check"}, {"covered", report.covered}};
        std::ostringstream human;
        human << "covered=" << (report.covered ? "true" : "false");
        if (!report.covered && report.failure) {
            j["failing_fn"] = report.failure->fn_index;
            human << " failing fn=" << report.failure->fn_index;
            if (!report.failure->per_slalom.empty()) {
                j["failing_index"] = report.failure->per_slalom.front().second;
                human << " first failing index=" << report.failure->per_slalom.front().second;
            }
        }
        out.emit(j, human.str());
        return expect_check(expect, report.covered ? "covered" : "uncovered");
    }
    if (op == "single") {
        auto result = efk::single_slalom_cover(ff.family, ff.capacity, mode);
        if (auto* s = std::get_if<efk::Slalom>(&result)) {
            json j{{"op", "slalom.single"}, {"feasible", true}, {"cells", cells_json(*s)}};
            out.emit(j, "feasible=true");
            return expect_check(expect, "feasible");
        }
        const auto& inf = std::get<efk::Infeasibility>(result);
        json j{{"op", "slalom.single"}, {"feasible", false}, {"index", inf.index},
               {"values", inf.values}};
        out.emit(j, "feasible=false index=" + std::to_string(inf.index));
        return expect_check(expect, "infeasible");
    }
    if (op == "greedy") {
        auto result = efk::greedy_cover(ff.family, ff.capacity, mode);
        if (auto* g = std::get_if<efk::GreedyCover>(&result)) {
            json slaloms = json::array();
            for (const auto& s : g->family) slaloms.push_back(cells_json(s));
            json j{{"op", "slalom.greedy"}, {"size", g->family.size()},
                   {"assignment", g->assignment}, {"slaloms", slaloms}};
            out.emit(j, "size=" + std::to_string(g->family.size()));
            return expect_check(expect, std::to_string(g->family.size()));
        }
        const auto& inf = std::get<efk::Infeasibility>(result);
        json j{{"op", "slalom.greedy"}, {"feasible", false}, {"index", inf.index}};
        out.emit(j, "infeasible index=" + std::to_string(inf.index));
        return expect_check(expect, "infeasible");
    }
    if (op == "min") {
        auto result = efk::min_cover_exact(ff.family, ff.capacity, mode);
        if (auto* m = std::get_if<efk::MinCover>(&result)) {
            json slaloms = json::array();
            for (const auto& s : m->family) slaloms.push_back(cells_json(s));
            json j{{"op", "slalom.min"}, {"size", m->size}, {"assignment", m->assignment},
                   {"slaloms", slaloms}};
            out.emit(j, "size=" + std::to_string(m->size));
            return expect_check(expect, std::to_string(m->size));
        }
        if (std::get_if<efk::BoundExceeded>(&result) != nullptr) {
            out.emit(json{{"op", "slalom.min"}, {"error", "bound exceeded"}}, "bound exceeded");
            return kExitResource;
        }
        const auto& inf = std::get<efk::Infeasibility>(result);
        json j{{"op", "slalom.min"}, {"feasible", false}, {"index", inf.index}};
        out.emit(j, "infeasible index=" + std::to_string(inf.index));
        return expect_check(expect, "infeasible");
    }
    throw std::runtime_error("unknown slalom op: " + op);
}

int cmd_chain(const std::string& path, const std::string& script_path, efk::SolveOptions opts,
              Output& out) {
    efk::ProblemSpec spec = efk::load_problem_file(path);
    efk::ProblemContext ctx(spec, opts);
    std::vector<efk::Approximation> chain{efk::empty_approx(ctx)};
    efk::Window window;

    std::istringstream in(read_file(script_path));
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string cmd;
        if (!(ls >> cmd)) continue;
        if (cmd[0] == '#') continue;
        auto fail = [&](const std::string& msg) -> void {
            throw std::runtime_error("chain script, line " + std::to_string(lineno) + ": " + msg);
        };
        std::map<std::string, std::string> kv;
        std::string tok;
        while (ls >> tok) {
            auto eq = tok.find('=');
            if (eq == std::string::npos) fail("expected key=value, got '" + tok + "'");
            kv[tok.substr(0, eq)] = tok.substr(eq + 1);
        }
        if (cmd == "window") {
            if (kv.count("c")) window.c = std::stoll(kv["c"]);
            if (kv.count("n0")) window.n0 = std::stoll(kv["n0"]);
            out.emit(json{{"op", "chain.window"}, {"c", window.c}, {"n0", window.n0}},
                     "window c=" + std::to_string(window.c) + " n0=" + std::to_string(window.n0));
        } else if (cmd == "extend") {
            if (!kv.count("side") || !kv.count("w")) fail("extend needs side= and w=");
            int side = std::stoi(kv["side"]);
            long long sigma = kv.count("sigma") ? std::stoll(kv["sigma"]) : 0;
            auto w = parse_wsets(kv["w"], ctx.window_len());
            chain.push_back(efk::extend(ctx, chain.back(), side, w, window, sigma));
            json rounds = json::array();
            for (int n = 0; n < ctx.window_len(); ++n) rounds.push_back(chain.back().rounds(n));
            out.emit(json{{"op", "chain.extend"}, {"side", side}, {"rounds", rounds}},
                     "extend side=" + std::to_string(side));
        } else if (cmd == "merge") {
            long long sigma = kv.count("sigma") ? std::stoll(kv["sigma"]) : 0;
            efk::MergeResult m = efk::merge_chain(ctx, chain, sigma, window);
            json j{{"op", "chain.merge"}, {"sigma", sigma}, {"chosen", m.chosen}, {"eta", m.eta}};
            out.emit(j, "merge sigma=" + std::to_string(sigma));
            chain.push_back(std::move(m.merged));
        } else {
            fail("unknown command '" + cmd + "'");
        }
    }
    std::cout << efk::serialize_approximation(ctx, chain.back());
    return kExitOk;
}

int cmd_assemble(const std::string& path, const std::string& e1_path, const std::string& e2_path,
                 efk::SolveOptions opts, Output& out) {
    efk::ProblemSpec spec = efk::load_problem_file(path);
    efk::ProblemContext ctx(spec, opts);
    auto e1 = e1_path.empty() ? std::vector<std::vector<int>>{}
                              : load_sequences(e1_path, ctx.window_len());
    auto e2 = e2_path.empty() ? std::vector<std::vector<int>>{}
                              : load_sequences(e2_path, ctx.window_len());
    efk::AssembleResult r = efk::assemble(ctx, e1, e2);
    for (const efk::AssembleRow& row : r.table) {
        json j{{"op", "assemble.row"},
               {"side", row.side},
               {"given", row.given},
               {"matched", row.matched}};
        std::ostringstream human;
        human << "side=" << row.side << " given=";
        for (std::size_t i = 0; i < row.given.size(); ++i) human << (i ? "," : "") << row.given[i];
        human << " matched=";
        for (std::size_t i = 0; i < row.matched.size(); ++i)
            human << (i ? "," : "") << row.matched[i];
        out.emit(j, human.str());
    }
    out.emit(json{{"op", "assemble.summary"},
                  {"injective", r.injective},
                  {"window", {{"c", r.window.c}, {"n0", r.window.n0}}}},
             std::string("injective=") + (r.injective ? "true" : "false"));
    return r.injective ? kExitOk : kExitNegative;
}

int cmd_oracle(const std::string& path, int index, int rank, int width, int level,
               const std::string& expect, Output& out) {
    efk::ProblemSpec spec = efk::load_problem_file(path);
    if (index < 0 || index >= spec.window_len()) throw std::runtime_error("index out of range");
    const auto& [m1, m2] = spec.pairs[static_cast<std::size_t>(index)];
    if (level < 0) level = rank;
    const efk::Vocabulary& vocab = spec.chain.at_level(level);
    auto sentences = efk::enumerate_sentences(vocab, rank, width);
    std::optional<std::string> witness;
    for (const auto& sentence : sentences) {
        if (efk::eval(m1, *sentence) != efk::eval(m2, *sentence)) {
            witness = efk::print_formula(*sentence);
            break;
        }
    }
    json j{{"op", "oracle"},       {"digest", efk::problem_digest(spec)},
           {"index", index},       {"rank", rank},
           {"width", width},       {"sentences", sentences.size()},
           {"agree", !witness.has_value()}};
    std::ostringstream human;
    if (witness) {
        j["witness"] = *witness;
        human << "disagree on: " << *witness;
    } else {
        human << "agree on all " << sentences.size() << " sentences";
    }
    out.emit(j, human.str());
    return expect_check(expect, witness ? "disagree" : "agree");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"EF-game toolkit"};
    app.require_subcommand(1);

    Output out;
    efk::SolveOptions opts;
    if (const char* env = std::getenv("EFK_NODE_CAP")) {
        opts.node_cap = std::strtoull(env, nullptr, 10);
    }
    std::string expect;
    int jobs = 1;
    std::uint64_t seed = 0;

    app.add_flag("--records", out.records, "line-delimited record output");
    app.add_flag("--stats", out.with_timing, "include timing in records (non-deterministic)");
    app.add_option("--node-cap", opts.node_cap, "solver position cap");
    app.add_option("--expect", expect, "turn an expected outcome into the exit code");
    app.add_option("--jobs", jobs, "worker threads for per-index work");
    app.add_option("--seed", seed, "seed for randomized corpora");

    std::string problem, kseq_path, set_expr, family_path, slaloms_path, script_path;
    std::string e1_path, e2_path, slalom_op = "check", mode_text = "everywhere";
    int index = 0, k = 0, rank = 1, width = 1, level = -1;
    bool classify_only = false;

    auto* validate = app.add_subcommand("validate", "check problem file invariants");
    validate->add_option("problem", problem)->required();

    auto* kseq = app.add_subcommand("kseq", "compute the window k-sequence");
    kseq->add_option("problem", problem)->required();

    auto* solve = app.add_subcommand("solve", "solve one budgeted game");
    solve->add_option("problem", problem)->required();
    solve->add_option("--index", index)->required();
    solve->add_option("--k", k)->required();

    auto* distinguish = app.add_subcommand("distinguish", "search for a separating sentence");
    distinguish->add_option("problem", problem)->required();
    distinguish->add_option("--index", index)->required();
    distinguish->add_option("--k", k)->required();

    auto* filter = app.add_subcommand("filter", "filter membership / classification");
    filter->add_option("--kseq", kseq_path);
    filter->add_option("--problem", problem);
    filter->add_option("--set", set_expr);
    filter->add_flag("--classify", classify_only);

    auto* slalom = app.add_subcommand("slalom", "cover operations on function families");
    slalom->add_option("--family", family_path)->required();
    slalom->add_option("--op", slalom_op)->check(CLI::IsMember({"check", "single", "greedy", "min"}));
    slalom->add_option("--slaloms", slaloms_path);
    slalom->add_option("--mode", mode_text);
    slalom->add_option("--kseq", kseq_path);

    auto* chain = app.add_subcommand("chain", "run an extend/merge script");
    chain->add_option("problem", problem)->required();
    chain->add_option("--script", script_path)->required();

    auto* assemble = app.add_subcommand("assemble", "back-and-forth assembly over enumerations");
    assemble->add_option("problem", problem)->required();
    assemble->add_option("--e1", e1_path);
    assemble->add_option("--e2", e2_path);

    auto* oracle = app.add_subcommand("oracle", "brute-force sentence agreement");
    oracle->add_option("problem", problem)->required();
    oracle->add_option("--index", index)->required();
    oracle->add_option("--rank", rank);
    oracle->add_option("--width", width);
    oracle->add_option("--level", level);

    for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; })) {
        sub->fallthrough();
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(problem, out);
        if (kseq->parsed()) return cmd_kseq(problem, opts, jobs, expect, out);
        if (solve->parsed()) return cmd_solve(problem, index, k, opts, expect, out);
        if (distinguish->parsed()) return cmd_distinguish(problem, index, k, opts, expect, out);
        if (filter->parsed()) {
            if (!classify_only && set_expr.empty()) {
                std::cerr << "error: filter needs --set or --classify\n";
                return kExitInput;
            }
            if (kseq_path.empty() == problem.empty()) {
                std::cerr << "error: filter needs exactly one of --kseq or --problem\n";
                return kExitInput;
            }
            std::string problem_arg = filter->count("--problem") ? problem : std::string{};
            return cmd_filter(kseq_path, problem_arg, set_expr, classify_only, opts, expect, out);
        }
        if (slalom->parsed()) {
            return cmd_slalom(family_path, slalom_op, slaloms_path, mode_text, kseq_path, expect,
                              out);
        }
        if (chain->parsed()) return cmd_chain(problem, script_path, opts, out);
        if (assemble->parsed()) return cmd_assemble(problem, e1_path, e2_path, opts, out);
        if (oracle->parsed()) return cmd_oracle(problem, index, rank, width, level, expect, out);
    } catch (const efk::BudgetExceeded& e) {
        std::cerr << "resource: " << e.what() << "\n";
        return kExitResource;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
