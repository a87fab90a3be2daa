// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure.  Each criterion is checked against an oracle that is independent
// of the code path it certifies (brute-force enumeration, direct evaluation,
// unpruned searches).

#include <chrono>
#include <cstdio>
#include <iostream>
#include <set>
#include <sstream>

#include "efk/backforth.hpp"
#include "efk/efgame.hpp"
#include "efk/filterlab.hpp"
#include "efk/slalom.hpp"
#include "helpers.hpp"

using namespace efk;
using namespace efk::test;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(int number, const std::string& name, const Outcome& outcome, double seconds) {
    std::printf("[%s] criterion %d: %s (%s) [%.1fs]\n", outcome.pass ? "PASS" : "FAIL", number,
                name.c_str(), outcome.detail.c_str(), seconds);
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
}

template <typename F>
void run(int number, const std::string& name, F&& body) {
    auto start = std::chrono::steady_clock::now();
    Outcome outcome = body();
    double seconds =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                              start)
            .count() /
        1000.0;
    report(number, name, outcome, seconds);
}

// Shared corpus: every binary-relation structure of size <= 3 up to
// isomorphism, the budget-k winners for every ordered pair and k <= 2, and
// the certificates of those games.
struct PairData {
    Winner winner[3];
    std::optional<ProtagonistCertificate> strategy[3];
    std::optional<AntagonistCertificate> refutation[3];
};

std::vector<FiniteStructure> reps;
VocabularyChain chain;
std::vector<PairData> pair_data;  // indexed by a * reps.size() + b

const PairData& at(std::size_t a, std::size_t b) { return pair_data[a * reps.size() + b]; }

void build_corpus() {
    reps = all_digraphs_up_to_iso(3);
    chain = rel_chain();
    pair_data.resize(reps.size() * reps.size());
    SolveOptions opts;
    opts.certificates = true;
    for (std::size_t a = 0; a < reps.size(); ++a) {
        for (std::size_t b = 0; b < reps.size(); ++b) {
            PairData& data = pair_data[a * reps.size() + b];
            for (int k = 0; k <= 2; ++k) {
                SolveResult r = solve_game(reps[a], reps[b], chain, k, opts);
                data.winner[k] = r.winner;
                data.strategy[k] = std::move(r.strategy);
                data.refutation[k] = std::move(r.refutation);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Criterion 1: protagonist win at budget k implies agreement on every
// enumerated sentence of rank <= k (exhaustive size <= 3 corpus, k <= 2).

Outcome criterion1() {
    const Vocabulary& vocab = chain.at_level(1);
    auto sentences1 = enumerate_sentences(vocab, 1, 1);
    auto sentences2 = enumerate_sentences(vocab, 2, 2);

    // truth table per structure, via the compiled evaluator
    auto tabulate = [&](const std::vector<FormulaPtr>& sentences) {
        std::vector<std::vector<bool>> rows(reps.size());
        for (std::size_t i = 0; i < reps.size(); ++i) {
            rows[i].reserve(sentences.size());
            for (const FormulaPtr& s : sentences) {
                CompiledFormula compiled(*s, reps[i], {});
                rows[i].push_back(compiled.eval({}));
            }
        }
        return rows;
    };
    auto rows1 = tabulate(sentences1);
    auto rows2 = tabulate(sentences2);

    long long violations = 0, wins = 0;
    for (std::size_t a = 0; a < reps.size(); ++a) {
        for (std::size_t b = 0; b < reps.size(); ++b) {
            const PairData& data = at(a, b);
            // k = 0: the level-0 vocabulary has no sentences, nothing to check
            if (data.winner[1] == Winner::protagonist) {
                ++wins;
                if (rows1[a] != rows1[b]) ++violations;
            }
            if (data.winner[2] == Winner::protagonist) {
                ++wins;
                if (rows2[a] != rows2[b]) ++violations;
            }
        }
    }
    std::ostringstream detail;
    detail << reps.size() << " structures, " << reps.size() * reps.size() << " ordered pairs, "
           << sentences2.size() << " rank-2 sentences, " << wins << " protagonist wins, "
           << violations << " violations";
    return {violations == 0 && wins > 0, detail.str()};
}

// ---------------------------------------------------------------------------
// Criterion 2: every extracted sentence separates its pair; none-found rate
// stays within 5% on a 1000-pair random corpus of sizes <= 4.

Outcome criterion2() {
    auto gen = rng(20260809);
    VocabularyChain rchain = rel_chain();
    int accepted = 0, none_found = 0, unsound = 0;
    while (accepted < 1000) {
        int s1 = 1 + static_cast<int>(gen() % 4), s2 = 1 + static_cast<int>(gen() % 4);
        FiniteStructure m1 = random_structure(gen, s1), m2 = random_structure(gen, s2);
        if (s1 == s2 && isomorphic(m1, m2)) continue;
        ++accepted;
        int k0 = -1;
        for (int k = 0; k <= s1 + s2; ++k) {
            if (solve_game(m1, m2, rchain, k + 1).winner == Winner::antagonist) {
                k0 = k;
                break;
            }
        }
        if (k0 < 0) {
            ++unsound;  // non-isomorphic pairs must separate at some budget
            continue;
        }
        DistinguishResult r = extract_distinguisher(m1, m2, rchain, k0);
        if (!r.found) {
            ++none_found;
            continue;
        }
        const FiniteStructure& pos = r.direction == 1 ? m1 : m2;
        const FiniteStructure& neg = r.direction == 1 ? m2 : m1;
        if (!eval(pos, *r.sentence) || eval(neg, *r.sentence)) ++unsound;
    }
    double rate = 100.0 * none_found / accepted;
    std::ostringstream detail;
    detail << accepted << " non-isomorphic pairs, " << unsound << " unsound, none-found rate "
           << rate << "%";
    return {unsound == 0 && rate <= 5.0, detail.str()};
}

// ---------------------------------------------------------------------------
// Criterion 3: k=0 totality, budget monotonicity, isomorphism ceiling and
// certificate soundness, exhaustively on the shared corpus.

Outcome criterion3() {
    long long totality = 0, monotonicity = 0, certs = 0, ceiling = 0;
    for (std::size_t a = 0; a < reps.size(); ++a) {
        for (std::size_t b = 0; b < reps.size(); ++b) {
            const PairData& data = at(a, b);
            if (data.winner[0] != Winner::protagonist) ++totality;
            for (int k = 1; k <= 2; ++k) {
                if (data.winner[k] == Winner::protagonist &&
                    data.winner[k - 1] != Winner::protagonist) {
                    ++monotonicity;
                }
            }
            for (int k = 0; k <= 2; ++k) {
                bool ok = false;
                if (data.winner[k] == Winner::protagonist) {
                    ok = data.strategy[k] &&
                         verify_protagonist_certificate(reps[a], reps[b], chain, k,
                                                        *data.strategy[k]);
                } else if (data.winner[k] == Winner::antagonist) {
                    ok = data.refutation[k] &&
                         verify_antagonist_certificate(reps[a], reps[b], chain, k,
                                                       *data.refutation[k]);
                }
                if (!ok) ++certs;
            }
        }
    }
    // isomorphism ceiling over a 4-index window for every representative
    for (std::size_t a = 0; a < reps.size(); ++a) {
        std::vector<int> perm(static_cast<std::size_t>(reps[a].size));
        std::iota(perm.begin(), perm.end(), 0);
        std::rotate(perm.begin(), perm.begin() + (reps[a].size > 1 ? 1 : 0), perm.end());
        ProblemSpec spec = make_problem({});
        for (int n = 0; n < 4; ++n) spec.pairs.push_back({reps[a], permuted(reps[a], perm)});
        auto kseq = compute_k_seq(spec);
        if (!kseq.complete() || kseq.require_complete() != std::vector<long long>{0, 1, 2, 3}) {
            ++ceiling;
        }
    }
    std::ostringstream detail;
    detail << "totality " << totality << ", monotonicity " << monotonicity << ", ceiling "
           << ceiling << ", certificates " << certs << " violations";
    return {totality + monotonicity + certs + ceiling == 0, detail.str()};
}

// ---------------------------------------------------------------------------
// Criterion 4: the relativized biconditional holds for the final map of
// every engine-generated winning play, all formulas of rank <= 2 (the oracle
// family), all domain tuples of width <= 2.

Outcome criterion4() {
    const Vocabulary& vocab = chain.at_level(1);
    std::vector<std::string> pool{"u0", "u1"};
    // rank <= 2 with literal bodies plus rank <= 1 with binary clauses
    // inside quantifiers (root combinations add no oracle power)
    std::vector<FormulaPtr> formulas = enumerate_formulas(vocab, 2, 2, pool, {1, 1});
    for (const auto& f : enumerate_formulas(vocab, 1, 1, pool, {2, 1})) formulas.push_back(f);

    // the free-variable order is per formula and shared by both sides
    std::vector<std::vector<std::string>> orders;
    orders.reserve(formulas.size());
    for (const FormulaPtr& phi : formulas) {
        auto fv = free_vars(*phi);
        orders.emplace_back(fv.begin(), fv.end());
    }
    // compile once per (structure, formula)
    std::vector<std::vector<CompiledFormula>> compiled(reps.size());
    for (std::size_t s = 0; s < reps.size(); ++s) {
        compiled[s].reserve(formulas.size());
        for (std::size_t pi = 0; pi < formulas.size(); ++pi) {
            compiled[s].emplace_back(*formulas[pi], reps[s], orders[pi]);
        }
    }

    long long violations = 0, checked = 0, cross_checked = 0, cross_bad = 0;
    for (std::size_t a = 0; a < reps.size(); ++a) {
        for (std::size_t b = 0; b < reps.size(); ++b) {
            const PairData& data = at(a, b);
            // final maps of complete winning plays: the certificate's answers
            // in the last round
            std::set<PartialMap> finals;
            for (int k = 0; k <= 2; ++k) {
                if (!data.strategy[k]) continue;
                for (const auto& [key, resp] : data.strategy[k]->response) {
                    if (std::get<0>(key) == 1) finals.insert(resp);
                }
            }
            if (finals.empty()) continue;

            for (const PartialMap& f : finals) {
                std::vector<int> dom = f.sources();
                std::vector<int> rng_side = f.targets();
                for (std::size_t pi = 0; pi < formulas.size(); ++pi) {
                    const std::vector<std::string>& order = orders[pi];
                    if (dom.empty() && !order.empty()) continue;
                    std::vector<std::size_t> pick(order.size(), 0);
                    std::vector<int> lhs_vals(order.size()), rhs_vals(order.size());
                    while (true) {
                        for (std::size_t i = 0; i < pick.size(); ++i) {
                            lhs_vals[i] = dom[pick[i]];
                            rhs_vals[i] = *f.image(dom[pick[i]]);
                        }
                        ++checked;
                        bool lhs = compiled[a][pi].eval_restricted(lhs_vals, dom);
                        bool rhs = compiled[b][pi].eval_restricted(rhs_vals, rng_side);
                        if (lhs != rhs) ++violations;
                        // tie the fast path to the reference implementation
                        if (checked % 9973 == 0) {
                            Valuation v;
                            for (std::size_t i = 0; i < pick.size(); ++i) {
                                v[order[i]] = lhs_vals[i];
                            }
                            ++cross_checked;
                            if (check_ss1(reps[a], reps[b], f, *formulas[pi], v) != (lhs == rhs)) {
                                ++cross_bad;
                            }
                        }
                        std::size_t i = pick.size();
                        bool done = true;
                        while (i-- > 0) {
                            if (++pick[i] < dom.size()) {
                                done = false;
                                break;
                            }
                            pick[i] = 0;
                        }
                        if (done) break;
                    }
                }
            }
        }
    }
    std::ostringstream detail;
    detail << checked << " biconditionals (" << cross_checked << " cross-checked, " << cross_bad
           << " mismatches), " << violations << " violations";
    return {violations == 0 && cross_bad == 0 && checked > 0, detail.str()};
}

// ---------------------------------------------------------------------------
// Criterion 5: filter decisions carry certificates confirmed by direct
// evaluation; classification matches the tail class.

Outcome criterion5() {
    auto gen = rng(50);
    long long bad = 0, members = 0, nonmembers = 0;
    auto random_kseq = [&]() {
        KSeqSpec k;
        int window = 1 + static_cast<int>(gen() % 6);
        for (int n = 0; n < window; ++n) k.prefix.push_back(static_cast<long long>(gen() % 5));
        switch (gen() % 3) {
            case 0:
                k.tail = TailClass::bounded_tail(static_cast<long long>(gen() % 5));
                break;
            case 1:
                k.tail = TailClass::affine_tail(1 + static_cast<long long>(gen() % 3),
                                                static_cast<long long>(gen() % 4));
                break;
            default: {
                std::vector<AffineTerm> pattern;
                int terms = 1 + static_cast<int>(gen() % 4);
                for (int i = 0; i < terms; ++i) {
                    pattern.push_back({static_cast<long long>(gen() % 2),
                                       static_cast<long long>(gen() % 5)});
                }
                k.tail = TailClass::periodic_tail(std::move(pattern));
            }
        }
        return k;
    };
    auto random_set = [&]() {
        std::vector<bool> head(gen() % 8);
        for (std::size_t i = 0; i < head.size(); ++i) head[i] = gen() % 2;
        std::vector<bool> tail(1 + gen() % 5);
        for (std::size_t i = 0; i < tail.size(); ++i) tail[i] = gen() % 2;
        return EventuallyPeriodicSet::periodic(std::move(head), std::move(tail));
    };
    for (int trial = 0; trial < 150; ++trial) {
        KSeqSpec k = random_kseq();
        k.validate();
        EventuallyPeriodicSet s = random_set();
        FilterDecision d = in_filter(k, s);
        if (!confirm_decision(k, s, d)) ++bad;
        (d.member ? members : nonmembers) += 1;
    }
    // classification per tail-class constructor
    long long class_bad = 0;
    KSeqSpec b{{1, 2}, TailClass::bounded_tail(3)};
    if (classify(b) != FilterClass::improper) ++class_bad;
    KSeqSpec aff{{1, 2}, TailClass::affine_tail(2, 0)};
    if (classify(aff) != FilterClass::proper_nonprincipal) ++class_bad;
    KSeqSpec per_flat{{0}, TailClass::periodic_tail({{0, 2}, {0, 7}})};
    if (classify(per_flat) != FilterClass::improper) ++class_bad;
    KSeqSpec per_grow{{0}, TailClass::periodic_tail({{0, 2}, {1, 0}})};
    if (classify(per_grow) != FilterClass::proper_nonprincipal) ++class_bad;
    // everything belongs to an improper filter
    for (const char* text : {"fin{0}", "evens", "fin{}"}) {
        FilterDecision d = in_filter(b, parse_set_expr(text, &b));
        if (!d.member || !confirm_decision(b, parse_set_expr(text, &b), d)) ++class_bad;
    }
    std::ostringstream detail;
    detail << members << " members / " << nonmembers << " non-members confirmed, " << bad
           << " unconfirmed, " << class_bad << " classification errors";
    return {bad == 0 && class_bad == 0 && members > 0 && nonmembers > 0, detail.str()};
}

// ---------------------------------------------------------------------------
// Criterion 6: slalom feasibility matches the pointwise characterization
// exhaustively; exact minima match an unpruned partition search.

bool part_feasible_oracle(const WindowFunctionFamily& h, const std::vector<long long>& g,
                          const std::vector<int>& members, const std::vector<int>& required) {
    for (int n : required) {
        std::set<int> values;
        for (int i : members) {
            values.insert(h.fns[static_cast<std::size_t>(i)][static_cast<std::size_t>(n)]);
        }
        if (static_cast<long long>(values.size()) > g[static_cast<std::size_t>(n)]) return false;
    }
    return true;
}

int brute_min_cover(const WindowFunctionFamily& h, const std::vector<long long>& g,
                    const CoverMode& mode) {
    std::vector<int> required = mode.required_indices(h.length);
    int count = static_cast<int>(h.fns.size());
    if (count == 0) return 0;
    std::vector<int> part(static_cast<std::size_t>(count), 0);
    int best = count + 1;
    auto rec = [&](auto&& self, int i, int blocks) -> void {
        if (i == count) {
            for (int blk = 0; blk < blocks; ++blk) {
                std::vector<int> members;
                for (int j = 0; j < count; ++j) {
                    if (part[static_cast<std::size_t>(j)] == blk) members.push_back(j);
                }
                if (!part_feasible_oracle(h, g, members, required)) return;
            }
            best = std::min(best, blocks);
            return;
        }
        for (int blk = 0; blk <= blocks; ++blk) {
            part[static_cast<std::size_t>(i)] = blk;
            self(self, i + 1, std::max(blocks, blk + 1));
        }
    };
    rec(rec, 0, 0);
    return best;
}

Outcome criterion6() {
    long long feasibility_bad = 0, feasibility_cases = 0;
    auto gen = rng(60);
    KSeqSpec filter_kseq{{0, 2, 5}, TailClass::affine_tail(1, 0)};

    for (int len = 1; len <= 3; ++len) {
        for (int bound = 1; bound <= 3; ++bound) {
            // all functions [0,len) -> [0,bound)
            std::vector<std::vector<int>> all;
            std::vector<int> fn(static_cast<std::size_t>(len), 0);
            while (true) {
                all.push_back(fn);
                int i = len - 1;
                while (i >= 0 && ++fn[static_cast<std::size_t>(i)] == bound) {
                    fn[static_cast<std::size_t>(i)] = 0;
                    --i;
                }
                if (i < 0) break;
            }
            // subsets of size <= 4 (enumerated by index combinations)
            std::vector<int> pick;
            auto subsets = [&](auto&& self, std::size_t from) -> void {
                if (!pick.empty()) {
                    WindowFunctionFamily h;
                    h.length = len;
                    h.value_bound = bound;
                    for (int i : pick) h.fns.push_back(all[static_cast<std::size_t>(i)]);
                    // a few deterministic capacity vectors plus a random one
                    for (int rep = 0; rep < 3; ++rep) {
                        std::vector<long long> g;
                        for (int n = 0; n < len; ++n) {
                            g.push_back(rep < 2 ? rep + 1 : static_cast<long long>(gen() % 4));
                        }
                        for (int mode_kind = 0; mode_kind < 2; ++mode_kind) {
                            CoverMode mode = mode_kind == 0
                                                 ? CoverMode::everywhere()
                                                 : CoverMode::filtered(1, 0, filter_kseq);
                            auto result = single_slalom_cover(h, g, mode);
                            std::vector<int> members(h.fns.size());
                            for (std::size_t i = 0; i < members.size(); ++i) {
                                members[i] = static_cast<int>(i);
                            }
                            bool want = part_feasible_oracle(h, g, members,
                                                             mode.required_indices(len));
                            ++feasibility_cases;
                            if (std::holds_alternative<Slalom>(result) != want) {
                                ++feasibility_bad;
                            } else if (want &&
                                       !check_cover(h, {std::get<Slalom>(result)}, mode).covered) {
                                ++feasibility_bad;
                            }
                        }
                    }
                }
                if (pick.size() == 4) return;
                for (std::size_t i = from; i < all.size(); ++i) {
                    pick.push_back(static_cast<int>(i));
                    self(self, i + 1);
                    pick.pop_back();
                }
            };
            subsets(subsets, 0);
        }
    }

    // exact minima vs the unpruned search
    long long min_bad = 0;
    {
        WindowFunctionFamily four;
        four.length = 2;
        four.value_bound = 2;
        four.fns = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
        auto result = min_cover_exact(four, {1, 1}, CoverMode::everywhere());
        if (!std::holds_alternative<MinCover>(result) ||
            std::get<MinCover>(result).size != 4) {
            ++min_bad;
        }
    }
    for (int trial = 0; trial < 300; ++trial) {
        int len = 1 + static_cast<int>(gen() % 3);
        int bound = 2 + static_cast<int>(gen() % 2);
        WindowFunctionFamily h;
        h.length = len;
        h.value_bound = bound;
        int count = 1 + static_cast<int>(gen() % 6);
        for (int i = 0; i < count; ++i) {
            std::vector<int> f;
            for (int n = 0; n < len; ++n) f.push_back(static_cast<int>(gen() % bound));
            h.fns.push_back(std::move(f));
        }
        std::vector<long long> g;
        for (int n = 0; n < len; ++n) g.push_back(1 + static_cast<long long>(gen() % 2));
        auto result = min_cover_exact(h, g, CoverMode::everywhere());
        if (!std::holds_alternative<MinCover>(result)) {
            ++min_bad;
            continue;
        }
        if (std::get<MinCover>(result).size != brute_min_cover(h, g, CoverMode::everywhere())) {
            ++min_bad;
        }
    }
    std::ostringstream detail;
    detail << feasibility_cases << " feasibility cases, " << feasibility_bad
           << " mismatches; 301 exact-minimum instances, " << min_bad << " mismatches";
    return {feasibility_bad == 0 && min_bad == 0, detail.str()};
}

// ---------------------------------------------------------------------------
// Criterion 7: extend/merge postconditions and elementary cleanliness over a
// scripted corpus of chains on isomorphic-pairs problems.

Outcome criterion7() {
    auto gen = rng(70);
    long long coverage_bad = 0, slack_bad = 0, elementary_bad = 0, order_bad = 0;
    int chains = 0;

    const Vocabulary vocab = rel_chain().at_level(1);
    std::vector<std::string> pool{"u0", "u1"};
    std::vector<FormulaPtr> formulas = enumerate_formulas(vocab, 2, 2, pool, {1, 1});
    for (const auto& f : enumerate_formulas(vocab, 1, 1, pool, {2, 1})) formulas.push_back(f);

    for (int trial = 0; trial < 50; ++trial) {
        int size = 2 + static_cast<int>(gen() % 2);
        ProblemSpec spec = iso_pairs_problem(6, size);  // window k = 0..5
        ProblemContext ctx(spec);
        std::vector<Approximation> chain_list{empty_approx(ctx)};
        int steps = 1 + static_cast<int>(gen() % 3);
        for (int step = 0; step < steps; ++step) {
            Window w{step, 0};  // indices with k > step still have slack
            int side = 1 + static_cast<int>(gen() % 2);
            std::vector<std::vector<int>> challenge;
            for (int n = 0; n < ctx.window_len(); ++n) {
                challenge.push_back({static_cast<int>(gen() % size)});
            }
            const Approximation& prev = chain_list.back();
            Approximation next = extend(ctx, prev, side, challenge, w, 0);
            ++chains;
            // Claim-style coverage: challenged elements enter dom/range at
            // every index that still had slack
            for (int n = 0; n < ctx.window_len(); ++n) {
                if (slack(ctx, prev, n) < 1) continue;
                int x = challenge[static_cast<std::size_t>(n)][0];
                bool covered = side == 1 ? next.map(n).has_src(x) : next.map(n).has_dst(x);
                if (!covered) ++coverage_bad;
            }
            if (!leq_ap(ctx, prev, next, w)) ++order_bad;
            chain_list.push_back(std::move(next));
        }
        Window merge_window{steps, 0};
        long long sigma = static_cast<long long>(gen() % 3);
        MergeResult merged = merge_chain(ctx, chain_list, sigma, merge_window);
        for (int n = 0; n < ctx.window_len(); ++n) {
            long long eta = sigma;
            for (const auto& s : chain_list) eta = std::min(eta, slack(ctx, s, n));
            if (merged.eta[static_cast<std::size_t>(n)] != eta) ++slack_bad;
        }
        for (int n : ctx.window_indices(merge_window)) {
            if (slack(ctx, merged.merged, n) < merged.eta[static_cast<std::size_t>(n)]) {
                ++slack_bad;
            }
        }
        if (!is_valid_approx(ctx, merged.merged)) ++order_bad;
        auto elem = check_partial_elementary(ctx, merged.merged,
                                             std::span<const FormulaPtr>(formulas), 2);
        if (!elem.clean()) ++elementary_bad;
        auto elem_last = check_partial_elementary(ctx, chain_list.back(),
                                                  std::span<const FormulaPtr>(formulas), 2);
        if (!elem_last.clean()) ++elementary_bad;
    }
    std::ostringstream detail;
    detail << chains << " extends over 50 chains: coverage " << coverage_bad << ", order "
           << order_bad << ", slack " << slack_bad << ", elementary " << elementary_bad
           << " violations";
    return {coverage_bad + slack_bad + elementary_bad + order_bad == 0, detail.str()};
}

// ---------------------------------------------------------------------------
// Criterion 8: assembly on isomorphic size-3 pairs with window k >= 4:
// injective table covering both enumerations, clean rank-1 checks,
// byte-identical output across runs.

Outcome criterion8() {
    ProblemSpec spec = iso_pairs_problem(6, 3);
    std::vector<std::vector<int>> e1{{0, 0, 0, 0, 0, 0}, {1, 1, 1, 1, 1, 1}};
    std::vector<std::vector<int>> e2{{2, 2, 2, 2, 2, 2}, {0, 0, 0, 0, 0, 0}};

    const Vocabulary vocab = rel_chain().at_level(1);
    std::vector<FormulaPtr> formulas = enumerate_formulas(vocab, 1, 1, {"u0", "u1"}, {2, 1});

    std::string first_dump, second_dump;
    bool ok = true;
    std::string why;
    for (std::string* dump : {&first_dump, &second_dump}) {
        ProblemContext ctx(spec);
        AssembleResult r = assemble(ctx, e1, e2);
        if (!r.injective) {
            ok = false;
            why = "table not injective";
        }
        auto idx = ctx.window_indices(r.window);
        if (idx.empty()) {
            ok = false;
            why = "empty window";
        }
        for (int n : idx) {
            if (ctx.kseq()[static_cast<std::size_t>(n)] < 4) {
                ok = false;
                why = "window admits k < 4";
            }
        }
        // both columns covered
        for (const auto& h : e1) {
            bool found = false;
            for (const auto& row : r.table) found |= row.side == 1 && row.given == h;
            if (!found) {
                ok = false;
                why = "side-1 entry missing";
            }
        }
        for (const auto& h : e2) {
            bool found = false;
            for (const auto& row : r.table) found |= row.side == 2 && row.given == h;
            if (!found) {
                ok = false;
                why = "side-2 entry missing";
            }
        }
        auto elem = check_partial_elementary(ctx, r.final_approx,
                                             std::span<const FormulaPtr>(formulas), 1);
        if (!elem.clean()) {
            ok = false;
            why = "rank-1 elementary check failed";
        }
        std::ostringstream table;
        for (const auto& row : r.table) {
            table << row.side << ":";
            for (int v : row.given) table << " " << v;
            table << " ->";
            for (int v : row.matched) table << " " << v;
            table << "\n";
        }
        *dump = table.str() + serialize_approximation(ctx, r.final_approx);
    }
    if (first_dump != second_dump) {
        ok = false;
        why = "output differs across runs";
    }
    std::ostringstream detail;
    if (ok) {
        detail << "4 table rows, injective, clean rank-1 checks, byte-identical across runs";
    } else {
        detail << why;
    }
    return {ok, detail.str()};
}

}  // namespace

int main() {
    auto start = std::chrono::steady_clock::now();
    build_corpus();
    double corpus_seconds =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                              start)
            .count() /
        1000.0;
    std::printf("corpus: %zu structures up to isomorphism, %zu solved pairs [%.1fs]\n",
                reps.size(), pair_data.size(), corpus_seconds);

    run(1, "oracle equivalence (game win implies sentence agreement)", criterion1);
    run(2, "distinguisher soundness on a random corpus", criterion2);
    run(3, "game invariants (totality, monotonicity, ceiling, certificates)", criterion3);
    run(4, "relativized-truth biconditional on winning plays", criterion4);
    run(5, "filter decision soundness and classification", criterion5);
    run(6, "slalom feasibility characterization and exact minima", criterion6);
    run(7, "extend/merge postconditions and elementary cleanliness", criterion7);
    run(8, "assembly: injective table, clean checks, deterministic output", criterion8);

    if (failures == 0) {
        std::printf("all 8 acceptance criteria passed\n");
    } else {
        std::printf("%d acceptance criteria FAILED\n", failures);
    }
    return failures;
}
