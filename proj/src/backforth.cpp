#include "efk/backforth.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace efk {

ProblemContext::ProblemContext(const ProblemSpec& spec, SolveOptions opts)
    : spec_(&spec), opts_(opts) {
    ValidationReport report = validate_problem(spec);
    if (!report.ok()) {
        throw std::invalid_argument("invalid problem: " + report.violations.front().clause + " (" +
                                    report.violations.front().message + ")");
    }
    opts_.certificates = false;
    kseq_ = compute_k_seq(spec, opts_).require_complete();
    engines_.resize(static_cast<std::size_t>(spec.window_len()));
}

ProblemContext::~ProblemContext() = default;
ProblemContext::ProblemContext(ProblemContext&&) noexcept = default;
ProblemContext& ProblemContext::operator=(ProblemContext&&) noexcept = default;

KSeqSpec ProblemContext::kseq_spec() const { return {kseq_, spec_->kseq_tail}; }

GameEngine& ProblemContext::engine(int n) {
    auto& slot = engines_.at(static_cast<std::size_t>(n));
    if (!slot) {
        const auto& [m1, m2] = spec_->pairs[static_cast<std::size_t>(n)];
        int k = static_cast<int>(kseq_[static_cast<std::size_t>(n)]);
        slot = std::make_unique<GameEngine>(m1, m2, spec_->chain.at_level(k), k, opts_);
    }
    return *slot;
}

std::vector<int> ProblemContext::window_indices(const Window& w) const {
    std::vector<int> out;
    for (int n = 0; n < window_len(); ++n) {
        if (n >= w.n0 && kseq_[static_cast<std::size_t>(n)] > w.c) out.push_back(n);
    }
    return out;
}

PartialMap Approximation::map(int n) const {
    const Play& play = plays[static_cast<std::size_t>(n)];
    return play.empty() ? PartialMap{} : play.back().response;
}

long long slack(const ProblemContext& ctx, const Approximation& s, int n) {
    return ctx.kseq()[static_cast<std::size_t>(n)] - s.rounds(n);
}

Approximation empty_approx(ProblemContext& ctx) {
    Approximation s;
    s.plays.resize(static_cast<std::size_t>(ctx.window_len()));
    return s;
}

bool is_valid_approx(ProblemContext& ctx, const Approximation& s) {
    if (static_cast<int>(s.plays.size()) != ctx.window_len()) return false;
    for (int n = 0; n < ctx.window_len(); ++n) {
        if (slack(ctx, s, n) < 0) return false;
        GameEngine& engine = ctx.engine(n);
        PartialMap position;
        int rounds_left = engine.rounds();
        for (const PlayRound& round : s.plays[static_cast<std::size_t>(n)]) {
            if (round.challenge.weight() > engine.budget()) return false;
            auto expected = engine.respond(position, rounds_left, round.challenge);
            if (!expected || !(*expected == round.response)) return false;
            position = round.response;
            --rounds_left;
        }
    }
    return true;
}

namespace {

bool play_prefix(const Play& a, const Play& b) {
    if (a.size() > b.size()) return false;
    return std::equal(a.begin(), a.end(), b.begin());
}

}  // namespace

bool leq_ap(const ProblemContext& ctx, const Approximation& s, const Approximation& t,
            const Window& w) {
    for (int n : ctx.window_indices(w)) {
        if (!play_prefix(s.plays[static_cast<std::size_t>(n)],
                         t.plays[static_cast<std::size_t>(n)])) {
            return false;
        }
    }
    return true;
}

std::optional<SlackWitness> make_slack_witness(const ProblemContext& ctx, const Approximation& s,
                                               long long sigma, const Window& w) {
    for (int n : ctx.window_indices(w)) {
        if (slack(ctx, s, n) < sigma) return std::nullopt;
    }
    return SlackWitness{sigma, w};
}

Approximation extend(ProblemContext& ctx, const Approximation& s, int side,
                     const std::vector<std::vector<int>>& w, const Window& window,
                     long long sigma_floor) {
    if (side != 1 && side != 2) throw std::invalid_argument("side must be 1 or 2");
    if (static_cast<int>(w.size()) != ctx.window_len()) {
        throw std::invalid_argument("challenge list length differs from the window");
    }
    // challenges are validated only where a round is actually appended:
    // degenerate indices are carried untouched whatever their entry says
    for (int n = 0; n < ctx.window_len(); ++n) {
        if (slack(ctx, s, n) < 1) continue;
        if (static_cast<long long>(w[static_cast<std::size_t>(n)].size()) >
            ctx.kseq()[static_cast<std::size_t>(n)]) {
            throw std::invalid_argument("challenge exceeds the per-round budget at index " +
                                        std::to_string(n));
        }
        const auto& pair = ctx.spec().pairs[static_cast<std::size_t>(n)];
        int size = side == 1 ? pair.first.size : pair.second.size;
        for (int x : w[static_cast<std::size_t>(n)]) {
            if (x < 0 || x >= size) {
                throw std::invalid_argument("challenge element outside universe at index " +
                                            std::to_string(n));
            }
        }
    }
    for (int n : ctx.window_indices(window)) {
        if (slack(ctx, s, n) < 1) {
            throw std::invalid_argument("no slack left on the window at index " + std::to_string(n));
        }
    }

    Approximation t = s;
    for (int n = 0; n < ctx.window_len(); ++n) {
        if (slack(ctx, s, n) < 1) continue;  // degenerate index, carried untouched
        GameEngine& engine = ctx.engine(n);
        std::vector<int> elems = w[static_cast<std::size_t>(n)];
        std::sort(elems.begin(), elems.end());
        elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
        Challenge ch;
        (side == 1 ? ch.left : ch.right) = std::move(elems);
        int rounds_left = engine.rounds() - s.rounds(n);
        auto response = engine.respond(s.map(n), rounds_left, ch);
        if (!response) {
            throw std::logic_error("strategy replay failure at index " + std::to_string(n));
        }
        t.plays[static_cast<std::size_t>(n)].push_back({std::move(ch), std::move(*response)});
    }
    for (int n : ctx.window_indices(window)) {
        if (slack(ctx, t, n) < sigma_floor) {
            throw std::invalid_argument("slack floor violated at index " + std::to_string(n));
        }
    }
    return t;
}

std::vector<int> MergeResult::extends_member(int ell, const ProblemContext& ctx,
                                             const Window& w) const {
    std::vector<int> out;
    for (int n : ctx.window_indices(w)) {
        if (chosen[static_cast<std::size_t>(n)] >= ell) out.push_back(n);
    }
    return out;
}

MergeResult merge_chain(ProblemContext& ctx, std::span<const Approximation> chain,
                        long long sigma_target, const Window& w) {
    if (chain.empty()) throw std::invalid_argument("empty chain");
    if (sigma_target < 0) throw std::invalid_argument("negative slack target");
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        if (!leq_ap(ctx, chain[i], chain[i + 1], w)) {
            throw std::runtime_error("chain not increasing on the window at position " +
                                     std::to_string(i));
        }
    }
    int len = static_cast<int>(chain.size());
    MergeResult result;
    result.merged.plays.resize(static_cast<std::size_t>(ctx.window_len()));
    result.chosen.resize(static_cast<std::size_t>(ctx.window_len()), 0);
    result.eta.resize(static_cast<std::size_t>(ctx.window_len()), 0);
    for (int n = 0; n < ctx.window_len(); ++n) {
        long long eta = sigma_target;
        for (const Approximation& s : chain) eta = std::min(eta, slack(ctx, s, n));
        result.eta[static_cast<std::size_t>(n)] = eta;

        // the deepest chain position whose prefix chain and slack admit eta
        int pick = 0;
        for (int ell = static_cast<int>(std::min<long long>(eta, len - 1)); ell >= 0; --ell) {
            bool ok = true;
            // (b): members 0..min(ell+1, len-1) form a prefix chain at n
            int top = std::min(ell + 1, len - 1);
            for (int i = 0; i < top && ok; ++i) {
                ok = play_prefix(chain[static_cast<std::size_t>(i)].plays[static_cast<std::size_t>(n)],
                                 chain[static_cast<std::size_t>(i + 1)].plays[static_cast<std::size_t>(n)]);
            }
            // (c): every member up to ell keeps slack >= eta at n
            for (int i = 0; i <= ell && ok; ++i) {
                ok = slack(ctx, chain[static_cast<std::size_t>(i)], n) >= eta;
            }
            if (ok) {
                pick = ell;
                break;
            }
        }
        result.chosen[static_cast<std::size_t>(n)] = pick;
        result.merged.plays[static_cast<std::size_t>(n)] =
            chain[static_cast<std::size_t>(pick)].plays[static_cast<std::size_t>(n)];
    }
    return result;
}

PairFamily h_pairs(const ProblemContext& ctx, const Approximation& s,
                   const std::vector<std::pair<std::vector<int>, std::vector<int>>>& candidates) {
    int len = ctx.window_len();
    long long max_k = 0;
    for (long long k : ctx.kseq()) max_k = std::max(max_k, k);

    PairFamily out;
    for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
        const auto& [h1, h2] = candidates[ci];
        if (static_cast<int>(h1.size()) != len || static_cast<int>(h2.size()) != len) {
            throw std::invalid_argument("candidate sequence length differs from the window");
        }
        std::vector<char> match(static_cast<std::size_t>(len), 0);
        for (int n = 0; n < len; ++n) {
            auto img = s.map(n).image(h1[static_cast<std::size_t>(n)]);
            match[static_cast<std::size_t>(n)] = img && *img == h2[static_cast<std::size_t>(n)];
        }
        // largest active window inside the match set
        std::optional<Window> best;
        std::size_t best_size = 0;
        for (long long c = -1; c <= max_k; ++c) {
            for (long long n0 = 0; n0 < len; ++n0) {
                Window w{c, n0};
                auto idx = ctx.window_indices(w);
                if (idx.empty()) continue;
                bool inside = std::all_of(idx.begin(), idx.end(), [&](int n) {
                    return match[static_cast<std::size_t>(n)] != 0;
                });
                if (inside && idx.size() > best_size) {
                    best = w;
                    best_size = idx.size();
                }
            }
        }
        if (best) {
            out.pairs.push_back({h1, h2, *best});
        } else {
            out.excluded.push_back(static_cast<int>(ci));
        }
    }
    return out;
}

ElementaryReport check_partial_elementary(const ProblemContext& ctx, const Approximation& s,
                                          std::span<const FormulaPtr> formulas, int rank) {
    ElementaryReport report;
    for (int n = 0; n < ctx.window_len(); ++n) {
        if (slack(ctx, s, n) < rank) continue;
        const auto& [m1, m2] = ctx.spec().pairs[static_cast<std::size_t>(n)];
        int level = static_cast<int>(ctx.kseq()[static_cast<std::size_t>(n)]);
        const Vocabulary& vocab = ctx.spec().chain.at_level(level);
        PartialMap f = s.map(n);
        std::vector<int> dom = f.sources();
        for (const FormulaPtr& phi : formulas) {
            if (quantifier_rank(*phi) > rank) continue;
            bool in_vocab = true;
            for (const std::string& sym : symbols_of(*phi)) {
                if (vocab.find(sym) == nullptr) {
                    in_vocab = false;
                    break;
                }
            }
            if (!in_vocab) continue;
            std::set<std::string> fv = free_vars(*phi);
            std::vector<std::string> free(fv.begin(), fv.end());
            if (dom.empty() && !free.empty()) continue;
            // all assignments of dom(f) elements to the free variables
            std::vector<std::size_t> pick(free.size(), 0);
            while (true) {
                Valuation v;
                for (std::size_t i = 0; i < free.size(); ++i) v[free[i]] = dom[pick[i]];
                ++report.checked;
                if (!check_ss1(m1, m2, f, *phi, v)) {
                    report.violations.push_back({n, phi, v});
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
    return report;
}

AssembleResult assemble(ProblemContext& ctx, const std::vector<std::vector<int>>& e1,
                        const std::vector<std::vector<int>>& e2) {
    int len = ctx.window_len();
    long long total = static_cast<long long>(e1.size() + e2.size());
    Window window{total - 1, 0};
    if (total > 0 && ctx.window_indices(window).empty()) {
        int best = 0;
        for (int n = 1; n < len; ++n) {
            if (ctx.kseq()[static_cast<std::size_t>(n)] > ctx.kseq()[static_cast<std::size_t>(best)]) {
                best = n;
            }
        }
        throw AssembleError(best, "slack budget insufficient: no index has k >= " +
                                      std::to_string(total));
    }

    Approximation s = empty_approx(ctx);
    for (std::size_t j = 0; j < std::max(e1.size(), e2.size()); ++j) {
        if (j < e1.size()) {
            std::vector<std::vector<int>> w;
            for (int n = 0; n < len; ++n) w.push_back({e1[j].at(static_cast<std::size_t>(n))});
            s = extend(ctx, s, 1, w, window, 0);
        }
        if (j < e2.size()) {
            std::vector<std::vector<int>> w;
            for (int n = 0; n < len; ++n) w.push_back({e2[j].at(static_cast<std::size_t>(n))});
            s = extend(ctx, s, 2, w, window, 0);
        }
    }

    AssembleResult result;
    result.window = window;
    auto idx = ctx.window_indices(window);
    for (const auto& h1 : e1) {
        AssembleRow row;
        row.side = 1;
        row.given = h1;
        row.matched.assign(static_cast<std::size_t>(len), -1);
        for (int n : idx) {
            auto img = s.map(n).image(h1[static_cast<std::size_t>(n)]);
            if (!img) throw std::logic_error("domain coverage failed at index " + std::to_string(n));
            row.matched[static_cast<std::size_t>(n)] = *img;
        }
        result.table.push_back(std::move(row));
    }
    for (const auto& h2 : e2) {
        AssembleRow row;
        row.side = 2;
        row.given = h2;
        row.matched.assign(static_cast<std::size_t>(len), -1);
        for (int n : idx) {
            auto pre = s.map(n).preimage(h2[static_cast<std::size_t>(n)]);
            if (!pre) throw std::logic_error("range coverage failed at index " + std::to_string(n));
            row.matched[static_cast<std::size_t>(n)] = *pre;
        }
        result.table.push_back(std::move(row));
    }

    // pointwise injectivity of the maps makes the table injective on the
    // window; verify it outright
    result.injective = true;
    auto window_equal = [&](const std::vector<int>& a, const std::vector<int>& b) {
        return std::all_of(idx.begin(), idx.end(), [&](int n) {
            return a[static_cast<std::size_t>(n)] == b[static_cast<std::size_t>(n)];
        });
    };
    auto side1_of = [&](const AssembleRow& r) { return r.side == 1 ? r.given : r.matched; };
    auto side2_of = [&](const AssembleRow& r) { return r.side == 1 ? r.matched : r.given; };
    for (std::size_t i = 0; i < result.table.size() && result.injective; ++i) {
        for (std::size_t j = i + 1; j < result.table.size() && result.injective; ++j) {
            bool left_eq = window_equal(side1_of(result.table[i]), side1_of(result.table[j]));
            bool right_eq = window_equal(side2_of(result.table[i]), side2_of(result.table[j]));
            if (left_eq != right_eq) result.injective = false;
        }
    }
    result.final_approx = std::move(s);
    return result;
}

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t hash = 14695981039346656037ull;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

std::string problem_digest(const ProblemSpec& spec) {
    std::ostringstream out;
    out << std::hex << fnv1a(serialize_problem(spec));
    return out.str();
}

std::string serialize_approximation(const ProblemContext& ctx, const Approximation& s) {
    std::ostringstream out;
    out << "#approx digest=" << problem_digest(ctx.spec()) << " kseq=";
    for (std::size_t n = 0; n < ctx.kseq().size(); ++n) {
        out << (n ? "," : "") << ctx.kseq()[n];
    }
    out << "\n";
    for (int n = 0; n < ctx.window_len(); ++n) {
        out << "#index n=" << n << " rounds=" << s.rounds(n) << "\n";
        for (const PlayRound& round : s.plays[static_cast<std::size_t>(n)]) {
            out << "round: A={";
            for (std::size_t i = 0; i < round.challenge.left.size(); ++i) {
                out << (i ? "," : "") << round.challenge.left[i];
            }
            out << "} B={";
            for (std::size_t i = 0; i < round.challenge.right.size(); ++i) {
                out << (i ? "," : "") << round.challenge.right[i];
            }
            out << "} f=";
            const auto& pairs = round.response.pairs();
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                out << (i ? "," : "") << pairs[i].first << "->" << pairs[i].second;
            }
            out << "\n";
        }
    }
    return out.str();
}

}  // namespace efk
