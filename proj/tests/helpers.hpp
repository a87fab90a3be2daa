#pragma once

// Shared builders and independent oracles for the test suites.  Everything
// here stays deliberately brute-force: these are the yardsticks the library
// is measured against, so they favor obviousness over speed.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "efk/efgame.hpp"
#include "efk/structures.hpp"

namespace efk::test {

inline VocabularyChain rel_chain(const std::string& name = "R") {
    VocabularyChain chain;
    chain.levels.push_back(Vocabulary{});
    chain.levels.push_back(Vocabulary{{Symbol{name, SymbolKind::relation, 2}}});
    return chain;
}

inline FiniteStructure rel_structure(int size, std::vector<std::pair<int, int>> edges,
                                     const std::string& name = "R") {
    FiniteStructure m;
    m.size = size;
    RelationInterp rel;
    rel.arity = 2;
    for (auto [a, b] : edges) rel.tuples.insert({a, b});
    m.relations.emplace(name, std::move(rel));
    return m;
}

/// Strict linear order 0 < 1 < ... < n-1.
inline FiniteStructure chain_structure(int n, const std::string& name = "R") {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) edges.push_back({i, j});
    }
    return rel_structure(n, std::move(edges), name);
}

inline std::uint64_t edge_mask(const FiniteStructure& m, const std::string& name = "R") {
    std::uint64_t mask = 0;
    const auto& rel = m.relations.at(name);
    for (const auto& t : rel.tuples) {
        mask |= std::uint64_t{1} << (t[0] * m.size + t[1]);
    }
    return mask;
}

inline FiniteStructure from_mask(int size, std::uint64_t mask, const std::string& name = "R") {
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < size; ++a) {
        for (int b = 0; b < size; ++b) {
            if (mask & (std::uint64_t{1} << (a * size + b))) edges.push_back({a, b});
        }
    }
    return rel_structure(size, std::move(edges), name);
}

/// Minimum edge mask over all permutations of the universe.
inline std::uint64_t canonical_mask(const FiniteStructure& m, const std::string& name = "R") {
    std::vector<int> perm(static_cast<std::size_t>(m.size));
    std::iota(perm.begin(), perm.end(), 0);
    std::uint64_t best = ~std::uint64_t{0};
    const auto& rel = m.relations.at(name);
    do {
        std::uint64_t mask = 0;
        for (const auto& t : rel.tuples) {
            mask |= std::uint64_t{1} << (perm[static_cast<std::size_t>(t[0])] * m.size +
                                         perm[static_cast<std::size_t>(t[1])]);
        }
        best = std::min(best, mask);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

inline bool isomorphic(const FiniteStructure& a, const FiniteStructure& b,
                       const std::string& name = "R") {
    return a.size == b.size && canonical_mask(a, name) == canonical_mask(b, name);
}

inline FiniteStructure permuted(const FiniteStructure& m, const std::vector<int>& perm,
                                const std::string& name = "R") {
    std::vector<std::pair<int, int>> edges;
    for (const auto& t : m.relations.at(name).tuples) {
        edges.push_back({perm[static_cast<std::size_t>(t[0])], perm[static_cast<std::size_t>(t[1])]});
    }
    return rel_structure(m.size, std::move(edges), name);
}

/// Every structure with one binary relation and universe size in [1, smax],
/// one representative per isomorphism class, in a fixed order.
inline std::vector<FiniteStructure> all_digraphs_up_to_iso(int smax,
                                                           const std::string& name = "R") {
    std::vector<FiniteStructure> out;
    for (int size = 1; size <= smax; ++size) {
        std::set<std::uint64_t> seen;
        std::uint64_t cells = static_cast<std::uint64_t>(size) * static_cast<std::uint64_t>(size);
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << cells); ++mask) {
            FiniteStructure m = from_mask(size, mask, name);
            if (seen.insert(canonical_mask(m, name)).second) out.push_back(std::move(m));
        }
    }
    return out;
}

/// Problem with the given pairs over the two-level {R/2} chain and an
/// identity-growth tail.
inline ProblemSpec make_problem(std::vector<std::pair<FiniteStructure, FiniteStructure>> pairs,
                                TailClass tail = TailClass::affine_tail(1, 0)) {
    ProblemSpec spec;
    spec.chain = rel_chain();
    spec.pairs = std::move(pairs);
    spec.kseq_tail = tail;
    return spec;
}

/// N isomorphic pairs (chain structures vs a fixed relabeling).
inline ProblemSpec iso_pairs_problem(int window, int size) {
    std::vector<int> perm(static_cast<std::size_t>(size));
    std::iota(perm.begin(), perm.end(), 0);
    std::reverse(perm.begin(), perm.end());
    std::vector<std::pair<FiniteStructure, FiniteStructure>> pairs;
    for (int n = 0; n < window; ++n) {
        FiniteStructure m = chain_structure(size);
        pairs.push_back({m, permuted(m, perm)});
    }
    return make_problem(std::move(pairs));
}

/// All partial injections from [0, s1) into [0, s2).
inline std::vector<PartialMap> all_partial_injections(int s1, int s2) {
    std::vector<PartialMap> out{PartialMap{}};
    for (int src = 0; src < s1; ++src) {
        std::vector<PartialMap> next;
        for (const PartialMap& f : out) {
            next.push_back(f);  // src unmapped
            for (int dst = 0; dst < s2; ++dst) {
                if (!f.has_dst(dst)) next.push_back(f.with(src, dst));
            }
        }
        out = std::move(next);
    }
    return out;
}

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64{seed}; }

inline FiniteStructure random_structure(std::mt19937_64& gen, int size,
                                        const std::string& name = "R") {
    std::uint64_t cells = static_cast<std::uint64_t>(size) * static_cast<std::uint64_t>(size);
    std::uniform_int_distribution<std::uint64_t> dist(0, (std::uint64_t{1} << cells) - 1);
    return from_mask(size, dist(gen), name);
}

}  // namespace efk::test
