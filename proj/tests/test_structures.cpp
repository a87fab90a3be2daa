#include <doctest.h>

#include "efk/structures.hpp"
#include "helpers.hpp"

using namespace efk;
using namespace efk::test;

namespace {

ProblemSpec two_index_problem() {
    return make_problem({{chain_structure(2), chain_structure(2)},
                         {chain_structure(3), chain_structure(2)}});
}

}  // namespace

TEST_CASE("well-formed two-index problem validates") {
    CHECK(validate_problem(two_index_problem()).ok());
}

TEST_CASE("nonempty level 0 is a violation") {
    ProblemSpec spec = two_index_problem();
    spec.chain.levels[0] = Vocabulary{{Symbol{"R", SymbolKind::relation, 2}}};
    auto report = validate_problem(spec);
    REQUIRE_FALSE(report.ok());
    bool found = false;
    for (const auto& v : report.violations) found |= v.clause == "tau_0 empty";
    CHECK(found);
}

TEST_CASE("tuple outside the universe is a violation") {
    ProblemSpec spec = make_problem({{rel_structure(3, {{0, 5}}), chain_structure(3)}});
    auto report = validate_problem(spec);
    REQUIRE_FALSE(report.ok());
    bool found = false;
    for (const auto& v : report.violations) {
        if (v.clause == "tuple in universe") {
            found = true;
            CHECK(v.index == 0);
            CHECK(v.side == 1);
            CHECK(v.symbol == "R");
        }
    }
    CHECK(found);
}

TEST_CASE("missing interpretation and unknown symbols are violations") {
    ProblemSpec spec = make_problem({{chain_structure(2), chain_structure(2)}});
    spec.pairs[0].first.relations.clear();
    spec.pairs[0].second.constants.emplace("ghost", 0);
    auto report = validate_problem(spec);
    bool missing = false, unknown = false;
    for (const auto& v : report.violations) {
        missing |= v.clause == "symbol interpreted" && v.side == 1;
        unknown |= v.clause == "symbol known" && v.symbol == "ghost";
    }
    CHECK(missing);
    CHECK(unknown);
}

TEST_CASE("size bounds are enforced") {
    ProblemSpec spec = make_problem({{chain_structure(3), chain_structure(3)}});
    spec.size_bound = std::vector<long long>{2};
    auto report = validate_problem(spec);
    REQUIRE_FALSE(report.ok());
    CHECK(report.violations.front().clause == "size bound");

    spec.size_bound = std::vector<long long>{3};
    CHECK(validate_problem(spec).ok());

    spec.size_bound = std::vector<long long>{1};
    bool low = false;
    for (const auto& v : validate_problem(spec).violations) low |= v.clause == "size bound >= 2";
    CHECK(low);
}

TEST_CASE("kappa") {
    SUBCASE("all size one") {
        ProblemSpec spec = make_problem({{rel_structure(1, {}), rel_structure(1, {})}});
        CHECK(kappa(spec) == 1);
    }
    SUBCASE("max over both sides") {
        ProblemSpec spec = make_problem({{rel_structure(2, {}), rel_structure(3, {})},
                                         {rel_structure(3, {}), rel_structure(2, {})}});
        CHECK(kappa(spec) == 3);
    }
    SUBCASE("valid problems have kappa at least one") {
        CHECK(kappa(two_index_problem()) >= 1);
    }
    SUBCASE("kappa never exceeds the size bound") {
        ProblemSpec spec = two_index_problem();
        spec.size_bound = std::vector<long long>{5, 5};
        REQUIRE(validate_problem(spec).ok());
        CHECK(kappa(spec) <= 5);
    }
}

TEST_CASE("reduct") {
    VocabularyChain chain;
    chain.levels.push_back(Vocabulary{});
    chain.levels.push_back(Vocabulary{{Symbol{"R", SymbolKind::relation, 2}}});
    chain.levels.push_back(Vocabulary{{Symbol{"R", SymbolKind::relation, 2},
                                       Symbol{"c", SymbolKind::constant, 0},
                                       Symbol{"f", SymbolKind::function, 1}}});
    FiniteStructure m = chain_structure(3);
    m.constants.emplace("c", 2);
    m.functions.emplace("f", FunctionInterp{1, {1, 2, 0}});

    SUBCASE("level zero strips every symbol") {
        FiniteStructure r = reduct(m, 0, chain);
        CHECK(r.size == 3);
        CHECK(r.relations.empty());
        CHECK(r.functions.empty());
        CHECK(r.constants.empty());
    }
    SUBCASE("top level is the identity") {
        CHECK(reduct(m, 2, chain) == m);
    }
    SUBCASE("reduct composes") {
        for (int j = 0; j <= 2; ++j) {
            for (int i = 0; i <= j; ++i) {
                CHECK(reduct(reduct(m, j, chain), i, chain) == reduct(m, i, chain));
            }
        }
    }
    SUBCASE("monotone: lower levels interpret a subset, identically") {
        for (int i = 0; i <= 2; ++i) {
            for (int j = i; j <= 2; ++j) {
                FiniteStructure lo = reduct(m, i, chain);
                FiniteStructure hi = reduct(m, j, chain);
                for (const auto& [name, rel] : lo.relations) {
                    CHECK(hi.relations.at(name).tuples == rel.tuples);
                }
                for (const auto& [name, value] : lo.constants) {
                    CHECK(hi.constants.at(name) == value);
                }
            }
        }
    }
    SUBCASE("out of range level throws") {
        CHECK_THROWS_AS(reduct(m, 3, chain), std::out_of_range);
    }
}

TEST_CASE("problem files round-trip") {
    ProblemSpec spec = two_index_problem();
    spec.chain.levels.push_back(Vocabulary{{Symbol{"R", SymbolKind::relation, 2},
                                            Symbol{"c", SymbolKind::constant, 0},
                                            Symbol{"f", SymbolKind::function, 1}}});
    for (auto& [m1, m2] : spec.pairs) {
        for (FiniteStructure* m : {&m1, &m2}) {
            m->constants.emplace("c", 0);
            std::vector<int> table(static_cast<std::size_t>(m->size));
            for (int i = 0; i < m->size; ++i) table[static_cast<std::size_t>(i)] = (i + 1) % m->size;
            m->functions.emplace("f", FunctionInterp{1, std::move(table)});
        }
    }
    REQUIRE(validate_problem(spec).ok());

    std::string text = serialize_problem(spec);
    ProblemSpec back = parse_problem_file(text);
    CHECK(back.chain.levels == spec.chain.levels);
    CHECK(back.pairs == spec.pairs);
    CHECK(back.kseq_tail == spec.kseq_tail);
    CHECK(serialize_problem(back) == text);
}

TEST_CASE("problem file parse errors are strict") {
    CHECK_THROWS_WITH_AS(parse_problem_file("#nonsense\n"), doctest::Contains("unknown header"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_problem_file("#problem N=1\n"), doctest::Contains("requires"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(
        parse_problem_file("#problem N=1 tail=affine(1,0)\n#vocab level=0 R/2\n"),
        doctest::Contains("level 0"), std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_problem_file("#problem N=1 tail=affine(1,0)\n"
                                            "#vocab level=1 R/2\n"
                                            "#structure side=1 index=0 size=2\nR: 0 5\n"),
                         doctest::Contains("outside universe"), std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_problem_file("#problem N=1 tail=affine(1,0)\n"
                                            "#vocab level=1 R/2\n"
                                            "#structure side=1 index=0 size=2\nR:\n"),
                         doctest::Contains("missing structure"), std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_problem_file("#problem N=1 tail=affine(1,0)\n"
                                            "#vocab level=1 R/2\n"
                                            "#structure side=3 index=0 size=2\n"),
                         doctest::Contains("side"), std::runtime_error);
}

TEST_CASE("tail classes") {
    TailClass bounded = parse_tail("bounded(3)");
    CHECK(bounded.value_at(100, 4) == 3);
    CHECK_FALSE(bounded.limsup_infinite());

    TailClass affine = parse_tail("affine(2,1)");
    CHECK(affine.value_at(10, 4) == 21);
    CHECK(affine.limsup_infinite());

    TailClass periodic = parse_tail("periodic((0,0),(1,0))@2");
    CHECK(periodic.from == 2);
    CHECK(periodic.value_at(2, 2) == 0);
    CHECK(periodic.value_at(3, 2) == 3);
    CHECK(periodic.value_at(4, 2) == 0);
    CHECK(periodic.limsup_infinite());
    CHECK(tail_to_string(periodic) == "periodic((0,0),(1,0))@2");

    CHECK_THROWS_AS(parse_tail("linear(1,0)"), std::runtime_error);
}

TEST_CASE("validated problems are accepted downstream") {
    ProblemSpec spec = two_index_problem();
    REQUIRE(validate_problem(spec).ok());
    CHECK_NOTHROW(spec.chain.at_level(0));
    CHECK_NOTHROW(spec.chain.at_level(5));  // clamps to the top level
    for (const auto& [m1, m2] : spec.pairs) {
        for (const Symbol& s : spec.chain.levels.back().symbols()) {
            CHECK(m1.interprets(s));
            CHECK(m2.interprets(s));
        }
    }
}
