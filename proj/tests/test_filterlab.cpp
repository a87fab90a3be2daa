#include <doctest.h>

#include "efk/efgame.hpp"
#include "efk/filterlab.hpp"
#include "helpers.hpp"

using namespace efk;
using namespace efk::test;

namespace {

KSeqSpec identity_kseq(int window = 4) {
    KSeqSpec k;
    for (int n = 0; n < window; ++n) k.prefix.push_back(n);
    k.tail = TailClass::affine_tail(1, 0);
    return k;
}

KSeqSpec bounded_kseq(long long b, int window = 4) {
    KSeqSpec k;
    for (int n = 0; n < window; ++n) k.prefix.push_back(b);
    k.tail = TailClass::bounded_tail(b);
    return k;
}

KSeqSpec alternating_kseq(int window = 4) {
    KSeqSpec k;
    for (int n = 0; n < window; ++n) k.prefix.push_back(n % 2 == 0 ? 0 : n);
    k.tail = TailClass::periodic_tail({{0, 0}, {1, 0}});
    return k;
}

// a seeded random eventually periodic set
EventuallyPeriodicSet random_set(std::mt19937_64& gen) {
    std::vector<bool> head(gen() % 6);
    for (std::size_t i = 0; i < head.size(); ++i) head[i] = gen() % 2;
    std::vector<bool> tail(1 + gen() % 4);
    for (std::size_t i = 0; i < tail.size(); ++i) tail[i] = gen() % 2;
    return EventuallyPeriodicSet::periodic(std::move(head), std::move(tail));
}

KSeqSpec random_kseq(std::mt19937_64& gen) {
    KSeqSpec k;
    int window = 1 + static_cast<int>(gen() % 5);
    for (int n = 0; n < window; ++n) k.prefix.push_back(static_cast<long long>(gen() % 4));
    switch (gen() % 3) {
        case 0:
            k.tail = TailClass::bounded_tail(static_cast<long long>(gen() % 4));
            break;
        case 1:
            k.tail = TailClass::affine_tail(1 + static_cast<long long>(gen() % 2),
                                            static_cast<long long>(gen() % 3));
            break;
        default: {
            std::vector<AffineTerm> pattern;
            int terms = 1 + static_cast<int>(gen() % 3);
            for (int i = 0; i < terms; ++i) {
                pattern.push_back({static_cast<long long>(gen() % 2),
                                   static_cast<long long>(gen() % 4)});
            }
            k.tail = TailClass::periodic_tail(std::move(pattern));
        }
    }
    k.validate();
    return k;
}

}  // namespace

TEST_CASE("eventually periodic sets behave like sets") {
    auto gen = rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        EventuallyPeriodicSet a = random_set(gen), b = random_set(gen);
        long long horizon = std::max(a.head_len(), b.head_len()) + 2 * a.period() * b.period() + 5;
        EventuallyPeriodicSet meet = a.intersect(b), join = a.unite(b), neg = a.complement();
        for (long long n = 0; n < horizon; ++n) {
            CHECK(meet.contains(n) == (a.contains(n) && b.contains(n)));
            CHECK(join.contains(n) == (a.contains(n) || b.contains(n)));
            CHECK(neg.contains(n) == !a.contains(n));
        }
        CHECK(a.complement().complement().same_set(a));
        CHECK(a.intersect(b).subset_of(a));
        CHECK(a.subset_of(a.unite(b)));
        // De Morgan
        CHECK(a.unite(b).complement().same_set(a.complement().intersect(b.complement())));
    }
}

TEST_CASE("set constructors") {
    EventuallyPeriodicSet fin = EventuallyPeriodicSet::finite({1, 2, 3});
    CHECK(fin.is_finite());
    CHECK(fin.contains(2));
    CHECK_FALSE(fin.contains(0));
    CHECK_FALSE(fin.contains(100));
    CHECK(fin.min_element() == 1);

    EventuallyPeriodicSet cof = EventuallyPeriodicSet::cofinite({1, 2});
    CHECK_FALSE(cof.is_finite());
    CHECK(cof.contains(0));
    CHECK_FALSE(cof.contains(1));
    CHECK(cof.contains(50));

    EventuallyPeriodicSet evens = parse_set_expr("evens");
    CHECK(evens.contains(0));
    CHECK_FALSE(evens.contains(7));
    CHECK(evens.infinite_residue() == 0);

    CHECK(EventuallyPeriodicSet().is_empty());
    CHECK_FALSE(EventuallyPeriodicSet().min_element().has_value());
}

TEST_CASE("generator sets") {
    SUBCASE("identity sequence: a cofinite tail") {
        EventuallyPeriodicSet g = generator(identity_kseq(), 3);
        CHECK(g.same_set(EventuallyPeriodicSet::from(4)));
    }
    SUBCASE("constant sequence: empty beyond the threshold") {
        EventuallyPeriodicSet g = generator(bounded_kseq(3), 5);
        CHECK(g.is_empty());
    }
    SUBCASE("alternating sequence: derived by direct evaluation") {
        KSeqSpec k = alternating_kseq();
        EventuallyPeriodicSet g = generator(k, 0);
        for (long long n = 0; n < 100; ++n) {
            CHECK(g.contains(n) == (k.value_at(n) > 0));
        }
    }
    SUBCASE("containment is antitone in the threshold") {
        for (const KSeqSpec& k : {identity_kseq(), alternating_kseq(), bounded_kseq(2)}) {
            for (long long c = 0; c + 1 <= 4; ++c) {
                CHECK(generator(k, c + 1).subset_of(generator(k, c)));
            }
        }
    }
}

TEST_CASE("classification") {
    CHECK(classify(identity_kseq()) == FilterClass::proper_nonprincipal);
    CHECK(classify(bounded_kseq(3)) == FilterClass::improper);
    CHECK(classify(alternating_kseq()) == FilterClass::proper_nonprincipal);

    KSeqSpec flat;
    flat.prefix = {7, 9, 100};
    flat.tail = TailClass::periodic_tail({{0, 2}, {0, 5}});
    CHECK(classify(flat) == FilterClass::improper);
}

TEST_CASE("in_filter") {
    KSeqSpec id = identity_kseq();

    SUBCASE("co-bounded sets always belong") {
        FilterDecision d = in_filter(id, EventuallyPeriodicSet::cofinite({}));
        CHECK(d.member);
        CHECK(confirm_decision(id, EventuallyPeriodicSet::cofinite({}), d));
    }
    SUBCASE("bounded tail: everything belongs") {
        KSeqSpec b = bounded_kseq(3);
        for (const char* text : {"fin{0}", "evens", "~cofin{}", "fin{}"}) {
            EventuallyPeriodicSet s = parse_set_expr(text, &b);
            FilterDecision d = in_filter(b, s);
            CHECK(d.member);
            CHECK(confirm_decision(b, s, d));
        }
    }
    SUBCASE("the evens are not in the identity filter") {
        EventuallyPeriodicSet evens = parse_set_expr("evens");
        FilterDecision d = in_filter(id, evens);
        CHECK_FALSE(d.member);
        CHECK(d.residue % 2 == 1);  // the violating class is the odds
        CHECK(confirm_decision(id, evens, d));
    }
    SUBCASE("generators belong when the filter is proper") {
        for (long long c = 0; c <= 7; ++c) {
            FilterDecision d = in_filter(id, generator(id, c));
            CHECK(d.member);
        }
        KSeqSpec alt = alternating_kseq();
        FilterDecision d = in_filter(alt, generator(alt, 7));
        CHECK(d.member);
        CHECK(confirm_decision(alt, generator(alt, 7), d));
    }
    SUBCASE("finite sets never belong to a proper filter") {
        FilterDecision d = forall_d(id, EventuallyPeriodicSet::finite({0, 1, 2}));
        CHECK_FALSE(d.member);
    }
}

TEST_CASE("filter axioms on the decidable fragment") {
    auto gen = rng(29);
    for (int trial = 0; trial < 60; ++trial) {
        KSeqSpec k = random_kseq(gen);
        EventuallyPeriodicSet a = random_set(gen), b = random_set(gen);
        bool in_a = in_filter(k, a).member;
        bool in_b = in_filter(k, b).member;
        // closure under intersection
        if (in_a && in_b) CHECK(in_filter(k, a.intersect(b)).member);
        // closure under superset
        if (in_a) CHECK(in_filter(k, a.unite(b)).member);
        // empty set membership characterizes the improper case
        CHECK(in_filter(k, EventuallyPeriodicSet()).member ==
              (classify(k) == FilterClass::improper));
        // a proper filter never holds both P and its complement
        if (classify(k) == FilterClass::proper_nonprincipal) {
            bool both = forall_d(k, a).member && forall_d(k, a.complement()).member;
            CHECK_FALSE(both);
        }
    }
}

TEST_CASE("decisions come with independently confirmed certificates") {
    auto gen = rng(31);
    int members = 0, nonmembers = 0;
    for (int trial = 0; trial < 120; ++trial) {
        KSeqSpec k = random_kseq(gen);
        EventuallyPeriodicSet s = random_set(gen);
        FilterDecision d = in_filter(k, s);
        CHECK(confirm_decision(k, s, d));
        (d.member ? members : nonmembers) += 1;
    }
    CHECK(members > 0);
    CHECK(nonmembers > 0);
}

TEST_CASE("set expression parser") {
    KSeqSpec id = identity_kseq();
    CHECK(parse_set_expr("fin{1,2,3}").contains(2));
    CHECK(parse_set_expr("~fin{1}").contains(0));
    CHECK(parse_set_expr("cofin{1,2}").same_set(parse_set_expr("~fin{1,2}")));
    CHECK(parse_set_expr("evens & ~fin{0}").min_element() == 2);
    CHECK(parse_set_expr("evens | odds").same_set(parse_set_expr("cofin{}")));
    CHECK(parse_set_expr("period(3,101)").contains(0));
    CHECK_FALSE(parse_set_expr("period(3,101)").contains(1));
    CHECK(parse_set_expr("from(5)").min_element() == 5);
    CHECK(parse_set_expr("gen(2)", &id).same_set(EventuallyPeriodicSet::from(3)));
    CHECK(parse_set_expr("(evens | odds) & fin{3}").min_element() == 3);

    CHECK_THROWS_AS(parse_set_expr("gen(2)"), std::runtime_error);        // no context
    CHECK_THROWS_AS(parse_set_expr("evens |"), std::runtime_error);
    CHECK_THROWS_AS(parse_set_expr("period(3,10)"), std::runtime_error);  // length mismatch
    CHECK_THROWS_AS(parse_set_expr("unknown{}"), std::runtime_error);
}

TEST_CASE("kseq files") {
    KSeqSpec k = parse_kseq_file("#kseq N=4 tail=affine(1,0)\n0 1 2 3\n");
    CHECK(k.prefix == std::vector<long long>{0, 1, 2, 3});
    CHECK(k.value_at(10) == 10);
    CHECK_THROWS_AS(parse_kseq_file("0 1 2\n"), std::runtime_error);
    CHECK_THROWS_AS(parse_kseq_file("#kseq N=2 tail=affine(1,0)\n0 1 2\n"), std::runtime_error);
}

TEST_CASE("problem classification against the declared tail") {
    SUBCASE("isomorphic pairs with identity tail form an ultraproduct problem") {
        ProblemSpec spec = iso_pairs_problem(3, 3);
        auto kseq = compute_k_seq(spec).require_complete();
        auto r = classify_problem(spec, kseq);
        CHECK(r.is_ultraproduct_problem);
        CHECK(r.consistent);
    }
    SUBCASE("bounded tails are consistent but not ultraproduct problems") {
        ProblemSpec spec = iso_pairs_problem(3, 3);
        spec.kseq_tail = TailClass::bounded_tail(1);
        auto kseq = compute_k_seq(spec).require_complete();
        auto r = classify_problem(spec, kseq);
        CHECK_FALSE(r.is_ultraproduct_problem);
        CHECK(r.consistent);  // the rule only covers indices past the window
    }
    SUBCASE("an overlapping tail that disagrees is an inconsistency") {
        ProblemSpec spec = iso_pairs_problem(3, 3);  // window k-values 0 1 2
        spec.kseq_tail = TailClass::bounded_tail(1);
        spec.kseq_tail.from = 2;  // claims k_2 = 1, computed is 2
        auto kseq = compute_k_seq(spec).require_complete();
        auto r = classify_problem(spec, kseq);
        CHECK_FALSE(r.consistent);
        CHECK(r.mismatches == std::vector<int>{2});
        CHECK_FALSE(r.is_ultraproduct_problem);
        CHECK_THROWS_AS(is_ultraproduct_problem(spec, kseq), std::runtime_error);
    }
    SUBCASE("the boolean form matches the classification") {
        ProblemSpec spec = iso_pairs_problem(3, 3);
        auto kseq = compute_k_seq(spec).require_complete();
        CHECK(is_ultraproduct_problem(spec, kseq));
        spec.kseq_tail = TailClass::bounded_tail(5);
        CHECK_FALSE(is_ultraproduct_problem(spec, kseq));
    }
    SUBCASE("an overlapping tail that matches stays consistent") {
        ProblemSpec spec = iso_pairs_problem(3, 3);
        spec.kseq_tail = TailClass::affine_tail(1, 0);
        spec.kseq_tail.from = 1;
        auto kseq = compute_k_seq(spec).require_complete();
        auto r = classify_problem(spec, kseq);
        CHECK(r.consistent);
        CHECK(r.is_ultraproduct_problem);
    }
}
