#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <vector>

#include "schemelab/emx.hpp"
#include "schemelab/prng.hpp"

using namespace schemelab;

namespace {

Learner empty_learner() {
    return {"empty", [](std::span<const Rank> s) {
                if (s.empty()) throw EmptySample();
                return FinSet{};
            }};
}

/// Random distribution with support <= max_support: distinct ranks below 40,
/// probabilities w_i / W from positive integer weights.
FiniteSupportDistribution random_distribution(std::uint64_t seed, int max_support = 8) {
    SplitMix64 g(seed);
    const int support = 1 + static_cast<int>(g.next_below(static_cast<std::uint64_t>(max_support)));
    std::vector<Rank> ranks;
    while (static_cast<int>(ranks.size()) < support) {
        const Rank r = static_cast<Rank>(g.next_below(40));
        if (std::find(ranks.begin(), ranks.end(), r) == ranks.end()) ranks.push_back(r);
    }
    std::vector<std::int64_t> weights(static_cast<std::size_t>(support));
    std::int64_t total = 0;
    for (auto& w : weights) {
        w = 1 + static_cast<std::int64_t>(g.next_below(30));
        total += w;
    }
    std::vector<Atom> atoms;
    for (int i = 0; i < support; ++i)
        atoms.push_back({ranks[static_cast<std::size_t>(i)], Rational(weights[static_cast<std::size_t>(i)], total)});
    return FiniteSupportDistribution(std::move(atoms));
}

} // namespace

TEST_CASE("distribution validation") {
    CHECK_THROWS_AS(FiniteSupportDistribution({{0, Rational(1, 2)}}), Error); // sums to 1/2
    CHECK_THROWS_AS(FiniteSupportDistribution({{0, Rational(1, 2)}, {0, Rational(1, 2)}}),
                    DuplicateElement);
    CHECK_THROWS_AS(FiniteSupportDistribution({{0, Rational(3, 2)}, {1, Rational(-1, 2)}}), Error);
    CHECK_THROWS_AS(FiniteSupportDistribution({}), Error);
}

TEST_CASE("measure sums atom probabilities") {
    const auto u5 = FiniteSupportDistribution::uniform(5);
    CHECK(measure(u5, monotone_enum({0, 1, 2})) == Rational(3, 5));
    CHECK(measure(u5, FinSet{}) == 0);
    CHECK(measure(u5, monotone_enum({0, 1, 2, 3, 4, 9})) == 1);
}

TEST_CASE("opt is 1 over the finite sets") {
    CHECK(opt(FiniteSupportDistribution::uniform(5)) == 1);
    CHECK(opt(FiniteSupportDistribution::uniform(1)) == 1);
    CHECK(opt(random_distribution(5)) == 1);
}

TEST_CASE("rank learner returns initial segments") {
    const Learner g = rank_learner();
    const Rank s1[] = {2, 7, 3};
    CHECK(g.rule(s1).vec() == std::vector<Rank>{0, 1, 2, 3, 4, 5, 6, 7});
    const Rank s2[] = {0};
    CHECK(g.rule(s2).vec() == std::vector<Rank>{0});
    CHECK_THROWS_AS(g.rule(std::span<const Rank>{}), EmptySample);
}

TEST_CASE("rank learner G is monotone in the sample") {
    const Learner g = rank_learner();
    SplitMix64 rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Rank> s;
        const std::size_t len = 1 + rng.next_below(5);
        for (std::size_t i = 0; i < len; ++i) s.push_back(static_cast<Rank>(rng.next_below(30)));
        std::vector<Rank> bigger = s;
        const std::size_t extra = 1 + rng.next_below(3);
        for (std::size_t i = 0; i < extra; ++i)
            bigger.push_back(static_cast<Rank>(rng.next_below(30)));
        REQUIRE(g.rule(s).subset_of(g.rule(bigger)));
    }
}

TEST_CASE("exact evaluation: uniform-on-5, d=3, epsilon=1/3 gives 27/125") {
    // independent oracle: walk all 125 tuples with explicit loops
    const auto u5 = FiniteSupportDistribution::uniform(5);
    Rational oracle = 0;
    for (int a = 0; a < 5; ++a)
        for (int b = 0; b < 5; ++b)
            for (int c = 0; c < 5; ++c) {
                const int top = std::max({a, b, c});
                const Rational m(top + 1, 5); // measure of {0..top} under uniform-on-5
                if (m <= Rational(2, 3)) oracle += Rational(1, 125);
            }
    REQUIRE(oracle == Rational(27, 125));

    const EMXReport r = eval_exact(rank_learner(), u5, 3, Rational(1, 3), Rational(1, 3));
    CHECK(r.failure_probability == Rational(27, 125));
    CHECK(r.failure_probability == oracle);
    CHECK(r.satisfied);
    CHECK(r.mode == EMXReport::Mode::exact);
}

TEST_CASE("exact evaluation edge cases") {
    const EMXReport point = eval_exact(rank_learner(), FiniteSupportDistribution::uniform(1), 4,
                                       Rational(1, 3), Rational(1, 3));
    CHECK(point.failure_probability == 0);

    const EMXReport empty = eval_exact(empty_learner(), FiniteSupportDistribution::uniform(4), 2,
                                       Rational(1, 3), Rational(1, 3));
    CHECK(empty.failure_probability == 1);
    CHECK_FALSE(empty.satisfied);
}

TEST_CASE("exact evaluation respects the budget") {
    const auto u8 = FiniteSupportDistribution::uniform(8);
    CHECK_THROWS_AS(
        eval_exact(rank_learner(), u8, 3, Rational(1, 3), Rational(1, 3), 1, 100),
        BudgetExceeded);
}

TEST_CASE("exact evaluation is independent of the partitioning") {
    const auto dist = random_distribution(11);
    const EMXReport a = eval_exact(rank_learner(), dist, 3, Rational(1, 3), Rational(1, 3), 1);
    const EMXReport b = eval_exact(rank_learner(), dist, 3, Rational(1, 3), Rational(1, 3), 4);
    CHECK(a.failure_probability == b.failure_probability);
}

TEST_CASE("monte carlo is deterministic per seed and jobs-independent") {
    const auto u5 = FiniteSupportDistribution::uniform(5);
    const EMXReport a = eval_mc(rank_learner(), u5, 3, Rational(1, 3), Rational(1, 3), 20000, 9, 1);
    const EMXReport b = eval_mc(rank_learner(), u5, 3, Rational(1, 3), Rational(1, 3), 20000, 9, 4);
    CHECK(a.estimate == b.estimate);
    CHECK(a.ci_low == b.ci_low);
    CHECK(a.ci_high == b.ci_high);

    const EMXReport single = eval_mc(rank_learner(), u5, 3, Rational(1, 3), Rational(1, 3), 1, 5);
    CHECK((single.estimate == 0.0 || single.estimate == 1.0));
}

TEST_CASE("monte carlo brackets the exact value across seed replications") {
    const auto u5 = FiniteSupportDistribution::uniform(5);
    const double exact = 27.0 / 125.0;
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const EMXReport r =
            eval_mc(rank_learner(), u5, 3, Rational(1, 3), Rational(1, 3), 100000, seed);
        if (std::abs(r.estimate - exact) <= r.half_width) ++hits;
    }
    CHECK(hits >= 19);
}

TEST_CASE("analytic tail bound: failure <= 8/27 for d=3, epsilon=1/3") {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const auto dist = random_distribution(seed);
        const EMXReport r = eval_exact(rank_learner(), dist, 3, Rational(1, 3), Rational(1, 3));
        REQUIRE(r.failure_probability <= Rational(8, 27));
        REQUIRE(r.satisfied); // the (1/3,1/3) criterion holds for every tested P
    }
}

TEST_CASE("scheme_from_learner: d=3 yields a 6->5 scheme") {
    const CompressionScheme s = scheme_from_learner(rank_learner(), 3);
    CHECK(s.m == 6);
    CHECK(s.d == 5);

    // documented instance: the lexicographically least valid 5-subset keeps the maximum
    const FinSet a = monotone_enum({0, 2, 3, 5, 8, 9});
    CHECK(s.sigma(a).vec() == std::vector<Rank>{0, 2, 3, 5, 9});

    // independent check: first 5-subset B (lex order) with A inside eta(B)
    bool found = false;
    FinSet expected;
    for_each_k_subset_of(a, 5, [&](const FinSet& b) {
        if (found) return;
        FinSet hull;
        for_each_k_subset_of(b, 3, [&](const FinSet& t) {
            hull = hull.united(rank_learner().rule(t.elements()));
        });
        if (a.subset_of(hull)) {
            expected = b;
            found = true;
        }
    });
    REQUIRE(found);
    CHECK(s.sigma(a) == expected);
}

TEST_CASE("scheme_from_learner verifies and matches the between-gap fiber formula") {
    const CompressionScheme s = scheme_from_learner(rank_learner(), 3);
    const auto v = verify_scheme_detailed(s, OrderedGround::naturals(14));
    CHECK(v.report.monotone_ok);
    CHECK(v.report.cover_ok);
    CHECK(v.report.fiber_bound_ok);

    // fiber over B counts the ranks strictly between B's two largest elements
    for (const auto& [y, count] : v.fibers) {
        REQUIRE(y.size() == 5);
        const Rank gap = y[4] - y[3] - 1;
        REQUIRE(count == static_cast<std::uint64_t>(gap));
    }

    // and the histogram agrees with a from-scratch enumeration of [14]^6
    std::map<FinSet, std::uint64_t> brute;
    for_each_k_subset(14, 6, [&](std::span<const Rank> xs) {
        const FinSet x = FinSet::from_increasing(std::vector<Rank>(xs.begin(), xs.end()));
        brute[x.without_index(4)]++; // drop the second-largest: keeps the max, lex-least
    });
    // brute includes zero-gap images never hit? no: without_index(4) is always produced
    CHECK(brute == v.fibers);
}

TEST_CASE("scheme_from_learner fails loudly for a non-compressing learner") {
    const CompressionScheme s = scheme_from_learner(empty_learner(), 2);
    CHECK(s.m == 4);
    CHECK_THROWS_AS(s.sigma(monotone_enum({0, 1, 2, 3})), NoCompressingSubset);
}

TEST_CASE("learner_from_scheme inverts the max scheme to the rank learner") {
    const Learner back = learner_from_scheme(max_scheme());
    const Rank s1[] = {2, 7, 3};
    CHECK(back.rule(s1).vec() == std::vector<Rank>{0, 1, 2, 3, 4, 5, 6, 7});
    const Rank s2[] = {5};
    CHECK(back.rule(s2).vec() == std::vector<Rank>{0, 1, 2, 3, 4, 5});
    CHECK_THROWS_AS(back.rule(std::span<const Rank>{}), EmptySample);
}

TEST_CASE("learner_from_scheme equals rank learner exhaustively (n <= 10, d <= 3)") {
    const Learner back = learner_from_scheme(max_scheme());
    const Learner rank = rank_learner();
    for (Rank n = 1; n <= 10; ++n) {
        for (int d = 1; d <= 3; ++d) {
            std::vector<Rank> tuple(static_cast<std::size_t>(d), 0);
            std::uint64_t total = 1;
            for (int i = 0; i < d; ++i) total *= static_cast<std::uint64_t>(n);
            for (std::uint64_t idx = 0; idx < total; ++idx) {
                std::uint64_t rest = idx;
                for (int i = 0; i < d; ++i) {
                    tuple[static_cast<std::size_t>(i)] = static_cast<Rank>(rest % n);
                    rest /= static_cast<std::uint64_t>(n);
                }
                REQUIRE(back.rule(tuple) == rank.rule(tuple));
            }
        }
    }
}

TEST_CASE("learner_from_scheme validates its input") {
    CompressionScheme no_eta = max_scheme();
    no_eta.eta = nullptr;
    CHECK_THROWS_AS(learner_from_scheme(no_eta), Error);

    CompressionScheme wrong_shape; // 3->1 is not of the (m+1)->m form
    wrong_shape.m = 3;
    wrong_shape.d = 1;
    wrong_shape.name = "wide";
    wrong_shape.sigma = [](const FinSet& x) { return FinSet::from_increasing({x.max_element()}); };
    wrong_shape.eta = max_scheme().eta;
    CHECK_THROWS_AS(learner_from_scheme(wrong_shape), Error);
}
