#include <catch2/catch_amalgamated.hpp>

#include <numeric>
#include <set>
#include <vector>

#include "schemelab/ground.hpp"
#include "schemelab/prng.hpp"

using namespace schemelab;

namespace {

// Independent oracle for the rational enumeration: walk q = 1, 2, 3, ... and
// p = 0..q ascending, keeping reduced fractions only.
std::vector<std::pair<std::int64_t, std::int64_t>> enumerate_reduced(std::size_t count) {
    std::vector<std::pair<std::int64_t, std::int64_t>> out;
    for (std::int64_t q = 1; out.size() < count; ++q)
        for (std::int64_t p = 0; p <= q && out.size() < count; ++p)
            if (std::gcd(p, q) == 1) out.emplace_back(p, q);
    return out;
}

// Factorial-based binomial, independent of the multiplicative routine under test.
std::uint64_t binomial_by_factorials(int n, int k) {
    auto fact = [](int v) {
        std::uint64_t f = 1;
        for (int i = 2; i <= v; ++i) f *= static_cast<std::uint64_t>(i);
        return f;
    };
    return fact(n) / (fact(k) * fact(n - k));
}

} // namespace

TEST_CASE("monotone_enum sorts and rejects duplicates") {
    CHECK(monotone_enum({4, 1, 7}).vec() == std::vector<Rank>{1, 4, 7});
    CHECK(monotone_enum({3}).vec() == std::vector<Rank>{3});
    CHECK_THROWS_AS(monotone_enum({2, 2}), DuplicateElement);
    CHECK_THROWS_AS(monotone_enum(std::span<const Rank>{}), Error);
    CHECK_THROWS_AS(monotone_enum({-1, 3}), Error);
}

TEST_CASE("monotone_enum output is strictly increasing for random duplicate-free input") {
    SplitMix64 g(2024);
    for (int trial = 0; trial < 200; ++trial) {
        std::set<Rank> pool;
        const std::size_t want = 1 + g.next_below(12);
        while (pool.size() < want) pool.insert(static_cast<Rank>(g.next_below(1000)));
        std::vector<Rank> shuffled(pool.begin(), pool.end());
        for (std::size_t i = shuffled.size(); i > 1; --i)
            std::swap(shuffled[i - 1], shuffled[g.next_below(i)]);
        const FinSet s = monotone_enum(shuffled);
        REQUIRE(s.size() == pool.size());
        for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i - 1] < s[i]);
    }
}

TEST_CASE("FinSet operations") {
    const FinSet a = monotone_enum({1, 4, 7});
    const FinSet b = monotone_enum({4, 9});
    CHECK(a.contains(4));
    CHECK_FALSE(a.contains(5));
    CHECK(monotone_enum({1, 7}).subset_of(a));
    CHECK_FALSE(b.subset_of(a));
    CHECK(a.united(b).vec() == std::vector<Rank>{1, 4, 7, 9});
    CHECK(a.minus(b).vec() == std::vector<Rank>{1, 7});
    CHECK(a.without_index(1).vec() == std::vector<Rank>{1, 7});
    CHECK(a.with_inserted(5).vec() == std::vector<Rank>{1, 4, 5, 7});
    CHECK_THROWS_AS(a.with_inserted(4), DuplicateElement);
    CHECK(FinSet{}.subset_of(a));
    CHECK(FinSet{} < a); // lex order, empty first
}

TEST_CASE("rational enumeration matches the diagonal oracle") {
    const auto oracle = enumerate_reduced(600);
    CHECK(oracle[0] == std::make_pair<std::int64_t, std::int64_t>(0, 1));
    CHECK(oracle[2] == std::make_pair<std::int64_t, std::int64_t>(1, 2));
    for (std::size_t r = 0; r < oracle.size(); ++r) {
        CHECK(unrank_rational(static_cast<Rank>(r)) == oracle[r]);
        CHECK(rank_rational(oracle[r].first, oracle[r].second) == static_cast<Rank>(r));
    }
}

TEST_CASE("rational rank/unrank are inverse on 0..10^4") {
    for (Rank r = 0; r <= 10000; ++r) {
        const auto [p, q] = unrank_rational(r);
        REQUIRE(rank_rational(p, q) == r);
    }
    CHECK(rank_rational(unrank_rational(17).first, unrank_rational(17).second) == 17);
}

TEST_CASE("rank_rational validates its input") {
    CHECK_THROWS_AS(rank_rational(2, 4), NotReduced);
    CHECK_THROWS_AS(rank_rational(3, 2), Error);  // outside [0,1]
    CHECK_THROWS_AS(rank_rational(-1, 2), Error);
    CHECK_THROWS_AS(rank_rational(0, 2), NotReduced);
    CHECK_THROWS_AS(rank_rational(1, 0), Error);
}

TEST_CASE("ground display and membership") {
    const OrderedGround nat = OrderedGround::naturals(10);
    CHECK(nat.display(7) == "7");
    CHECK(nat.contains(9));
    CHECK_FALSE(nat.contains(10));
    CHECK(nat.contains(monotone_enum({0, 9})));
    CHECK_FALSE(nat.contains(monotone_enum({0, 10})));
    CHECK(nat.contains(FinSet{}));

    const OrderedGround rat = OrderedGround::rationals(10);
    CHECK(rat.display(0) == "0/1");
    CHECK(rat.display(2) == "1/2");
    CHECK_THROWS_AS(rat.display(10), Error);
}

TEST_CASE("k-subset counts match the factorial oracle for all k <= n <= 12") {
    for (int n = 0; n <= 12; ++n) {
        for (int k = 0; k <= n; ++k) {
            std::uint64_t count = 0;
            for_each_k_subset(n, k, [&](std::span<const Rank>) { ++count; });
            REQUIRE(count == binomial_by_factorials(n, k));
            REQUIRE(binomial(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(k)) ==
                    binomial_by_factorials(n, k));
        }
    }
}

TEST_CASE("k-subset stream is lexicographic with the documented endpoints") {
    KSubsetStream stream(4, 2);
    std::vector<FinSet> all;
    while (auto s = stream.next()) all.push_back(*s);
    REQUIRE(all.size() == 6);
    CHECK(all.front().vec() == std::vector<Rank>{0, 1});
    CHECK(all.back().vec() == std::vector<Rank>{2, 3});
    for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1] < all[i]);

    KSubsetStream full(3, 3);
    auto only = full.next();
    REQUIRE(only.has_value());
    CHECK(only->vec() == std::vector<Rank>{0, 1, 2});
    CHECK_FALSE(full.next().has_value());

    CHECK_THROWS_AS(KSubsetStream(2, 3), KTooLarge);
    CHECK_THROWS_AS(k_subsets(OrderedGround::naturals(2), 3), KTooLarge);
}

TEST_CASE("k_subset_at agrees with the stream") {
    std::uint64_t index = 0;
    for_each_k_subset(7, 3, [&](std::span<const Rank> s) {
        const auto unranked = k_subset_at(7, 3, index++);
        CHECK(std::vector<Rank>(s.begin(), s.end()) == unranked);
    });
    CHECK(index == 35);
    CHECK_THROWS_AS(k_subset_at(7, 3, 35), Error);
}

TEST_CASE("k-subsets of a FinSet enumerate in element order") {
    const FinSet s = monotone_enum({2, 5, 9});
    std::vector<FinSet> pairs;
    for_each_k_subset_of(s, 2, [&](const FinSet& t) { pairs.push_back(t); });
    REQUIRE(pairs.size() == 3);
    CHECK(pairs[0].vec() == std::vector<Rank>{2, 5});
    CHECK(pairs[1].vec() == std::vector<Rank>{2, 9});
    CHECK(pairs[2].vec() == std::vector<Rank>{5, 9});
}
