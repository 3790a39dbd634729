#include <catch2/catch_amalgamated.hpp>

#include "schemelab/json_io.hpp"

using namespace schemelab;

TEST_CASE("finset serialization round trip") {
    const FinSet s = monotone_enum({1, 4, 7});
    CHECK(finset_to_json(s).dump() == "[1,4,7]");
    CHECK(finset_from_json(json::parse("[1,4,7]")) == s);
    CHECK(finset_from_json(json::parse("[]")).empty());
    CHECK_THROWS_AS(finset_from_json(json::parse("[2,1]")), SchemaError);
    CHECK_THROWS_AS(finset_from_json(json::parse("[1,1]")), SchemaError);
    CHECK_THROWS_AS(finset_from_json(json::parse("{}")), SchemaError);
    CHECK_THROWS_AS(finset_from_json(json::parse("[0.5]")), SchemaError);
}

TEST_CASE("ground serialization round trip") {
    const OrderedGround g = OrderedGround::rationals(100);
    const json j = ground_to_json(g);
    CHECK(j.at("kind") == "rationals");
    CHECK(j.at("n") == 100);
    const OrderedGround back = ground_from_json(j);
    CHECK(back.kind == GroundKind::rationals);
    CHECK(back.size == 100);
    CHECK_THROWS_AS(ground_from_json(json::parse(R"({"kind":"reals","n":5})")), SchemaError);
}

TEST_CASE("rational strings") {
    CHECK(rational_to_string(Rational(27, 125)) == "27/125");
    CHECK(rational_to_string(Rational(1)) == "1/1");
    CHECK(parse_rational("27/125") == Rational(27, 125));
    CHECK(parse_rational("2/6") == Rational(1, 3)); // arithmetic input normalizes
    CHECK(parse_rational("4") == Rational(4));
    CHECK_THROWS_AS(parse_rational("1/0"), SchemaError);
    CHECK_THROWS_AS(parse_rational("x/3"), SchemaError);
}

TEST_CASE("scheme table round trip preserves sigma and eta") {
    const CompressionScheme s = max_scheme();
    const json table = scheme_to_table(s, 6);
    CHECK(table.at("m") == 2);
    CHECK(table.at("d") == 1);
    CHECK(table.at("ground_n") == 6);
    CHECK(table.at("sigma").size() == 15);

    const auto [back, ground_n] = scheme_from_table(table);
    CHECK(ground_n == 6);
    for_each_k_subset(6, 2, [&](std::span<const Rank> xs) {
        const FinSet x = FinSet::from_increasing(std::vector<Rank>(xs.begin(), xs.end()));
        REQUIRE(back.sigma(x) == s.sigma(x));
        REQUIRE(back.eta(back.sigma(x)) == s.eta(s.sigma(x)));
    });

    const SchemeReport a = verify_scheme(s, OrderedGround::naturals(6));
    const SchemeReport b = verify_scheme(back, OrderedGround::naturals(6));
    CHECK(a.fiber_histogram == b.fiber_histogram);
    CHECK(b.monotone_ok);
    CHECK(b.cover_ok);
}

TEST_CASE("scheme table validation") {
    json table = scheme_to_table(max_scheme(), 5);
    json partial = table;
    partial["sigma"].erase(0);
    CHECK_THROWS_AS(scheme_from_table(partial), SchemaError); // not total

    json dup = table;
    dup["sigma"].push_back(dup["sigma"][0]);
    CHECK_THROWS_AS(scheme_from_table(dup), SchemaError);

    json bad_arity = table;
    bad_arity["m"] = 1;
    CHECK_THROWS_AS(scheme_from_table(bad_arity), SchemaError);

    json shrunk = table;
    shrunk["ground_n"] = 1;
    CHECK_THROWS_AS(scheme_from_table(shrunk), SchemaError);
}

TEST_CASE("missing eta entries read as empty sets") {
    json table = scheme_to_table(max_scheme(), 5);
    table["eta"] = json::array({json::array({json::array({4}), json::array({0, 1, 2, 3, 4})})});
    const auto [s, n] = scheme_from_table(table);
    CHECK(s.eta(monotone_enum({4})).size() == 5);
    CHECK(s.eta(monotone_enum({3})).empty());
}

TEST_CASE("decomposition serialization round trip") {
    const Decomposition d = build_decomposition(1, 6, random_order_policy(5));
    const json j = decomposition_to_json(d);
    CHECK(j.at("k") == 1);
    CHECK(j.at("n") == 6);
    CHECK(j.at("policy").at("kind") == "seeded");
    CHECK(j.at("assign").size() == 216);

    const Decomposition back = decomposition_from_json(j);
    REQUIRE(back.points() == d.points());
    for (std::uint64_t idx = 0; idx < d.points(); ++idx)
        REQUIRE(back.part_at(idx) == d.part_at(idx));

    json wrong_len = j;
    wrong_len["assign"].erase(0);
    CHECK_THROWS_AS(decomposition_from_json(wrong_len), SchemaError);

    json bad_part = j;
    bad_part["assign"][0] = 9;
    CHECK_THROWS_AS(decomposition_from_json(bad_part), SchemaError);
}

TEST_CASE("exporting a non-partition fails") {
    Decomposition d(0, 2, OrderPolicy::identity());
    const Rank p[2] = {0, 0};
    d.assign(std::span<const Rank>(p, 2), 0); // the other three points unassigned
    CHECK_THROWS_AS(decomposition_to_json(d), NotPartition);
}

TEST_CASE("distribution serialization round trip") {
    const json j = json::parse(R"({"atoms":[{"rank":0,"p":"1/4"},{"rank":3,"p":"3/4"}]})");
    const FiniteSupportDistribution dist = distribution_from_json(j);
    CHECK(dist.support_size() == 2);
    CHECK(measure(dist, monotone_enum({3})) == Rational(3, 4));
    CHECK(distribution_from_json(distribution_to_json(dist)).atoms()[0].p == Rational(1, 4));
    CHECK_THROWS_AS(distribution_from_json(json::parse(R"({"atoms":[{"rank":0,"p":"1/3"}]})")),
                    SchemaError); // does not sum to 1
}

TEST_CASE("emx report serialization carries mode-specific fields") {
    const auto u5 = FiniteSupportDistribution::uniform(5);
    const json exact =
        emx_report_to_json(eval_exact(rank_learner(), u5, 3, Rational(1, 3), Rational(1, 3)));
    CHECK(exact.at("mode") == "exact");
    CHECK(exact.at("failure_probability") == "27/125");
    CHECK(exact.at("epsilon") == "1/3");
    CHECK(exact.at("satisfied") == true);
    CHECK_FALSE(exact.contains("estimate"));

    const json mc = emx_report_to_json(
        eval_mc(rank_learner(), u5, 3, Rational(1, 3), Rational(1, 3), 1000, 4));
    CHECK(mc.at("mode") == "mc");
    CHECK(mc.contains("estimate"));
    CHECK(mc.contains("half_width"));
    CHECK(mc.at("seed") == 4);
    CHECK(mc.at("trials") == 1000);
    CHECK_FALSE(mc.contains("failure_probability"));
}

TEST_CASE("sweep csv rows") {
    const auto u5 = FiniteSupportDistribution::uniform(5);
    const EMXReport r = eval_exact(rank_learner(), u5, 3, Rational(1, 3), Rational(1, 3));
    CHECK(sweep_csv_header() == "dist_id,d,epsilon,failure_prob,satisfied\n");
    CHECK(sweep_csv_row("u5", r) == "u5,3,1/3,27/125,true\n");
}

TEST_CASE("fiber histogram csv") {
    const SchemeReport r = verify_scheme(max_scheme(), OrderedGround::naturals(4));
    CHECK(fiber_histogram_csv(r) == "fiber_size,count\n1,1\n2,1\n3,1\n");
}

TEST_CASE("probe report fields") {
    const auto sel = fiberprobe::find_selector("drop-last");
    const std::vector<double> x{0.1, 0.5, 0.9};
    const json j = probe_report_to_json(fiberprobe::probe_point(*sel, x, 10, 5, 3));
    for (const char* key :
         {"selector", "m", "x", "epsilon_gap", "drop_index", "locally_constant", "witnesses_count", "seed"})
        REQUIRE(j.contains(key));
    CHECK(j.at("selector") == "drop-last");
    CHECK(j.at("witnesses_count") == 5);
}

TEST_CASE("direction fiber csv shape") {
    const auto rows = direction_fiber_table(base_decomposition(3));
    const std::string csv = direction_fibers_csv(rows);
    CHECK(csv.substr(0, 40) == "part,direction,fixed_coords,fiber_size\n");
    // part 0 direction 0 at column 0: only (0,0) -> fiber 1
    CHECK(csv.find("0,0,0,1\n") != std::string::npos);
}
