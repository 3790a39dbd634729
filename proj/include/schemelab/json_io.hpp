#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "schemelab/emx.hpp"
#include "schemelab/fiberprobe.hpp"
#include "schemelab/ground.hpp"
#include "schemelab/kuratowski.hpp"
#include "schemelab/rational.hpp"
#include "schemelab/scheme.hpp"

// Interchange formats. Sets are strictly increasing integer arrays; rationals
// are "num/den" strings, never decimals; scheme tables and decompositions are
// the producer-independent forms that verification re-checks from scratch.
// nlohmann::json keeps object keys sorted, so serialized output is
// byte-deterministic for a given value.

namespace schemelab {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// FinSet, ground

inline json finset_to_json(const FinSet& s) {
    json a = json::array();
    for (Rank r : s.elements()) a.push_back(r);
    return a;
}

inline FinSet finset_from_json(const json& a) {
    if (!a.is_array()) throw SchemaError("expected an array of ranks");
    std::vector<Rank> v;
    for (const auto& e : a) {
        if (!e.is_number_integer()) throw SchemaError("set elements must be integers");
        v.push_back(e.get<Rank>());
    }
    try {
        return FinSet::from_increasing(std::move(v));
    } catch (const Error& e) {
        throw SchemaError(std::string("bad set: ") + e.what());
    }
}

inline json ground_to_json(const OrderedGround& g) {
    return json{{"kind", to_string(g.kind)}, {"n", g.size}};
}

inline OrderedGround ground_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    const Rank n = j.at("n").get<Rank>();
    if (n < 0) throw SchemaError("ground size must be non-negative");
    if (kind == "naturals") return OrderedGround::naturals(n);
    if (kind == "rationals") return OrderedGround::rationals(n);
    throw SchemaError("unknown ground kind: " + kind);
}

// ---------------------------------------------------------------------------
// Scheme tables

/// Materializes a scheme over [0..ground_n)^m as the explicit interchange
/// table; eta entries are emitted for the sigma-images only (cover checks
/// consult no other values).
inline json scheme_to_table(const CompressionScheme& scheme, Rank ground_n) {
    validate_arities(scheme);
    json sigma_pairs = json::array();
    std::map<FinSet, bool> images;
    for_each_k_subset(ground_n, scheme.m, [&](std::span<const Rank> xs) {
        const FinSet x = FinSet::from_increasing(std::vector<Rank>(xs.begin(), xs.end()));
        const FinSet y = scheme.sigma(x);
        sigma_pairs.push_back(json::array({finset_to_json(x), finset_to_json(y)}));
        images.emplace(y, true);
    });
    json table{{"m", scheme.m}, {"d", scheme.d}, {"ground_n", ground_n}, {"sigma", sigma_pairs}};
    if (scheme.has_eta()) {
        json eta_pairs = json::array();
        for (const auto& [y, _] : images)
            eta_pairs.push_back(json::array({finset_to_json(y), finset_to_json(scheme.eta(y))}));
        table["eta"] = eta_pairs;
    }
    return table;
}

/// Rebuilds a rule-backed scheme from a table. sigma must be total on
/// [0..ground_n)^m; eta entries absent from the table evaluate to the empty
/// set. The returned pair is (scheme, declared ground size).
inline std::pair<CompressionScheme, Rank> scheme_from_table(const json& table) {
    const int m = table.at("m").get<int>();
    const int d = table.at("d").get<int>();
    const Rank ground_n = table.at("ground_n").get<Rank>();
    if (m <= d || d < 0) throw SchemaError("table requires m > d >= 0");
    if (ground_n < m) throw SchemaError("table ground smaller than m");

    auto sigma_map = std::make_shared<std::map<FinSet, FinSet>>();
    for (const auto& pair : table.at("sigma")) {
        if (!pair.is_array() || pair.size() != 2) throw SchemaError("sigma entries must be [x, y] pairs");
        const FinSet x = finset_from_json(pair[0]);
        const FinSet y = finset_from_json(pair[1]);
        if (x.size() != static_cast<std::size_t>(m)) throw SchemaError("sigma key of wrong arity");
        if (!x.empty() && x.max_element() >= ground_n) throw SchemaError("sigma key outside ground");
        if (!sigma_map->emplace(x, y).second) throw SchemaError("duplicate sigma key");
    }
    const std::uint64_t expected =
        binomial(static_cast<std::uint64_t>(ground_n), static_cast<std::uint64_t>(m));
    if (sigma_map->size() != expected)
        throw SchemaError("sigma table not total: " + std::to_string(sigma_map->size()) + " of " +
                          std::to_string(expected) + " entries");

    CompressionScheme s;
    s.m = m;
    s.d = d;
    s.name = "table";
    s.sigma = [sigma_map](const FinSet& x) {
        auto it = sigma_map->find(x);
        if (it == sigma_map->end()) throw SchemaError("sigma table has no entry for requested set");
        return it->second;
    };
    if (table.contains("eta")) {
        auto eta_map = std::make_shared<std::map<FinSet, FinSet>>();
        for (const auto& pair : table.at("eta")) {
            if (!pair.is_array() || pair.size() != 2) throw SchemaError("eta entries must be [y, set] pairs");
            (*eta_map)[finset_from_json(pair[0])] = finset_from_json(pair[1]);
        }
        s.eta = [eta_map](const FinSet& y) {
            auto it = eta_map->find(y);
            return it == eta_map->end() ? FinSet{} : it->second;
        };
    }
    return {std::move(s), ground_n};
}

// ---------------------------------------------------------------------------
// Scheme reports

inline json scheme_report_to_json(const SchemeReport& r) {
    json hist = json::array();
    for (const auto& [size, count] : r.fiber_histogram) hist.push_back(json::array({size, count}));
    json j{{"monotone_ok", r.monotone_ok},
           {"cover_ok", r.cover_ok},
           {"finite_to_one", r.finite_to_one},
           {"fiber_bound_ok", r.fiber_bound_ok},
           {"max_fiber", r.max_fiber},
           {"domain_size", r.domain_size},
           {"image_count", r.image_count},
           {"fiber_histogram", hist}};
    if (r.monotone_witness) j["monotone_witness"] = finset_to_json(*r.monotone_witness);
    if (r.cover_witness) j["cover_witness"] = finset_to_json(*r.cover_witness);
    return j;
}

inline std::string fiber_histogram_csv(const SchemeReport& r) {
    std::ostringstream out;
    out << "fiber_size,count\n";
    for (const auto& [size, count] : r.fiber_histogram) out << size << "," << count << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Decompositions

inline json decomposition_to_json(const Decomposition& d) {
    json policy{{"kind", d.policy().kind == OrderPolicy::Kind::identity ? "identity" : "seeded"}};
    if (d.policy().kind == OrderPolicy::Kind::seeded) policy["seed"] = d.policy().seed;
    json assign = json::array();
    for (std::uint64_t idx = 0; idx < d.points(); ++idx) {
        if (d.membership_count(idx) != 1)
            throw NotPartition(detail::index_point(idx, d.side(), d.arity()));
        assign.push_back(d.part_at(idx));
    }
    return json{{"k", d.level()}, {"n", d.side()}, {"policy", policy}, {"assign", assign}};
}

inline Decomposition decomposition_from_json(const json& j) {
    const int k = j.at("k").get<int>();
    const Rank n = j.at("n").get<Rank>();
    if (k < 0 || n < 1) throw SchemaError("decomposition requires k >= 0 and n >= 1");
    OrderPolicy policy = OrderPolicy::identity();
    if (j.contains("policy")) {
        const std::string kind = j.at("policy").at("kind").get<std::string>();
        if (kind == "seeded")
            policy = OrderPolicy::seeded(j.at("policy").at("seed").get<std::uint64_t>());
        else if (kind != "identity")
            throw SchemaError("unknown policy kind: " + kind);
    }
    Decomposition d(k, n, policy);
    const auto& assign = j.at("assign");
    if (!assign.is_array() || assign.size() != d.points())
        throw SchemaError("assign array must have n^(k+2) entries");
    for (std::uint64_t idx = 0; idx < d.points(); ++idx) {
        const int part = assign[static_cast<std::size_t>(idx)].get<int>();
        if (part < 0 || part >= d.parts()) throw SchemaError("part index out of range");
        const std::vector<Rank> point = detail::index_point(idx, n, d.arity());
        d.assign(point, part);
    }
    return d;
}

inline json decomposition_report_to_json(const DecompositionReport& r) {
    json j{{"partition_ok", r.partition_ok},
           {"points", r.points},
           {"part_sizes", r.part_sizes},
           {"part_max_fiber", r.part_max_fiber}};
    if (r.truncation_stable) j["truncation_stable"] = *r.truncation_stable;
    if (r.violation_point) j["violation_point"] = *r.violation_point;
    return j;
}

inline std::string direction_fibers_csv(const std::vector<DirectionFiber>& rows) {
    std::ostringstream out;
    out << "part,direction,fixed_coords,fiber_size\n";
    for (const auto& row : rows) {
        out << row.part << "," << row.direction << ",";
        for (std::size_t i = 0; i < row.fixed_coords.size(); ++i)
            out << (i ? " " : "") << row.fixed_coords[i];
        out << "," << row.fiber_size << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Distributions and EMX reports

inline json distribution_to_json(const FiniteSupportDistribution& dist) {
    json atoms = json::array();
    for (const Atom& a : dist.atoms())
        atoms.push_back(json{{"rank", a.rank}, {"p", rational_to_string(a.p)}});
    return json{{"atoms", atoms}};
}

inline FiniteSupportDistribution distribution_from_json(const json& j) {
    std::vector<Atom> atoms;
    for (const auto& a : j.at("atoms"))
        atoms.push_back({a.at("rank").get<Rank>(), parse_rational(a.at("p").get<std::string>())});
    try {
        return FiniteSupportDistribution(std::move(atoms));
    } catch (const Error& e) {
        throw SchemaError(std::string("bad distribution: ") + e.what());
    }
}

inline json emx_report_to_json(const EMXReport& r) {
    json j{{"mode", r.mode == EMXReport::Mode::exact ? "exact" : "mc"},
           {"d", r.d},
           {"epsilon", rational_to_string(r.epsilon)},
           {"delta", rational_to_string(r.delta)},
           {"satisfied", r.satisfied}};
    if (r.mode == EMXReport::Mode::exact) {
        j["failure_probability"] = rational_to_string(r.failure_probability);
    } else {
        j["estimate"] = r.estimate;
        j["ci_low"] = r.ci_low;
        j["ci_high"] = r.ci_high;
        j["half_width"] = r.half_width;
        j["trials"] = r.trials;
        j["seed"] = r.seed;
    }
    return j;
}

/// One sweep row per distribution; failure_prob is "num/den" in exact mode and
/// a decimal estimate in MC mode.
inline std::string sweep_csv_header() { return "dist_id,d,epsilon,failure_prob,satisfied\n"; }

inline std::string sweep_csv_row(const std::string& dist_id, const EMXReport& r) {
    std::ostringstream out;
    out << dist_id << "," << r.d << "," << rational_to_string(r.epsilon) << ",";
    if (r.mode == EMXReport::Mode::exact)
        out << rational_to_string(r.failure_probability);
    else
        out << r.estimate;
    out << "," << (r.satisfied ? "true" : "false") << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Probe reports

inline json probe_report_to_json(const fiberprobe::ProbeReport& r) {
    return json{{"selector", r.selector},
                {"m", r.m},
                {"x", r.x},
                {"epsilon_gap", r.epsilon_gap},
                {"drop_index", r.drop_index},
                {"locally_constant", r.locally_constant},
                {"witnesses_count", r.witnesses_count},
                {"seed", r.seed}};
}

// ---------------------------------------------------------------------------
// Files

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open file: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError("malformed JSON in " + path + ": " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << text;
}

} // namespace schemelab
