#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "schemelab/ground.hpp"
#include "schemelab/parallel.hpp"

// Monotone compression schemes. An (m->d) scheme over an ordered ground is a
// pair sigma: [X]^m -> [X]^d, eta: [X]^d -> Fin(X) with sigma(x) subset of x
// and A subset of eta(sigma(A)) for every A. sigma alone determines a scheme
// when it is finite-to-one: eta(y) can be taken as the union of the fiber over
// y. Verification is by exhaustive enumeration on a finite truncation; fiber
// histograms realize the finite-to-one analysis.

namespace schemelab {

// ---------------------------------------------------------------------------
// Scheme representation

/// An (m->d) scheme, rule-backed (closures) so derived schemes stay cheap to
/// build; explicit tables are the interchange format (json_io.hpp). eta may be
/// absent: then the canonical eta(y) = union of the sigma-fiber over y is
/// implied, and the cover property holds by construction.
struct CompressionScheme {
    int m = 0;
    int d = 0;
    std::string name;
    std::function<FinSet(const FinSet&)> sigma;
    std::function<FinSet(const FinSet&)> eta; // may be empty

    bool has_eta() const { return static_cast<bool>(eta); }
};

inline void validate_arities(const CompressionScheme& s) {
    if (!(s.m > s.d) || s.d < 0) throw Error("scheme requires m > d >= 0");
    if (!s.sigma) throw Error("scheme has no sigma rule");
}

/// The 2->1 scheme on the naturals: sigma {a,b} = {max}, eta {n} = {0..n}.
inline CompressionScheme max_scheme() {
    CompressionScheme s;
    s.m = 2;
    s.d = 1;
    s.name = "max";
    s.sigma = [](const FinSet& x) { return FinSet::from_increasing({x.max_element()}); };
    s.eta = [](const FinSet& y) {
        std::vector<Rank> seg(static_cast<std::size_t>(y.max_element()) + 1);
        std::iota(seg.begin(), seg.end(), Rank{0});
        return FinSet::from_increasing(std::move(seg));
    };
    return s;
}

// ---------------------------------------------------------------------------
// Verification

/// Outcome of exhaustive verification on a truncation. Witnesses are the
/// lexicographically least violating sets. finite_to_one records that every
/// fiber was enumerated and is bounded on this truncation; growth across
/// truncations is what fiber_growth_audit measures.
struct SchemeReport {
    bool monotone_ok = false;
    bool cover_ok = false;
    bool finite_to_one = false;
    bool fiber_bound_ok = true; // |fiber(y)| <= C(|eta(y)|, m); only meaningful with eta
    std::uint64_t max_fiber = 0;
    std::uint64_t domain_size = 0;
    std::uint64_t image_count = 0;
    std::map<std::uint64_t, std::uint64_t> fiber_histogram; // fiber size -> number of images
    std::optional<FinSet> monotone_witness;
    std::optional<FinSet> cover_witness;
};

/// Report plus the raw fiber map (image -> fiber size) for callers that
/// compare fibers across truncations.
struct SchemeVerification {
    SchemeReport report;
    std::map<FinSet, std::uint64_t> fibers;
};

namespace detail {

struct VerifyChunk {
    bool monotone_ok = true;
    bool cover_ok = true;
    std::optional<FinSet> monotone_witness;
    std::optional<FinSet> cover_witness;
    std::map<FinSet, std::uint64_t> fibers;
};

} // namespace detail

/// Exhaustively checks sigma(x) subset x on [ground]^m, the cover property
/// A subset eta(sigma(A)) when eta is present, and tabulates the sigma fibers.
/// The enumeration may be partitioned across `jobs` workers; partial fiber
/// maps merge by addition, so the result is independent of the partitioning.
inline SchemeVerification verify_scheme_detailed(const CompressionScheme& scheme,
                                                 const OrderedGround& ground, int jobs = 1) {
    validate_arities(scheme);
    const Rank n = ground.size;
    if (static_cast<Rank>(scheme.m) > n) throw KTooLarge(n, scheme.m);

    const std::uint64_t total =
        binomial(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(scheme.m));

    auto chunk = [&](std::uint64_t begin, std::uint64_t end) {
        detail::VerifyChunk part;
        if (begin >= end) return part;
        std::vector<Rank> cur = k_subset_at(n, scheme.m, begin);
        std::map<FinSet, FinSet> eta_cache; // images repeat heavily across the chunk
        for (std::uint64_t idx = begin; idx < end; ++idx) {
            const FinSet x = FinSet::from_increasing(std::vector<Rank>(cur));
            const FinSet y = scheme.sigma(x);
            const bool mono =
                y.size() == static_cast<std::size_t>(scheme.d) && y.subset_of(x);
            if (!mono && part.monotone_ok) {
                part.monotone_ok = false;
                part.monotone_witness = x;
            }
            if (scheme.has_eta()) {
                auto it = eta_cache.find(y);
                if (it == eta_cache.end()) it = eta_cache.emplace(y, scheme.eta(y)).first;
                if (!x.subset_of(it->second) && part.cover_ok) {
                    part.cover_ok = false;
                    part.cover_witness = x;
                }
            }
            ++part.fibers[y];
            // advance cur to the next combination in lex order
            int i = scheme.m - 1;
            while (i >= 0 && cur[static_cast<std::size_t>(i)] == n - scheme.m + i) --i;
            if (i < 0) break;
            ++cur[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < scheme.m; ++j)
                cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)] + 1;
        }
        return part;
    };
    auto merge = [](detail::VerifyChunk& acc, detail::VerifyChunk&& part) {
        // chunks are folded in domain order, so the first witness is the lex-least
        if (acc.monotone_ok && !part.monotone_ok) {
            acc.monotone_ok = false;
            acc.monotone_witness = std::move(part.monotone_witness);
        }
        if (acc.cover_ok && !part.cover_ok) {
            acc.cover_ok = false;
            acc.cover_witness = std::move(part.cover_witness);
        }
        for (auto& [y, c] : part.fibers) acc.fibers[y] += c;
    };

    detail::VerifyChunk folded = run_chunked<detail::VerifyChunk>(total, jobs, chunk, merge);

    SchemeVerification out;
    out.report.monotone_ok = folded.monotone_ok;
    out.report.cover_ok = folded.cover_ok;
    out.report.monotone_witness = std::move(folded.monotone_witness);
    out.report.cover_witness = std::move(folded.cover_witness);
    out.report.domain_size = total;
    out.report.image_count = folded.fibers.size();
    for (const auto& [y, c] : folded.fibers) {
        ++out.report.fiber_histogram[c];
        out.report.max_fiber = std::max(out.report.max_fiber, c);
        if (scheme.has_eta()) {
            const std::uint64_t hull_size = scheme.eta(y).size();
            if (c > binomial(hull_size, static_cast<std::uint64_t>(scheme.m)))
                out.report.fiber_bound_ok = false;
        }
    }
    out.report.finite_to_one = true; // every fiber enumerated and bounded on this truncation
    out.fibers = std::move(folded.fibers);
    return out;
}

inline SchemeReport verify_scheme(const CompressionScheme& scheme, const OrderedGround& ground,
                                  int jobs = 1) {
    return verify_scheme_detailed(scheme, ground, jobs).report;
}

// ---------------------------------------------------------------------------
// eta from sigma

/// Equips a sigma-only scheme with the canonical eta(y) = union of the fiber
/// of sigma over y, materialized by exhaustive enumeration of [ground]^m.
/// Images with empty fiber get eta(y) = empty set. The result satisfies the
/// cover property by construction.
inline CompressionScheme eta_from_sigma(const CompressionScheme& scheme,
                                        const OrderedGround& ground) {
    validate_arities(scheme);
    const Rank n = ground.size;
    if (static_cast<Rank>(scheme.m) > n) throw KTooLarge(n, scheme.m);

    auto table = std::make_shared<std::map<FinSet, FinSet>>();
    for_each_k_subset(n, scheme.m, [&](std::span<const Rank> xs) {
        const FinSet x = FinSet::from_increasing(std::vector<Rank>(xs.begin(), xs.end()));
        const FinSet y = scheme.sigma(x);
        auto [it, inserted] = table->try_emplace(y, x);
        if (!inserted) it->second = it->second.united(x);
    });

    CompressionScheme out = scheme;
    out.name = scheme.name + "+eta";
    out.eta = [table](const FinSet& y) {
        auto it = table->find(y);
        return it == table->end() ? FinSet{} : it->second;
    };
    return out;
}

// ---------------------------------------------------------------------------
// Reduction lemma

/// Result of reducing an (m+1)->(l+1) scheme: the m->l scheme on the ground
/// truncated at delta, plus the chain delta_0 <= delta_1 <= ... <= delta.
struct ReduceResult {
    CompressionScheme reduced;
    std::vector<Rank> chain;
    Rank delta = 0;
};

/// Computes the closure chain: delta_{n+1} is the least bound >= delta_n such
/// that sigma(x) within [delta_n]^(l+1) forces x within [delta_{n+1}]^(m+1),
/// iterated to its fixpoint delta. The reduced map is
/// varsigma(x) = sigma(x u {delta}) minus {delta} on [delta]^m.
///
/// GroundExhausted: the chain needs a bound past the truncation (the paper's
/// supremum is not realized at this finite scale). DeltaNotSelected: some
/// sigma(x u {delta}) omits delta, which the lemma's dichotomy rules out for
/// genuinely monotone schemes; hitting it means the input scheme is not one.
inline ReduceResult reduce_scheme(const CompressionScheme& scheme, const OrderedGround& ground,
                                  Rank delta0) {
    validate_arities(scheme);
    if (scheme.d < 1) throw Error("reduce_scheme: target arity must be at least 1");
    const Rank n = ground.size;
    if (delta0 < 0 || delta0 >= n) throw Error("reduce_scheme: delta0 outside ground");
    const int m_plus_1 = scheme.m;
    const int l_plus_1 = scheme.d;

    ReduceResult result;
    result.chain.push_back(delta0);
    for (;;) {
        const Rank delta = result.chain.back();
        Rank bound = delta;
        for_each_k_subset(n, m_plus_1, [&](std::span<const Rank> xs) {
            const FinSet x = FinSet::from_increasing(std::vector<Rank>(xs.begin(), xs.end()));
            const FinSet y = scheme.sigma(x);
            const bool lands_below =
                y.size() == static_cast<std::size_t>(l_plus_1) && (y.empty() || y.max_element() < delta);
            if (lands_below) bound = std::max(bound, xs.back() + 1);
        });
        if (bound == delta) break;                    // fixpoint
        if (bound > n - 1) throw GroundExhausted(bound);
        result.chain.push_back(bound);
        if (result.chain.size() > static_cast<std::size_t>(n) + 1)
            throw Error("reduce_scheme: chain failed to stabilize"); // unreachable: chain is strictly increasing
    }
    result.delta = result.chain.back();

    // The dichotomy check: delta must be selected by sigma on every x u {delta}.
    const Rank delta = result.delta;
    for_each_k_subset(delta, m_plus_1 - 1, [&](std::span<const Rank> xs) {
        std::vector<Rank> y_elems(xs.begin(), xs.end());
        y_elems.push_back(delta);
        const FinSet y = FinSet::from_increasing(std::move(y_elems));
        if (!scheme.sigma(y).contains(delta))
            throw DeltaNotSelected(std::vector<Rank>(xs.begin(), xs.end()));
    });

    auto base_sigma = scheme.sigma;
    CompressionScheme reduced;
    reduced.m = m_plus_1 - 1;
    reduced.d = l_plus_1 - 1;
    reduced.name = "reduced(" + scheme.name + ",delta=" + std::to_string(delta) + ")";
    reduced.sigma = [base_sigma, delta](const FinSet& x) {
        const FinSet y = x.with_inserted(delta);
        return base_sigma(y).minus(FinSet::from_increasing({delta}));
    };
    result.reduced = std::move(reduced);
    return result;
}

// ---------------------------------------------------------------------------
// Fiber growth audit

/// One audited ground size. stable_vs_prev: every image that occurred at the
/// previous size has an unchanged fiber size here — the finite-scale surrogate
/// for "every fiber is finite". A family whose rows keep growing witnesses, at
/// finite scale, that the corresponding infinite scheme cannot exist.
struct AuditRow {
    Rank n = 0;
    std::uint64_t max_fiber = 0;
    std::optional<bool> stable_vs_prev; // empty on the first row
};

inline std::vector<AuditRow> fiber_growth_audit(
    const std::function<CompressionScheme(Rank)>& scheme_family, const std::vector<Rank>& sizes,
    int jobs = 1) {
    for (std::size_t i = 1; i < sizes.size(); ++i)
        if (sizes[i] <= sizes[i - 1]) throw Error("fiber_growth_audit: sizes must be increasing");

    std::vector<AuditRow> table;
    std::map<FinSet, std::uint64_t> prev_fibers;
    bool have_prev = false;
    for (Rank n : sizes) {
        const CompressionScheme scheme = scheme_family(n);
        SchemeVerification v = verify_scheme_detailed(scheme, OrderedGround::naturals(n), jobs);
        AuditRow row;
        row.n = n;
        row.max_fiber = v.report.max_fiber;
        if (have_prev) {
            bool stable = true;
            for (const auto& [y, c] : prev_fibers) {
                auto it = v.fibers.find(y);
                if (it == v.fibers.end() || it->second != c) {
                    stable = false;
                    break;
                }
            }
            row.stable_vs_prev = stable;
        }
        prev_fibers = std::move(v.fibers);
        have_prev = true;
        table.push_back(std::move(row));
    }
    return table;
}

} // namespace schemelab
