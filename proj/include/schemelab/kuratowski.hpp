#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "schemelab/prng.hpp"
#include "schemelab/scheme.hpp"

// Kuratowski-type decompositions of finite powers. A level-k decomposition
// splits n^(k+2) into k+2 parts, part i finite in the direction of axis i:
// fixing every coordinate except position i leaves finitely many points of
// part i, with the fiber unchanged when the power grows (truncation
// stability). The base case splits n^2 into {m <= n'} and {m > n'}; the
// inductive step removes the largest coordinate, consults a chosen lower-level
// decomposition for that ordinal, and re-embeds the resulting part index past
// the removed position. A (k+2)->(k+1) compression scheme falls out by
// dropping, from each increasing tuple, the coordinate of the axis whose part
// contains it.

namespace schemelab {

// ---------------------------------------------------------------------------
// Order policy: the finite stand-in for the paper's choice of well-orders

/// Chooses, per ordinal alpha, the order on {0..alpha} that the level-0 split
/// compares in. identity keeps the natural order; seeded draws a deterministic
/// permutation per (seed, alpha) — at finite scale any permutation is a valid
/// choice, and a fixed seed makes builds bit-reproducible.
struct OrderPolicy {
    enum class Kind { identity, seeded };
    Kind kind = Kind::identity;
    std::uint64_t seed = 0;

    static OrderPolicy identity() { return {}; }
    static OrderPolicy seeded(std::uint64_t seed) { return {Kind::seeded, seed}; }

    /// Position of value v in the chosen order on {0..alpha}.
    Rank order_rank(Rank alpha, Rank v) const {
        if (kind == Kind::identity) return v;
        const std::size_t count = static_cast<std::size_t>(alpha) + 1;
        std::vector<Rank> perm(count);
        std::iota(perm.begin(), perm.end(), Rank{0});
        SplitMix64 g(mix_seed(seed, static_cast<std::uint64_t>(alpha)));
        for (std::size_t i = count - 1; i > 0; --i)
            std::swap(perm[i], perm[g.next_below(i + 1)]);
        for (std::size_t i = 0; i < count; ++i)
            if (perm[i] == v) return static_cast<Rank>(i);
        throw Error("order_rank: value outside {0..alpha}");
    }

    /// The level-0 split of (alpha+1)^2 in the alpha-order: 0 when a precedes-
    /// or-equals b, 1 otherwise.
    int split(Rank alpha, Rank a, Rank b) const {
        if (kind == Kind::identity) return a <= b ? 0 : 1;
        return order_rank(alpha, a) <= order_rank(alpha, b) ? 0 : 1;
    }

    std::string describe() const {
        return kind == Kind::identity ? "identity" : "seeded(" + std::to_string(seed) + ")";
    }
};

// ---------------------------------------------------------------------------
// Decomposition

namespace detail {

inline std::uint64_t power_size(Rank n, int arity) {
    std::uint64_t p = 1;
    for (int i = 0; i < arity; ++i) {
        p *= static_cast<std::uint64_t>(n);
        if (p > (1ull << 32)) throw Error("power too large to materialize");
    }
    return p;
}

inline std::uint64_t point_index(std::span<const Rank> x, Rank n) {
    std::uint64_t idx = 0;
    for (Rank c : x) {
        if (c < 0 || c >= n) throw Error("point coordinate outside power");
        idx = idx * static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(c);
    }
    return idx;
}

inline std::vector<Rank> index_point(std::uint64_t idx, Rank n, int arity) {
    std::vector<Rank> x(static_cast<std::size_t>(arity));
    for (int i = arity - 1; i >= 0; --i) {
        x[static_cast<std::size_t>(i)] = static_cast<Rank>(idx % static_cast<std::uint64_t>(n));
        idx /= static_cast<std::uint64_t>(n);
    }
    return x;
}

/// Position of the largest coordinate; ties resolved to the largest position.
inline int largest_position(std::span<const Rank> x) {
    int j = 0;
    for (int i = 1; i < static_cast<int>(x.size()); ++i)
        if (x[static_cast<std::size_t>(i)] >= x[static_cast<std::size_t>(j)]) j = i;
    return j;
}

} // namespace detail

/// An assignment of every point of n^(k+2) (arbitrary tuples, not only
/// increasing ones) to one of k+2 parts, stored as per-part membership masks
/// so that malformed assignments (a point in zero or two parts) remain
/// representable and detectable.
class Decomposition {
public:
    Decomposition(int level, Rank side, OrderPolicy policy)
        : level_(level), side_(side), policy_(policy),
          points_(detail::power_size(side, level + 2)),
          masks_(static_cast<std::size_t>(level + 2), std::vector<bool>(points_, false)) {
        if (level < 0 || side < 1) throw Error("decomposition requires k >= 0 and n >= 1");
    }

    int level() const { return level_; }
    int parts() const { return level_ + 2; }
    int arity() const { return level_ + 2; }
    Rank side() const { return side_; }
    const OrderPolicy& policy() const { return policy_; }
    std::uint64_t points() const { return points_; }

    void assign(std::span<const Rank> x, int part) {
        masks_.at(static_cast<std::size_t>(part))[detail::point_index(x, side_)] = true;
    }

    bool in_part(std::span<const Rank> x, int part) const {
        return masks_[static_cast<std::size_t>(part)][detail::point_index(x, side_)];
    }

    /// The unique part containing x; throws NotPartition when x is in zero or
    /// several parts.
    int part_of_point(std::span<const Rank> x) const {
        const std::uint64_t idx = detail::point_index(x, side_);
        int found = -1;
        for (int i = 0; i < parts(); ++i) {
            if (masks_[static_cast<std::size_t>(i)][idx]) {
                if (found >= 0) throw NotPartition(std::vector<Rank>(x.begin(), x.end()));
                found = i;
            }
        }
        if (found < 0) throw NotPartition(std::vector<Rank>(x.begin(), x.end()));
        return found;
    }

    /// Part membership count at a flat index (0 or 1 for a partition).
    int membership_count(std::uint64_t idx) const {
        int c = 0;
        for (const auto& mask : masks_)
            if (mask[idx]) ++c;
        return c;
    }

    int part_at(std::uint64_t idx) const {
        for (int i = 0; i < parts(); ++i)
            if (masks_[static_cast<std::size_t>(i)][idx]) return i;
        return -1;
    }

private:
    int level_;
    Rank side_;
    OrderPolicy policy_;
    std::uint64_t points_;
    std::vector<std::vector<bool>> masks_;
};

// ---------------------------------------------------------------------------
// Construction

/// The k=0 base: n^2 split into part 0 = {(m,n'): m <= n'} and
/// part 1 = {(m,n'): m > n'}, in the natural order.
inline Decomposition base_decomposition(Rank n) {
    Decomposition d(0, n, OrderPolicy::identity());
    for (Rank a = 0; a < n; ++a)
        for (Rank b = 0; b < n; ++b) {
            const Rank x[2] = {a, b};
            d.assign(std::span<const Rank>(x, 2), a <= b ? 0 : 1);
        }
    return d;
}

/// The chosen level-0 decomposition X(alpha, .) of (alpha+1)^2: the base split
/// transported along the policy's order for alpha.
inline Decomposition choose_base(const OrderPolicy& policy, Rank alpha) {
    Decomposition d(0, alpha + 1, policy);
    for (Rank a = 0; a <= alpha; ++a)
        for (Rank b = 0; b <= alpha; ++b) {
            const Rank x[2] = {a, b};
            d.assign(std::span<const Rank>(x, 2), policy.split(alpha, a, b));
        }
    return d;
}

/// A chooser supplies, per ordinal alpha < n, a level-k decomposition of
/// (alpha+1)^(k+1+... ); returning nullopt signals ChooserMissing.
using Chooser = std::function<std::optional<Decomposition>(Rank alpha)>;

/// One inductive step: builds the level-(k+1) decomposition of n^(k+3) from
/// level-k decompositions of the sub-powers. For each point, the position j of
/// the largest coordinate (ties to the largest position) is removed, the
/// chooser's decomposition for alpha = x_j classifies the remaining tuple into
/// part p, and the point lands in part phi_j(p), phi_j being the increasing
/// enumeration of the part indices with j skipped. For k+1 = 1 this is exactly
/// the three-bullet rule of the classical proof.
inline Decomposition step_decomposition(const Chooser& lower, int lower_level, Rank n,
                                        OrderPolicy policy = OrderPolicy::identity()) {
    const int level = lower_level + 1;
    const int arity = level + 2;
    Decomposition out(level, n, policy);

    // materialize the chooser once per ordinal
    std::vector<std::optional<Decomposition>> chosen(static_cast<std::size_t>(n));
    auto chooser_for = [&](Rank alpha) -> const Decomposition& {
        auto& slot = chosen[static_cast<std::size_t>(alpha)];
        if (!slot) {
            std::optional<Decomposition> d = lower(alpha);
            if (!d) throw ChooserMissing(alpha);
            if (d->level() != lower_level || d->side() != alpha + 1)
                throw Error("chooser returned a decomposition of the wrong shape for alpha=" +
                            std::to_string(alpha));
            slot = std::move(d);
        }
        return *slot;
    };

    const std::uint64_t total = out.points();
    std::vector<Rank> sub(static_cast<std::size_t>(arity) - 1);
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        const std::vector<Rank> x = detail::index_point(idx, n, arity);
        const int j = detail::largest_position(x);
        const Rank alpha = x[static_cast<std::size_t>(j)];
        sub.clear();
        for (int i = 0; i < arity; ++i)
            if (i != j) sub.push_back(x[static_cast<std::size_t>(i)]);
        const int p = chooser_for(alpha).part_of_point(sub);
        const int part = p < j ? p : p + 1; // phi_j: skip the removed position
        out.assign(x, part);
    }
    return out;
}

/// Iterates step_decomposition from the base case. The chooser for ordinal
/// alpha at each level is the recursively built decomposition of
/// (alpha+1)^(k+1) under the same policy; the policy enters through the
/// level-0 splits X(alpha, .).
inline Decomposition build_decomposition(int k, Rank n, OrderPolicy policy = OrderPolicy::identity()) {
    if (k == 0) return base_decomposition(n);
    Chooser lower = [k, policy](Rank alpha) -> std::optional<Decomposition> {
        if (k - 1 == 0) return choose_base(policy, alpha);
        return build_decomposition(k - 1, alpha + 1, policy);
    };
    return step_decomposition(lower, k - 1, n, policy);
}

// ---------------------------------------------------------------------------
// Verification

struct DecompositionReport {
    bool partition_ok = false;
    std::optional<std::vector<Rank>> violation_point;
    std::vector<std::uint64_t> part_sizes;
    std::vector<std::uint64_t> part_max_fiber; // per part, in its own axis direction
    std::optional<bool> truncation_stable;
    std::uint64_t points = 0;
};

/// One row of the direction-fiber table: the fiber of `part` along its own
/// axis at the line with the other coordinates fixed.
struct DirectionFiber {
    int part = 0;
    int direction = 0;
    std::vector<Rank> fixed_coords;
    std::uint64_t fiber_size = 0;
};

namespace detail {

/// Fiber of part i in direction i over one line (fixed coords, position i
/// varying over 0..side-1), as the set of varying values.
inline std::vector<Rank> direction_fiber(const Decomposition& d, int part,
                                         std::span<const Rank> fixed) {
    std::vector<Rank> x(static_cast<std::size_t>(d.arity()));
    for (int i = 0, f = 0; i < d.arity(); ++i)
        if (i != part) x[static_cast<std::size_t>(i)] = fixed[static_cast<std::size_t>(f++)];
    std::vector<Rank> fiber;
    for (Rank t = 0; t < d.side(); ++t) {
        x[static_cast<std::size_t>(part)] = t;
        if (d.in_part(x, part)) fiber.push_back(t);
    }
    return fiber;
}

template <class Fn>
void for_each_line(Rank side, int arity_minus_1, Fn fn) {
    std::vector<Rank> fixed(static_cast<std::size_t>(arity_minus_1), 0);
    for (;;) {
        fn(std::span<const Rank>(fixed));
        int i = arity_minus_1 - 1;
        while (i >= 0 && fixed[static_cast<std::size_t>(i)] == side - 1) {
            fixed[static_cast<std::size_t>(i)] = 0;
            --i;
        }
        if (i < 0) break;
        ++fixed[static_cast<std::size_t>(i)];
    }
}

} // namespace detail

/// Exhaustively verifies the partition property and measures, for each part,
/// the largest fiber in that part's own axis direction. When `stability_n` is
/// given, the same (k, policy) decomposition is rebuilt at the larger side and
/// every line inside the smaller power is compared: stable means the fiber
/// sets are identical, i.e. growing the power adds no new points to them.
inline DecompositionReport check_decomposition(const Decomposition& d,
                                               std::optional<Rank> stability_n = std::nullopt) {
    DecompositionReport report;
    report.points = d.points();
    report.part_sizes.assign(static_cast<std::size_t>(d.parts()), 0);
    report.part_max_fiber.assign(static_cast<std::size_t>(d.parts()), 0);

    report.partition_ok = true;
    for (std::uint64_t idx = 0; idx < d.points(); ++idx) {
        const int c = d.membership_count(idx);
        if (c != 1) {
            report.partition_ok = false;
            report.violation_point = detail::index_point(idx, d.side(), d.arity());
            break;
        }
        ++report.part_sizes[static_cast<std::size_t>(d.part_at(idx))];
    }

    for (int part = 0; part < d.parts(); ++part) {
        detail::for_each_line(d.side(), d.arity() - 1, [&](std::span<const Rank> fixed) {
            const auto fiber = detail::direction_fiber(d, part, fixed);
            report.part_max_fiber[static_cast<std::size_t>(part)] = std::max(
                report.part_max_fiber[static_cast<std::size_t>(part)], static_cast<std::uint64_t>(fiber.size()));
        });
    }

    if (stability_n) {
        if (*stability_n <= d.side()) throw Error("stability check needs a strictly larger side");
        const Decomposition larger = build_decomposition(d.level(), *stability_n, d.policy());
        bool stable = true;
        for (int part = 0; part < d.parts() && stable; ++part) {
            detail::for_each_line(d.side(), d.arity() - 1, [&](std::span<const Rank> fixed) {
                if (!stable) return;
                if (detail::direction_fiber(d, part, fixed) !=
                    detail::direction_fiber(larger, part, fixed))
                    stable = false;
            });
        }
        report.truncation_stable = stable;
    }
    return report;
}

/// All direction fibers of every part in its own axis, for CSV export.
inline std::vector<DirectionFiber> direction_fiber_table(const Decomposition& d) {
    std::vector<DirectionFiber> rows;
    for (int part = 0; part < d.parts(); ++part) {
        detail::for_each_line(d.side(), d.arity() - 1, [&](std::span<const Rank> fixed) {
            DirectionFiber row;
            row.part = part;
            row.direction = part;
            row.fixed_coords.assign(fixed.begin(), fixed.end());
            row.fiber_size = detail::direction_fiber(d, part, fixed).size();
            rows.push_back(std::move(row));
        });
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Scheme construction

/// The (k+2)->(k+1) scheme of a level-k decomposition on ground n: an
/// increasing tuple x lies in a unique part i; sigma(x) drops the coordinate
/// x_i. eta is the canonical union-of-fibers, so the result is ready for
/// verify_scheme.
inline CompressionScheme scheme_from_decomposition(const Decomposition& d) {
    auto shared = std::make_shared<Decomposition>(d);
    CompressionScheme s;
    s.m = d.level() + 2;
    s.d = d.level() + 1;
    s.name = "kuratowski(k=" + std::to_string(d.level()) + ",n=" + std::to_string(d.side()) +
             ",policy=" + d.policy().describe() + ")";
    s.sigma = [shared](const FinSet& x) {
        const int i = shared->part_of_point(x.elements());
        return x.without_index(static_cast<std::size_t>(i));
    };
    return eta_from_sigma(s, OrderedGround::naturals(d.side()));
}

/// A deterministic pseudo-random order policy standing in for the paper's
/// simultaneous choice of well-orders: any permutation per ordinal is a valid
/// choice at finite scale, and seeding keeps builds reproducible.
inline OrderPolicy random_order_policy(std::uint64_t seed) { return OrderPolicy::seeded(seed); }

} // namespace schemelab
