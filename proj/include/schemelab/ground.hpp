#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "schemelab/errors.hpp"

// Ordered ground sets and the finite-set representation everything else runs
// on. A ground is a finite initial segment of a linearly ordered universe;
// elements are addressed by rank (0-based) and the two supported universes are
// the naturals (rank = value) and the rationals in [0,1] via a fixed diagonal
// bijection. All downstream math depends only on the order type, so sets store
// ranks; rational values are reconstructed for display.

namespace schemelab {

// ---------------------------------------------------------------------------
// FinSet

/// A finite subset of a ground, stored as its monotone enumeration
/// (strictly increasing ranks). The empty set is a valid value.
class FinSet {
public:
    FinSet() = default;

    /// Validates strict increase and non-negativity.
    static FinSet from_increasing(std::vector<Rank> v) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i] < 0) throw Error("negative rank in set: " + std::to_string(v[i]));
            if (i > 0 && v[i] <= v[i - 1]) {
                if (v[i] == v[i - 1]) throw DuplicateElement(v[i]);
                throw Error("set elements not increasing");
            }
        }
        return FinSet(std::move(v));
    }

    std::size_t size() const { return elems_.size(); }
    bool empty() const { return elems_.empty(); }
    Rank operator[](std::size_t i) const { return elems_[i]; }
    Rank max_element() const { return elems_.back(); }
    std::span<const Rank> elements() const { return elems_; }
    const std::vector<Rank>& vec() const { return elems_; }

    bool contains(Rank r) const { return std::binary_search(elems_.begin(), elems_.end(), r); }

    bool subset_of(const FinSet& other) const {
        return std::includes(other.elems_.begin(), other.elems_.end(), elems_.begin(), elems_.end());
    }

    FinSet united(const FinSet& other) const {
        std::vector<Rank> out;
        out.reserve(size() + other.size());
        std::set_union(elems_.begin(), elems_.end(), other.elems_.begin(), other.elems_.end(),
                       std::back_inserter(out));
        return FinSet(std::move(out));
    }

    FinSet minus(const FinSet& other) const {
        std::vector<Rank> out;
        std::set_difference(elems_.begin(), elems_.end(), other.elems_.begin(), other.elems_.end(),
                            std::back_inserter(out));
        return FinSet(std::move(out));
    }

    /// Copy with the element at position `i` removed.
    FinSet without_index(std::size_t i) const {
        std::vector<Rank> out = elems_;
        out.erase(out.begin() + static_cast<std::ptrdiff_t>(i));
        return FinSet(std::move(out));
    }

    FinSet with_inserted(Rank r) const {
        auto it = std::lower_bound(elems_.begin(), elems_.end(), r);
        if (it != elems_.end() && *it == r) throw DuplicateElement(r);
        std::vector<Rank> out = elems_;
        out.insert(out.begin() + (it - elems_.begin()), r);
        return FinSet(std::move(out));
    }

    // Lexicographic order of the monotone enumerations.
    auto operator<=>(const FinSet&) const = default;

private:
    explicit FinSet(std::vector<Rank> v) : elems_(std::move(v)) {}
    std::vector<Rank> elems_;
};

/// Monotone enumeration of a raw finite collection of ranks: sorts and rejects
/// duplicates (members of [X]^m have distinct elements; silently deduplicating
/// would hide caller bugs). Input must be non-empty.
inline FinSet monotone_enum(std::span<const Rank> raw) {
    if (raw.empty()) throw Error("monotone_enum: empty input");
    std::vector<Rank> v(raw.begin(), raw.end());
    std::sort(v.begin(), v.end());
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] == v[i - 1]) throw DuplicateElement(v[i]);
    return FinSet::from_increasing(std::move(v));
}

inline FinSet monotone_enum(std::initializer_list<Rank> raw) {
    return monotone_enum(std::span<const Rank>(raw.begin(), raw.size()));
}

// ---------------------------------------------------------------------------
// Ordered grounds

enum class GroundKind { naturals, rationals };

inline std::string to_string(GroundKind k) {
    return k == GroundKind::naturals ? "naturals" : "rationals";
}

// Rational enumeration: reduced fractions p/q in [0,1], listed by increasing
// denominator and, within a denominator, increasing numerator. q=1 contributes
// 0/1 and 1/1; q>=2 contributes the p in 1..q-1 coprime to q. This is a total
// bijection between [0,1] cap Q and N.

namespace detail {
inline std::int64_t euler_phi(std::int64_t q) {
    std::int64_t result = q;
    for (std::int64_t p = 2; p * p <= q; ++p) {
        if (q % p == 0) {
            while (q % p == 0) q /= p;
            result -= result / p;
        }
    }
    if (q > 1) result -= result / q;
    return result;
}
} // namespace detail

/// Rank -> reduced fraction (num, den) in [0,1].
inline std::pair<std::int64_t, std::int64_t> unrank_rational(Rank r) {
    if (r < 0) throw Error("unrank_rational: negative rank");
    if (r == 0) return {0, 1};
    if (r == 1) return {1, 1};
    Rank remaining = r - 2;
    for (std::int64_t q = 2;; ++q) {
        const std::int64_t in_bucket = detail::euler_phi(q);
        if (remaining < in_bucket) {
            for (std::int64_t p = 1; p < q; ++p) {
                if (std::gcd(p, q) != 1) continue;
                if (remaining == 0) return {p, q};
                --remaining;
            }
        }
        remaining -= in_bucket;
    }
}

/// Reduced fraction in [0,1] -> rank. Rejects fractions not in lowest terms
/// rather than normalizing: the bijection is on reduced representatives.
inline Rank rank_rational(std::int64_t num, std::int64_t den) {
    if (den < 1) throw Error("rank_rational: denominator must be positive");
    if (num < 0 || num > den) throw Error("rank_rational: fraction outside [0,1]");
    if (std::gcd(num, den) != 1) throw NotReduced(num, den);
    if (den == 1) return num == 0 ? 0 : 1;
    Rank r = 2;
    for (std::int64_t q = 2; q < den; ++q) r += detail::euler_phi(q);
    for (std::int64_t p = 1; p < num; ++p)
        if (std::gcd(p, den) == 1) ++r;
    return r;
}

/// A finite truncation of an ordered universe: elements are ranks 0..size-1.
struct OrderedGround {
    GroundKind kind = GroundKind::naturals;
    Rank size = 0;

    static OrderedGround naturals(Rank n) { return {GroundKind::naturals, n}; }
    static OrderedGround rationals(Rank n) { return {GroundKind::rationals, n}; }

    bool contains(Rank r) const { return r >= 0 && r < size; }

    bool contains(const FinSet& s) const {
        return s.empty() || (s[0] >= 0 && s.max_element() < size);
    }

    /// Display form of an element: the natural itself, or the unranked fraction.
    std::string display(Rank r) const {
        if (!contains(r)) throw Error("rank outside ground: " + std::to_string(r));
        if (kind == GroundKind::naturals) return std::to_string(r);
        auto [p, q] = unrank_rational(r);
        return std::to_string(p) + "/" + std::to_string(q);
    }
};

// ---------------------------------------------------------------------------
// k-subset enumeration, lexicographic on monotone enumerations

/// C(n,k), saturating at uint64 max (used for fiber bounds where the exact
/// value past 2^64 is irrelevant).
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    unsigned __int128 r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i; // exact: product of i consecutive integers is divisible by i!
        if (r > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
    }
    return static_cast<std::uint64_t>(r);
}

/// Streams all C(n,k) k-element subsets of {0..n-1} in lexicographic order of
/// their monotone enumerations, each exactly once. k=0 yields the empty set once.
class KSubsetStream {
public:
    KSubsetStream(Rank n, int k) : n_(n), k_(k) {
        if (k < 0) throw Error("k-subsets: negative k");
        if (n < 0) throw Error("k-subsets: negative n");
        if (static_cast<Rank>(k) > n) throw KTooLarge(n, k);
        current_.resize(static_cast<std::size_t>(k));
        std::iota(current_.begin(), current_.end(), Rank{0});
    }

    /// Writes the next subset into `out`; false once exhausted.
    bool next(std::vector<Rank>& out) {
        if (done_) return false;
        out = current_;
        advance();
        return true;
    }

    std::optional<FinSet> next() {
        std::vector<Rank> buf;
        if (!this->next(buf)) return std::nullopt;
        return FinSet::from_increasing(std::move(buf));
    }

private:
    void advance() {
        int i = k_ - 1;
        while (i >= 0 && current_[static_cast<std::size_t>(i)] == n_ - k_ + i) --i;
        if (i < 0) {
            done_ = true;
            return;
        }
        ++current_[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k_; ++j)
            current_[static_cast<std::size_t>(j)] = current_[static_cast<std::size_t>(j - 1)] + 1;
    }

    Rank n_;
    int k_;
    std::vector<Rank> current_;
    bool done_ = false;
};

inline KSubsetStream k_subsets(const OrderedGround& ground, int k) {
    return KSubsetStream(ground.size, k);
}

/// Calls fn with each k-subset (as an increasing span) in lexicographic order.
template <class Fn>
void for_each_k_subset(Rank n, int k, Fn fn) {
    KSubsetStream stream(n, k);
    std::vector<Rank> buf;
    while (stream.next(buf)) fn(std::span<const Rank>(buf));
}

/// Calls fn with each k-element subset of `s` (as a FinSet) in lexicographic
/// order; s is increasing, so index-combination order is element order.
template <class Fn>
void for_each_k_subset_of(const FinSet& s, int k, Fn fn) {
    for_each_k_subset(static_cast<Rank>(s.size()), k, [&](std::span<const Rank> idxs) {
        std::vector<Rank> elems;
        elems.reserve(idxs.size());
        for (Rank i : idxs) elems.push_back(s[static_cast<std::size_t>(i)]);
        fn(FinSet::from_increasing(std::move(elems)));
    });
}

/// Lexicographic unranking: the `index`-th k-subset of {0..n-1}. Lets parallel
/// enumeration start mid-stream.
inline std::vector<Rank> k_subset_at(Rank n, int k, std::uint64_t index) {
    if (static_cast<Rank>(k) > n) throw KTooLarge(n, k);
    if (index >= binomial(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(k)))
        throw Error("k_subset_at: index out of range");
    std::vector<Rank> out;
    out.reserve(static_cast<std::size_t>(k));
    Rank x = 0;
    for (int pos = 0; pos < k; ++pos) {
        std::uint64_t skip;
        while ((skip = binomial(static_cast<std::uint64_t>(n - 1 - x),
                                static_cast<std::uint64_t>(k - 1 - pos))) <= index) {
            index -= skip;
            ++x;
        }
        out.push_back(x);
        ++x;
    }
    return out;
}

} // namespace schemelab
