#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "schemelab/errors.hpp"
#include "schemelab/prng.hpp"

// Numeric probe for the continuity obstruction: a continuous selector
// sigma: [I]^(m+1) -> [I]^m with sigma(x) subset x drops the same coordinate
// index near every point (the epsilon-gap separates coordinates, so the
// dropped index is locally constant), hence globally by connectedness, hence
// some fiber contains a whole segment. At finite scale: probe the dropped
// index over a delta-ball, then walk the free coordinate and collect distinct
// points sharing one image. A deliberately discontinuous selector in the
// gallery shows the failure mode (ImageDrift) for contrast.

namespace schemelab {
namespace fiberprobe {

/// Sub-tuple matching and image comparison tolerance. Generated probe points
/// keep coordinates at least 3*kTolerance apart so identification is unambiguous.
inline constexpr double kTolerance = 1e-9;

/// A candidate compression rule on increasing (m+1)-tuples in the unit
/// interval. The arity is implied by the input; the output must be an m-tuple
/// of entries of the input (within tolerance) for the probes to accept it.
struct Selector {
    std::string name;
    bool claimed_continuous = true;
    std::function<std::vector<double>(std::span<const double>)> rule;
};

/// drop-last, drop-first, drop-middle, and the discontinuous parity control
/// (drop first when floor(10 * sum x) is even, else drop last).
inline std::vector<Selector> selector_gallery() {
    std::vector<Selector> gallery;
    gallery.push_back({"drop-last", true, [](std::span<const double> x) {
                           return std::vector<double>(x.begin(), x.end() - 1);
                       }});
    gallery.push_back({"drop-first", true, [](std::span<const double> x) {
                           return std::vector<double>(x.begin() + 1, x.end());
                       }});
    gallery.push_back({"drop-middle", true, [](std::span<const double> x) {
                           std::vector<double> out(x.begin(), x.end());
                           out.erase(out.begin() + static_cast<std::ptrdiff_t>(x.size() / 2));
                           return out;
                       }});
    gallery.push_back({"parity", false, [](std::span<const double> x) {
                           double sum = 0;
                           for (double c : x) sum += c;
                           const bool even = static_cast<long long>(std::floor(10.0 * sum)) % 2 == 0;
                           std::vector<double> out(x.begin(), x.end());
                           out.erase(even ? out.begin() : out.end() - 1);
                           return out;
                       }});
    return gallery;
}

inline std::optional<Selector> find_selector(const std::string& name) {
    for (auto& s : selector_gallery())
        if (s.name == name) return s;
    return std::nullopt;
}

inline void require_increasing(std::span<const double> x) {
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        if (!(x[i] < x[i + 1])) throw Error("probe point must be strictly increasing");
}

/// One third of the minimum consecutive gap — the proof's separation constant.
inline double epsilon_gap(std::span<const double> x) {
    if (x.size() < 2) throw Error("epsilon_gap needs at least two coordinates");
    double min_gap = 2.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) min_gap = std::min(min_gap, x[i + 1] - x[i]);
    if (min_gap <= kTolerance) throw DegenerateGap();
    return min_gap / 3.0;
}

/// The unique index whose coordinate is absent from sel(x). Uniqueness is
/// guaranteed by coordinate separation; AmbiguousDrop flags inputs whose
/// coordinates sit within tolerance of each other.
inline std::size_t drop_index(const Selector& sel, std::span<const double> x) {
    require_increasing(x);
    const std::vector<double> y = sel.rule(x);
    if (y.size() + 1 != x.size()) throw NotSubtuple();
    std::optional<std::size_t> match;
    for (std::size_t drop = 0; drop < x.size(); ++drop) {
        bool ok = true;
        for (std::size_t i = 0; i < y.size() && ok; ++i) {
            const std::size_t xi = i < drop ? i : i + 1;
            ok = std::abs(y[i] - x[xi]) <= kTolerance;
        }
        if (ok) {
            if (match) throw AmbiguousDrop();
            match = drop;
        }
    }
    if (!match) throw NotSubtuple();
    return *match;
}

/// Samples `trials` points of the increasing simplex within max-norm `radius`
/// of x and reports whether the dropped index matches x's everywhere.
/// radius must not exceed epsilon_gap(x), which keeps samples increasing.
inline bool local_constancy_probe(const Selector& sel, std::span<const double> x, double radius,
                                  std::uint64_t trials, std::uint64_t seed) {
    require_increasing(x);
    const double gap = epsilon_gap(x);
    if (radius > gap) throw Error("probe radius exceeds the epsilon gap");
    const std::size_t base = drop_index(sel, x);
    SplitMix64 g(seed);
    std::vector<double> y(x.size());
    for (std::uint64_t t = 0; t < trials; ++t) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double lo = std::max(0.0, x[i] - radius);
            const double hi = std::min(1.0, x[i] + radius);
            y[i] = lo + (hi - lo) * g.next_double();
        }
        if (drop_index(sel, y) != base) return false;
    }
    return true;
}

/// K distinct points sharing sel(x)'s image, produced by sweeping the dropped
/// coordinate across its safe interval with everything else fixed — the
/// explicit finite witness that the fiber keeps growing. A point whose image
/// moves beyond tolerance raises ImageDrift: the selector is not locally
/// constant on the sweep (the discontinuous control trips this).
inline std::vector<std::vector<double>> fiber_sampler(const Selector& sel,
                                                      std::span<const double> x, std::uint64_t K) {
    require_increasing(x);
    const std::size_t i = drop_index(sel, x);
    const std::vector<double> image = sel.rule(x);
    const double lo = (i == 0 ? 0.0 : x[i - 1]) + 3 * kTolerance;
    const double hi = (i + 1 == x.size() ? 1.0 : x[i + 1]) - 3 * kTolerance;
    if (!(lo < hi)) throw Error("no safe interval to vary the dropped coordinate");

    std::vector<std::vector<double>> points;
    points.reserve(K);
    std::vector<double> y(x.begin(), x.end());
    for (std::uint64_t j = 0; j < K; ++j) {
        y[i] = lo + (hi - lo) * (static_cast<double>(j) + 1.0) / (static_cast<double>(K) + 1.0);
        const std::vector<double> img = sel.rule(y);
        if (img.size() != image.size()) throw ImageDrift(y);
        for (std::size_t c = 0; c < img.size(); ++c)
            if (std::abs(img[c] - image[c]) > kTolerance) throw ImageDrift(y);
        points.push_back(y);
    }
    return points;
}

/// Aggregate record of one probed point.
struct ProbeReport {
    std::string selector;
    int m = 0;
    std::vector<double> x;
    double epsilon_gap = 0.0;
    std::size_t drop_index = 0;
    bool locally_constant = false;
    std::uint64_t witnesses_count = 0;
    std::uint64_t seed = 0;
};

/// Runs the full probe at one point: gap, dropped index, local constancy over
/// the epsilon ball, and the fiber sweep. ImageDrift propagates to the caller.
inline ProbeReport probe_point(const Selector& sel, std::span<const double> x,
                               std::uint64_t trials, std::uint64_t witnesses, std::uint64_t seed) {
    ProbeReport r;
    r.selector = sel.name;
    r.m = static_cast<int>(x.size()) - 1;
    r.x.assign(x.begin(), x.end());
    r.seed = seed;
    r.epsilon_gap = epsilon_gap(x);
    r.drop_index = drop_index(sel, x);
    r.locally_constant = local_constancy_probe(sel, x, r.epsilon_gap, trials, seed);
    r.witnesses_count = fiber_sampler(sel, x, witnesses).size();
    return r;
}

/// Deterministic strictly increasing probe point in [0,1]^(m+1) with healthy
/// gaps (at least ~1/(4(m+1)) apart), derived from the seed.
inline std::vector<double> random_probe_point(int m, std::uint64_t seed) {
    const std::size_t count = static_cast<std::size_t>(m) + 1;
    SplitMix64 g(mix_seed(seed, 0xf1be5));
    std::vector<double> x(count);
    // jittered grid: cell i gets a point in its middle half
    for (std::size_t i = 0; i < count; ++i) {
        const double cell = 1.0 / static_cast<double>(count);
        x[i] = (static_cast<double>(i) + 0.25 + 0.5 * g.next_double()) * cell;
    }
    return x;
}

} // namespace fiberprobe
} // namespace schemelab
