#pragma once

#include <algorithm>
#include <boost/math/distributions/binomial.hpp>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "schemelab/ground.hpp"
#include "schemelab/parallel.hpp"
#include "schemelab/prng.hpp"
#include "schemelab/rational.hpp"
#include "schemelab/scheme.hpp"

// The learning side. A learner maps finite sample tuples to finite sets; the
// (epsilon,delta) criterion asks that, for every finite-support distribution P
// and samples S ~ P^d, the probability of E_P(G(S)) <= Opt(P) - epsilon is at
// most delta. Over the family of all finite sets Opt(P) = 1. Evaluation is
// exact (full tuple enumeration with rational arithmetic) or Monte-Carlo
// (seeded, with an exact Clopper-Pearson 95% interval). The translations
// between learners and (m+1)->m schemes live here too.

namespace schemelab {

// ---------------------------------------------------------------------------
// Distributions

struct Atom {
    Rank rank = 0;
    Rational p;
};

/// Support points with exact positive probabilities summing to 1, kept sorted
/// by rank. Immutable after construction.
class FiniteSupportDistribution {
public:
    explicit FiniteSupportDistribution(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
        if (atoms_.empty()) throw Error("distribution needs at least one atom");
        std::sort(atoms_.begin(), atoms_.end(),
                  [](const Atom& a, const Atom& b) { return a.rank < b.rank; });
        Rational total = 0;
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            if (atoms_[i].p <= 0) throw Error("atom probability must be positive");
            if (i > 0 && atoms_[i].rank == atoms_[i - 1].rank)
                throw DuplicateElement(atoms_[i].rank);
            if (atoms_[i].rank < 0) throw Error("atom rank must be non-negative");
            total += atoms_[i].p;
        }
        if (total != 1) throw Error("atom probabilities must sum to 1, got " + rational_to_string(total));
    }

    static FiniteSupportDistribution uniform(Rank support_size, Rank first_rank = 0) {
        std::vector<Atom> atoms;
        for (Rank i = 0; i < support_size; ++i)
            atoms.push_back({first_rank + i, Rational(1, support_size)});
        return FiniteSupportDistribution(std::move(atoms));
    }

    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t support_size() const { return atoms_.size(); }

private:
    std::vector<Atom> atoms_;
};

/// E_P(F): the exact P-measure of a finite set.
inline Rational measure(const FiniteSupportDistribution& dist, const FinSet& f) {
    Rational sum = 0;
    for (const Atom& a : dist.atoms())
        if (f.contains(a.rank)) sum += a.p;
    return sum;
}

/// Opt(P) over the family of all finite sets: the support itself is a member,
/// so the supremum is 1.
inline Rational opt(const FiniteSupportDistribution&) { return Rational(1); }

// ---------------------------------------------------------------------------
// Learners

/// A total rule from finite sample tuples (order and repeats allowed) to
/// finite sets over the ground.
struct Learner {
    std::string descriptor;
    std::function<FinSet(std::span<const Rank>)> rule;
};

/// The learner induced by the 2->1 scheme on the naturals: output the initial
/// segment of the ground order up to the largest sampled rank. On a
/// rationals-ranked ground the result unranks to a finite set of rationals.
inline Learner rank_learner() {
    Learner g;
    g.descriptor = "rank";
    g.rule = [](std::span<const Rank> sample) {
        if (sample.empty()) throw EmptySample();
        const Rank top = *std::max_element(sample.begin(), sample.end());
        std::vector<Rank> seg(static_cast<std::size_t>(top) + 1);
        std::iota(seg.begin(), seg.end(), Rank{0});
        return FinSet::from_increasing(std::move(seg));
    };
    return g;
}

// ---------------------------------------------------------------------------
// Evaluation of the (epsilon, delta) criterion

struct EMXReport {
    enum class Mode { exact, mc };
    Mode mode = Mode::exact;
    int d = 0;
    Rational epsilon;
    Rational delta;
    bool satisfied = false;

    // exact mode
    Rational failure_probability;

    // mc mode
    double estimate = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double half_width = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
};

inline constexpr std::uint64_t kDefaultEnumerationBudget = 1'000'000;

/// Exact failure probability by enumerating all |support|^d sample tuples with
/// their product probabilities. The failure event uses the non-strict
/// comparison E_P(G(S)) <= Opt(P) - epsilon; `satisfied` uses failure <= delta.
/// Partial sums are exact rationals, so partitioned enumeration merges to the
/// same result regardless of the chunking.
inline EMXReport eval_exact(const Learner& learner, const FiniteSupportDistribution& dist, int d,
                            const Rational& epsilon, const Rational& delta, int jobs = 1,
                            std::uint64_t budget = kDefaultEnumerationBudget) {
    if (d < 1) throw Error("eval_exact: d must be at least 1");
    const std::uint64_t s = dist.support_size();
    unsigned __int128 tuples = 1;
    for (int i = 0; i < d && tuples <= budget; ++i) tuples *= s;
    if (tuples > budget)
        throw BudgetExceeded(static_cast<std::uint64_t>(std::min<unsigned __int128>(
                                 tuples, std::numeric_limits<std::uint64_t>::max())),
                             budget);
    const std::uint64_t need = static_cast<std::uint64_t>(tuples);

    const Rational threshold = opt(dist) - epsilon;
    auto chunk = [&](std::uint64_t begin, std::uint64_t end) {
        Rational sum = 0;
        std::vector<Rank> sample(static_cast<std::size_t>(d));
        for (std::uint64_t idx = begin; idx < end; ++idx) {
            std::uint64_t rest = idx;
            Rational prob = 1;
            for (int i = d - 1; i >= 0; --i) {
                const Atom& a = dist.atoms()[static_cast<std::size_t>(rest % s)];
                rest /= s;
                sample[static_cast<std::size_t>(i)] = a.rank;
                prob *= a.p;
            }
            if (measure(dist, learner.rule(sample)) <= threshold) sum += prob;
        }
        return sum;
    };
    const Rational failure = run_chunked<Rational>(
        need, jobs, chunk, [](Rational& acc, Rational&& part) { acc += part; });

    EMXReport report;
    report.mode = EMXReport::Mode::exact;
    report.d = d;
    report.epsilon = epsilon;
    report.delta = delta;
    report.failure_probability = failure;
    report.satisfied = failure <= delta;
    return report;
}

namespace detail {

/// Inverse-CDF sampler: atom thresholds are floor(cdf * 2^64), so one uniform
/// 64-bit draw selects an atom with error below 2^-64.
class AtomSampler {
public:
    explicit AtomSampler(const FiniteSupportDistribution& dist) : atoms_(&dist.atoms()) {
        Rational cdf = 0;
        const BigInt two64 = BigInt(1) << 64;
        for (std::size_t i = 0; i + 1 < atoms_->size(); ++i) {
            cdf += (*atoms_)[i].p;
            const BigInt scaled = (numerator(cdf) * two64) / denominator(cdf);
            thresholds_.push_back(scaled.convert_to<std::uint64_t>());
        }
    }

    Rank draw(SplitMix64& g) const {
        const std::uint64_t r = g.next();
        std::size_t i = 0;
        while (i < thresholds_.size() && r >= thresholds_[i]) ++i;
        return (*atoms_)[i].rank;
    }

private:
    const std::vector<Atom>* atoms_;
    std::vector<std::uint64_t> thresholds_;
};

} // namespace detail

/// Monte-Carlo estimate over `trials` i.i.d. samples S ~ P^d. Each trial draws
/// from its own splitmix64 stream seeded by mix(seed, trial_index), so results
/// do not depend on how trials are partitioned across workers. The interval is
/// the exact 95% Clopper-Pearson bound; `satisfied` compares the estimate.
inline EMXReport eval_mc(const Learner& learner, const FiniteSupportDistribution& dist, int d,
                         const Rational& epsilon, const Rational& delta, std::uint64_t trials,
                         std::uint64_t seed, int jobs = 1) {
    if (d < 1) throw Error("eval_mc: d must be at least 1");
    if (trials < 1) throw Error("eval_mc: trials must be at least 1");
    const detail::AtomSampler sampler(dist);
    const Rational threshold = opt(dist) - epsilon;

    auto chunk = [&](std::uint64_t begin, std::uint64_t end) {
        std::uint64_t failures = 0;
        std::vector<Rank> sample(static_cast<std::size_t>(d));
        for (std::uint64_t t = begin; t < end; ++t) {
            SplitMix64 g(mix_seed(seed, t));
            for (int i = 0; i < d; ++i) sample[static_cast<std::size_t>(i)] = sampler.draw(g);
            if (measure(dist, learner.rule(sample)) <= threshold) ++failures;
        }
        return failures;
    };
    const std::uint64_t failures = run_chunked<std::uint64_t>(
        trials, jobs, chunk, [](std::uint64_t& acc, std::uint64_t&& part) { acc += part; });

    EMXReport report;
    report.mode = EMXReport::Mode::mc;
    report.d = d;
    report.epsilon = epsilon;
    report.delta = delta;
    report.trials = trials;
    report.seed = seed;
    report.estimate = static_cast<double>(failures) / static_cast<double>(trials);
    using binom = boost::math::binomial_distribution<double>;
    report.ci_low = binom::find_lower_bound_on_p(static_cast<double>(trials),
                                                 static_cast<double>(failures), 0.025);
    report.ci_high = binom::find_upper_bound_on_p(static_cast<double>(trials),
                                                  static_cast<double>(failures), 0.025);
    report.half_width = std::max(report.estimate - report.ci_low, report.ci_high - report.estimate);
    report.satisfied = Rational(failures, trials) <= delta;
    return report;
}

// ---------------------------------------------------------------------------
// Learner -> scheme (the necessity construction)

/// The (m+1)->m scheme extracted from a learner with sample size d, with
/// m = ceil(3d/2): eta(B) is the union of G(T) over the d-element subsets T of
/// B, and sigma(A) is the lexicographically least m-subset B of A with
/// A within eta(B). Throws NoCompressingSubset when no subset works — the
/// learner then lacks the property the construction extracts.
inline CompressionScheme scheme_from_learner(const Learner& learner, int d) {
    if (d < 1) throw Error("scheme_from_learner: d must be at least 1");
    const int m = (3 * d + 1) / 2; // ceil(3d/2)
    auto rule = std::make_shared<Learner>(learner);

    auto eta_of = [rule, d](const FinSet& b) {
        FinSet hull;
        for_each_k_subset_of(b, d, [&](const FinSet& t) { hull = hull.united(rule->rule(t.elements())); });
        return hull;
    };

    CompressionScheme s;
    s.m = m + 1;
    s.d = m;
    s.name = "from-learner(" + learner.descriptor + ",d=" + std::to_string(d) + ")";
    s.eta = eta_of;
    s.sigma = [eta_of, m](const FinSet& a) {
        FinSet best;
        bool found = false;
        for_each_k_subset_of(a, m, [&](const FinSet& b) {
            if (found) return;
            if (a.subset_of(eta_of(b))) {
                best = b;
                found = true;
            }
        });
        if (!found) throw NoCompressingSubset(std::vector<Rank>(a.elements().begin(), a.elements().end()));
        return best;
    };
    return s;
}

// ---------------------------------------------------------------------------
// Scheme -> learner (plumbing for the converse direction)

/// The learner induced by an (m+1)->m scheme with eta: the distinct sample
/// elements are iteratively compressed — the lexicographically least
/// (m+1)-subset is replaced by its sigma-image — until at most m remain, then
/// padded with the smallest absent ground elements up to size m, and eta of
/// the result is returned. For the max scheme this reduces to the rank
/// learner.
inline Learner learner_from_scheme(const CompressionScheme& scheme) {
    validate_arities(scheme);
    if (!scheme.has_eta()) throw Error("learner_from_scheme: scheme must carry eta");
    if (scheme.m != scheme.d + 1) throw Error("learner_from_scheme: scheme must be (m+1)->m");
    const int m = scheme.d;
    auto shared = std::make_shared<CompressionScheme>(scheme);

    Learner g;
    g.descriptor = "from-scheme(" + scheme.name + ")";
    g.rule = [shared, m](std::span<const Rank> sample) {
        if (sample.empty()) throw EmptySample();
        std::vector<Rank> distinct(sample.begin(), sample.end());
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        FinSet a = FinSet::from_increasing(std::move(distinct));
        while (a.size() > static_cast<std::size_t>(m)) {
            std::vector<Rank> head(a.elements().begin(),
                                   a.elements().begin() + static_cast<std::ptrdiff_t>(m) + 1);
            const FinSet t = FinSet::from_increasing(std::move(head));
            a = a.minus(t).united(shared->sigma(t));
        }
        for (Rank fill = 0; a.size() < static_cast<std::size_t>(m); ++fill)
            if (!a.contains(fill)) a = a.with_inserted(fill);
        return shared->eta(a);
    };
    return g;
}

} // namespace schemelab
