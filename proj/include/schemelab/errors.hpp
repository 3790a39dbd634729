#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

// Error taxonomy. Every condition a caller can sensibly react to gets its own
// type; witnesses (the offending set / point) ride along where the condition
// has one. Structural misuse throws; verified-false outcomes are reported in
// the report structs instead (see scheme.hpp / kuratowski.hpp).

namespace schemelab {

using Rank = std::int64_t;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ground
struct DuplicateElement : Error {
    explicit DuplicateElement(Rank r)
        : Error("duplicate element in set input: " + std::to_string(r)), element(r) {}
    Rank element;
};
struct NotReduced : Error {
    NotReduced(std::int64_t num, std::int64_t den)
        : Error("fraction not in lowest terms: " + std::to_string(num) + "/" + std::to_string(den)) {}
};
struct KTooLarge : Error {
    KTooLarge(Rank n, int k)
        : Error("k-subsets requested with k=" + std::to_string(k) + " > ground size n=" + std::to_string(n)) {}
};

// schemes
struct GroundExhausted : Error {
    explicit GroundExhausted(Rank bound)
        : Error("reduction chain escapes the finite ground (needs delta >= " + std::to_string(bound) + ")") {}
};
struct DeltaNotSelected : Error {
    explicit DeltaNotSelected(std::vector<Rank> x)
        : Error("sigma(x u {delta}) omits delta; the truncation broke the reduction dichotomy"),
          witness(std::move(x)) {}
    std::vector<Rank> witness;
};

// kuratowski
struct ChooserMissing : Error {
    explicit ChooserMissing(Rank alpha)
        : Error("no lower-level decomposition supplied for ordinal " + std::to_string(alpha)), alpha(alpha) {}
    Rank alpha;
};
struct NotPartition : Error {
    explicit NotPartition(std::vector<Rank> p)
        : Error("point is not in exactly one part"), point(std::move(p)) {}
    std::vector<Rank> point;
};

// emx
struct EmptySample : Error {
    EmptySample() : Error("learner invoked on an empty sample") {}
};
struct BudgetExceeded : Error {
    BudgetExceeded(std::uint64_t need, std::uint64_t budget)
        : Error("exact enumeration needs " + std::to_string(need) + " tuples, budget is " +
                std::to_string(budget)) {}
};
struct NoCompressingSubset : Error {
    explicit NoCompressingSubset(std::vector<Rank> a)
        : Error("no m-subset B of A satisfies A <= eta(B); the learner lacks the compression property"),
          witness(std::move(a)) {}
    std::vector<Rank> witness;
};

// fiberprobe
struct DegenerateGap : Error {
    DegenerateGap() : Error("two coordinates coincide within tolerance; epsilon gap undefined") {}
};
struct NotSubtuple : Error {
    NotSubtuple() : Error("selector output does not match any sub-tuple of the input") {}
};
struct AmbiguousDrop : Error {
    AmbiguousDrop() : Error("dropped coordinate is not unique within tolerance") {}
};
struct ImageDrift : Error {
    explicit ImageDrift(std::vector<double> p)
        : Error("sampled point's image differs beyond tolerance (selector not locally constant)"),
          point(std::move(p)) {}
    std::vector<double> point;
};

// file/CLI surface
struct SchemaError : Error {
    using Error::Error;
};

} // namespace schemelab
