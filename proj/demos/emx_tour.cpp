// Tour of the learning side: the rank learner, exact and Monte-Carlo
// evaluation of the (1/3,1/3) criterion, and the learner -> scheme -> learner
// round trip.

#include <iostream>

#include "schemelab/emx.hpp"

using namespace schemelab;

int main() {
    const Learner rank = rank_learner();
    const FiniteSupportDistribution uniform5 = FiniteSupportDistribution::uniform(5);

    const EMXReport exact = eval_exact(rank, uniform5, 3, Rational(1, 3), Rational(1, 3));
    std::cout << "exact failure probability: " << rational_to_string(exact.failure_probability)
              << " satisfied=" << exact.satisfied << "\n";

    const EMXReport mc = eval_mc(rank, uniform5, 3, Rational(1, 3), Rational(1, 3), 200000, 42);
    std::cout << "mc estimate: " << mc.estimate << " +- " << mc.half_width << "\n";

    // Lemma-style extraction: d=3 gives a 6->5 scheme.
    const CompressionScheme derived = scheme_from_learner(rank, 3);
    const SchemeReport report = verify_scheme(derived, OrderedGround::naturals(16));
    std::cout << derived.m << "->" << derived.d << " scheme on n=16: monotone=" << report.monotone_ok
              << " cover=" << report.cover_ok << " max_fiber=" << report.max_fiber << "\n";

    // And back: the learner induced by the max scheme is the rank learner.
    const Learner back = learner_from_scheme(max_scheme());
    const Rank sample[3] = {2, 7, 3};
    std::cout << "learner_from_scheme(max) on (2,7,3): {";
    for (Rank r : back.rule(sample).elements()) std::cout << r << " ";
    std::cout << "}\n";
    return 0;
}
