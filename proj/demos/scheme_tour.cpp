// Tour of the combinatorial side: the max scheme, its verification report,
// the reduction to a 1->0 map whose fiber must absorb everything, and a
// Kuratowski decomposition turned into a 3->2 scheme.

#include <iostream>

#include "schemelab/kuratowski.hpp"
#include "schemelab/scheme.hpp"

using namespace schemelab;

int main() {
    // The 2->1 scheme on the naturals: sigma = max, eta(n) = {0..n}.
    const CompressionScheme max = max_scheme();
    const SchemeReport report = verify_scheme(max, OrderedGround::naturals(40));
    std::cout << "max scheme on n=40: monotone=" << report.monotone_ok
              << " cover=" << report.cover_ok << " max_fiber=" << report.max_fiber << "\n";

    // Reduce it: the resulting 1->0 map sends every singleton to the empty
    // set, so its single fiber grows with the ground - the finite shadow of
    // "there is no 1->0 scheme on an infinite set".
    const ReduceResult red = reduce_scheme(max, OrderedGround::naturals(40), 12);
    std::cout << "reduced at delta=" << red.delta << "; sigma'({3}) = {";
    for (Rank r : red.reduced.sigma(monotone_enum({3})).elements()) std::cout << r << " ";
    std::cout << "}\n";

    const auto audit = fiber_growth_audit(
        [](Rank n) { return reduce_scheme(max_scheme(), OrderedGround::naturals(2 * n), n).reduced; },
        {8, 16, 32});
    for (const auto& row : audit)
        std::cout << "  audit n=" << row.n << " max_fiber=" << row.max_fiber
                  << (row.stable_vs_prev ? (*row.stable_vs_prev ? " (stable)" : " (growing)") : "")
                  << "\n";

    // A level-1 decomposition of 10^3 and the 3->2 scheme it induces.
    const Decomposition d = build_decomposition(1, 10);
    const DecompositionReport dr = check_decomposition(d, 15);
    std::cout << "decomposition k=1 n=10: partition=" << dr.partition_ok
              << " stable=" << *dr.truncation_stable << "\n";
    const CompressionScheme from_d = scheme_from_decomposition(d);
    const SchemeReport dres = verify_scheme(from_d, OrderedGround::naturals(10));
    std::cout << "induced 3->2 scheme: monotone=" << dres.monotone_ok
              << " cover=" << dres.cover_ok << " max_fiber=" << dres.max_fiber << "\n";
    return 0;
}
