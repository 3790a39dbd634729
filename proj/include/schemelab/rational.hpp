#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>

#include "schemelab/errors.hpp"

// Exact rational arithmetic. All probability computation in exact mode runs on
// Rational; floating point appears only in Monte-Carlo estimates. Interchange
// format is the "num/den" string, never a decimal.

namespace schemelab {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Canonical "num/den" form, denominator always present and positive: "27/125", "1/1", "0/1".
inline std::string rational_to_string(const Rational& r) {
    return numerator(r).str() + "/" + denominator(r).str();
}

/// Accepts "num/den" or a bare integer "num". Normalizes (this is plain
/// arithmetic input, not the reduced-fraction contract of rank_rational).
inline Rational parse_rational(const std::string& s) {
    const auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(BigInt(s));
        BigInt num(s.substr(0, slash));
        BigInt den(s.substr(slash + 1));
        if (den == 0) throw SchemaError("rational with zero denominator: " + s);
        return Rational(num, den);
    } catch (const std::runtime_error& e) {
        throw SchemaError("malformed rational '" + s + "': " + e.what());
    }
}

} // namespace schemelab
