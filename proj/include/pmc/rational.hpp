#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace pmc {

// Arbitrary-precision rational, always canonical (reduced, positive denominator).
// All exact probabilities in the core semantics and the qualitative analyses
// are carried in this type; floats appear only behind the numeric-policy
// fallbacks and in the quantitative solvers.
using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(std::int64_t num, std::int64_t den) {
    return Rational(Integer(num), Integer(den));
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline std::string num_string(const Rational& r) { return numerator(r).str(); }
inline std::string den_string(const Rational& r) { return denominator(r).str(); }

inline std::string to_string(const Rational& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

} // namespace pmc
