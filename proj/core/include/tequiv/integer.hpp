#pragma once

#include <cstdint>
#include <limits>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace tequiv {

// Lattice coefficients grow like 2^rank in the large constructions, so all
// divisor arithmetic is done in arbitrary precision. Expression templates are
// off so that `auto` never captures a dangling expression.
using Int = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>, boost::multiprecision::et_off>;

inline Int pow2(unsigned e) {
    Int v = 1;
    v <<= e;
    return v;
}

inline bool is_even(const Int& v) { return (v & 1) == 0; }

inline bool fits_int64(const Int& v) {
    return v >= std::numeric_limits<std::int64_t>::min() &&
           v <= std::numeric_limits<std::int64_t>::max();
}

inline std::string to_string(const Int& v) { return v.str(); }

// Exact division; the caller has already established divisibility.
inline Int exact_div(const Int& num, const Int& den) {
    Int q, r;
    boost::multiprecision::divide_qr(num, den, q, r);
    return q;
}

// Floor and ceiling of num / den for den > 0.
inline Int floor_div(const Int& num, const Int& den) {
    Int q, r;
    boost::multiprecision::divide_qr(num, den, q, r);
    if (r < 0) --q;
    return q;
}

inline Int ceil_div(const Int& num, const Int& den) { return -floor_div(-num, den); }

inline bool divides(const Int& den, const Int& num) {
    Int q, r;
    boost::multiprecision::divide_qr(num, den, q, r);
    return r == 0;
}

}  // namespace tequiv
