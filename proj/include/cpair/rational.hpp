#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <sstream>
#include <stdexcept>
#include <string>

namespace cpair {

/// Thrown on contract violations: bad input data, chart mismatches,
/// expressions leaving the trig-polynomial class, and so on.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Integer  = boost::multiprecision::cpp_int;
// Always stored in lowest terms with positive denominator.
using Rational = boost::multiprecision::cpp_rational;

inline Rational rational(long long num, long long den = 1) {
    if (den == 0) throw Error("rational: zero denominator");
    return Rational(num, den);
}

/// Parses "a", "-a" or "a/b" with integer a, b.
inline Rational parse_rational(const std::string& text) {
    std::string s = text;
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(Integer(s));
        Integer num(s.substr(0, slash));
        Integer den(s.substr(slash + 1));
        if (den == 0) throw Error("parse_rational: zero denominator in '" + text + "'");
        return Rational(num, den);
    } catch (const std::runtime_error&) {
        throw Error("parse_rational: cannot parse '" + text + "'");
    }
}

inline std::string to_string(const Rational& q) {
    std::ostringstream os;
    os << q;
    return os.str();
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline bool is_integer(const Rational& q) { return denominator(q) == 1; }

/// Largest integer <= q.
inline Integer rational_floor(const Rational& q) {
    Integer n = numerator(q), d = denominator(q);
    Integer t = n / d;
    if (n < 0 && t * d != n) --t;
    return t;
}

/// Reduces q modulo m (m > 0) into [0, m).
inline Rational rational_mod(const Rational& q, const Rational& m) {
    Rational r = q - m * Rational(rational_floor(q / m));
    if (r < 0) r += m;  // guard against edge rounding of floor
    if (r >= m) r -= m;
    return r;
}

}  // namespace cpair
