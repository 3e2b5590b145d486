#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>

#include "blocklie/error.hpp"

namespace blocklie {

// mpq_class keeps itself canonical after every arithmetic operation:
// gcd(|num|, den) = 1, den > 0, zero is 0/1.
using Rational = mpq_class;
using Integer = mpz_class;

inline Rational rat(std::int64_t v) { return Rational(static_cast<long>(v)); }

inline Rational rat(std::int64_t num, std::int64_t den)
{
    if (den == 0)
        throw UsageError("rational with zero denominator");
    Rational r(static_cast<long>(num), static_cast<long>(den));
    r.canonicalize();
    return r;
}

inline bool is_zero(const Rational& r) { return sgn(r) == 0; }

inline bool is_integer(const Rational& r) { return r.get_den() == 1; }

/// "p/q", or "p" when q = 1.
inline std::string to_string(const Rational& r) { return r.get_str(); }

inline Rational parse_rational(std::string_view text, const std::string& field = "rational")
{
    std::string s(text);
    auto bad = [&]() { return ParseError(field, "expected rational \"p/q\" or \"p\", got \"" + s + "\""); };
    if (s.empty())
        throw bad();
    std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    bool seen_slash = false;
    bool digit_before = false, digit_after = false;
    for (std::size_t i = start; i < s.size(); ++i) {
        char c = s[i];
        if (c == '/') {
            if (seen_slash)
                throw bad();
            seen_slash = true;
        } else if (c >= '0' && c <= '9') {
            (seen_slash ? digit_after : digit_before) = true;
        } else {
            throw bad();
        }
    }
    if (!digit_before || (seen_slash && !digit_after))
        throw bad();
    if (s[0] == '+')
        s.erase(0, 1);
    Rational r;
    if (r.set_str(s, 10) != 0)
        throw bad();
    if (r.get_den() == 0)
        throw ParseError(field, "zero denominator in \"" + s + "\"");
    r.canonicalize();
    return r;
}

inline std::int64_t to_int64(const Rational& r)
{
    if (!is_integer(r) || !r.get_num().fits_slong_p())
        throw UsageError("rational " + to_string(r) + " is not a machine integer");
    return r.get_num().get_si();
}

} // namespace blocklie
