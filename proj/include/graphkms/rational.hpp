#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cctype>
#include <string>
#include <string_view>

#include "graphkms/errors.hpp"

namespace graphkms {

/** Exact rational scalar used for every weight, matrix entry and parameter. */
using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

/**
 * Parses "p", "-p" or "p/q" with decimal integers. The result is reduced.
 * Throws InvalidParameter on malformed text or a zero denominator.
 */
inline Rational parse_rational(std::string_view text)
{
    auto is_integer = [](std::string_view s) {
        if (!s.empty() && (s.front() == '-' || s.front() == '+'))
            s.remove_prefix(1);
        if (s.empty())
            return false;
        for (char c : s)
            if (!std::isdigit(static_cast<unsigned char>(c)))
                return false;
        return true;
    };
    const auto slash = text.find('/');
    const std::string_view num = text.substr(0, slash);
    const std::string_view den = slash == std::string_view::npos ? std::string_view{"1"} : text.substr(slash + 1);
    if (!is_integer(num) || !is_integer(den) || den.front() == '-' || den.front() == '+')
        throw InvalidParameter("malformed rational '" + std::string(text) + "'");
    Integer n(std::string(num.front() == '+' ? num.substr(1) : num));
    Integer d{std::string(den)};
    if (d == 0)
        throw InvalidParameter("zero denominator in '" + std::string(text) + "'");
    return Rational(n, d);
}

/** Canonical text form: "p" for integers, "p/q" otherwise (always reduced). */
inline std::string format_rational(const Rational& value)
{
    return value.str();
}

inline double to_double(const Rational& value)
{
    return value.convert_to<double>();
}

} // namespace graphkms
