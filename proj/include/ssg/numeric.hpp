#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace ssg {

using Integer = mpz_class;
using Rational = mpq_class;
using i64 = std::int64_t;

/// "n" for integers, "n/d" otherwise.
std::string to_string(const Rational& x);
std::string to_string(const Integer& x);
Rational parse_rational(std::string_view s);
Integer parse_integer(std::string_view s);

/// n/d in lowest terms (mpq_class(n, d) leaves the fraction unreduced).
Rational ratio(const Integer& n, const Integer& d);

bool is_prime(long n);

/// Exact square root of a non-negative rational, if it is a square.
bool exact_sqrt(const Rational& x, Rational& root);

}  // namespace ssg
