#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>

#include "hhpsi/errors.hpp"

namespace hhpsi {

/// Exact rational scalar.  All regime decisions (sign tests, degeneracy
/// tests, perfect-square tests) are made on this type; floating point only
/// enters once coefficients are actually computed.
using Rational = mpq_class;

/// Parse "p", "-p/q" or a plain decimal like "0.25" / "-1.5e-2" into an
/// exact rational.  On failure throws invalid_input with the byte offset of
/// the offending character in the message.
Rational parse_rational(std::string_view text);

/// Render canonically as "p" or "p/q".
std::string to_string(const Rational& q);

double to_double(const Rational& q);

/// True iff q is the square of a rational (q >= 0 and both canonical
/// numerator and denominator are perfect squares).
bool is_perfect_square(const Rational& q);

/// Exact square root of a perfect-square rational.
Rational exact_sqrt(const Rational& q);

inline int sign(const Rational& q) { return sgn(q); }

} // namespace hhpsi
