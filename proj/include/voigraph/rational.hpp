#pragma once

#include <gmpxx.h>

#include <string>

#include "voigraph/errors.hpp"

namespace voigraph {

// All probability and utility arithmetic is exact; no floating point in
// semantics. "p/q" strings are the serialization contract.
using Rational = mpq_class;
using BigInt = mpz_class;

inline Rational rat(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline Rational parse_rational(const std::string& s) {
  try {
    Rational r(s);
    r.canonicalize();
    return r;
  } catch (const std::invalid_argument&) {
    fail(ErrorCode::SchemaError, "bad rational literal: " + s);
  }
}

inline std::string rational_str(const Rational& r) { return r.get_str(); }

// Decimal approximation appended to reports for readability only.
inline double rational_approx(const Rational& r) { return r.get_d(); }

}  // namespace voigraph
