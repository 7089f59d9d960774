#ifndef RANJAC_RATIONAL_HPP
#define RANJAC_RATIONAL_HPP

#include <gmpxx.h>

#include <string>

namespace ranjac {

// Exact scalar. mpq_class keeps fractions reduced with positive denominator,
// which is also the canonical form the CLI prints.
using Rat = mpq_class;
using Int = mpz_class;

inline Rat rat(long num, long den = 1) {
  Rat q(num, den);
  q.canonicalize();
  return q;
}

std::string rat_str(const Rat& q);

// Parses "p", "-p" or "p/q"; throws Error(ParseError) on anything else.
Rat parse_rat(const std::string& s);

} // namespace ranjac

#endif
