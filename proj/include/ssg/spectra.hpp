#pragma once

// Exact characteristic polynomials, real-root isolation and the
// Ramanujan-bound report for row-regular matrices.

#include <string>
#include <vector>

#include <json.hpp>

#include "ssg/brandt.hpp"

namespace ssg {

/// Coefficients, lowest degree first.
using Polynomial = std::vector<Rational>;

/// det(x I - M), monic, exact.
Polynomial char_poly(const RationalMatrix& m);
Rational evaluate(const Polynomial& f, const Rational& x);
std::string to_string(const Polynomial& f);

struct RootInterval {
  Rational lo, hi;  // lo == hi for exact roots
  std::size_t multiplicity = 1;
  bool exact() const { return lo == hi; }
};

/// Real roots with multiplicities, increasing, isolated to width <= 2^-30
/// (rational roots exact). Throws std::domain_error if f has non-real roots.
std::vector<RootInterval> real_roots(const Polynomial& f);
std::vector<RootInterval> eigenvalues(const RationalMatrix& m);

struct EigenVerdict {
  RootInterval value;
  bool trivial = false;
  bool within_bound = false;
};

struct SpectralReport {
  std::string fingerprint;
  Polynomial charpoly;
  Rational k;  // the constant row sum
  bool bipartite = false;
  std::string bound;  // description of the bound that was checked
  std::vector<EigenVerdict> eigen;
  bool ramanujan = true;
};

/// `m` must have constant row sum k. Every eigenvalue except one copy of k
/// (and one copy of -k when bipartite) is compared against 2 sqrt(k-1).
/// Throws std::invalid_argument for non-constant row sums.
SpectralReport ramanujan_report(const RationalMatrix& m, bool bipartite = false);

nlohmann::json to_json(const RootInterval& r);
nlohmann::json to_json(const SpectralReport& r);

}  // namespace ssg
