#pragma once

// Brandt matrices B_g(n), in the hermitian formulation for every g and the
// classical right-ideal formulation for g = 1.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssg/hermitian.hpp"

namespace ssg {

using RationalMatrix = std::vector<std::vector<Rational>>;

struct BrandtMatrix {
  long p = 0;
  std::size_t g = 0;
  i64 n = 0;
  RationalMatrix m;
  std::vector<std::size_t> e;
  std::string fingerprint;  // of the class set it was computed against

  std::size_t h() const { return m.size(); }
};

/// prod_{k=1..g} (ell^k + 1)
Integer isotropic_count(i64 ell, std::size_t g);

/// Entry (i, j) = #{M : M^dagger H_i M = n H_j} / e_j. For g >= 2, n must be
/// a prime different from p. Throws std::logic_error on a non-exact division.
BrandtMatrix brandt_matrix(const PolarizedClassSet& classes, i64 n, unsigned jobs = 1);
/// Column j constant 1/e_j.
BrandtMatrix brandt_zero(const PolarizedClassSet& classes);

/// Short fingerprint of a class set (p, g and the e / theta invariants).
std::string class_set_fingerprint(const PolarizedClassSet& classes);

struct RightIdeal {
  std::array<Quaternion, 4> basis;
  Rational norm;
};

/// Right ideal with the given generators (Z-spanning set of quaternions).
RightIdeal ideal_from_generators(const MaximalOrder& o, const std::vector<Quaternion>& gens);
/// Right O-ideal classes by ell-neighbour search from O.
std::vector<RightIdeal> ideal_classes(const MaximalOrder& o, long ell);
/// I ~ J: some lambda with lambda I = J.
bool ideals_equivalent(const MaximalOrder& o, const RightIdeal& i, const RightIdeal& j);
/// #{beta in I Jbar : Nm(beta) = n Nm(I) Nm(J)}
std::size_t ideal_pair_count(const MaximalOrder& o, const RightIdeal& i, const RightIdeal& j, i64 n);

/// Classical B(n)_{ij} = #{lambda in I_i I_j^{-1} : Nm(lambda) = n Nm(I_i)/Nm(I_j)} / e(j),
/// over the classes returned by ideal_classes(o, ell).
BrandtMatrix brandt_g1_classical(long p, i64 n, long ell);
BrandtMatrix brandt_g1_classical(const MaximalOrder& o, const std::vector<RightIdeal>& ideals, i64 n);

struct RowSumReport {
  bool ok = false;
  Integer expected;
  std::vector<Rational> sums;
};
RowSumReport row_sum_check(const BrandtMatrix& b);

/// diag(e)^{-1} B is symmetric.
bool weighted_symmetric(const BrandtMatrix& b);

/// A permutation s with a[s[i]][s[j]] == b[i][j] for all i, j, if any.
std::optional<std::vector<std::size_t>> permutation_similarity(const RationalMatrix& a, const RationalMatrix& b);

RationalMatrix multiply(const RationalMatrix& a, const RationalMatrix& b);

nlohmann::json to_json(const BrandtMatrix& b);
std::string to_csv(const BrandtMatrix& b);

}  // namespace ssg
