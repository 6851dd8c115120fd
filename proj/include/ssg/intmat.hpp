#pragma once

// Small dense integer matrices and the exact integer linear algebra the
// enumeration engines need: HNF, integer solving, mod-p row reduction.

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "ssg/numeric.hpp"

namespace ssg {

using IntVector = std::vector<i64>;

struct IntMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<i64> data;

  IntMatrix() = default;
  IntMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0) {}
  static IntMatrix identity(std::size_t n);
  static IntMatrix from_rows(const std::vector<IntVector>& rows);
  static IntMatrix from_columns(const std::vector<IntVector>& cols);

  i64& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  i64 operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  IntVector row(std::size_t r) const;
  IntVector column(std::size_t c) const;
  IntMatrix transpose() const;

  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;
  friend auto operator<=>(const IntMatrix& a, const IntMatrix& b) {
    if (auto c = a.rows <=> b.rows; c != 0) return c;
    if (auto c = a.cols <=> b.cols; c != 0) return c;
    return a.data <=> b.data;
  }
};

struct IntMatrixHash {
  std::size_t operator()(const IntMatrix& m) const noexcept;
};
struct IntVectorHash {
  std::size_t operator()(const IntVector& v) const noexcept;
};

i64 checked_add(i64 a, i64 b);
i64 checked_mul(i64 a, i64 b);

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
IntVector operator*(const IntMatrix& a, const IntVector& x);

/// x^T m y
i64 bilinear(const IntMatrix& m, const IntVector& x, const IntVector& y);

Integer determinant(const IntMatrix& m);

/// Row Hermite normal form of the lattice spanned by the rows (zero rows
/// dropped): echelon, positive pivots, entries above a pivot in [0, pivot).
std::vector<std::vector<Integer>> hnf_rows(std::vector<std::vector<Integer>> rows);

/// Integer solutions of A y = t as particular + kernel * z (kernel columns).
struct AffineSolution {
  IntVector particular;
  IntMatrix kernel;  // n x r
};
std::optional<AffineSolution> solve_integer_system(const IntMatrix& a, const IntVector& t);

/// True when the rows span a saturated sublattice of Z^n (the quotient is
/// torsion free). Rows must be linearly independent for a true result.
bool is_saturated(const IntMatrix& rows);
std::size_t rank(const IntMatrix& m);

/// Reduced row echelon form over F_prime with zero rows removed.
IntMatrix rref_mod(const IntMatrix& m, i64 prime);
i64 mod(i64 a, i64 m);
i64 inverse_mod(i64 a, i64 prime);

/// Exact inverse scaled by `scale`; throws std::domain_error when singular and
/// std::logic_error if scale * m^{-1} is not integral.
IntMatrix scaled_inverse(const IntMatrix& m, i64 scale);

}  // namespace ssg
