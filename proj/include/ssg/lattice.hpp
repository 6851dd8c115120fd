#pragma once

// Integral positive-definite quadratic forms: short-vector enumeration and
// the column-by-column constrained search behind every counting routine.

#include <functional>
#include <span>
#include <vector>

#include "ssg/intmat.hpp"

namespace ssg {

/// Q(x) = x^T D x / 2 with D symmetric, even diagonal.
class GramForm {
 public:
  GramForm() = default;
  explicit GramForm(IntMatrix doubled);
  /// Q(x) = x^T g x.
  static GramForm from_gram(const IntMatrix& g);

  std::size_t dim() const { return doubled_.rows; }
  const IntMatrix& doubled() const { return doubled_; }
  i64 value(std::span<const i64> x) const;
  i64 pairing(std::span<const i64> x, std::span<const i64> y) const;  // x^T D y

  /// Exact check that all leading principal minors are positive.
  bool is_positive_definite() const;

 private:
  IntMatrix doubled_;
};

struct ShortVectorList {
  i64 value = 0;
  std::vector<IntVector> vectors;  // lexicographically sorted
};

/// All x with Q(x) == value.
ShortVectorList short_vectors(const GramForm& q, i64 value);
/// All nonzero x with Q(x) <= bound, sorted by (Q, lex).
std::vector<IntVector> vectors_up_to(const GramForm& q, i64 bound);

/// All y = offset + kernel z (z integral) with Q(y) == value. The kernel
/// columns must be linearly independent.
std::vector<IntVector> affine_vectors(const GramForm& q, const IntVector& offset, const IntMatrix& kernel, i64 value);

/// LLL reduction of the columns of `basis` with respect to q; returns the
/// reduced basis (same lattice).
IntMatrix lll_reduce(const GramForm& q, const IntMatrix& basis);

/// left^T form right == target, where left/right index columns.
struct BilinearConstraint {
  std::size_t left = 0;
  std::size_t right = 0;
  IntMatrix form;
  i64 target = 0;
};

struct MatrixSearchProblem {
  GramForm form;                   // every column x_k has Q(x_k) == column_values[k]
  std::vector<i64> column_values;
  std::vector<BilinearConstraint> constraints;
};

/// Receives the columns in problem order; return false to stop the search.
using ColumnsVisitor = std::function<bool(std::span<const IntVector>)>;

/// Depth-first column-by-column extension. Columns are processed in
/// increasing target value; at each step the constraints against already
/// placed columns cut the candidates down to an affine sublattice, which is
/// enumerated exactly. Emission order is deterministic.
class ConstrainedMatrixSearch {
 public:
  explicit ConstrainedMatrixSearch(MatrixSearchProblem problem);

  std::size_t columns() const { return problem_.column_values.size(); }
  /// Problem index of the column placed first.
  std::size_t first_column() const { return order_.empty() ? 0 : order_[0]; }
  std::vector<IntVector> first_column_candidates() const;

  /// Returns false if the visitor stopped the search.
  bool run(const ColumnsVisitor& visit) const;
  bool run_from(const IntVector& first, const ColumnsVisitor& visit) const;
  std::size_t count_from(const IntVector& first) const;

 private:
  bool extend(std::vector<IntVector>& placed, std::size_t depth, const ColumnsVisitor& visit) const;

  MatrixSearchProblem problem_;
  std::vector<std::size_t> order_;
};

/// Convenience: collect every solution.
std::vector<std::vector<IntVector>> constrained_matrix_search(const MatrixSearchProblem& problem);

}  // namespace ssg
