#include "ssg/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ssg {

GramForm::GramForm(IntMatrix doubled) : doubled_(std::move(doubled)) {
  if (doubled_.rows != doubled_.cols) throw std::invalid_argument("Gram matrix must be square");
  for (std::size_t i = 0; i < dim(); ++i) {
    if (doubled_(i, i) % 2 != 0) throw std::invalid_argument("doubled Gram matrix must have even diagonal");
    for (std::size_t j = 0; j < i; ++j)
      if (doubled_(i, j) != doubled_(j, i)) throw std::invalid_argument("Gram matrix must be symmetric");
  }
}

GramForm GramForm::from_gram(const IntMatrix& g) {
  IntMatrix d = g;
  for (auto& v : d.data) v = checked_mul(v, 2);
  return GramForm(std::move(d));
}

i64 GramForm::pairing(std::span<const i64> x, std::span<const i64> y) const {
  __int128 s = 0;
  const std::size_t n = dim();
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] == 0) continue;
    __int128 t = 0;
    for (std::size_t j = 0; j < n; ++j) t += static_cast<__int128>(doubled_(i, j)) * y[j];
    s += t * x[i];
  }
  if (s > INT64_MAX || s < INT64_MIN) throw std::overflow_error("quadratic form value overflow");
  return static_cast<i64>(s);
}

i64 GramForm::value(std::span<const i64> x) const { return pairing(x, x) / 2; }

bool GramForm::is_positive_definite() const {
  for (std::size_t k = 1; k <= dim(); ++k) {
    IntMatrix minor(k, k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) minor(i, j) = doubled_(i, j);
    if (determinant(minor) <= 0) return false;
  }
  return true;
}

namespace {

using Real = long double;

// Incrementally maintained LLL on the columns of `basis` w.r.t. D.
IntMatrix lll_columns(const IntMatrix& d, IntMatrix basis) {
  const std::size_t n = basis.rows, r = basis.cols;
  if (r <= 1) return basis;
  // Gram of the basis columns (w.r.t. D).
  std::vector<i64> g(r * r);
  auto G = [&](std::size_t i, std::size_t j) -> i64& { return g[i * r + j]; };
  std::vector<IntVector> cols(r);
  for (std::size_t c = 0; c < r; ++c) cols[c] = basis.column(c);
  auto pair = [&](const IntVector& x, const IntVector& y) {
    __int128 s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (x[i] == 0) continue;
      __int128 t = 0;
      for (std::size_t j = 0; j < n; ++j) t += static_cast<__int128>(d(i, j)) * y[j];
      s += t * x[i];
    }
    if (s > INT64_MAX || s < INT64_MIN) throw std::overflow_error("LLL Gram overflow");
    return static_cast<i64>(s);
  };
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j <= i; ++j) G(i, j) = G(j, i) = pair(cols[i], cols[j]);

  std::vector<Real> mu(r * r), bstar(r);
  auto gram_schmidt = [&]() {
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        Real s = static_cast<Real>(G(i, j));
        for (std::size_t k = 0; k < j; ++k) s -= mu[i * r + k] * mu[j * r + k] * bstar[k];
        mu[i * r + j] = s / bstar[j];
      }
      Real s = static_cast<Real>(G(i, i));
      for (std::size_t k = 0; k < i; ++k) s -= mu[i * r + k] * mu[i * r + k] * bstar[k];
      bstar[i] = s;
    }
  };
  auto reduce = [&](std::size_t k, std::size_t j, i64 m) {
    // b_k <- b_k - m b_j
    for (std::size_t i = 0; i < n; ++i) cols[k][i] = checked_add(cols[k][i], -checked_mul(m, cols[j][i]));
    i64 gkk = G(k, k) - 2 * m * G(k, j) + m * m * G(j, j);
    for (std::size_t i = 0; i < r; ++i) {
      if (i == k) continue;
      G(k, i) = G(i, k) = G(k, i) - m * G(j, i);
    }
    G(k, k) = gkk;
  };
  const Real delta = 0.99L;
  std::size_t k = 1;
  std::size_t guard = 0;
  gram_schmidt();
  while (k < r) {
    if (++guard > 100000) throw std::runtime_error("LLL did not converge");
    for (std::size_t jj = k; jj-- > 0;) {
      Real m = mu[k * r + jj];
      if (std::fabs(m) > 0.5L) {
        reduce(k, jj, static_cast<i64>(std::llround(m)));
        gram_schmidt();
      }
    }
    Real m = mu[k * r + k - 1];
    if (bstar[k] >= (delta - m * m) * bstar[k - 1]) {
      ++k;
    } else {
      std::swap(cols[k], cols[k - 1]);
      for (std::size_t i = 0; i < r; ++i) std::swap(G(k, i), G(k - 1, i));
      for (std::size_t i = 0; i < r; ++i) std::swap(G(i, k), G(i, k - 1));
      gram_schmidt();
      k = std::max<std::size_t>(k - 1, 1);
    }
  }
  return IntMatrix::from_columns(cols);
}

// Fincke-Pohst enumeration of y = offset + K z with Q(y) == value (exact) or
// 0 < Q(y) <= value (up_to).
std::vector<IntVector> enumerate(const GramForm& q, IntVector offset, const IntMatrix& kernel, i64 value, bool up_to) {
  std::vector<IntVector> out;
  const std::size_t n = q.dim();
  const std::size_t r = kernel.cols;
  const IntMatrix& d = q.doubled();
  if (value < 0) return out;
  if (r == 0) {
    i64 v = q.value(offset);
    if (up_to ? (v > 0 && v <= value) : v == value) out.push_back(offset);
    return out;
  }
  IntMatrix k = lll_columns(d, kernel);
  // A = K^T D K, b = K^T D y0.
  IntMatrix dk = d * k;
  IntMatrix a = k.transpose() * dk;
  IntVector b = dk.transpose() * offset;

  std::vector<Real> m(r * r);
  for (std::size_t i = 0; i < r * r; ++i) m[i] = static_cast<Real>(a.data[i]) / 2;
  // Center c solves A c = -b.
  std::vector<Real> c(r);
  {
    std::vector<Real> aug(r * (r + 1));
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < r; ++j) aug[i * (r + 1) + j] = static_cast<Real>(a(i, j));
      aug[i * (r + 1) + r] = -static_cast<Real>(b[i]);
    }
    for (std::size_t col = 0; col < r; ++col) {
      std::size_t piv = col;
      for (std::size_t i = col + 1; i < r; ++i)
        if (std::fabs(aug[i * (r + 1) + col]) > std::fabs(aug[piv * (r + 1) + col])) piv = i;
      for (std::size_t j = 0; j <= r; ++j) std::swap(aug[col * (r + 1) + j], aug[piv * (r + 1) + j]);
      for (std::size_t i = 0; i < r; ++i) {
        if (i == col) continue;
        Real f = aug[i * (r + 1) + col] / aug[col * (r + 1) + col];
        for (std::size_t j = col; j <= r; ++j) aug[i * (r + 1) + j] -= f * aug[col * (r + 1) + j];
      }
    }
    for (std::size_t i = 0; i < r; ++i) c[i] = aug[i * (r + 1) + r] / aug[i * (r + 1) + i];
  }
  // Recentre the offset near the minimiser to keep integers small.
  {
    IntVector shift(r);
    bool any = false;
    for (std::size_t i = 0; i < r; ++i) {
      shift[i] = static_cast<i64>(std::llround(c[i]));
      if (shift[i] != 0) any = true;
    }
    if (any) {
      IntVector ks = k * shift;
      for (std::size_t i = 0; i < n; ++i) offset[i] = checked_add(offset[i], ks[i]);
      for (std::size_t i = 0; i < r; ++i) c[i] -= static_cast<Real>(shift[i]);
      b = dk.transpose() * offset;
    }
  }
  Real qy0 = static_cast<Real>(q.value(offset));
  Real bc = 0;
  for (std::size_t i = 0; i < r; ++i) bc += static_cast<Real>(b[i]) * c[i];
  Real qmin = qy0 + bc / 2;
  Real radius = static_cast<Real>(value) - qmin;
  const Real slack = 1e-7L * (1 + std::fabs(static_cast<Real>(value)) + std::fabs(qmin));
  if (radius < -slack) return out;

  // Upper LDL^T: Q(z) - qmin = sum_i qd[i] (u_i + sum_{j>i} qu[i][j] u_j)^2
  std::vector<Real> qd(r), qu(r * r, 0);
  {
    std::vector<Real> w = m;
    for (std::size_t i = 0; i < r; ++i) {
      qd[i] = w[i * r + i];
      if (qd[i] <= 0) throw std::logic_error("enumeration form is not positive definite");
      for (std::size_t j = i + 1; j < r; ++j) qu[i * r + j] = w[i * r + j] / qd[i];
      for (std::size_t j = i + 1; j < r; ++j)
        for (std::size_t l = j; l < r; ++l) {
          w[j * r + l] -= qd[i] * qu[i * r + j] * qu[i * r + l];
          w[l * r + j] = w[j * r + l];
        }
    }
  }

  IntVector z(r, 0);
  std::vector<Real> rem(r + 1), ctr(r);
  rem[r] = radius;
  IntVector y(n);
  // Iterative DFS from the last coordinate down.
  std::vector<i64> hi(r);
  auto level_bounds = [&](std::size_t i) {
    Real s = c[i];
    for (std::size_t j = i + 1; j < r; ++j) s -= qu[i * r + j] * (static_cast<Real>(z[j]) - c[j]);
    ctr[i] = s;
    Real budget = std::max<Real>(rem[i + 1], 0) + slack;
    Real rad = std::sqrt(budget / qd[i]) + 1e-9L;
    z[i] = static_cast<i64>(std::ceil(s - rad));
    hi[i] = static_cast<i64>(std::floor(s + rad));
  };
  std::size_t i = r - 1;
  level_bounds(i);
  while (true) {
    if (z[i] > hi[i]) {
      if (i == r - 1) break;
      ++i;
      ++z[i];
      continue;
    }
    Real u = static_cast<Real>(z[i]) - ctr[i];
    rem[i] = rem[i + 1] - qd[i] * u * u;
    if (rem[i] < -slack) {
      ++z[i];
      continue;
    }
    if (i == 0) {
      y = offset;
      for (std::size_t col = 0; col < r; ++col) {
        if (z[col] == 0) continue;
        for (std::size_t row = 0; row < n; ++row) y[row] = checked_add(y[row], checked_mul(k(row, col), z[col]));
      }
      i64 v = q.value(y);
      if (up_to ? (v > 0 && v <= value) : v == value) out.push_back(y);
      ++z[0];
      continue;
    }
    --i;
    level_bounds(i);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

IntMatrix lll_reduce(const GramForm& q, const IntMatrix& basis) { return lll_columns(q.doubled(), basis); }

ShortVectorList short_vectors(const GramForm& q, i64 value) {
  ShortVectorList out;
  out.value = value;
  if (value < 0) return out;
  out.vectors = enumerate(q, IntVector(q.dim(), 0), IntMatrix::identity(q.dim()), value, false);
  return out;
}

std::vector<IntVector> vectors_up_to(const GramForm& q, i64 bound) {
  auto v = enumerate(q, IntVector(q.dim(), 0), IntMatrix::identity(q.dim()), bound, true);
  std::stable_sort(v.begin(), v.end(), [&](const IntVector& x, const IntVector& y) { return q.value(x) < q.value(y); });
  return v;
}

std::vector<IntVector> affine_vectors(const GramForm& q, const IntVector& offset, const IntMatrix& kernel, i64 value) {
  return enumerate(q, offset, kernel, value, false);
}

ConstrainedMatrixSearch::ConstrainedMatrixSearch(MatrixSearchProblem problem) : problem_(std::move(problem)) {
  const std::size_t k = problem_.column_values.size();
  for (const auto& c : problem_.constraints) {
    if (c.left >= k || c.right >= k) throw std::invalid_argument("constraint refers to a missing column");
    if (c.left == c.right) throw std::invalid_argument("constraints must couple two distinct columns");
    if (c.form.rows != problem_.form.dim() || c.form.cols != problem_.form.dim())
      throw std::invalid_argument("constraint form has the wrong dimension");
  }
  order_.resize(k);
  std::iota(order_.begin(), order_.end(), 0);
  std::stable_sort(order_.begin(), order_.end(),
                   [&](std::size_t a, std::size_t b) { return problem_.column_values[a] < problem_.column_values[b]; });
}

std::vector<IntVector> ConstrainedMatrixSearch::first_column_candidates() const {
  if (order_.empty()) return {};
  return short_vectors(problem_.form, problem_.column_values[order_[0]]).vectors;
}

bool ConstrainedMatrixSearch::extend(std::vector<IntVector>& placed, std::size_t depth, const ColumnsVisitor& visit) const {
  const std::size_t k = order_.size();
  if (depth == k) {
    std::vector<IntVector> cols(k);
    for (std::size_t t = 0; t < k; ++t) cols[order_[t]] = placed[t];
    return visit(cols);
  }
  const std::size_t col = order_[depth];
  const std::size_t n = problem_.form.dim();
  // Position of each problem column in the search order.
  auto placed_vector = [&](std::size_t problem_col) -> const IntVector* {
    for (std::size_t t = 0; t < depth; ++t)
      if (order_[t] == problem_col) return &placed[t];
    return nullptr;
  };
  std::vector<IntVector> rows;
  IntVector rhs;
  for (const auto& c : problem_.constraints) {
    IntVector row(n, 0);
    if (c.right == col) {
      const IntVector* x = placed_vector(c.left);
      if (!x) continue;
      for (std::size_t a = 0; a < n; ++a) {
        if ((*x)[a] == 0) continue;
        for (std::size_t b = 0; b < n; ++b) row[b] = checked_add(row[b], checked_mul((*x)[a], c.form(a, b)));
      }
    } else if (c.left == col) {
      const IntVector* x = placed_vector(c.right);
      if (!x) continue;
      row = c.form * *x;
    } else {
      continue;
    }
    rows.push_back(std::move(row));
    rhs.push_back(c.target);
  }
  const i64 value = problem_.column_values[col];
  std::vector<IntVector> candidates;
  if (rows.empty()) {
    candidates = short_vectors(problem_.form, value).vectors;
  } else {
    auto sol = solve_integer_system(IntMatrix::from_rows(rows), rhs);
    if (!sol) return true;
    candidates = affine_vectors(problem_.form, sol->particular, sol->kernel, value);
  }
  for (auto& cand : candidates) {
    placed[depth] = std::move(cand);
    if (!extend(placed, depth + 1, visit)) return false;
  }
  return true;
}

bool ConstrainedMatrixSearch::run(const ColumnsVisitor& visit) const {
  std::vector<IntVector> placed(order_.size());
  return extend(placed, 0, visit);
}

bool ConstrainedMatrixSearch::run_from(const IntVector& first, const ColumnsVisitor& visit) const {
  if (order_.empty()) return run(visit);
  if (problem_.form.value(first) != problem_.column_values[order_[0]]) return true;
  std::vector<IntVector> placed(order_.size());
  placed[0] = first;
  return extend(placed, 1, visit);
}

std::size_t ConstrainedMatrixSearch::count_from(const IntVector& first) const {
  std::size_t count = 0;
  run_from(first, [&](std::span<const IntVector>) {
    ++count;
    return true;
  });
  return count;
}

std::vector<std::vector<IntVector>> constrained_matrix_search(const MatrixSearchProblem& problem) {
  std::vector<std::vector<IntVector>> out;
  ConstrainedMatrixSearch search(problem);
  search.run([&](std::span<const IntVector> cols) {
    out.emplace_back(cols.begin(), cols.end());
    return true;
  });
  return out;
}

}  // namespace ssg
