#include "ssg/intmat.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace ssg {

std::string to_string(const Rational& x) {
  if (x.get_den() == 1) return x.get_num().get_str();
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

std::string to_string(const Integer& x) { return x.get_str(); }

Rational parse_rational(std::string_view s) {
  std::string str(s);
  Rational r;
  if (r.set_str(str, 10) != 0) throw std::invalid_argument("not a rational: " + str);
  if (r.get_den() == 0) throw std::invalid_argument("zero denominator: " + str);
  r.canonicalize();
  return r;
}

Integer parse_integer(std::string_view s) {
  std::string str(s);
  Integer z;
  if (str.empty() || z.set_str(str, 10) != 0) throw std::invalid_argument("not an integer: " + str);
  return z;
}

Rational ratio(const Integer& n, const Integer& d) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}

bool is_prime(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

bool exact_sqrt(const Rational& x, Rational& root) {
  if (x < 0) return false;
  Integer n = x.get_num(), d = x.get_den();
  if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t())) return false;
  Integer rn, rd;
  mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
  root = Rational(rn, rd);
  root.canonicalize();
  return true;
}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<IntVector>& rows) {
  IntMatrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t r = 0; r < m.rows; ++r)
    for (std::size_t c = 0; c < m.cols; ++c) m(r, c) = rows[r][c];
  return m;
}

IntMatrix IntMatrix::from_columns(const std::vector<IntVector>& cols) {
  return from_rows(cols).transpose();
}

IntVector IntMatrix::row(std::size_t r) const {
  return IntVector(data.begin() + r * cols, data.begin() + (r + 1) * cols);
}

IntVector IntMatrix::column(std::size_t c) const {
  IntVector v(rows);
  for (std::size_t r = 0; r < rows; ++r) v[r] = (*this)(r, c);
  return v;
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix t(cols, rows);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) t(c, r) = (*this)(r, c);
  return t;
}

namespace {
std::size_t mix(std::size_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}
}  // namespace

std::size_t IntMatrixHash::operator()(const IntMatrix& m) const noexcept {
  std::size_t h = mix(m.rows, m.cols);
  for (i64 v : m.data) h = mix(h, static_cast<std::uint64_t>(v));
  return h;
}

std::size_t IntVectorHash::operator()(const IntVector& v) const noexcept {
  std::size_t h = v.size();
  for (i64 x : v) h = mix(h, static_cast<std::uint64_t>(x));
  return h;
}

i64 checked_add(i64 a, i64 b) {
  i64 r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("int64 overflow in addition");
  return r;
}

i64 checked_mul(i64 a, i64 b) {
  i64 r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("int64 overflow in multiplication");
  return r;
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols != b.rows) throw std::invalid_argument("matrix shape mismatch");
  IntMatrix c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      i64 x = a(i, k);
      if (x == 0) continue;
      for (std::size_t j = 0; j < b.cols; ++j) c(i, j) = checked_add(c(i, j), checked_mul(x, b(k, j)));
    }
  return c;
}

IntVector operator*(const IntMatrix& a, const IntVector& x) {
  if (a.cols != x.size()) throw std::invalid_argument("matrix/vector shape mismatch");
  IntVector y(a.rows, 0);
  for (std::size_t i = 0; i < a.rows; ++i) {
    __int128 s = 0;
    for (std::size_t k = 0; k < a.cols; ++k) s += static_cast<__int128>(a(i, k)) * x[k];
    if (s > INT64_MAX || s < INT64_MIN) throw std::overflow_error("int64 overflow in product");
    y[i] = static_cast<i64>(s);
  }
  return y;
}

i64 bilinear(const IntMatrix& m, const IntVector& x, const IntVector& y) {
  __int128 s = 0;
  for (std::size_t i = 0; i < m.rows; ++i) {
    if (x[i] == 0) continue;
    __int128 t = 0;
    for (std::size_t j = 0; j < m.cols; ++j) t += static_cast<__int128>(m(i, j)) * y[j];
    s += t * x[i];
  }
  if (s > INT64_MAX || s < INT64_MIN) throw std::overflow_error("int64 overflow in bilinear form");
  return static_cast<i64>(s);
}

Integer determinant(const IntMatrix& m) {
  if (m.rows != m.cols) throw std::invalid_argument("determinant of non-square matrix");
  const std::size_t n = m.rows;
  if (n == 0) return 1;
  // Bareiss fraction-free elimination.
  std::vector<Integer> a(n * n);
  for (std::size_t i = 0; i < n * n; ++i) a[i] = static_cast<long>(m.data[i]);
  auto at = [&](std::size_t r, std::size_t c) -> Integer& { return a[r * n + c]; };
  Integer prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (at(k, k) == 0) {
      std::size_t s = k + 1;
      while (s < n && at(s, k) == 0) ++s;
      if (s == n) return 0;
      for (std::size_t c = 0; c < n; ++c) std::swap(at(k, c), at(s, c));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        at(i, j) = (at(i, j) * at(k, k) - at(i, k) * at(k, j)) / prev;
      }
    prev = at(k, k);
  }
  return sign * at(n - 1, n - 1);
}

std::vector<std::vector<Integer>> hnf_rows(std::vector<std::vector<Integer>> rows) {
  if (rows.empty()) return rows;
  const std::size_t n = rows[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < rows.size(); ++c) {
    // Euclid on column c among rows r..end.
    while (true) {
      std::size_t best = rows.size();
      for (std::size_t i = r; i < rows.size(); ++i)
        if (rows[i][c] != 0 && (best == rows.size() || abs(rows[i][c]) < abs(rows[best][c]))) best = i;
      if (best == rows.size()) break;
      std::swap(rows[r], rows[best]);
      bool done = true;
      for (std::size_t i = r + 1; i < rows.size(); ++i) {
        if (rows[i][c] == 0) continue;
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), rows[i][c].get_mpz_t(), rows[r][c].get_mpz_t());
        for (std::size_t k = c; k < n; ++k) rows[i][k] -= q * rows[r][k];
        if (rows[i][c] != 0) done = false;
      }
      if (done) break;
    }
    if (rows[r][c] == 0) continue;
    if (rows[r][c] < 0)
      for (std::size_t k = c; k < n; ++k) rows[r][k] = -rows[r][k];
    for (std::size_t i = 0; i < r; ++i) {
      Integer q;
      mpz_fdiv_q(q.get_mpz_t(), rows[i][c].get_mpz_t(), rows[r][c].get_mpz_t());
      if (q != 0)
        for (std::size_t k = c; k < n; ++k) rows[i][k] -= q * rows[r][k];
    }
    ++r;
  }
  rows.resize(r);
  return rows;
}

namespace {

i64 to_i64(__int128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("int64 overflow in column operation");
  return static_cast<i64>(v);
}

// extended gcd with g >= 0: x*a + y*b = g
void egcd(i64 a, i64 b, i64& g, i64& x, i64& y) {
  i64 old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    i64 q = old_r / r;
    i64 tmp = old_r - q * r;
    old_r = r;
    r = tmp;
    tmp = old_s - q * s;
    old_s = s;
    s = tmp;
    tmp = old_t - q * t;
    old_t = t;
    t = tmp;
  }
  if (old_r < 0) {
    old_r = -old_r;
    old_s = -old_s;
    old_t = -old_t;
  }
  g = old_r;
  x = old_s;
  y = old_t;
}

// Column-style echelon: returns (A U, U) with A U = [L | 0], L lower echelon.
struct ColumnEchelon {
  IntMatrix reduced;
  IntMatrix transform;
  std::vector<std::size_t> pivot_row;  // for each pivot column, the row of its pivot
};

__int128 dot_columns(const IntMatrix& u, std::size_t a, std::size_t b) {
  __int128 s = 0;
  for (std::size_t r = 0; r < u.rows; ++r) s += static_cast<__int128>(u(r, a)) * u(r, b);
  return s;
}

// col_a -= q col_b in both matrices
void sub_column(IntMatrix& w, IntMatrix& u, std::size_t a, std::size_t b, i64 q) {
  for (std::size_t r = 0; r < w.rows; ++r) w(r, a) = to_i64(static_cast<__int128>(w(r, a)) - static_cast<__int128>(q) * w(r, b));
  for (std::size_t r = 0; r < u.rows; ++r) u(r, a) = to_i64(static_cast<__int128>(u(r, a)) - static_cast<__int128>(q) * u(r, b));
}

i64 rounded_quotient(__int128 num, __int128 den) {
  // round(num / den), den > 0
  __int128 q = num >= 0 ? (2 * num + den) / (2 * den) : -((-2 * num + den) / (2 * den));
  return to_i64(q);
}

// Columns [start, n) of A U vanish on every processed row, so any unimodular
// recombination of them (and adding them to earlier columns) keeps the
// echelon shape. Pairwise reduction keeps the entries of U small.
void reduce_tail(IntMatrix& w, IntMatrix& u, std::size_t start) {
  const std::size_t n = u.cols;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t a = start; a < n; ++a)
      for (std::size_t b = start; b < n; ++b) {
        if (a == b) continue;
        __int128 bb = dot_columns(u, b, b);
        if (bb == 0) continue;
        i64 q = rounded_quotient(dot_columns(u, a, b), bb);
        if (q == 0) continue;
        // only accept strict decreases so the loop terminates
        __int128 before = dot_columns(u, a, a);
        sub_column(w, u, a, b, q);
        if (dot_columns(u, a, a) < before) {
          changed = true;
        } else {
          sub_column(w, u, a, b, -q);
        }
      }
  }
  for (std::size_t a = 0; a < start; ++a)
    for (std::size_t b = start; b < n; ++b) {
      __int128 bb = dot_columns(u, b, b);
      if (bb == 0) continue;
      i64 q = rounded_quotient(dot_columns(u, a, b), bb);
      if (q != 0) sub_column(w, u, a, b, q);
    }
}

ColumnEchelon column_echelon(const IntMatrix& a) {
  const std::size_t m = a.rows, n = a.cols;
  IntMatrix w = a;
  IntMatrix u = IntMatrix::identity(n);
  std::vector<std::size_t> pivot_row;
  std::size_t rank = 0;
  auto combine = [&](IntMatrix& mat, std::size_t p, std::size_t c, i64 x, i64 y, i64 s, i64 t) {
    // col_p <- x col_p + y col_c ; col_c <- s col_p + t col_c
    for (std::size_t r = 0; r < mat.rows; ++r) {
      __int128 vp = mat(r, p), vc = mat(r, c);
      mat(r, p) = to_i64(x * vp + y * vc);
      mat(r, c) = to_i64(s * vp + t * vc);
    }
  };
  for (std::size_t i = 0; i < m && rank < n; ++i) {
    for (std::size_t c = rank + 1; c < n; ++c) {
      i64 av = w(i, rank), bv = w(i, c);
      if (bv == 0) continue;
      i64 g, x, y;
      egcd(av, bv, g, x, y);
      combine(w, rank, c, x, y, -bv / g, av / g);
      combine(u, rank, c, x, y, -bv / g, av / g);
    }
    if (w(i, rank) == 0) {
      reduce_tail(w, u, rank);
      continue;
    }
    if (w(i, rank) < 0) {
      for (std::size_t r = 0; r < m; ++r) w(r, rank) = -w(r, rank);
      for (std::size_t r = 0; r < n; ++r) u(r, rank) = -u(r, rank);
    }
    pivot_row.push_back(i);
    ++rank;
    reduce_tail(w, u, rank);
  }
  return {std::move(w), std::move(u), std::move(pivot_row)};
}

}  // namespace

std::optional<AffineSolution> solve_integer_system(const IntMatrix& a, const IntVector& t) {
  const std::size_t n = a.cols;
  ColumnEchelon ce = column_echelon(a);
  const std::size_t rank = ce.pivot_row.size();
  IntVector z(n, 0);
  // Forward substitution row by row; rows between pivots must be consistent.
  std::size_t next_pivot = 0;
  for (std::size_t i = 0; i < a.rows; ++i) {
    __int128 s = t[i];
    std::size_t upto = next_pivot;
    for (std::size_t c = 0; c < upto; ++c) s -= static_cast<__int128>(ce.reduced(i, c)) * z[c];
    if (next_pivot < rank && ce.pivot_row[next_pivot] == i) {
      i64 piv = ce.reduced(i, next_pivot);
      if (s % piv != 0) return std::nullopt;
      z[next_pivot] = to_i64(s / piv);
      ++next_pivot;
    } else if (s != 0) {
      return std::nullopt;
    }
  }
  AffineSolution sol;
  sol.particular = ce.transform * z;
  sol.kernel = IntMatrix(n, n - rank);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = rank; c < n; ++c) sol.kernel(r, c - rank) = ce.transform(r, c);
  return sol;
}

std::size_t rank(const IntMatrix& m) {
  return column_echelon(m).pivot_row.size();
}

bool is_saturated(const IntMatrix& rows) {
  // rows = L * (first rows of U^{-1}) with L square lower triangular; the row
  // lattice is saturated iff L is unimodular.
  ColumnEchelon ce = column_echelon(rows);
  if (ce.pivot_row.size() != rows.rows) return false;
  for (std::size_t i = 0; i < rows.rows; ++i)
    if (ce.reduced(ce.pivot_row[i], i) != 1) return false;
  return true;
}

i64 mod(i64 a, i64 m) {
  i64 r = a % m;
  return r < 0 ? r + m : r;
}

i64 inverse_mod(i64 a, i64 prime) {
  i64 g, x, y;
  egcd(mod(a, prime), prime, g, x, y);
  if (g != 1) throw std::domain_error("not invertible modulo prime");
  return mod(x, prime);
}

IntMatrix rref_mod(const IntMatrix& m, i64 prime) {
  IntMatrix w = m;
  for (auto& v : w.data) v = mod(v, prime);
  std::size_t r = 0;
  for (std::size_t c = 0; c < w.cols && r < w.rows; ++c) {
    std::size_t piv = r;
    while (piv < w.rows && w(piv, c) == 0) ++piv;
    if (piv == w.rows) continue;
    for (std::size_t k = 0; k < w.cols; ++k) std::swap(w(r, k), w(piv, k));
    i64 inv = inverse_mod(w(r, c), prime);
    for (std::size_t k = 0; k < w.cols; ++k) w(r, k) = w(r, k) * inv % prime;
    for (std::size_t i = 0; i < w.rows; ++i) {
      if (i == r || w(i, c) == 0) continue;
      i64 f = w(i, c);
      for (std::size_t k = 0; k < w.cols; ++k) w(i, k) = mod(w(i, k) - f * w(r, k), prime);
    }
    ++r;
  }
  IntMatrix out(r, w.cols);
  std::copy(w.data.begin(), w.data.begin() + static_cast<std::ptrdiff_t>(r * w.cols), out.data.begin());
  return out;
}

IntMatrix scaled_inverse(const IntMatrix& m, i64 scale) {
  const std::size_t n = m.rows;
  if (m.cols != n) throw std::invalid_argument("inverse of non-square matrix");
  std::vector<Rational> a(n * 2 * n);
  auto at = [&](std::size_t r, std::size_t c) -> Rational& { return a[r * 2 * n + c]; };
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) at(r, c) = static_cast<long>(m(r, c));
    at(r, n + r) = 1;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && at(piv, c) == 0) ++piv;
    if (piv == n) throw std::domain_error("singular matrix");
    if (piv != c)
      for (std::size_t k = 0; k < 2 * n; ++k) std::swap(at(c, k), at(piv, k));
    Rational inv = 1 / at(c, c);
    for (std::size_t k = 0; k < 2 * n; ++k) at(c, k) *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || at(r, c) == 0) continue;
      Rational f = at(r, c);
      for (std::size_t k = 0; k < 2 * n; ++k) at(r, k) -= f * at(c, k);
    }
  }
  IntMatrix out(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      Rational v = at(r, n + c) * scale;
      if (v.get_den() != 1) throw std::logic_error("scaled inverse is not integral");
      if (!v.get_num().fits_slong_p()) throw std::overflow_error("scaled inverse entry too large");
      out(r, c) = v.get_num().get_si();
    }
  return out;
}

}  // namespace ssg
