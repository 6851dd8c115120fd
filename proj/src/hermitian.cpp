#include "ssg/hermitian.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "ssg/parallel.hpp"

namespace ssg {

namespace {

void check_same_order(const QuatMatrix& a, const QuatMatrix& b) {
  if (a.size() != b.size()) throw std::invalid_argument("matrix size mismatch");
  if (!a.order() || !b.order()) throw std::invalid_argument("matrix without ambient order");
}

// Dense rational matrix, only what the lattice bookkeeping needs.
struct RatMatrix {
  std::size_t n = 0;
  std::vector<Rational> d;
  explicit RatMatrix(std::size_t n_) : n(n_), d(n_ * n_, 0) {}
  Rational& operator()(std::size_t r, std::size_t c) { return d[r * n + c]; }
  const Rational& operator()(std::size_t r, std::size_t c) const { return d[r * n + c]; }
};

std::optional<RatMatrix> inverse(RatMatrix m) {
  const std::size_t n = m.n;
  RatMatrix inv(n);
  for (std::size_t i = 0; i < n; ++i) inv(i, i) = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && m(piv, c) == 0) ++piv;
    if (piv == n) return std::nullopt;
    if (piv != c)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(m(c, j), m(piv, j));
        std::swap(inv(c, j), inv(piv, j));
      }
    Rational f = 1 / m(c, c);
    for (std::size_t j = 0; j < n; ++j) {
      m(c, j) *= f;
      inv(c, j) *= f;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || m(i, c) == 0) continue;
      Rational g = m(i, c);
      for (std::size_t j = 0; j < n; ++j) {
        m(i, j) -= g * m(c, j);
        inv(i, j) -= g * inv(c, j);
      }
    }
  }
  return inv;
}

i64 to_i64_exact(const Rational& r, const char* what) {
  if (r.get_den() != 1 || !r.get_num().fits_slong_p()) throw std::logic_error(std::string("non-integral ") + what);
  return r.get_num().get_si();
}

// u + v i with i^2 = a
struct KElt {
  Rational u, v;
};

}  // namespace

QuatMatrix::QuatMatrix(OrderPtr order, std::size_t g) : order_(std::move(order)), g_(g), e_(g * g) {}

QuatMatrix QuatMatrix::identity(OrderPtr order, std::size_t g) {
  QuatMatrix m(std::move(order), g);
  for (std::size_t i = 0; i < g; ++i) m(i, i) = Quaternion::scalar(1);
  return m;
}

QuatMatrix QuatMatrix::diagonal(OrderPtr order, const std::vector<Quaternion>& d) {
  QuatMatrix m(std::move(order), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

bool QuatMatrix::is_integral() const {
  return std::all_of(e_.begin(), e_.end(), [&](const Quaternion& q) { return order_->contains(q); });
}

bool QuatMatrix::is_hermitian() const { return dagger(*this) == *this; }

QuatMatrix dagger(const QuatMatrix& m) {
  QuatMatrix out(m.order(), m.size());
  for (std::size_t r = 0; r < m.size(); ++r)
    for (std::size_t c = 0; c < m.size(); ++c) out(c, r) = m(r, c).conj();
  return out;
}

QuatMatrix operator*(const QuatMatrix& a, const QuatMatrix& b) {
  check_same_order(a, b);
  const auto& alg = a.order()->algebra();
  QuatMatrix out(a.order(), a.size());
  for (std::size_t r = 0; r < a.size(); ++r)
    for (std::size_t c = 0; c < a.size(); ++c) {
      Quaternion s;
      for (std::size_t k = 0; k < a.size(); ++k) s = s + alg.mul(a(r, k), b(k, c));
      out(r, c) = s;
    }
  return out;
}

QuatMatrix operator+(const QuatMatrix& a, const QuatMatrix& b) {
  check_same_order(a, b);
  QuatMatrix out(a.order(), a.size());
  for (std::size_t r = 0; r < a.size(); ++r)
    for (std::size_t c = 0; c < a.size(); ++c) out(r, c) = a(r, c) + b(r, c);
  return out;
}

QuatMatrix scale(const QuatMatrix& m, const Rational& s) {
  QuatMatrix out(m.order(), m.size());
  for (std::size_t r = 0; r < m.size(); ++r)
    for (std::size_t c = 0; c < m.size(); ++c) out(r, c) = s * m(r, c);
  return out;
}

Rational reduced_norm_mat(const QuatMatrix& m) {
  const std::size_t g = m.size();
  if (g == 0) return 1;
  const Rational a = m.order()->algebra().a();
  const Rational b = m.order()->algebra().b();
  auto kmul = [&](const KElt& x, const KElt& y) { return KElt{x.u * y.u + a * x.v * y.v, x.u * y.v + x.v * y.u}; };
  auto ksub = [](const KElt& x, const KElt& y) { return KElt{x.u - y.u, x.v - y.v}; };
  auto kzero = [](const KElt& x) { return x.u == 0 && x.v == 0; };
  auto kinv = [&](const KElt& x) {
    Rational nrm = x.u * x.u - a * x.v * x.v;
    return KElt{x.u / nrm, -x.v / nrm};
  };
  // q = z1 + j z2 acts on H = K + jK by [[z1, b conj(z2)], [z2, conj(z1)]].
  const std::size_t n = 2 * g;
  std::vector<KElt> s(n * n);
  for (std::size_t r = 0; r < g; ++r)
    for (std::size_t c = 0; c < g; ++c) {
      const auto& q = m(r, c).c;
      KElt z1{q[0], q[1]}, z2{q[2], -q[3]};
      s[(2 * r) * n + 2 * c] = z1;
      s[(2 * r) * n + 2 * c + 1] = KElt{b * z2.u, -b * z2.v};
      s[(2 * r + 1) * n + 2 * c] = z2;
      s[(2 * r + 1) * n + 2 * c + 1] = KElt{z1.u, -z1.v};
    }
  KElt det{1, 0};
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && kzero(s[piv * n + c])) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(s[c * n + j], s[piv * n + j]);
      det = KElt{-det.u, -det.v};
    }
    det = kmul(det, s[c * n + c]);
    KElt inv = kinv(s[c * n + c]);
    for (std::size_t i = c + 1; i < n; ++i) {
      if (kzero(s[i * n + c])) continue;
      KElt f = kmul(s[i * n + c], inv);
      for (std::size_t j = c; j < n; ++j) s[i * n + j] = ksub(s[i * n + j], kmul(f, s[c * n + j]));
    }
  }
  if (det.v != 0) throw std::logic_error("reduced norm left the base field");
  return det.u;
}

Rational haupt_norm(const QuatMatrix& h) {
  Rational nrd = reduced_norm_mat(h);
  Rational root;
  if (nrd < 0 || !exact_sqrt(nrd, root)) throw std::logic_error("reduced norm of a hermitian matrix is not a square");
  const std::size_t g = h.size();
  // Moore determinant cross-check; the sign is fixed by it for g <= 2.
  if (g == 1) {
    if (!h(0, 0).is_scalar() || (h(0, 0).c[0] != root && h(0, 0).c[0] != -root))
      throw std::logic_error("Haupt norm disagrees with the Moore determinant");
    return h(0, 0).c[0];
  }
  if (g == 2) {
    Rational moore = h(0, 0).c[0] * h(1, 1).c[0] - h.order()->algebra().norm(h(0, 1));
    if (moore != root && moore != -root) throw std::logic_error("Haupt norm disagrees with the Moore determinant");
    return moore;
  }
  return root;
}

Rational haupt_norm(const HermitianForm& h) { return haupt_norm(h.matrix()); }

HermitianForm::HermitianForm(QuatMatrix h) : h_(std::move(h)) {
  const std::size_t g = h_.size();
  if (g == 0) throw std::invalid_argument("hermitian form of size 0");
  if (!h_.is_hermitian()) throw std::invalid_argument("matrix is not hermitian");
  if (!h_.is_integral()) throw std::invalid_argument("hermitian matrix is not integral");
  const MaximalOrder& o = *h_.order();
  const auto& alg = o.algebra();
  gram_ = IntMatrix(4 * g, 4 * g);
  for (std::size_t k = 0; k < g; ++k)
    for (int r = 0; r < 4; ++r)
      for (std::size_t l = 0; l < g; ++l)
        for (int s = 0; s < 4; ++s) {
          Quaternion x = alg.mul(alg.mul(o.basis()[r].conj(), h_(k, l)), o.basis()[s]);
          gram_(4 * k + r, 4 * l + s) = to_i64_exact(x.trace(), "trace form");
        }
  if (!GramForm(gram_).is_positive_definite()) throw std::invalid_argument("hermitian form is not positive definite");
  hnm_ = haupt_norm(h_);
  if (hnm_ <= 0) throw std::logic_error("positive definite form with non-positive Haupt norm");
}

HermitianForm act(const HermitianForm& h, const QuatMatrix& m) { return HermitianForm(dagger(m) * h.matrix() * m); }

// ---------------------------------------------------------------------------
// HermitianLattice

HermitianLattice HermitianLattice::standard(const HermitianForm& h) {
  HermitianLattice l;
  l.order_ = h.order();
  l.g_ = h.genus();
  for (std::size_t k = 0; k < l.g_; ++k)
    for (int r = 0; r < 4; ++r) {
      std::vector<Quaternion> v(l.g_);
      v[k] = l.order_->basis()[r];
      l.vectors_.push_back(std::move(v));
    }
  l.form_ = h.matrix();
  l.finish();
  return l;
}

HermitianLattice HermitianLattice::ideal(OrderPtr order, const std::array<Quaternion, 4>& basis) {
  HermitianLattice l;
  l.order_ = std::move(order);
  l.g_ = 1;
  RatMatrix c(4);
  for (int a = 0; a < 4; ++a) {
    auto rc = l.order_->rational_coords(basis[a]);
    for (int r = 0; r < 4; ++r) c(r, a) = rc[r];
    l.vectors_.push_back({basis[a]});
  }
  // [O : I] = Nm(I)^2
  Rational det = 1;
  {
    auto m = c;
    for (std::size_t col = 0; col < 4; ++col) {
      std::size_t piv = col;
      while (piv < 4 && m(piv, col) == 0) ++piv;
      if (piv == 4) throw std::invalid_argument("ideal basis is degenerate");
      if (piv != col) {
        for (std::size_t j = 0; j < 4; ++j) std::swap(m(col, j), m(piv, j));
        det = -det;
      }
      det *= m(col, col);
      for (std::size_t i = col + 1; i < 4; ++i) {
        Rational f = m(i, col) / m(col, col);
        for (std::size_t j = col; j < 4; ++j) m(i, j) -= f * m(col, j);
      }
    }
  }
  Rational nrm;
  if (!exact_sqrt(abs(det), nrm)) throw std::invalid_argument("ideal index is not a square");
  l.form_ = QuatMatrix(l.order_, 1);
  l.form_(0, 0) = Quaternion::scalar(1 / nrm);
  l.finish();
  return l;
}

void HermitianLattice::finish() {
  const MaximalOrder& o = *order_;
  const auto& alg = o.algebra();
  const std::size_t n = rank();
  auto flat = [&](const std::vector<Quaternion>& v) {
    std::vector<Rational> out(n);
    for (std::size_t k = 0; k < g_; ++k) {
      auto rc = o.rational_coords(v[k]);
      for (int r = 0; r < 4; ++r) out[4 * k + r] = rc[r];
    }
    return out;
  };
  RatMatrix vm(n);
  for (std::size_t a = 0; a < n; ++a) {
    auto f = flat(vectors_[a]);
    for (std::size_t i = 0; i < n; ++i) vm(i, a) = f[i];
  }
  auto vinv = inverse(vm);
  if (!vinv) throw std::invalid_argument("lattice vectors are linearly dependent");
  auto solve_coords = [&](const std::vector<Rational>& f) {
    std::vector<Rational> x(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (f[j] != 0) x[i] += (*vinv)(i, j) * f[j];
    return x;
  };
  for (int r = 0; r < 4; ++r) {
    action_[r] = IntMatrix(n, n);
    for (std::size_t a = 0; a < n; ++a) {
      std::vector<Quaternion> v(g_);
      for (std::size_t k = 0; k < g_; ++k) v[k] = alg.mul(vectors_[a][k], o.basis()[r]);
      auto x = solve_coords(flat(v));
      for (std::size_t i = 0; i < n; ++i) action_[r](i, a) = to_i64_exact(x[i], "right action (lattice not O-stable)");
    }
    pairing_[r] = IntMatrix(n, n);
  }
  IntMatrix t(n, n);
  // x_a^dagger G x_b
  std::vector<std::vector<Quaternion>> gv(n, std::vector<Quaternion>(g_));
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t k = 0; k < g_; ++k) {
      Quaternion s;
      for (std::size_t l = 0; l < g_; ++l)
        if (!vectors_[b][l].is_zero()) s = s + alg.mul(form_(k, l), vectors_[b][l]);
      gv[b][k] = s;
    }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      Quaternion s;
      for (std::size_t k = 0; k < g_; ++k)
        if (!vectors_[a][k].is_zero()) s = s + alg.mul(vectors_[a][k].conj(), gv[b][k]);
      auto c = o.coords(s);
      if (!c) throw std::logic_error("hermitian form is not O-valued on the lattice");
      for (int r = 0; r < 4; ++r) pairing_[r](a, b) = (*c)[r];
      t(a, b) = to_i64_exact(s.trace(), "trace form");
    }
  gram_ = GramForm(t);
  if (!gram_.is_positive_definite()) throw std::invalid_argument("lattice form is not positive definite");

  // H-basis: e_{4k} for O^g, otherwise short vectors chosen greedily.
  h_basis_.clear();
  bool standard_shape = true;
  for (std::size_t a = 0; a < n && standard_shape; ++a)
    for (std::size_t k = 0; k < g_; ++k) {
      Quaternion expect = (k == a / 4) ? o.basis()[a % 4] : Quaternion();
      if (!(vectors_[a][k] == expect)) {
        standard_shape = false;
        break;
      }
    }
  if (standard_shape) {
    for (std::size_t k = 0; k < g_; ++k) {
      IntVector e(n, 0);
      e[4 * k] = 1;
      h_basis_.push_back(std::move(e));
    }
  } else {
    std::vector<IntVector> rows;
    for (i64 bound = 2; h_basis_.size() < g_; bound *= 2) {
      h_basis_.clear();
      rows.clear();
      for (const auto& v : vectors_up_to(gram_, bound)) {
        auto trial = rows;
        for (int r = 0; r < 4; ++r) trial.push_back(action_[r] * v);
        if (ssg::rank(IntMatrix::from_rows(trial)) == trial.size()) {
          rows = std::move(trial);
          h_basis_.push_back(v);
          if (h_basis_.size() == g_) break;
        }
      }
      if (bound > (i64{1} << 40)) throw std::logic_error("no H-basis found");
    }
  }
  RatMatrix s(n);
  for (std::size_t k = 0; k < g_; ++k)
    for (int r = 0; r < 4; ++r) {
      IntVector col = action_[r] * h_basis_[k];
      for (std::size_t i = 0; i < n; ++i) s(i, 4 * k + r) = col[i];
    }
  auto sinv = inverse(s);
  if (!sinv) throw std::logic_error("H-basis is degenerate");
  Integer den = 1;
  for (const auto& x : sinv->d) den = lcm(den, Integer(x.get_den()));
  if (!den.fits_slong_p()) throw std::overflow_error("H-basis denominator overflow");
  denom_ = den.get_si();
  coeff_.assign(n, std::vector<OrderElt>(g_));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t k = 0; k < g_; ++k)
      for (int r = 0; r < 4; ++r) coeff_[a][k][r] = to_i64_exact((*sinv)(4 * k + r, a) * denom_, "coefficient");
}

HermitianLattice HermitianLattice::sublattice(const IntMatrix& cols, i64 divisor) const {
  if (cols.rows != rank() || cols.cols != rank()) throw std::invalid_argument("sublattice basis has the wrong shape");
  HermitianLattice l;
  l.order_ = order_;
  l.g_ = g_;
  for (std::size_t a = 0; a < rank(); ++a) {
    std::vector<Quaternion> v(g_);
    for (std::size_t b = 0; b < rank(); ++b) {
      if (cols(b, a) == 0) continue;
      for (std::size_t k = 0; k < g_; ++k) v[k] = v[k] + Rational(cols(b, a)) * vectors_[b][k];
    }
    l.vectors_.push_back(std::move(v));
  }
  l.form_ = scale(form_, ratio(1, divisor));
  l.finish();
  return l;
}

OrderElt HermitianLattice::h(const IntVector& x, const IntVector& y) const {
  OrderElt out{};
  for (int r = 0; r < 4; ++r) out[r] = bilinear(pairing_[r], x, y);
  return out;
}

IntVector HermitianLattice::act_right(const IntVector& x, const OrderElt& o) const {
  IntVector out(rank(), 0);
  for (int r = 0; r < 4; ++r) {
    if (o[r] == 0) continue;
    IntVector t = action_[r] * x;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = checked_add(out[i], checked_mul(o[r], t[i]));
  }
  return out;
}

std::vector<i64> HermitianLattice::theta(i64 bound) const {
  std::vector<i64> counts(bound, 0);
  for (const auto& v : vectors_up_to(gram_, bound)) ++counts[q(v) - 1];
  return counts;
}

// ---------------------------------------------------------------------------
// Maps between lattices

namespace {

MatrixSearchProblem map_problem(const HermitianLattice& dst, const HermitianLattice& src, i64 n) {
  if (dst.genus() != src.genus() || dst.order() != src.order())
    throw std::invalid_argument("lattices of different genus or order");
  if (n <= 0) throw std::invalid_argument("scaling factor must be positive");
  MatrixSearchProblem p;
  p.form = dst.gram();
  const auto& s = src.h_basis();
  for (std::size_t k = 0; k < s.size(); ++k) {
    p.column_values.push_back(checked_mul(n, src.q(s[k])));
    for (std::size_t l = 0; l < k; ++l) {
      OrderElt t = src.h(s[l], s[k]);
      for (int r = 0; r < 4; ++r) p.constraints.push_back({l, k, dst.pairing()[r], checked_mul(n, t[r])});
    }
  }
  return p;
}

}  // namespace

MapSearch::MapSearch(const HermitianLattice& dst, const HermitianLattice& src, i64 n)
    : dst_(dst), src_(src), search_(map_problem(dst, src, n)) {}

std::optional<IntMatrix> MapSearch::assemble(std::span<const IntVector> images) const {
  const std::size_t n = dst_.rank(), g = dst_.genus();
  std::vector<std::array<IntVector, 4>> rw(g);
  for (std::size_t k = 0; k < g; ++k)
    for (int r = 0; r < 4; ++r) rw[k][r] = dst_.right_action()[r] * images[k];
  IntMatrix phi(n, n);
  const i64 d = src_.denominator();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t i = 0; i < n; ++i) {
      __int128 s = 0;
      for (std::size_t k = 0; k < g; ++k)
        for (int r = 0; r < 4; ++r) s += static_cast<__int128>(src_.coeff()[a][k][r]) * rw[k][r][i];
      if (s % d != 0) return std::nullopt;
      s /= d;
      if (s > INT64_MAX || s < INT64_MIN) throw std::overflow_error("map entry overflow");
      phi(i, a) = static_cast<i64>(s);
    }
  }
  return phi;
}

bool MapSearch::run(const Visitor& visit) const {
  return search_.run([&](std::span<const IntVector> cols) {
    auto phi = assemble(cols);
    return phi ? visit(*phi) : true;
  });
}

bool MapSearch::run_from(const IntVector& first, const Visitor& visit) const {
  return search_.run_from(first, [&](std::span<const IntVector> cols) {
    auto phi = assemble(cols);
    return phi ? visit(*phi) : true;
  });
}

std::size_t MapSearch::count_from(const IntVector& first) const {
  std::size_t c = 0;
  run_from(first, [&](const IntMatrix&) {
    ++c;
    return true;
  });
  return c;
}

std::vector<IntMatrix> solve_maps(const HermitianLattice& dst, const HermitianLattice& src, i64 n) {
  std::vector<IntMatrix> out;
  MapSearch(dst, src, n).run([&](const IntMatrix& m) {
    out.push_back(m);
    return true;
  });
  return out;
}

std::size_t count_maps(const HermitianLattice& dst, const HermitianLattice& src, i64 n,
                       const std::vector<IntMatrix>& dst_aut, unsigned jobs) {
  MapSearch search(dst, src, n);
  auto cands = search.first_candidates();
  std::unordered_set<IntVector, IntVectorHash> seen;
  std::vector<std::pair<IntVector, std::size_t>> orbits;
  for (const auto& v : cands) {
    if (seen.count(v)) continue;
    std::size_t size = 0;
    for (const auto& u : dst_aut) {
      if (seen.insert(u * v).second) ++size;
    }
    if (size == 0) throw std::logic_error("automorphism list does not contain the identity");
    orbits.emplace_back(v, size);
  }
  if (seen.size() != cands.size()) throw std::logic_error("automorphisms do not preserve the candidate set");
  auto counts = parallel_map<std::size_t>(orbits.size(), jobs, [&](std::size_t i) { return search.count_from(orbits[i].first); });
  std::size_t total = 0;
  for (std::size_t i = 0; i < orbits.size(); ++i) total += orbits[i].second * counts[i];
  return total;
}

std::optional<IntMatrix> find_isometry(const HermitianLattice& dst, const HermitianLattice& src) {
  std::optional<IntMatrix> out;
  MapSearch(dst, src, 1).run([&](const IntMatrix& m) {
    out = m;
    return false;
  });
  return out;
}

std::vector<IntMatrix> automorphisms(const HermitianLattice& l) { return solve_maps(l, l, 1); }

QuatMatrix matrix_from_images(const OrderPtr& order, const std::vector<IntVector>& columns) {
  const std::size_t g = columns.size();
  QuatMatrix m(order, g);
  for (std::size_t k = 0; k < g; ++k)
    for (std::size_t j = 0; j < g; ++j)
      m(j, k) = order->element({columns[k][4 * j], columns[k][4 * j + 1], columns[k][4 * j + 2], columns[k][4 * j + 3]});
  return m;
}

IntVector coords_of_column(const QuatMatrix& m, std::size_t k) {
  IntVector out(4 * m.size());
  for (std::size_t j = 0; j < m.size(); ++j) {
    auto c = m.order()->coords(m(j, k));
    if (!c) throw std::invalid_argument("matrix entry outside the order");
    for (int r = 0; r < 4; ++r) out[4 * j + r] = (*c)[r];
  }
  return out;
}

std::vector<QuatMatrix> solve_congruence(const HermitianForm& h1, const HermitianForm& h2, i64 n) {
  auto dst = HermitianLattice::standard(h1);
  auto src = HermitianLattice::standard(h2);
  std::vector<QuatMatrix> out;
  MapSearch(dst, src, n).run([&](const IntMatrix& phi) {
    std::vector<IntVector> cols;
    for (std::size_t k = 0; k < h1.genus(); ++k) cols.push_back(phi.column(4 * k));
    out.push_back(matrix_from_images(h1.order(), cols));
    return true;
  });
  return out;
}

std::optional<QuatMatrix> is_equivalent(const HermitianForm& h1, const HermitianForm& h2) {
  if (h1.genus() != h2.genus() || h1.hnm() != h2.hnm()) return std::nullopt;
  auto dst = HermitianLattice::standard(h1);
  auto src = HermitianLattice::standard(h2);
  auto phi = find_isometry(dst, src);
  if (!phi) return std::nullopt;
  std::vector<IntVector> cols;
  for (std::size_t k = 0; k < h1.genus(); ++k) cols.push_back(phi->column(4 * k));
  QuatMatrix m = matrix_from_images(h1.order(), cols);
  if (reduced_norm_mat(m) != 1) throw std::logic_error("isometry between equal Haupt norms has reduced norm != 1");
  return m;
}

std::size_t automorphism_count(const HermitianForm& h) {
  std::size_t c = 0;
  auto l = HermitianLattice::standard(h);
  MapSearch(l, l, 1).run([&](const IntMatrix&) {
    ++c;
    return true;
  });
  return c;
}

// ---------------------------------------------------------------------------
// ell-neighbours

IntMatrix sublattice_key(const IntMatrix& cols, i64 ell) { return rref_mod(cols.transpose(), ell); }

std::vector<Lagrangian> lagrangians(const HermitianLattice& l, i64 ell) {
  if (!is_prime(ell) || ell == l.order()->p()) throw std::invalid_argument("ell must be a prime different from p");
  const MaximalOrder& o = *l.order();
  const std::size_t n = l.rank(), g = l.genus();
  // Rank-one idempotent of O / ell O = M_2(F_ell): trace 1, norm 0.
  std::optional<OrderElt> eps;
  for (i64 x0 = 0; x0 < ell && !eps; ++x0)
    for (i64 x1 = 0; x1 < ell && !eps; ++x1)
      for (i64 x2 = 0; x2 < ell && !eps; ++x2)
        for (i64 x3 = 0; x3 < ell && !eps; ++x3) {
          OrderElt x{x0, x1, x2, x3};
          if (mod(o.trace(x), ell) == 1 && mod(o.norm(x), ell) == 0) eps = x;
        }
  if (!eps) throw std::logic_error("no idempotent in O / ell O");
  IntMatrix re(n, n);
  for (int r = 0; r < 4; ++r)
    for (std::size_t i = 0; i < n * n; ++i) re.data[i] = mod(re.data[i] + (*eps)[r] * l.right_action()[r].data[i], ell);
  IntMatrix ve = rref_mod(re.transpose(), ell);  // basis of V eps, as rows
  if (ve.rows != 2 * g) throw std::logic_error("V eps has the wrong dimension");

  auto isotropic = [&](const std::vector<IntVector>& w) {
    for (std::size_t a = 0; a < w.size(); ++a)
      for (std::size_t b = a; b < w.size(); ++b) {
        OrderElt v = l.h(w[a], w[b]);
        for (int r = 0; r < 4; ++r)
          if (mod(v[r], ell) != 0) return false;
      }
    return true;
  };

  std::vector<Lagrangian> out;
  const std::size_t m = 2 * g;
  // g-dimensional subspaces of F_ell^{2g} in reduced row echelon form.
  std::vector<std::size_t> pivots(g);
  std::iota(pivots.begin(), pivots.end(), 0);
  for (;;) {
    std::vector<std::pair<std::size_t, std::size_t>> free_slots;
    for (std::size_t r = 0; r < g; ++r)
      for (std::size_t c = pivots[r] + 1; c < m; ++c)
        if (std::find(pivots.begin(), pivots.end(), c) == pivots.end()) free_slots.emplace_back(r, c);
    std::vector<i64> vals(free_slots.size(), 0);
    for (;;) {
      std::vector<IntVector> w(g, IntVector(n, 0));
      for (std::size_t r = 0; r < g; ++r) {
        std::vector<i64> coef(m, 0);
        coef[pivots[r]] = 1;
        for (std::size_t f = 0; f < free_slots.size(); ++f)
          if (free_slots[f].first == r) coef[free_slots[f].second] = vals[f];
        for (std::size_t c = 0; c < m; ++c)
          if (coef[c])
            for (std::size_t i = 0; i < n; ++i) w[r][i] = mod(w[r][i] + coef[c] * ve(c, i), ell);
      }
      if (isotropic(w)) {
        std::vector<IntVector> gens;
        for (const auto& v : w)
          for (int r = 0; r < 4; ++r) {
            IntVector t = l.right_action()[r] * v;
            for (auto& x : t) x = mod(x, ell);
            gens.push_back(std::move(t));
          }
        Lagrangian lg;
        lg.key = rref_mod(IntMatrix::from_rows(gens), ell);
        if (lg.key.rows != 2 * g) throw std::logic_error("isogeny kernel has the wrong size");
        std::vector<std::vector<Integer>> rows;
        for (std::size_t r = 0; r < lg.key.rows; ++r) {
          std::vector<Integer> row(n);
          for (std::size_t i = 0; i < n; ++i) row[i] = lg.key(r, i);
          rows.push_back(std::move(row));
        }
        for (std::size_t i = 0; i < n; ++i) {
          std::vector<Integer> row(n, 0);
          row[i] = ell;
          rows.push_back(std::move(row));
        }
        auto h = hnf_rows(std::move(rows));
        if (h.size() != n) throw std::logic_error("sublattice has the wrong rank");
        lg.basis = IntMatrix(n, n);
        for (std::size_t r = 0; r < n; ++r)
          for (std::size_t i = 0; i < n; ++i) lg.basis(i, r) = h[r][i].get_si();
        out.push_back(std::move(lg));
      }
      std::size_t f = 0;
      while (f < vals.size() && ++vals[f] == ell) vals[f++] = 0;
      if (f == vals.size()) break;
    }
    // next pivot combination
    std::size_t r = g;
    while (r > 0 && pivots[r - 1] == m - g + (r - 1)) --r;
    if (r == 0) break;
    ++pivots[r - 1];
    for (std::size_t s = r; s < g; ++s) pivots[s] = pivots[s - 1] + 1;
  }
  i64 expected = 1, pk = 1;
  for (std::size_t k = 1; k <= g; ++k) {
    pk *= ell;
    expected *= pk + 1;
  }
  if (static_cast<i64>(out.size()) != expected) throw std::logic_error("wrong number of maximal isotropic submodules");
  return out;
}

std::optional<std::vector<IntVector>> find_o_basis(const HermitianLattice& l) {
  const std::size_t g = l.genus(), n = l.rank();
  for (i64 bound = 2; bound <= 64; bound *= 2) {
    auto cands = vectors_up_to(l.gram(), bound);
    std::vector<IntVector> chosen, rows;
    std::function<bool()> rec = [&]() -> bool {
      if (chosen.size() == g) return true;
      for (const auto& v : cands) {
        std::size_t before = rows.size();
        for (int r = 0; r < 4; ++r) rows.push_back(l.right_action()[r] * v);
        IntMatrix m = IntMatrix::from_rows(rows);
        bool ok = (rows.size() == n) ? (abs(determinant(m)) == 1) : (ssg::rank(m) == rows.size() && is_saturated(m));
        if (ok) {
          chosen.push_back(v);
          if (rec()) return true;
          chosen.pop_back();
        }
        rows.resize(before);
      }
      return false;
    };
    if (rec()) return chosen;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Class sets

namespace {

// |zeta(1 - 2k)| / 2 = |B_{2k}| / (4k)
Rational zeta_factor(std::size_t k) {
  std::vector<Rational> bern(2 * k + 1);
  bern[0] = 1;
  for (std::size_t m = 1; m <= 2 * k; ++m) {
    Rational s = 0;
    Integer binom = 1;  // C(m+1, j)
    for (std::size_t j = 0; j < m; ++j) {
      s += Rational(binom) * bern[j];
      binom = binom * (m + 1 - j) / (j + 1);
    }
    bern[m] = -s / Rational(m + 1);
  }
  return abs(bern[2 * k]) / Rational(4 * k);
}

HermitianLattice class_lattice_from_neighbor(const HermitianLattice& nb, PolarizedClass& pc) {
  if (nb.genus() == 1) {
    std::array<Quaternion, 4> basis;
    for (int a = 0; a < 4; ++a) basis[a] = nb.vectors()[a][0];
    pc.ideal = basis;
    pc.ideal_norm = 1 / nb.form()(0, 0).c[0];
    return HermitianLattice::ideal(nb.order(), basis);
  }
  auto u = find_o_basis(nb);
  if (!u) throw std::logic_error("no O-basis found for a neighbour lattice");
  const std::size_t g = nb.genus();
  QuatMatrix h(nb.order(), g);
  for (std::size_t k = 0; k < g; ++k)
    for (std::size_t l = 0; l < g; ++l) h(k, l) = nb.order()->element(nb.h((*u)[k], (*u)[l]));
  pc.form = HermitianForm(h);
  if (pc.form->hnm() != 1) throw std::logic_error("neighbour form is not principal");
  return HermitianLattice::standard(*pc.form);
}

}  // namespace

Rational genus_mass(long p, std::size_t g) {
  Rational m = 1;
  Integer pk = 1;
  for (std::size_t k = 1; k <= g; ++k) {
    pk *= p;
    m *= zeta_factor(k) * Rational(pk + ((k % 2) ? -1 : 1));
  }
  return m;
}

Rational PolarizedClassSet::mass() const {
  Rational s = 0;
  for (const auto& c : classes) s += ratio(1, c.e);
  return s;
}

i64 theta_bound(std::size_t g) { return g >= 3 ? 2 : 3; }

std::optional<ClassMatch> identify(const PolarizedClassSet& cs, const HermitianLattice& l) {
  auto th = l.theta(theta_bound(cs.g));
  for (std::size_t i = 0; i < cs.classes.size(); ++i) {
    if (cs.classes[i].theta != th) continue;
    if (auto iso = find_isometry(l, cs.classes[i].lattice)) return ClassMatch{i, *iso};
  }
  return std::nullopt;
}

PolarizedClassSet class_set(long p, std::size_t g, long ell) {
  if (g == 0) throw std::invalid_argument("g must be positive");
  if (!is_prime(p)) throw std::invalid_argument("p must be prime");
  if (!is_prime(ell) || ell == p) throw std::invalid_argument("ell must be a prime different from p");
  auto order = make_order(p);
  PolarizedClassSet cs;
  cs.p = p;
  cs.g = g;
  const i64 tb = theta_bound(g);

  auto add_class = [&](PolarizedClass pc) {
    pc.aut = automorphisms(pc.lattice);
    pc.e = pc.aut.size();
    pc.theta = pc.lattice.theta(tb);
    cs.classes.push_back(std::move(pc));
  };
  {
    PolarizedClass pc;
    if (g == 1) {
      pc.ideal = order->basis();
      pc.lattice = HermitianLattice::ideal(order, order->basis());
    } else {
      pc.form = HermitianForm(QuatMatrix::identity(order, g));
      pc.lattice = HermitianLattice::standard(*pc.form);
    }
    add_class(std::move(pc));
  }
  for (std::size_t i = 0; i < cs.classes.size(); ++i) {
    const HermitianLattice li = cs.classes[i].lattice;
    const auto aut = cs.classes[i].aut;
    std::unordered_set<IntMatrix, IntMatrixHash> seen;
    for (const auto& lg : lagrangians(li, ell)) {
      if (seen.count(lg.key)) continue;
      for (const auto& u : aut) seen.insert(sublattice_key(u * lg.basis, ell));
      HermitianLattice nb = li.sublattice(lg.basis, ell);
      if (identify(cs, nb)) continue;
      PolarizedClass pc;
      pc.lattice = class_lattice_from_neighbor(nb, pc);
      if (!find_isometry(nb, pc.lattice)) throw std::logic_error("class representative is not isometric to its neighbour");
      add_class(std::move(pc));
    }
  }
  if (cs.mass() != genus_mass(p, g))
    throw std::logic_error("class set fails the mass formula: " + to_string(cs.mass()) + " != " + to_string(genus_mass(p, g)));
  canonicalize(cs);
  return cs;
}

void canonicalize(PolarizedClassSet& cs) {
  std::stable_sort(cs.classes.begin(), cs.classes.end(), [](const PolarizedClass& a, const PolarizedClass& b) {
    if (a.e != b.e) return a.e < b.e;
    return a.theta < b.theta;
  });
}

nlohmann::json to_json(const QuatMatrix& m) {
  auto out = nlohmann::json::array();
  for (std::size_t r = 0; r < m.size(); ++r) {
    auto row = nlohmann::json::array();
    for (std::size_t c = 0; c < m.size(); ++c) row.push_back(to_json(m(r, c)));
    out.push_back(row);
  }
  return out;
}

QuatMatrix quat_matrix_from_json(const OrderPtr& order, const nlohmann::json& j) {
  QuatMatrix m(order, j.size());
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (j[r].size() != j.size()) throw std::invalid_argument("matrix is not square");
    for (std::size_t c = 0; c < j.size(); ++c) m(r, c) = quaternion_from_json(j[r][c]);
  }
  return m;
}

}  // namespace ssg
