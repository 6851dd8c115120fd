#include "ssg/quat.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

#include "ssg/intmat.hpp"

namespace ssg {

QuaternionAlgebra::QuaternionAlgebra(Rational a, Rational b, long p) : a_(std::move(a)), b_(std::move(b)), p_(p) {
  if (a_ == 0 || b_ == 0) throw std::invalid_argument("quaternion algebra parameters must be nonzero");
}

Quaternion QuaternionAlgebra::mul(const Quaternion& x, const Quaternion& y) const {
  const auto& u = x.c;
  const auto& v = y.c;
  Rational ab = a_ * b_;
  return {u[0] * v[0] + a_ * u[1] * v[1] + b_ * u[2] * v[2] - ab * u[3] * v[3],
          u[0] * v[1] + u[1] * v[0] - b_ * u[2] * v[3] + b_ * u[3] * v[2],
          u[0] * v[2] + u[2] * v[0] + a_ * u[1] * v[3] - a_ * u[3] * v[1],
          u[0] * v[3] + u[3] * v[0] + u[1] * v[2] - u[2] * v[1]};
}

Rational QuaternionAlgebra::norm(const Quaternion& x) const {
  const auto& u = x.c;
  return u[0] * u[0] - a_ * u[1] * u[1] - b_ * u[2] * u[2] + a_ * b_ * u[3] * u[3];
}

Quaternion QuaternionAlgebra::inverse(const Quaternion& x) const {
  Rational n = norm(x);
  if (n == 0) throw std::domain_error("zero divisor has no inverse");
  return Rational(1) / n * x.conj();
}

namespace {

// Squarefree-class integer representative of a nonzero rational.
Integer integer_class(const Rational& r) { return r.get_num() * r.get_den(); }

int valuation(Integer& x, long q) {
  int v = 0;
  while (mpz_divisible_ui_p(x.get_mpz_t(), static_cast<unsigned long>(q))) {
    x /= q;
    ++v;
  }
  return v;
}

std::vector<long> prime_factors(Integer n) {
  std::vector<long> out;
  n = abs(n);
  for (long d = 2; n > 1; ++d) {
    if (Integer(d) * d > n) {
      if (!n.fits_slong_p()) throw std::overflow_error("prime factor too large");
      out.push_back(n.get_si());
      break;
    }
    if (mpz_divisible_ui_p(n.get_mpz_t(), static_cast<unsigned long>(d))) {
      out.push_back(d);
      while (mpz_divisible_ui_p(n.get_mpz_t(), static_cast<unsigned long>(d))) n /= d;
    }
  }
  return out;
}

}  // namespace

int hilbert_symbol(const Rational& a, const Rational& b, long q) {
  if (!is_prime(q)) throw std::invalid_argument("Hilbert symbol needs a prime place");
  Integer u = integer_class(a), v = integer_class(b);
  int alpha = valuation(u, q), beta = valuation(v, q);
  if (q == 2) {
    auto m8 = [](const Integer& x) {
      Integer r;
      mpz_fdiv_r_ui(r.get_mpz_t(), x.get_mpz_t(), 8);
      return r.get_si();
    };
    long u8 = m8(u), v8 = m8(v);
    int eps_u = ((u8 - 1) / 2) % 2, eps_v = ((v8 - 1) / 2) % 2;
    int om_u = ((u8 * u8 - 1) / 8) % 2, om_v = ((v8 * v8 - 1) / 8) % 2;
    int e = eps_u * eps_v + alpha * om_v + beta * om_u;
    return e % 2 == 0 ? 1 : -1;
  }
  Integer qq = q;
  int sign = 1;
  if ((alpha * beta) % 2 == 1 && ((q - 1) / 2) % 2 == 1) sign = -sign;
  if (beta % 2 == 1) sign *= mpz_legendre(u.get_mpz_t(), qq.get_mpz_t());
  if (alpha % 2 == 1) sign *= mpz_legendre(v.get_mpz_t(), qq.get_mpz_t());
  return sign;
}

std::vector<long> QuaternionAlgebra::ramified_primes() const {
  std::vector<long> candidates = prime_factors(integer_class(a_) * integer_class(b_) * 2 * p_);
  std::vector<long> out;
  for (long q : candidates)
    if (hilbert_symbol(a_, b_, q) == -1) out.push_back(q);
  return out;
}

namespace {

// Auxiliary prime q = 3 mod 4 with (p/q) = -1, used for p = 1 mod 8.
long auxiliary_prime(long p) {
  for (long q = 3;; q += 4) {
    if (!is_prime(q)) continue;
    Integer pp = p, qq = q;
    if (mpz_legendre(pp.get_mpz_t(), qq.get_mpz_t()) == -1) return q;
  }
}

}  // namespace

QuaternionAlgebra algebra_for_prime(long p) {
  if (!is_prime(p)) throw std::invalid_argument("discriminant " + std::to_string(p) + " is not prime");
  Rational a, b;
  if (p == 2) {
    a = -1;
    b = -1;
  } else if (p % 4 == 3) {
    a = -1;
    b = -p;
  } else if (p % 8 == 5) {
    a = -2;
    b = -p;
  } else {
    a = -p;
    b = -auxiliary_prime(p);
  }
  QuaternionAlgebra alg(a, b, p);
  if (!alg.ramified_at_infinity() || alg.ramified_primes() != std::vector<long>{p})
    throw std::logic_error("Hilbert-symbol certification failed for p=" + std::to_string(p));
  return alg;
}

namespace {

std::array<Quaternion, 4> order_generators(const QuaternionAlgebra& alg) {
  const long p = alg.discriminant();
  const Rational h(1, 2), f(1, 4);
  if (p == 2 && alg.a() == -1 && alg.b() == -1) return {Quaternion{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {h, h, h, h}};
  if (p % 4 == 3 && alg.a() == -1 && alg.b() == -p) return {Quaternion{h, 0, h, 0}, {0, h, 0, h}, {0, 0, 1, 0}, {0, 0, 0, 1}};
  if (p % 8 == 5 && alg.a() == -2 && alg.b() == -p) return {Quaternion{h, 0, h, h}, {0, f, h, f}, {0, 0, 1, 0}, {0, 0, 0, 1}};
  if (p % 8 == 1 && alg.a() == -p && alg.b() < 0) {
    Integer qz = -alg.b().get_num();
    long q = qz.get_si();
    long c = 0;
    while ((c * c % q * (p % q) + 1) % q != 0) ++c;
    return {Quaternion{h, 0, h, 0}, {0, h, 0, h}, {0, 0, ratio(1, q), ratio(c, q)}, {0, 0, 0, 1}};
  }
  throw std::invalid_argument("unsupported discriminant shape for a maximal order");
}

}  // namespace

MaximalOrder::MaximalOrder(const QuaternionAlgebra& alg) : alg_(alg) {
  std::array<Quaternion, 4> gens = order_generators(alg);
  Integer den = 1;
  for (const auto& g : gens)
    for (const auto& x : g.c) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), x.get_den().get_mpz_t());
  // Lower-triangular HNF: reverse coordinate order, row HNF, reverse back.
  std::vector<std::vector<Integer>> rows;
  for (const auto& g : gens) {
    std::vector<Integer> r(4);
    for (int t = 0; t < 4; ++t) {
      Rational v = g.c[3 - t] * den;
      r[t] = v.get_num();
    }
    rows.push_back(r);
  }
  rows = hnf_rows(rows);
  if (rows.size() != 4) throw std::logic_error("order generators are not a lattice of rank 4");
  for (int r = 0; r < 4; ++r)
    for (int t = 0; t < 4; ++t) basis_[r].c[t] = ratio(rows[3 - r][3 - t], den);
  for (auto& q : basis_)
    for (auto& x : q.c) x.canonicalize();
  if (!(basis_[0] == Quaternion::scalar(1))) throw std::logic_error("order basis does not start with 1");

  // inverse_ solves coords * basis = q for row vectors.
  std::array<std::array<Rational, 8>, 4> aug;
  for (int r = 0; r < 4; ++r)
    for (int t = 0; t < 8; ++t) aug[r][t] = t < 4 ? basis_[r].c[t] : Rational(t - 4 == r ? 1 : 0);
  // Columns of the basis matrix transpose; we need M^{-1} where q = c M.
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    while (aug[piv][col] == 0) ++piv;
    std::swap(aug[piv], aug[col]);
    Rational inv = 1 / aug[col][col];
    for (auto& x : aug[col]) x *= inv;
    for (int r = 0; r < 4; ++r) {
      if (r == col || aug[r][col] == 0) continue;
      Rational fct = aug[r][col];
      for (int t = 0; t < 8; ++t) aug[r][t] -= fct * aug[col][t];
    }
  }
  for (int r = 0; r < 4; ++r)
    for (int t = 0; t < 4; ++t) inverse_[r][t] = aug[r][4 + t];

  for (int r = 0; r < 4; ++r) {
    auto cc = coords(basis_[r].conj());
    if (!cc) throw std::logic_error("order not closed under conjugation");
    conj_[r] = *cc;
    Rational tr = basis_[r].trace();
    if (tr.get_den() != 1) throw std::logic_error("non-integral trace on order basis");
    trace_[r] = tr.get_num().get_si();
    for (int s = 0; s < 4; ++s) {
      auto m = coords(alg_.mul(basis_[r], basis_[s]));
      if (!m) throw std::logic_error("order not closed under multiplication");
      mult_[r][s] = *m;
    }
  }
  for (int r = 0; r < 4; ++r)
    for (int s = 0; s < 4; ++s) {
      Rational v = alg_.mul(basis_[r], basis_[s].conj()).trace();
      if (v.get_den() != 1) throw std::logic_error("non-integral trace form");
      trace_gram_[r][s] = v.get_num().get_si();
    }
  if (trace_gram_determinant() != Integer(p()) * p())
    throw std::logic_error("order is not maximal: trace-form discriminant mismatch");
}

std::array<Rational, 4> MaximalOrder::rational_coords(const Quaternion& q) const {
  std::array<Rational, 4> out{0, 0, 0, 0};
  for (int t = 0; t < 4; ++t)
    for (int r = 0; r < 4; ++r) out[r] += q.c[t] * inverse_[t][r];
  return out;
}

std::optional<OrderElt> MaximalOrder::coords(const Quaternion& q) const {
  auto rc = rational_coords(q);
  OrderElt out;
  for (int r = 0; r < 4; ++r) {
    if (rc[r].get_den() != 1 || !rc[r].get_num().fits_slong_p()) return std::nullopt;
    out[r] = rc[r].get_num().get_si();
  }
  return out;
}

Quaternion MaximalOrder::element(const OrderElt& x) const {
  Quaternion q;
  for (int r = 0; r < 4; ++r)
    if (x[r] != 0) q = q + Rational(static_cast<long>(x[r])) * basis_[r];
  return q;
}

OrderElt MaximalOrder::mul(const OrderElt& x, const OrderElt& y) const {
  OrderElt out{0, 0, 0, 0};
  for (int r = 0; r < 4; ++r) {
    if (x[r] == 0) continue;
    for (int s = 0; s < 4; ++s) {
      if (y[s] == 0) continue;
      i64 f = checked_mul(x[r], y[s]);
      const OrderElt& m = mult_[r][s];
      for (int t = 0; t < 4; ++t)
        if (m[t] != 0) out[t] = checked_add(out[t], checked_mul(f, m[t]));
    }
  }
  return out;
}

OrderElt MaximalOrder::conj(const OrderElt& x) const {
  OrderElt out{0, 0, 0, 0};
  for (int r = 0; r < 4; ++r)
    for (int t = 0; t < 4; ++t) out[t] += x[r] * conj_[r][t];
  return out;
}

OrderElt MaximalOrder::add(const OrderElt& x, const OrderElt& y) const {
  return {x[0] + y[0], x[1] + y[1], x[2] + y[2], x[3] + y[3]};
}

i64 MaximalOrder::norm(const OrderElt& x) const {
  i64 twice = 0;
  for (int r = 0; r < 4; ++r)
    for (int s = 0; s < 4; ++s) twice += x[r] * x[s] * trace_gram_[r][s];
  return twice / 2;
}

i64 MaximalOrder::trace(const OrderElt& x) const {
  i64 t = 0;
  for (int r = 0; r < 4; ++r) t += x[r] * trace_[r];
  return t;
}

Integer MaximalOrder::trace_gram_determinant() const {
  IntMatrix m(4, 4);
  for (int r = 0; r < 4; ++r)
    for (int s = 0; s < 4; ++s) m(r, s) = trace_gram_[r][s];
  return determinant(m);
}

MaximalOrder maximal_order(const QuaternionAlgebra& alg) { return MaximalOrder(alg); }

// One shared order per p, so lattices built independently compare equal by order.
OrderPtr make_order(long p) {
  static std::mutex mu;
  static std::map<long, OrderPtr> orders;
  std::lock_guard lock(mu);
  auto& o = orders[p];
  if (!o) o = std::make_shared<const MaximalOrder>(algebra_for_prime(p));
  return o;
}

nlohmann::json to_json(const Quaternion& q) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& x : q.c) j.push_back(to_string(x));
  return j;
}

Quaternion quaternion_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 4) throw std::invalid_argument("quaternion must be 4 rational strings");
  Quaternion q;
  for (int t = 0; t < 4; ++t) q.c[t] = parse_rational(j.at(t).get<std::string>());
  return q;
}

nlohmann::json to_json(const QuaternionAlgebra& alg) {
  return {{"a", to_string(alg.a())}, {"b", to_string(alg.b())}, {"p", std::to_string(alg.discriminant())}};
}

nlohmann::json to_json(const MaximalOrder& order) {
  nlohmann::json j = to_json(order.algebra());
  nlohmann::json basis = nlohmann::json::array();
  for (const auto& q : order.basis()) basis.push_back(to_json(q));
  j["basis"] = basis;
  return j;
}

}  // namespace ssg
