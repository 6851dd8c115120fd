#pragma once

// Exact arithmetic in definite rational quaternion algebras and their
// maximal orders.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ssg/numeric.hpp"

namespace ssg {

/// Element x0 + x1 i + x2 j + x3 ij of an algebra (a, b / Q).
struct Quaternion {
  std::array<Rational, 4> c{0, 0, 0, 0};

  Quaternion() = default;
  Quaternion(Rational x0, Rational x1, Rational x2, Rational x3) : c{x0, x1, x2, x3} {}
  static Quaternion scalar(const Rational& r) { return {r, 0, 0, 0}; }

  bool is_zero() const { return c[0] == 0 && c[1] == 0 && c[2] == 0 && c[3] == 0; }
  bool is_scalar() const { return c[1] == 0 && c[2] == 0 && c[3] == 0; }

  Quaternion conj() const { return {c[0], -c[1], -c[2], -c[3]}; }
  Rational trace() const { return 2 * c[0]; }

  friend Quaternion operator+(const Quaternion& x, const Quaternion& y) {
    return {x.c[0] + y.c[0], x.c[1] + y.c[1], x.c[2] + y.c[2], x.c[3] + y.c[3]};
  }
  friend Quaternion operator-(const Quaternion& x, const Quaternion& y) {
    return {x.c[0] - y.c[0], x.c[1] - y.c[1], x.c[2] - y.c[2], x.c[3] - y.c[3]};
  }
  friend Quaternion operator-(const Quaternion& x) { return {-x.c[0], -x.c[1], -x.c[2], -x.c[3]}; }
  friend Quaternion operator*(const Rational& r, const Quaternion& x) {
    return {r * x.c[0], r * x.c[1], r * x.c[2], r * x.c[3]};
  }
  friend bool operator==(const Quaternion& x, const Quaternion& y) { return x.c == y.c; }
};

/// The algebra (a, b / Q) with i^2 = a, j^2 = b, ij = -ji, tagged with the
/// prime p at which it ramifies (together with infinity).
class QuaternionAlgebra {
 public:
  QuaternionAlgebra(Rational a, Rational b, long p);

  const Rational& a() const { return a_; }
  const Rational& b() const { return b_; }
  long discriminant() const { return p_; }

  Quaternion mul(const Quaternion& x, const Quaternion& y) const;
  Rational norm(const Quaternion& x) const;
  Quaternion inverse(const Quaternion& x) const;

  /// Finite primes where (a,b) is ramified, from Hilbert symbols at 2 and
  /// every prime dividing a*b*p.
  std::vector<long> ramified_primes() const;
  bool ramified_at_infinity() const { return a_ < 0 && b_ < 0; }

 private:
  Rational a_, b_;
  long p_;
};

/// Hilbert symbol (a, b)_q for a prime q; returns +1 or -1.
int hilbert_symbol(const Rational& a, const Rational& b, long q);

/// Definite algebra ramified exactly at {p, infinity}. Throws
/// std::invalid_argument when p is not prime and std::logic_error when the
/// Hilbert-symbol certification fails.
QuaternionAlgebra algebra_for_prime(long p);

using OrderElt = std::array<i64, 4>;

/// Maximal order with a Z-basis in Hermite normal form (basis()[0] == 1) and
/// integer structure constants.
class MaximalOrder {
 public:
  explicit MaximalOrder(const QuaternionAlgebra& alg);

  const QuaternionAlgebra& algebra() const { return alg_; }
  long p() const { return alg_.discriminant(); }
  const std::array<Quaternion, 4>& basis() const { return basis_; }

  /// basis[r] * basis[s] = sum_t mult(r,s)[t] basis[t]
  const OrderElt& mult(int r, int s) const { return mult_[r][s]; }

  OrderElt mul(const OrderElt& x, const OrderElt& y) const;
  OrderElt conj(const OrderElt& x) const;
  OrderElt add(const OrderElt& x, const OrderElt& y) const;
  i64 norm(const OrderElt& x) const;
  i64 trace(const OrderElt& x) const;

  Quaternion element(const OrderElt& x) const;
  std::array<Rational, 4> rational_coords(const Quaternion& q) const;
  std::optional<OrderElt> coords(const Quaternion& q) const;
  bool contains(const Quaternion& q) const { return coords(q).has_value(); }

  /// Gram matrix of the trace form Trd(x conj(y)) on the basis.
  const std::array<std::array<i64, 4>, 4>& trace_gram() const { return trace_gram_; }
  /// det of trace_gram(); equals p^2 exactly when the order is maximal.
  Integer trace_gram_determinant() const;

  static constexpr OrderElt one() { return {1, 0, 0, 0}; }

 private:
  QuaternionAlgebra alg_;
  std::array<Quaternion, 4> basis_;
  std::array<std::array<Rational, 4>, 4> inverse_;  // row-vector coords -> basis coords
  std::array<std::array<OrderElt, 4>, 4> mult_;
  std::array<OrderElt, 4> conj_;
  std::array<i64, 4> trace_;
  std::array<std::array<i64, 4>, 4> trace_gram_;
};

using OrderPtr = std::shared_ptr<const MaximalOrder>;

/// Throws std::invalid_argument for an unsupported discriminant shape.
MaximalOrder maximal_order(const QuaternionAlgebra& alg);
OrderPtr make_order(long p);

nlohmann::json to_json(const QuaternionAlgebra& alg);
nlohmann::json to_json(const MaximalOrder& order);
nlohmann::json to_json(const Quaternion& q);
Quaternion quaternion_from_json(const nlohmann::json& j);

}  // namespace ssg
