#include <gtest/gtest.h>

#include <random>

#include "ssg/quat.hpp"

using namespace ssg;

namespace {

// (a, b)_q from primitive solutions of z^2 = a x^2 + b y^2 modulo a prime
// power large enough for Hensel lifting; a and b squarefree.
int hilbert_brute(long a, long b, long q) {
  const long mod = q == 2 ? 64 : q * q;
  auto r = [&](long v) { return ((v % mod) + mod) % mod; };
  for (long x = 0; x < mod; ++x)
    for (long y = 0; y < mod; ++y)
      for (long z = 0; z < mod; ++z) {
        if (x % q == 0 && y % q == 0 && z % q == 0) continue;
        if (r(a * x * x + b * y * y - z * z) == 0) return 1;
      }
  return -1;
}

bool squarefree(long n) {
  n = std::labs(n);
  for (long d = 2; d * d <= n; ++d)
    if (n % (d * d) == 0) return false;
  return n != 0;
}

const long kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 29, 37, 41};

}  // namespace

TEST(Hilbert, MatchesPrimitiveSolutionSearch) {
  for (long q : {2L, 3L, 5L, 7L})
    for (long a = -10; a <= 10; ++a)
      for (long b = -10; b <= 10; ++b) {
        if (!squarefree(a) || !squarefree(b)) continue;
        if (q == 2 && (std::labs(a) > 7 || std::labs(b) > 7)) continue;
        EXPECT_EQ(hilbert_symbol(a, b, q), hilbert_brute(a, b, q)) << "a=" << a << " b=" << b << " q=" << q;
      }
}

TEST(Hilbert, ProductFormula) {
  for (long a = -12; a <= 12; ++a)
    for (long b = -12; b <= 12; ++b) {
      if (a == 0 || b == 0) continue;
      int prod = (a < 0 && b < 0) ? -1 : 1;
      for (long q : {2L, 3L, 5L, 7L, 11L}) prod *= hilbert_symbol(a, b, q);
      EXPECT_EQ(prod, 1) << a << "," << b;
    }
}

TEST(Algebra, RamifiedExactlyAtP) {
  for (long p : kPrimes) {
    auto alg = algebra_for_prime(p);
    EXPECT_TRUE(alg.ramified_at_infinity());
    EXPECT_EQ(alg.ramified_primes(), std::vector<long>{p});
    for (long q : kPrimes) {
      int expected = q == p ? -1 : 1;
      EXPECT_EQ(hilbert_symbol(alg.a(), alg.b(), q), expected) << "p=" << p << " q=" << q;
    }
  }
}

TEST(Algebra, RejectsNonPrime) {
  EXPECT_THROW(algebra_for_prime(4), std::invalid_argument);
  EXPECT_THROW(algebra_for_prime(1), std::invalid_argument);
}

TEST(Algebra, NormIsMultiplicativeAndConjugationReverses) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> d(-5, 5);
  for (long p : kPrimes) {
    auto alg = algebra_for_prime(p);
    for (int t = 0; t < 40; ++t) {
      Quaternion x(d(rng), d(rng), d(rng), ratio(d(rng), 3));
      Quaternion y(ratio(d(rng), 2), d(rng), d(rng), d(rng));
      EXPECT_EQ(alg.norm(alg.mul(x, y)), alg.norm(x) * alg.norm(y));
      EXPECT_EQ(alg.mul(x, y).conj(), alg.mul(y.conj(), x.conj()));
      EXPECT_EQ(alg.mul(x, x.conj()), Quaternion::scalar(alg.norm(x)));
      if (!x.is_zero()) EXPECT_EQ(alg.mul(x, alg.inverse(x)), Quaternion::scalar(1));
    }
  }
}

TEST(Order, MaximalWithIntegralStructure) {
  for (long p : kPrimes) {
    auto alg = algebra_for_prime(p);
    MaximalOrder o(alg);
    EXPECT_EQ(o.trace_gram_determinant(), Integer(p) * p) << p;
    EXPECT_EQ(o.basis()[0], Quaternion::scalar(1));
    for (int r = 0; r < 4; ++r) {
      Rational n = alg.norm(o.basis()[r]);
      EXPECT_EQ(n.get_den(), 1);
      for (int s = 0; s < 4; ++s) {
        Quaternion prod = alg.mul(o.basis()[r], o.basis()[s]);
        EXPECT_EQ(o.element(o.mult(r, s)), prod);
      }
    }
  }
}

TEST(Order, IntegerArithmeticAgreesWithRational) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<i64> d(-6, 6);
  for (long p : {2L, 3L, 5L, 13L, 17L}) {
    auto o = make_order(p);
    const auto& alg = o->algebra();
    for (int t = 0; t < 50; ++t) {
      OrderElt x{d(rng), d(rng), d(rng), d(rng)}, y{d(rng), d(rng), d(rng), d(rng)};
      EXPECT_EQ(o->element(o->mul(x, y)), alg.mul(o->element(x), o->element(y)));
      EXPECT_EQ(o->element(o->conj(x)), o->element(x).conj());
      EXPECT_EQ(Rational(o->norm(x)), alg.norm(o->element(x)));
      EXPECT_EQ(Rational(o->trace(x)), o->element(x).trace());
      EXPECT_EQ(o->coords(o->element(x)), std::optional<OrderElt>(x));
    }
  }
}

TEST(Order, SharedPerPrime) { EXPECT_EQ(make_order(7), make_order(7)); }

TEST(Order, JsonRoundTrip) {
  Quaternion q(ratio(1, 2), -3, ratio(5, 7), 0);
  EXPECT_EQ(quaternion_from_json(to_json(q)), q);
}
