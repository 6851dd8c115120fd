#include "ssg/brandt.hpp"

#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ssg/lattice.hpp"
#include "ssg/parallel.hpp"

namespace ssg {

Integer isotropic_count(i64 ell, std::size_t g) {
  Integer out = 1, pk = 1;
  for (std::size_t k = 1; k <= g; ++k) {
    pk *= ell;
    out *= pk + 1;
  }
  return out;
}

std::string class_set_fingerprint(const PolarizedClassSet& classes) {
  std::ostringstream s;
  s << "p" << classes.p << "-g" << classes.g << "-h" << classes.h();
  for (const auto& c : classes.classes) {
    s << "-e" << c.e << "t";
    for (std::size_t k = 0; k < c.theta.size(); ++k) s << (k ? "." : "") << c.theta[k];
  }
  return s.str();
}

BrandtMatrix brandt_matrix(const PolarizedClassSet& classes, i64 n, unsigned jobs) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  if (classes.g >= 2 && (!is_prime(n) || n == classes.p))
    throw std::invalid_argument("for g >= 2 only prime n different from p is supported");
  const std::size_t h = classes.h();
  BrandtMatrix b;
  b.p = classes.p;
  b.g = classes.g;
  b.n = n;
  b.fingerprint = class_set_fingerprint(classes);
  for (const auto& c : classes.classes) b.e.push_back(c.e);
  auto counts = parallel_map<std::size_t>(h * h, jobs, [&](std::size_t idx) {
    const auto& ci = classes.classes[idx / h];
    const auto& cj = classes.classes[idx % h];
    return count_maps(ci.lattice, cj.lattice, n, ci.aut);
  });
  b.m.assign(h, std::vector<Rational>(h));
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < h; ++j) {
      std::size_t c = counts[i * h + j];
      if (c % b.e[j] != 0) throw std::logic_error("Brandt entry is not integral: count not divisible by e");
      b.m[i][j] = Rational(static_cast<long>(c / b.e[j]));
    }
  return b;
}

BrandtMatrix brandt_zero(const PolarizedClassSet& classes) {
  BrandtMatrix b;
  b.p = classes.p;
  b.g = classes.g;
  b.n = 0;
  b.fingerprint = class_set_fingerprint(classes);
  for (const auto& c : classes.classes) b.e.push_back(c.e);
  b.m.assign(classes.h(), std::vector<Rational>(classes.h()));
  for (std::size_t i = 0; i < classes.h(); ++i)
    for (std::size_t j = 0; j < classes.h(); ++j) b.m[i][j] = ratio(1, b.e[j]);
  return b;
}

// ---------------------------------------------------------------------------
// Right ideals

namespace {

// Z-basis (Hermite normal form in order coordinates) of the span of `gens`,
// and the absolute value of its covolume relative to O.
std::pair<std::vector<Quaternion>, Rational> z_span(const MaximalOrder& o, const std::vector<Quaternion>& gens) {
  Integer den = 1;
  std::vector<std::array<Rational, 4>> rc;
  for (const auto& q : gens) {
    rc.push_back(o.rational_coords(q));
    for (const auto& x : rc.back()) den = lcm(den, Integer(x.get_den()));
  }
  std::vector<std::vector<Integer>> rows;
  for (const auto& c : rc) {
    std::vector<Integer> row(4);
    for (int r = 0; r < 4; ++r) {
      Rational s = c[r] * den;
      row[r] = s.get_num();
    }
    rows.push_back(std::move(row));
  }
  auto h = hnf_rows(std::move(rows));
  if (h.size() != 4) throw std::logic_error("generators do not span a full lattice");
  std::vector<Quaternion> basis;
  Rational covol = 1;
  for (std::size_t r = 0; r < 4; ++r) {
    Quaternion q;
    for (int k = 0; k < 4; ++k) q = q + ratio(h[r][k], den) * o.basis()[k];
    basis.push_back(q);
    covol *= ratio(h[r][r], den);
  }
  return {basis, abs(covol)};
}

}  // namespace

RightIdeal ideal_from_generators(const MaximalOrder& o, const std::vector<Quaternion>& gens) {
  std::vector<Quaternion> all;
  for (const auto& x : gens)
    for (const auto& b : o.basis()) all.push_back(o.algebra().mul(x, b));
  auto [basis, covol] = z_span(o, all);
  RightIdeal out;
  for (int a = 0; a < 4; ++a) out.basis[a] = basis[a];
  if (!exact_sqrt(covol, out.norm)) throw std::logic_error("ideal index is not a square");
  return out;
}

std::size_t ideal_pair_count(const MaximalOrder& o, const RightIdeal& i, const RightIdeal& j, i64 n) {
  const auto& alg = o.algebra();
  std::vector<Quaternion> gens;
  for (const auto& x : i.basis)
    for (const auto& y : j.basis) gens.push_back(alg.mul(x, y.conj()));
  auto basis = z_span(o, gens).first;
  const Rational scale = i.norm * j.norm;
  IntMatrix d(4, 4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      Rational t = alg.mul(basis[a], basis[b].conj()).trace() / scale;
      if (t.get_den() != 1) throw std::logic_error("scaled norm form on I Jbar is not integral");
      d(a, b) = t.get_num().get_si();
    }
  return short_vectors(GramForm(d), n).vectors.size();
}

bool ideals_equivalent(const MaximalOrder& o, const RightIdeal& i, const RightIdeal& j) {
  return ideal_pair_count(o, j, i, 1) > 0;
}

std::vector<RightIdeal> ideal_classes(const MaximalOrder& o, long ell) {
  if (!is_prime(ell) || ell == o.p()) throw std::invalid_argument("ell must be a prime different from p");
  const auto& alg = o.algebra();
  std::vector<RightIdeal> classes{ideal_from_generators(o, {Quaternion::scalar(1)})};
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const RightIdeal ideal = classes[c];
    std::set<std::vector<std::string>> seen;
    std::size_t found = 0;
    for (long t = 1; t < ell * ell * ell * ell; ++t) {
      long r = t;
      Quaternion x;
      for (int a = 0; a < 4; ++a, r /= ell) x = x + Rational(r % ell) * ideal.basis[a];
      Rational q = alg.norm(x) / (ell * ideal.norm);
      if (q.get_den() != 1) continue;
      std::vector<Quaternion> gens{x};
      for (const auto& b : ideal.basis) gens.push_back(Rational(ell) * b);
      RightIdeal j = ideal_from_generators(o, gens);
      if (j.norm != ell * ideal.norm) continue;
      std::vector<std::string> key;
      for (const auto& b : j.basis)
        for (const auto& v : b.c) key.push_back(to_string(v));
      if (!seen.insert(key).second) continue;
      ++found;
      bool known = false;
      for (const auto& k : classes)
        if (ideals_equivalent(o, k, j)) {
          known = true;
          break;
        }
      if (!known) classes.push_back(j);
    }
    if (found != static_cast<std::size_t>(ell + 1)) throw std::logic_error("wrong number of ell-neighbour ideals");
  }
  Rational mass = 0;
  for (const auto& k : classes) mass += ratio(1, ideal_pair_count(o, k, k, 1));
  if (mass != ratio(o.p() - 1, 24)) throw std::logic_error("ideal classes fail the Eichler mass formula");
  return classes;
}

BrandtMatrix brandt_g1_classical(const MaximalOrder& o, const std::vector<RightIdeal>& ideals, i64 n) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  BrandtMatrix b;
  b.p = o.p();
  b.g = 1;
  b.n = n;
  b.fingerprint = "classical-p" + std::to_string(o.p()) + "-h" + std::to_string(ideals.size());
  for (const auto& k : ideals) b.e.push_back(ideal_pair_count(o, k, k, 1));
  const std::size_t h = ideals.size();
  b.m.assign(h, std::vector<Rational>(h));
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < h; ++j) {
      std::size_t c = ideal_pair_count(o, ideals[i], ideals[j], n);
      if (c % b.e[j] != 0) throw std::logic_error("classical Brandt entry is not integral");
      b.m[i][j] = Rational(static_cast<long>(c / b.e[j]));
    }
  return b;
}

BrandtMatrix brandt_g1_classical(long p, i64 n, long ell) {
  auto o = make_order(p);
  return brandt_g1_classical(*o, ideal_classes(*o, ell), n);
}

RowSumReport row_sum_check(const BrandtMatrix& b) {
  RowSumReport rep;
  if (!is_prime(b.n) || b.n == b.p) throw std::invalid_argument("row sums are defined for prime n different from p");
  rep.expected = isotropic_count(b.n, b.g);
  rep.ok = true;
  for (const auto& row : b.m) {
    Rational s = 0;
    for (const auto& x : row) s += x;
    rep.sums.push_back(s);
    if (s != Rational(rep.expected)) rep.ok = false;
  }
  return rep;
}

bool weighted_symmetric(const BrandtMatrix& b) {
  for (std::size_t i = 0; i < b.h(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (b.m[i][j] / b.e[i] != b.m[j][i] / b.e[j]) return false;
  return true;
}

std::optional<std::vector<std::size_t>> permutation_similarity(const RationalMatrix& a, const RationalMatrix& b) {
  const std::size_t h = a.size();
  if (b.size() != h) return std::nullopt;
  std::vector<std::size_t> s(h);
  std::vector<bool> used(h, false);
  std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
    if (i == h) return true;
    for (std::size_t c = 0; c < h; ++c) {
      if (used[c]) continue;
      s[i] = c;
      bool ok = true;
      for (std::size_t k = 0; k <= i && ok; ++k)
        ok = a[s[i]][s[k]] == b[i][k] && a[s[k]][s[i]] == b[k][i];
      if (!ok) continue;
      used[c] = true;
      if (rec(i + 1)) return true;
      used[c] = false;
    }
    return false;
  };
  if (rec(0)) return s;
  return std::nullopt;
}

RationalMatrix multiply(const RationalMatrix& a, const RationalMatrix& b) {
  const std::size_t n = a.size();
  RationalMatrix out(n, std::vector<Rational>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) out[i][j] += a[i][k] * b[k][j];
  return out;
}

nlohmann::json to_json(const BrandtMatrix& b) {
  nlohmann::json j;
  j["p"] = std::to_string(b.p);
  j["g"] = std::to_string(b.g);
  j["n"] = std::to_string(b.n);
  j["h"] = std::to_string(b.h());
  auto rows = nlohmann::json::array();
  for (const auto& row : b.m) {
    auto r = nlohmann::json::array();
    for (const auto& x : row) r.push_back(to_string(x));
    rows.push_back(r);
  }
  j["matrix"] = rows;
  auto e = nlohmann::json::array();
  for (auto x : b.e) e.push_back(std::to_string(x));
  j["e"] = e;
  if (b.n >= 1 && is_prime(b.n) && b.n != b.p) {
    j["row_sum"] = to_string(isotropic_count(b.n, b.g));
  } else {
    j["row_sum"] = nullptr;
  }
  return j;
}

std::string to_csv(const BrandtMatrix& b) {
  std::string out;
  for (const auto& row : b.m) {
    for (std::size_t k = 0; k < row.size(); ++k) out += (k ? "," : "") + to_string(row[k]);
    out += "\n";
  }
  return out;
}

}  // namespace ssg
