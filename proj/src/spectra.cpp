#include "ssg/spectra.hpp"

#include <algorithm>
#include <stdexcept>

namespace ssg {

namespace {

void trim(Polynomial& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

int degree(const Polynomial& f) { return static_cast<int>(f.size()) - 1; }

Polynomial sub(Polynomial a, const Polynomial& b) {
  if (a.size() < b.size()) a.resize(b.size(), 0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
  trim(a);
  return a;
}

Polynomial derivative(const Polynomial& f) {
  Polynomial d;
  for (std::size_t i = 1; i < f.size(); ++i) d.push_back(f[i] * static_cast<long>(i));
  trim(d);
  return d;
}

std::pair<Polynomial, Polynomial> divmod(Polynomial a, const Polynomial& b) {
  if (b.empty()) throw std::domain_error("polynomial division by zero");
  trim(a);
  Polynomial q(std::max(0, degree(a) - degree(b) + 1), 0);
  while (degree(a) >= degree(b)) {
    int shift = degree(a) - degree(b);
    Rational c = a.back() / b.back();
    q[shift] = c;
    for (std::size_t i = 0; i < b.size(); ++i) a[i + shift] -= c * b[i];
    trim(a);
  }
  trim(q);
  return {q, a};
}

Polynomial monic(Polynomial f) {
  trim(f);
  if (f.empty()) return f;
  Rational lead = f.back();
  for (auto& c : f) c /= lead;
  return f;
}

Polynomial gcd(Polynomial a, Polynomial b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    auto r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return monic(a);
}

Polynomial exact_div(const Polynomial& a, const Polynomial& b) {
  auto [q, r] = divmod(a, b);
  if (!r.empty()) throw std::logic_error("inexact polynomial division");
  return q;
}

// Yun's square-free decomposition: f = prod a_i^i.
std::vector<std::pair<Polynomial, std::size_t>> squarefree(const Polynomial& f) {
  std::vector<std::pair<Polynomial, std::size_t>> out;
  Polynomial fm = monic(f);
  Polynomial d0 = derivative(fm);
  Polynomial a0 = gcd(fm, d0);
  Polynomial b = exact_div(fm, a0);
  Polynomial c = exact_div(d0, a0);
  Polynomial d = sub(c, derivative(b));
  for (std::size_t i = 1; degree(b) > 0; ++i) {
    Polynomial a = gcd(b, d);
    b = exact_div(b, a);
    c = exact_div(d, a);
    d = sub(c, derivative(b));
    if (degree(a) > 0) out.emplace_back(a, i);
  }
  return out;
}

struct Sturm {
  std::vector<Polynomial> seq;
  explicit Sturm(const Polynomial& f) {
    seq.push_back(f);
    seq.push_back(derivative(f));
    while (degree(seq.back()) > 0) {
      auto r = divmod(seq[seq.size() - 2], seq.back()).second;
      if (r.empty()) break;
      for (auto& x : r) x = -x;
      seq.push_back(std::move(r));
    }
  }
  int variations(const Rational& x) const {
    int v = 0, last = 0;
    for (const auto& p : seq) {
      int s = sgn(evaluate(p, x));
      if (s == 0) continue;
      if (last != 0 && s != last) ++v;
      last = s;
    }
    return v;
  }
  // distinct roots in (a, b]
  int count(const Rational& a, const Rational& b) const { return variations(a) - variations(b); }
};

const Rational& target_width() {
  static const Rational w(Integer(1), Integer(1) << 30);
  return w;
}

void isolate(const Polynomial& f, std::size_t mult, std::vector<RootInterval>& out) {
  Sturm st(f);
  Rational bound = 1;
  Polynomial fm = monic(f);
  for (std::size_t i = 0; i + 1 < fm.size(); ++i) bound = std::max<Rational>(bound, 1 + abs(fm[i]));
  std::vector<std::pair<Rational, Rational>> stack{{-bound, bound}};
  std::vector<RootInterval> found;
  while (!stack.empty()) {
    auto [a, b] = stack.back();
    stack.pop_back();
    int c = st.count(a, b);
    if (c == 0) continue;
    if (c == 1) {
      if (evaluate(f, b) == 0) {
        found.push_back({b, b, mult});
        continue;
      }
      Integer lo = a.get_num() / a.get_den();  // truncation, adjusted below
      if (Rational(lo) <= a) lo += 1;
      bool exact = false;
      for (Integer z = lo; Rational(z) < b && !exact; z += 1) {
        if (b - a > 4) break;
        if (evaluate(f, Rational(z)) == 0) {
          found.push_back({Rational(z), Rational(z), mult});
          exact = true;
        }
      }
      if (exact) continue;
      if (b - a <= target_width()) {
        found.push_back({a, b, mult});
        continue;
      }
    }
    Rational m = (a + b) / 2;
    stack.push_back({m, b});
    stack.push_back({a, m});
  }
  out.insert(out.end(), found.begin(), found.end());
}

}  // namespace

Rational evaluate(const Polynomial& f, const Rational& x) {
  Rational s = 0;
  for (std::size_t i = f.size(); i-- > 0;) s = s * x + f[i];
  return s;
}

std::string to_string(const Polynomial& f) {
  std::string s;
  for (std::size_t i = f.size(); i-- > 0;) {
    if (f[i] == 0) continue;
    Rational c = f[i];
    bool neg = c < 0;
    if (neg) c = -c;
    if (!s.empty()) s += neg ? " - " : " + ";
    else if (neg) s += "-";
    if (c != 1 || i == 0) s += ssg::to_string(c);
    if (i >= 1) s += (c != 1 ? "*x" : "x");
    if (i >= 2) s += "^" + std::to_string(i);
  }
  return s.empty() ? "0" : s;
}

Polynomial char_poly(const RationalMatrix& a) {
  // Faddeev-LeVerrier, exact over Q.
  const std::size_t n = a.size();
  for (const auto& row : a)
    if (row.size() != n) throw std::invalid_argument("char_poly needs a square matrix");
  Polynomial c(n + 1, 0);
  c[n] = 1;
  RationalMatrix m(n, std::vector<Rational>(n, 0));
  for (std::size_t k = 1; k <= n; ++k) {
    RationalMatrix am = multiply(a, m);
    for (std::size_t i = 0; i < n; ++i) am[i][i] += c[n - k + 1];
    m = std::move(am);
    RationalMatrix t = multiply(a, m);
    Rational tr = 0;
    for (std::size_t i = 0; i < n; ++i) tr += t[i][i];
    c[n - k] = -tr / static_cast<long>(k);
  }
  return c;
}

std::vector<RootInterval> real_roots(const Polynomial& f0) {
  Polynomial f = f0;
  trim(f);
  if (f.empty()) throw std::invalid_argument("zero polynomial");
  std::vector<RootInterval> out;
  std::size_t total = 0;
  for (const auto& [factor, mult] : squarefree(f)) {
    std::size_t before = out.size();
    isolate(factor, mult, out);
    if (out.size() - before != static_cast<std::size_t>(degree(factor)))
      throw std::domain_error("polynomial has non-real roots");
    total += (out.size() - before) * mult;
  }
  if (total != static_cast<std::size_t>(degree(f))) throw std::domain_error("polynomial has non-real roots");
  std::sort(out.begin(), out.end(), [](const RootInterval& x, const RootInterval& y) { return x.lo < y.lo; });
  return out;
}

std::vector<RootInterval> eigenvalues(const RationalMatrix& m) { return real_roots(char_poly(m)); }

SpectralReport ramanujan_report(const RationalMatrix& m, bool bipartite) {
  SpectralReport rep;
  rep.bipartite = bipartite;
  if (m.empty()) throw std::invalid_argument("empty matrix");
  for (std::size_t i = 0; i < m.size(); ++i) {
    Rational s = 0;
    for (const auto& x : m[i]) s += x;
    if (i == 0) rep.k = s;
    else if (s != rep.k) throw std::invalid_argument("matrix does not have constant row sums");
  }
  rep.charpoly = char_poly(m);
  if (evaluate(rep.charpoly, rep.k) != 0) throw std::logic_error("row sum is not an eigenvalue");
  if (bipartite && evaluate(rep.charpoly, -rep.k) != 0) throw std::logic_error("-k is not an eigenvalue of a bipartite graph");
  const Rational bound_sq = 4 * (rep.k - 1);
  rep.bound = "|lambda| <= 2*sqrt(k-1) with k = " + to_string(rep.k) + (bipartite ? ", excluding k and -k" : ", excluding k");
  Polynomial boundary{-bound_sq, 0, 1};  // x^2 - 4(k-1)
  bool on_boundary_possible = degree(gcd(rep.charpoly, boundary)) > 0;
  Polynomial sqf = exact_div(monic(rep.charpoly), gcd(rep.charpoly, derivative(rep.charpoly)));
  Sturm st(sqf);

  bool removed_k = false, removed_minus_k = !bipartite;
  for (const auto& r : real_roots(rep.charpoly)) {
    RootInterval rest = r;
    if (r.exact() && r.lo == rep.k && !removed_k) {
      removed_k = true;
      rep.eigen.push_back({{r.lo, r.hi, 1}, true, true});
      if (--rest.multiplicity == 0) continue;
    }
    if (r.exact() && r.lo == -rep.k && !removed_minus_k) {
      removed_minus_k = true;
      rep.eigen.push_back({{r.lo, r.hi, 1}, true, true});
      if (--rest.multiplicity == 0) continue;
    }
    EigenVerdict v{rest, false, false};
    Rational lo = rest.lo, hi = rest.hi;
    for (;;) {
      Rational sq_lo, sq_hi;  // bounds on lambda^2
      if (lo >= 0) {
        sq_lo = lo * lo;
        sq_hi = hi * hi;
      } else if (hi <= 0) {
        sq_lo = hi * hi;
        sq_hi = lo * lo;
      } else {
        sq_lo = 0;
        sq_hi = std::max(lo * lo, hi * hi);
      }
      if (sq_hi <= bound_sq) {
        v.within_bound = true;
        break;
      }
      if (sq_lo > bound_sq) break;
      if (on_boundary_possible && lo != hi) {
        // lambda^2 = 4(k-1) exactly iff the boundary polynomial vanishes at a root in (lo, hi]
        Polynomial common = gcd(sqf, boundary);
        if (Sturm(common).count(lo, hi) > 0) {
          v.within_bound = true;
          break;
        }
      }
      Rational mid = (lo + hi) / 2;
      if (st.count(lo, mid) > 0) hi = mid;
      else lo = mid;
    }
    if (!v.within_bound) rep.ramanujan = false;
    rep.eigen.push_back(v);
  }
  if (!removed_k || !removed_minus_k) throw std::logic_error("trivial eigenvalue missing");
  return rep;
}

nlohmann::json to_json(const RootInterval& r) {
  nlohmann::json j;
  if (r.exact()) {
    j["value"] = to_string(r.lo);
  } else {
    j["lo"] = to_string(r.lo);
    j["hi"] = to_string(r.hi);
  }
  j["multiplicity"] = std::to_string(r.multiplicity);
  return j;
}

nlohmann::json to_json(const SpectralReport& r) {
  nlohmann::json j;
  if (!r.fingerprint.empty()) j["fingerprint"] = r.fingerprint;
  auto coeffs = nlohmann::json::array();
  for (const auto& c : r.charpoly) coeffs.push_back(to_string(c));
  j["charpoly_coefficients_low_to_high"] = coeffs;
  j["charpoly"] = to_string(r.charpoly);
  j["k"] = to_string(r.k);
  j["bound"] = r.bound;
  j["bipartite"] = r.bipartite;
  auto ev = nlohmann::json::array();
  for (const auto& v : r.eigen) {
    auto e = to_json(v.value);
    e["trivial"] = v.trivial;
    e["within_bound"] = v.within_bound;
    ev.push_back(e);
  }
  j["eigenvalues"] = ev;
  j["ramanujan"] = r.ramanujan;
  return j;
}

}  // namespace ssg
