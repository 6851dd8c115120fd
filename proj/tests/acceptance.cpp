// One line per acceptance criterion; exit status 0 iff every line passes.

#include <iostream>
#include <map>
#include <sstream>

#include "oracles.hpp"
#include "ssg/brandt.hpp"
#include "ssg/cli.hpp"
#include "ssg/graphs.hpp"
#include "ssg/spectra.hpp"

using namespace ssg;

namespace {

const std::vector<long> kPrimes{2, 3, 5, 7, 11, 13};
const std::vector<long> kEll{2, 3, 5, 7, 11};

RationalMatrix rat(const std::vector<std::vector<long>>& m) {
  RationalMatrix out;
  for (const auto& row : m) {
    out.emplace_back();
    for (long x : row) out.back().push_back(x);
  }
  return out;
}

RationalMatrix antidiag(const RationalMatrix& a) {
  const std::size_t h = a.size();
  RationalMatrix out(2 * h, std::vector<Rational>(2 * h, 0));
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < h; ++j) out[i][h + j] = out[h + i][j] = a[i][j];
  return out;
}

bool symmetric(const RationalMatrix& m) {
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j)
      if (m[i][j] != m[j][i]) return false;
  return true;
}

Polynomial pm_poly(const Polynomial& chi) {
  Polynomial neg = chi;
  for (std::size_t i = 1; i < neg.size(); i += 2) neg[i] = -neg[i];
  Polynomial out(2 * chi.size() - 1, 0);
  for (std::size_t i = 0; i < chi.size(); ++i)
    for (std::size_t j = 0; j < neg.size(); ++j) out[i + j] += chi[i] * neg[j];
  if ((chi.size() - 1) % 2 == 1)
    for (auto& c : out) c = -c;
  return out;
}

struct GridPoint {
  long p;
  std::size_t g;
  long ell;
  BrandtMatrix b;
  WeightedGraph big, little;
  EnhancedGraph enhanced;
};

class Report {
 public:
  void line(int n, const std::string& what, bool ok, const std::string& detail) {
    std::cout << "criterion " << n << ": " << (ok ? "PASS" : "FAIL") << "  " << what;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << std::endl;
    all_ = all_ && ok;
  }
  bool all() const { return all_; }

 private:
  bool all_ = true;
};

std::string cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return std::to_string(code) + "\n" + out.str();
}

}  // namespace

int main() {
  Report report;
  std::map<std::pair<long, std::size_t>, PolarizedClassSet> sets;
  auto set = [&](long p, std::size_t g) -> const PolarizedClassSet& {
    auto key = std::pair{p, g};
    if (!sets.count(key)) sets.emplace(key, class_set(p, g, p == 2 ? 3 : 2));
    return sets.at(key);
  };

  // 1: reference Brandt matrices for p = 5
  {
    const std::vector<std::tuple<std::size_t, long, std::vector<std::vector<long>>>> table{
        {1, 2, {{3}}},
        {1, 3, {{4}}},
        {1, 7, {{8}}},
        {1, 11, {{12}}},
        {2, 2, {{12, 3}, {10, 5}}},
        {2, 3, {{34, 6}, {20, 20}}},
        {2, 7, {{322, 78}, {260, 140}}},
        {2, 11, {{1164, 300}, {1000, 464}}},
        {3, 2, {{54, 27, 54}, {30, 15, 90}, {14, 21, 100}}},
        {3, 3, {{292, 180, 648}, {200, 200, 720}, {168, 168, 784}}},
    };
    bool ok = true;
    std::string bad;
    for (const auto& [g, ell, ref] : table) {
      auto b = brandt_matrix(set(5, g), ell, 4);
      if (!permutation_similarity(b.m, rat(ref))) {
        ok = false;
        bad += " B_" + std::to_string(g) + "(" + std::to_string(ell) + ")";
      }
    }
    report.line(1, "reference Brandt matrices for p=5, g=1..3", ok, ok ? "10 matrices" : "mismatch:" + bad);
  }

  // 2: class numbers
  {
    std::string got;
    bool ok = true;
    for (std::size_t g = 1; g <= 3; ++g) {
      got += (g > 1 ? "," : "") + std::to_string(set(5, g).h());
      ok = ok && set(5, g).h() == g;
    }
    report.line(2, "class numbers h_1, h_2, h_3 for p=5", ok, got);
  }

  // grid computations shared by 3, 4, 5, 7, 8
  std::vector<GridPoint> grid;
  std::string grid_error;
  try {
    for (long p : kPrimes)
      for (std::size_t g = 1; g <= 2; ++g)
        for (long ell : kEll) {
          if (ell == p) continue;
          GridPoint pt{p, g, ell, brandt_matrix(set(p, g), ell, 4), {}, {}, {}};
          auto data = isogeny_data(set(p, g), ell, 4);
          pt.big = build_big(data);
          pt.little = build_little(data);
          pt.enhanced = build_enhanced(pt.little);
          grid.push_back(std::move(pt));
        }
  } catch (const std::exception& e) {
    grid_error = e.what();
  }
  auto tag = [](const GridPoint& pt) {
    return "p=" + std::to_string(pt.p) + " g=" + std::to_string(pt.g) + " l=" + std::to_string(pt.ell);
  };
  auto over_grid = [&](int n, const std::string& what, auto pred) {
    if (!grid_error.empty()) {
      report.line(n, what, false, grid_error);
      return;
    }
    std::string fail;
    for (const auto& pt : grid) {
      bool ok = false;
      try {
        ok = pred(pt);
      } catch (const std::exception& e) {
        fail += " [" + tag(pt) + ": " + e.what() + "]";
        continue;
      }
      if (!ok) fail += " [" + tag(pt) + "]";
    }
    report.line(n, what, fail.empty(), fail.empty() ? std::to_string(grid.size()) + " grid points" : "failed:" + fail);
  };

  over_grid(3, "row sums equal prod (l^k + 1)", [](const GridPoint& pt) { return row_sum_check(pt.b).ok; });

  over_grid(4, "graph adjacency identities and double cover", [](const GridPoint& pt) {
    auto a = pt.little.adjacency();
    return pt.big.adjacency() == pt.b.m && pt.little.weighted_adjacency() == pt.b.m && symmetric(a) &&
           check_axioms(pt.little).ok && check_axioms(pt.enhanced.graph).ok &&
           pt.enhanced.graph.adjacency() == antidiag(a) && pt.enhanced.graph.weighted_adjacency() == antidiag(pt.b.m) &&
           check_double_cover(pt.enhanced, pt.little).ok;
  });

  over_grid(5, "isogeny graphs connected", [](const GridPoint& pt) {
    return is_connected(pt.big) && is_connected(pt.little) && is_connected(pt.enhanced.graph);
  });

  // 6: ideal-theoretic against hermitian Brandt matrices in genus one
  {
    std::string fail;
    for (long p : kPrimes) {
      try {
        auto o = make_order(p);
        auto ideals = ideal_classes(*o, p == 2 ? 3 : 2);
        const auto& cs = set(p, 1);
        if (ideals.size() != cs.h()) {
          fail += " [p=" + std::to_string(p) + " class numbers]";
          continue;
        }
        std::vector<std::size_t> perm;
        for (const auto& I : ideals) perm.push_back(identify(cs, HermitianLattice::ideal(o, I.basis)).value().index);
        if (cs.mass() != ratio(p - 1, 24)) fail += " [p=" + std::to_string(p) + " mass]";
        for (i64 n = 1; n <= 12; ++n) {
          auto a = brandt_g1_classical(*o, ideals, n), b = brandt_matrix(cs, n);
          for (std::size_t i = 0; i < cs.h(); ++i)
            for (std::size_t j = 0; j < cs.h(); ++j)
              if (a.m[i][j] != b.m[perm[i]][perm[j]]) fail += " [p=" + std::to_string(p) + " n=" + std::to_string(n) + "]";
        }
      } catch (const std::exception& e) {
        fail += " [p=" + std::to_string(p) + ": " + e.what() + "]";
      }
    }
    report.line(6, "genus one: ideal and hermitian Brandt matrices agree for n<=12, Eichler mass", fail.empty(), fail);
  }

  // 7: weighted symmetry, and automorphism counts by brute force
  {
    std::string detail;
    bool ok = grid_error.empty();
    for (const auto& pt : grid)
      if (!weighted_symmetric(pt.b)) {
        ok = false;
        detail += " [" + tag(pt) + "]";
      }
    std::vector<std::size_t> brute;
    for (const auto& c : set(5, 2).classes) brute.push_back(oracle::automorphism_count(c.form->matrix()));
    std::vector<std::size_t> lib;
    for (const auto& c : set(5, 2).classes) lib.push_back(c.e);
    std::sort(brute.begin(), brute.end());
    bool e_ok = brute == std::vector<std::size_t>{72, 240} && lib == brute;
    ok = ok && e_ok;
    detail = "brute-force e=(" + std::to_string(brute[0]) + "," + std::to_string(brute[1]) + ")" + detail;
    report.line(7, "weighted symmetry on the grid; e=(72,240) for p=5 g=2", ok, detail);
  }

  // 8: spectra
  {
    std::string fail;
    auto b = brandt_matrix(set(5, 2), 2);
    if (char_poly(b.m) != Polynomial{30, -17, 1}) fail += " [charpoly p=5 g=2 l=2]";
    for (const auto& pt : grid) {
      try {
        auto rep = ramanujan_report(pt.b.m);
        if (rep.k != Rational(isotropic_count(pt.ell, pt.g))) fail += " [" + tag(pt) + " trivial]";
        auto little = pt.little.adjacency();
        if (char_poly(pt.enhanced.graph.adjacency()) != pm_poly(char_poly(little)) ||
            char_poly(pt.enhanced.graph.weighted_adjacency()) != pm_poly(char_poly(pt.b.m)))
          fail += " [" + tag(pt) + " +-spec]";
        auto again = ramanujan_report(pt.b.m);
        auto bip = ramanujan_report(pt.enhanced.graph.weighted_adjacency(), true);
        if (to_json(again) != to_json(rep) || to_json(bip) != to_json(ramanujan_report(pt.enhanced.graph.weighted_adjacency(), true)))
          fail += " [" + tag(pt) + " unstable]";
      } catch (const std::exception& e) {
        fail += " [" + tag(pt) + ": " + e.what() + "]";
      }
    }
    // verdicts do not depend on the worker count
    for (long p : {5L, 13L}) {
      auto a = cli({"spectrum", "--p", std::to_string(p), "--g", "2", "--ell", "3", "--jobs", "1"});
      auto c = cli({"spectrum", "--p", std::to_string(p), "--g", "2", "--ell", "3", "--jobs", "4"});
      if (a != c) fail += " [spectrum jobs p=" + std::to_string(p) + "]";
    }
    report.line(8, "char poly, trivial eigenvalue, +-spectrum, stable Ramanujan verdicts", fail.empty(),
                fail.empty() ? "" : "failed:" + fail);
  }

  // 9: byte-identical output across runs and worker counts
  {
    std::string fail;
    const std::vector<std::vector<std::string>> commands{
        {"classes", "--p", "13", "--g", "2"},
        {"brandt", "--p", "5", "--g", "2", "--n", "7"},
        {"graph", "--p", "11", "--g", "2", "--ell", "3", "--kind", "big"},
        {"graph", "--p", "7", "--g", "2", "--ell", "2", "--kind", "enhanced"},
        {"spectrum", "--p", "13", "--g", "1", "--ell", "5", "--kind", "little"},
        {"verify", "--p", "5", "--g", "2", "--ell", "3"},
    };
    for (const auto& base : commands) {
      auto one = base, many = base;
      one.insert(one.end(), {"--jobs", "1"});
      many.insert(many.end(), {"--jobs", "4"});
      auto a = cli(one), b = cli(one), c = cli(many);
      if (a != b || a != c || a.rfind("0\n", 0) != 0) fail += " [" + base[0] + " --p " + base[2] + "]";
    }
    report.line(9, "deterministic JSON across runs and --jobs 1 vs 4", fail.empty(), fail);
  }

  return report.all() ? 0 : 1;
}
