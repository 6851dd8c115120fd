#include "ssg/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ssg/brandt.hpp"
#include "ssg/cache.hpp"
#include "ssg/graphs.hpp"
#include "ssg/hermitian.hpp"
#include "ssg/spectra.hpp"

namespace ssg {

namespace {

struct RunConfig {
  long p = 0;
  std::size_t g = 1;
  long n = 0;
  std::string kind = "big";
  std::string format = "json";
  std::string cache_dir;
  unsigned jobs = 1;
  bool strip_half_edges = false;
  bool timing = false;
  bool verbose = false;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Checks {
  nlohmann::json list = nlohmann::json::array();
  bool all = true;
  void add(const std::string& name, bool ok, const std::string& detail = "") {
    nlohmann::json c{{"name", name}, {"status", ok ? "pass" : "fail"}};
    if (!detail.empty()) c["detail"] = detail;
    list.push_back(c);
    all = all && ok;
  }
  template <class F>
  void run(const std::string& name, F f) {
    try {
      auto [ok, detail] = f();
      add(name, ok, detail);
    } catch (const std::exception& e) {
      add(name, false, std::string("exception: ") + e.what());
    }
  }
};

using Clock = std::chrono::steady_clock;

nlohmann::json matrix_json(const RationalMatrix& m) {
  auto out = nlohmann::json::array();
  for (const auto& row : m) {
    auto r = nlohmann::json::array();
    for (const auto& x : row) r.push_back(to_string(x));
    out.push_back(r);
  }
  return out;
}

std::string matrix_text(const RationalMatrix& m) { return matrix_json(m).dump(); }

RationalMatrix block_antidiagonal(const RationalMatrix& a) {
  const std::size_t h = a.size();
  RationalMatrix out(2 * h, std::vector<Rational>(2 * h, 0));
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < h; ++j) out[i][h + j] = out[h + i][j] = a[i][j];
  return out;
}

bool is_symmetric(const RationalMatrix& m) {
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (m[i][j] != m[j][i]) return false;
  return true;
}

Polynomial poly_mul(const Polynomial& a, const Polynomial& b) {
  Polynomial out(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

// chi_A(x) chi_A(-x) (-1)^h, the characteristic polynomial of [[0,A],[A,0]]
Polynomial double_cover_poly(const Polynomial& chi) {
  Polynomial neg = chi;
  for (std::size_t i = 1; i < neg.size(); i += 2) neg[i] = -neg[i];
  Polynomial out = poly_mul(chi, neg);
  if ((chi.size() - 1) % 2 == 1)
    for (auto& c : out) c = -c;
  return out;
}

RationalMatrix to_rational(const std::vector<std::vector<long>>& m) {
  RationalMatrix out;
  for (const auto& row : m) {
    out.emplace_back();
    for (auto x : row) out.back().push_back(Rational(x));
  }
  return out;
}

// Published reference values for p = 5 (class order unspecified there).
std::optional<RationalMatrix> reference_brandt_p5(std::size_t g, long ell) {
  static const std::map<std::pair<std::size_t, long>, std::vector<std::vector<long>>> table{
      {{1, 2}, {{3}}},
      {{1, 3}, {{4}}},
      {{1, 7}, {{8}}},
      {{1, 11}, {{12}}},
      {{2, 2}, {{12, 3}, {10, 5}}},
      {{2, 3}, {{34, 6}, {20, 20}}},
      {{2, 7}, {{322, 78}, {260, 140}}},
      {{2, 11}, {{1164, 300}, {1000, 464}}},
      {{3, 2}, {{54, 27, 54}, {30, 15, 90}, {14, 21, 100}}},
      {{3, 3}, {{292, 180, 648}, {200, 200, 720}, {168, 168, 784}}},
  };
  auto it = table.find({g, ell});
  if (it == table.end()) return std::nullopt;
  return to_rational(it->second);
}

void validate_common(const RunConfig& cfg) {
  if (cfg.p < 2 || !is_prime(cfg.p)) throw UsageError("--p must be a prime");
  if (cfg.g < 1) throw UsageError("--g must be at least 1");
  if (cfg.jobs < 1) throw UsageError("--jobs must be at least 1");
}

void validate_ell(const RunConfig& cfg) {
  if (cfg.n < 2 || !is_prime(cfg.n)) throw UsageError("--ell must be a prime");
  if (cfg.n == cfg.p) throw UsageError("--ell must differ from --p");
}

void require_format(const RunConfig& cfg, std::initializer_list<const char*> allowed) {
  for (const char* f : allowed)
    if (cfg.format == f) return;
  throw UsageError("unsupported --format " + cfg.format + " for this command");
}

nlohmann::json header(const RunConfig& cfg) {
  return nlohmann::json{{"p", std::to_string(cfg.p)}, {"g", std::to_string(cfg.g)}};
}

void add_timing(const RunConfig& cfg, nlohmann::json& j, Clock::time_point start) {
  if (cfg.timing)
    j["elapsed_ms"] = std::to_string(std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count());
}

nlohmann::json classes_json(const PolarizedClassSet& cs) {
  nlohmann::json j;
  j["p"] = std::to_string(cs.p);
  j["g"] = std::to_string(cs.g);
  j["h"] = std::to_string(cs.h());
  j["mass"] = to_string(cs.mass());
  auto e = nlohmann::json::array();
  auto list = nlohmann::json::array();
  for (std::size_t i = 0; i < cs.h(); ++i) {
    const auto& c = cs.classes[i];
    e.push_back(std::to_string(c.e));
    nlohmann::json cj{{"index", std::to_string(i)}, {"e", std::to_string(c.e)}};
    if (c.form) cj["hermitian"] = to_json(c.form->matrix());
    if (c.ideal) {
      auto b = nlohmann::json::array();
      for (const auto& q : *c.ideal) b.push_back(to_json(q));
      cj["ideal_basis"] = b;
      cj["ideal_norm"] = to_string(c.ideal_norm);
    }
    auto th = nlohmann::json::array();
    for (auto t : c.theta) th.push_back(std::to_string(t));
    cj["short_vector_counts"] = th;
    list.push_back(cj);
  }
  j["e"] = e;
  j["classes"] = list;
  return j;
}

int cmd_classes(const RunConfig& cfg, std::ostream& out) {
  require_format(cfg, {"json", "csv"});
  auto start = Clock::now();
  auto cs = cached_class_set(cfg.cache_dir, cfg.p, cfg.g);
  if (cfg.format == "csv") {
    out << "index,e\n";
    for (std::size_t i = 0; i < cs.h(); ++i) out << i << "," << cs.classes[i].e << "\n";
    return 0;
  }
  auto j = classes_json(cs);
  add_timing(cfg, j, start);
  out << j.dump(2) << "\n";
  return 0;
}

int cmd_brandt(const RunConfig& cfg, std::ostream& out) {
  require_format(cfg, {"json", "csv"});
  if (cfg.n < 0) throw UsageError("--n must be non-negative");
  if (cfg.g >= 2 && cfg.n != 0) {
    if (!is_prime(cfg.n) || cfg.n == cfg.p) throw UsageError("for g >= 2, --n must be a prime different from --p (or 0)");
  }
  auto start = Clock::now();
  auto cs = cached_class_set(cfg.cache_dir, cfg.p, cfg.g);
  BrandtMatrix b = cfg.n == 0 ? brandt_zero(cs) : brandt_matrix(cs, cfg.n, cfg.jobs);
  if (cfg.format == "csv") {
    out << to_csv(b);
    return 0;
  }
  auto j = to_json(b);
  add_timing(cfg, j, start);
  out << j.dump(2) << "\n";
  return 0;
}

struct Graphs {
  PolarizedClassSet cs;
  IsogenyData data;
  WeightedGraph big, little;
  EnhancedGraph enhanced;
};

Graphs build_graphs(const RunConfig& cfg) {
  Graphs gr;
  gr.cs = cached_class_set(cfg.cache_dir, cfg.p, cfg.g);
  gr.data = isogeny_data(gr.cs, cfg.n, cfg.jobs);
  gr.big = build_big(gr.data);
  gr.little = build_little(gr.data);
  gr.enhanced = build_enhanced(gr.little);
  return gr;
}

void validate_kind(const RunConfig& cfg) {
  if (cfg.kind != "big" && cfg.kind != "little" && cfg.kind != "enhanced")
    throw UsageError("--kind must be big, little or enhanced");
}

int cmd_graph(const RunConfig& cfg, std::ostream& out) {
  validate_ell(cfg);
  validate_kind(cfg);
  require_format(cfg, {"json", "dot"});
  if (cfg.strip_half_edges && cfg.kind == "big") throw UsageError("--strip-half-edges needs a graph with opposites");
  auto start = Clock::now();
  auto gr = build_graphs(cfg);
  WeightedGraph g = cfg.kind == "big" ? gr.big : cfg.kind == "little" ? gr.little : gr.enhanced.graph;
  std::size_t removed = 0;
  if (cfg.strip_half_edges) {
    removed = g.half_edge_count();
    g = strip_half_edges(g);
  }
  if (cfg.format == "dot") {
    out << to_dot(g);
    return 0;
  }
  nlohmann::json j = header(cfg);
  j["ell"] = std::to_string(cfg.n);
  j["graph"] = cfg.kind == "enhanced" && !cfg.strip_half_edges ? to_json(gr.enhanced) : to_json(g);
  if (cfg.strip_half_edges) j["half_edges_removed"] = std::to_string(removed);
  j["connected"] = is_connected(g);
  add_timing(cfg, j, start);
  out << j.dump(2) << "\n";
  return 0;
}

int cmd_spectrum(const RunConfig& cfg, std::ostream& out) {
  validate_ell(cfg);
  validate_kind(cfg);
  require_format(cfg, {"json"});
  auto start = Clock::now();
  auto gr = build_graphs(cfg);
  RationalMatrix m = cfg.kind == "big"      ? gr.big.adjacency()
                     : cfg.kind == "little" ? gr.little.weighted_adjacency()
                                            : gr.enhanced.graph.weighted_adjacency();
  auto rep = ramanujan_report(m, cfg.kind == "enhanced");
  rep.fingerprint = class_set_fingerprint(gr.cs) + "-ell" + std::to_string(cfg.n) + "-" + cfg.kind;
  nlohmann::json j = header(cfg);
  j["ell"] = std::to_string(cfg.n);
  j["kind"] = cfg.kind;
  j["matrix_used"] = cfg.kind == "big" ? "adjacency" : "weighted_adjacency";
  j["matrix"] = matrix_json(m);
  j["report"] = to_json(rep);
  add_timing(cfg, j, start);
  out << j.dump(2) << "\n";
  return 0;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  validate_ell(cfg);
  require_format(cfg, {"json"});
  auto start = Clock::now();
  Checks checks;
  const long ell = cfg.n;

  std::optional<PolarizedClassSet> cs;
  if (!cfg.cache_dir.empty()) {
    try {
      cs = load_cache(cfg.cache_dir, cfg.p, cfg.g);
      checks.add("cache_integrity", true, cs ? "cache file verified" : "no cache file yet");
    } catch (const CacheError& e) {
      checks.add("cache_integrity", false, e.what());
    }
  }
  if (checks.all) {
    checks.run("class_set", [&] {
      if (!cs) cs = cached_class_set(cfg.cache_dir, cfg.p, cfg.g);
      return std::pair{cs->mass() == genus_mass(cfg.p, cfg.g),
                       "h=" + std::to_string(cs->h()) + " mass=" + to_string(cs->mass())};
    });
  }
  if (!checks.all || !cs) {
    nlohmann::json j = header(cfg);
    j["ell"] = std::to_string(ell);
    j["checks"] = checks.list;
    j["all_pass"] = false;
    out << j.dump(2) << "\n";
    return 1;
  }

  checks.run("class_set_independent_of_ell", [&] {
    auto other = class_set(cfg.p, cfg.g, ell);
    if (other.h() != cs->h()) return std::pair{false, std::string("different class numbers")};
    std::vector<bool> hit(cs->h(), false);
    for (const auto& c : other.classes) {
      auto m = identify(*cs, c.lattice);
      if (!m || hit[m->index]) return std::pair{false, std::string("classes do not correspond")};
      hit[m->index] = true;
    }
    return std::pair{true, std::string()};
  });

  BrandtMatrix b;
  checks.run("brandt_integral", [&] {
    b = brandt_matrix(*cs, ell, cfg.jobs);
    return std::pair{true, matrix_text(b.m)};
  });
  checks.run("row_sums", [&] {
    auto r = row_sum_check(b);
    return std::pair{r.ok, "expected " + to_string(r.expected)};
  });
  checks.run("weighted_symmetry", [&] { return std::pair{weighted_symmetric(b), std::string()}; });
  if (cfg.p == 5) {
    if (auto ref = reference_brandt_p5(cfg.g, ell)) {
      checks.run("reference_table_p5", [&] {
        bool ok = permutation_similarity(b.m, *ref).has_value();
        return std::pair{ok, "reference " + matrix_text(*ref)};
      });
    }
  }
  if (cfg.g == 1) {
    checks.run("classical_ideal_brandt", [&] {
      auto order = make_order(cfg.p);
      auto ideals = ideal_classes(*order, ell);
      if (ideals.size() != cs->h()) return std::pair{false, std::string("class numbers differ")};
      // ideal class i corresponds to hermitian class perm[i]
      std::vector<std::size_t> perm(ideals.size());
      for (std::size_t i = 0; i < ideals.size(); ++i) {
        auto m = identify(*cs, HermitianLattice::ideal(order, ideals[i].basis));
        if (!m) return std::pair{false, std::string("ideal class matches no hermitian class")};
        perm[i] = m->index;
      }
      for (long n = 1; n <= 12; ++n) {
        auto classical = brandt_g1_classical(*order, ideals, n);
        auto herm = brandt_matrix(*cs, n, cfg.jobs);
        for (std::size_t i = 0; i < ideals.size(); ++i)
          for (std::size_t j = 0; j < ideals.size(); ++j)
            if (classical.m[i][j] != herm.m[perm[i]][perm[j]])
              return std::pair{false, "mismatch at n=" + std::to_string(n)};
      }
      return std::pair{true, std::string("n = 1..12")};
    });
  }

  std::optional<Graphs> gr;
  checks.run("graphs_built", [&] {
    gr = build_graphs(cfg);
    return std::pair{true, std::string()};
  });
  if (gr && !b.m.empty()) {
    checks.run("big_adjacency_equals_brandt", [&] { return std::pair{gr->big.adjacency() == b.m, std::string()}; });
    checks.run("big_has_no_opposites", [&] {
      auto a = check_axioms(gr->big);
      return std::pair{a.ok && !gr->big.has_opposites, a.detail};
    });
    checks.run("little_axioms", [&] {
      auto a = check_axioms(gr->little);
      return std::pair{a.ok, a.detail};
    });
    checks.run("little_weighted_adjacency_equals_brandt",
               [&] { return std::pair{gr->little.weighted_adjacency() == b.m, std::string()}; });
    checks.run("little_adjacency_symmetric", [&] { return std::pair{is_symmetric(gr->little.adjacency()), std::string()}; });
    checks.run("enhanced_axioms", [&] {
      auto a = check_axioms(gr->enhanced.graph);
      return std::pair{a.ok, a.detail};
    });
    checks.run("enhanced_block_form", [&] {
      bool ok = gr->enhanced.graph.adjacency() == block_antidiagonal(gr->little.adjacency()) &&
                gr->enhanced.graph.weighted_adjacency() == block_antidiagonal(b.m);
      return std::pair{ok, std::string()};
    });
    checks.run("enhanced_double_cover", [&] {
      auto a = check_double_cover(gr->enhanced, gr->little);
      return std::pair{a.ok, a.detail};
    });
    checks.run("connected", [&] {
      bool ok = is_connected(gr->big) && is_connected(gr->little) && is_connected(gr->enhanced.graph);
      return std::pair{ok, std::string()};
    });
    checks.run("trivial_eigenvalue", [&] {
      auto rep = ramanujan_report(b.m);
      return std::pair{rep.k == Rational(isotropic_count(ell, cfg.g)) && evaluate(rep.charpoly, rep.k) == 0,
                       "k=" + to_string(rep.k)};
    });
    checks.run("enhanced_spectrum_symmetric", [&] {
      bool ok = char_poly(gr->enhanced.graph.adjacency()) == double_cover_poly(char_poly(gr->little.adjacency())) &&
                char_poly(gr->enhanced.graph.weighted_adjacency()) == double_cover_poly(char_poly(b.m));
      return std::pair{ok, std::string()};
    });
    checks.run("ramanujan_report", [&] {
      auto rep = ramanujan_report(b.m);
      auto rep2 = ramanujan_report(gr->enhanced.graph.weighted_adjacency(), true);
      return std::pair{true, std::string(rep.ramanujan ? "within" : "outside") + " bound; enhanced " +
                                 (rep2.ramanujan ? "within" : "outside")};
    });
  }

  nlohmann::json j = header(cfg);
  j["ell"] = std::to_string(ell);
  j["checks"] = checks.list;
  j["all_pass"] = checks.all;
  add_timing(cfg, j, start);
  out << j.dump(2) << "\n";
  return checks.all ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Superspecial isogeny classes, Brandt matrices and isogeny graphs"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string cache_flag;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--p", cfg.p, "prime p")->required();
    sub->add_option("--g", cfg.g, "dimension g")->default_val(1);
    sub->add_option("--format", cfg.format, "json, csv or dot");
    sub->add_option("--cache-dir", cache_flag, "class-set cache directory (overrides CACHE_DIR)");
    sub->add_option("--jobs", cfg.jobs, "worker threads")->default_val(1);
    sub->add_flag("--timing", cfg.timing, "include elapsed_ms in JSON output");
    sub->add_flag("-v,--verbose", cfg.verbose, "log configuration to stderr");
  };
  auto* classes = app.add_subcommand("classes", "class representatives and automorphism counts");
  common(classes);
  auto* brandt = app.add_subcommand("brandt", "Brandt matrix B_g(n)");
  common(brandt);
  brandt->add_option("--n,--ell", cfg.n, "level n")->required();
  auto* graph = app.add_subcommand("graph", "isogeny graph");
  common(graph);
  graph->add_option("--ell,--n", cfg.n, "prime ell")->required();
  graph->add_option("--kind", cfg.kind, "big, little or enhanced");
  graph->add_flag("--strip-half-edges", cfg.strip_half_edges, "remove self-paired edges");
  auto* spectrum = app.add_subcommand("spectrum", "spectrum and Ramanujan report");
  common(spectrum);
  spectrum->add_option("--ell,--n", cfg.n, "prime ell")->required();
  spectrum->add_option("--kind", cfg.kind, "big, little or enhanced");
  auto* verify = app.add_subcommand("verify", "run every structural check");
  common(verify);
  verify->add_option("--ell,--n", cfg.n, "prime ell")->required();

  std::vector<const char*> argv{"ssg"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  // --cache-dir beats CACHE_DIR; neither means no caching
  std::string cache_source = "disabled";
  if (!cache_flag.empty()) {
    cfg.cache_dir = cache_flag;
    cache_source = "--cache-dir";
  } else if (const char* env = std::getenv("CACHE_DIR"); env && *env) {
    cfg.cache_dir = env;
    cache_source = "CACHE_DIR";
  }
  if (cfg.verbose)
    err << "p=" << cfg.p << " g=" << cfg.g << " n=" << cfg.n << " jobs=" << cfg.jobs << " cache=" << cfg.cache_dir << " ("
        << cache_source << ")\n";

  try {
    validate_common(cfg);
    if (classes->parsed()) return cmd_classes(cfg, out);
    if (brandt->parsed()) return cmd_brandt(cfg, out);
    if (graph->parsed()) return cmd_graph(cfg, out);
    if (spectrum->parsed()) return cmd_spectrum(cfg, out);
    if (verify->parsed()) return cmd_verify(cfg, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const CacheError& e) {
    err << "check failed: cache_integrity: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "computation failed: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace ssg
