#include "ssg/graphs.hpp"

#include <deque>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "ssg/parallel.hpp"

namespace ssg {

std::size_t WeightedGraph::half_edge_count() const {
  std::size_t c = 0;
  for (std::size_t e = 0; e < edges.size(); ++e) c += is_half_edge(e);
  return c;
}

RationalMatrix WeightedGraph::adjacency() const {
  RationalMatrix a(vertices(), std::vector<Rational>(vertices(), 0));
  for (const auto& e : edges) a[e.origin][e.terminus] += 1;
  return a;
}

RationalMatrix WeightedGraph::weighted_adjacency() const {
  RationalMatrix a(vertices(), std::vector<Rational>(vertices(), 0));
  for (const auto& e : edges) a[e.origin][e.terminus] += ratio(vertex_weight[e.origin], e.weight);
  return a;
}

namespace {

ClassKernels class_kernels(const PolarizedClassSet& cs, std::size_t i, i64 ell) {
  const auto& ci = cs.classes[i];
  ClassKernels out;
  auto lags = lagrangians(ci.lattice, ell);
  std::unordered_map<IntMatrix, std::size_t, IntMatrixHash> index;
  for (std::size_t k = 0; k < lags.size(); ++k) {
    out.keys.push_back(lags[k].key);
    index.emplace(lags[k].key, k);
  }
  out.orbit_of_key.assign(lags.size(), SIZE_MAX);
  for (std::size_t k = 0; k < lags.size(); ++k) {
    if (out.orbit_of_key[k] != SIZE_MAX) continue;
    const std::size_t orbit = out.orbits.size();
    KernelOrbit ko;
    ko.rep_key = lags[k].key;
    for (const auto& u : ci.aut) {
      auto it = index.find(sublattice_key(u * lags[k].basis, ell));
      if (it == index.end()) throw std::logic_error("automorphism image of a kernel is not a kernel");
      if (out.orbit_of_key[it->second] == SIZE_MAX) {
        out.orbit_of_key[it->second] = orbit;
        ++ko.size;
      }
    }
    HermitianLattice nb = ci.lattice.sublattice(lags[k].basis, ell);
    auto match = identify(cs, nb);
    if (!match) throw std::logic_error("isogenous lattice matches no class");
    ko.target = match->index;
    IntMatrix phi = lags[k].basis * match->iso;  // L_target -> L_i
    IntMatrix dual = scaled_inverse(phi, ell);   // L_i -> L_target
    if (dual * phi != [&] {
          IntMatrix s = IntMatrix::identity(phi.rows);
          for (auto& x : s.data) x *= ell;
          return s;
        }())
      throw std::logic_error("dual isogeny check failed");
    ko.dual_key = sublattice_key(dual, ell);
    out.orbits.push_back(std::move(ko));
  }
  return out;
}

}  // namespace

IsogenyData isogeny_data(const PolarizedClassSet& cs, i64 ell, unsigned jobs) {
  IsogenyData d;
  d.p = cs.p;
  d.g = cs.g;
  d.ell = ell;
  for (const auto& c : cs.classes) d.e.push_back(static_cast<i64>(c.e));
  d.classes = parallel_map<ClassKernels>(cs.h(), jobs, [&](std::size_t i) { return class_kernels(cs, i, ell); });
  std::vector<std::unordered_map<IntMatrix, std::size_t, IntMatrixHash>> key_index(cs.h());
  for (std::size_t i = 0; i < cs.h(); ++i)
    for (std::size_t k = 0; k < d.classes[i].keys.size(); ++k) key_index[i].emplace(d.classes[i].keys[k], k);
  for (std::size_t i = 0; i < cs.h(); ++i)
    for (auto& o : d.classes[i].orbits) {
      auto it = key_index[o.target].find(o.dual_key);
      if (it == key_index[o.target].end()) throw std::logic_error("dual kernel is not a kernel of the target");
      o.opposite = d.classes[o.target].orbit_of_key[it->second];
    }
  return d;
}

WeightedGraph build_big(const IsogenyData& data) {
  WeightedGraph g;
  g.kind = "big";
  g.vertex_weight = data.e;
  for (std::size_t i = 0; i < data.classes.size(); ++i) {
    const auto& ck = data.classes[i];
    for (std::size_t k = 0; k < ck.keys.size(); ++k) {
      const auto& o = ck.orbits[ck.orbit_of_key[k]];
      i64 w = data.e[i] / static_cast<i64>(o.size);
      g.edges.push_back({i, o.target, std::nullopt, w, w});
    }
  }
  return g;
}

WeightedGraph build_little(const IsogenyData& data) {
  WeightedGraph g;
  g.kind = "little";
  g.vertex_weight = data.e;
  g.has_opposites = true;
  g.allows_half_edges = true;
  std::vector<std::size_t> offset;
  for (const auto& ck : data.classes) {
    offset.push_back(g.edges.size());
    for (const auto& o : ck.orbits) {
      i64 w = data.e[offset.size() - 1] / static_cast<i64>(o.size);
      g.edges.push_back({offset.size() - 1, o.target, std::nullopt, w, w});
    }
  }
  std::size_t idx = 0;
  for (const auto& ck : data.classes)
    for (const auto& o : ck.orbits) g.edges[idx++].opposite = offset[o.target] + o.opposite;
  return g;
}

EnhancedGraph build_enhanced(const WeightedGraph& little) {
  EnhancedGraph out;
  const std::size_t h = little.vertices(), m = little.edges.size();
  out.h = h;
  auto& g = out.graph;
  g.kind = "enhanced";
  g.has_opposites = true;
  g.allows_half_edges = false;
  g.vertex_weight = little.vertex_weight;
  g.vertex_weight.insert(g.vertex_weight.end(), little.vertex_weight.begin(), little.vertex_weight.end());
  g.edges.resize(2 * m);
  for (std::size_t k = 0; k < m; ++k) {
    const auto& e = little.edges[k];
    if (!e.opposite) throw std::invalid_argument("little graph without opposites");
    // type-0 -> type-g and type-g -> type-0 copies
    g.edges[k] = {e.origin, h + e.terminus, m + *e.opposite, e.weight, e.length};
    g.edges[m + k] = {h + e.origin, e.terminus, *e.opposite, e.weight, e.length};
  }
  out.iota_vertex.resize(2 * h);
  for (std::size_t v = 0; v < 2 * h; ++v) out.iota_vertex[v] = (v + h) % (2 * h);
  out.iota_edge.resize(2 * m);
  out.cover_edge.resize(2 * m);
  for (std::size_t k = 0; k < 2 * m; ++k) {
    out.iota_edge[k] = (k + m) % (2 * m);
    out.cover_edge[k] = k % m;
  }
  return out;
}

WeightedGraph strip_half_edges(const WeightedGraph& g) {
  WeightedGraph out = g;
  out.edges.clear();
  out.allows_half_edges = false;
  std::vector<std::size_t> remap(g.edges.size(), SIZE_MAX);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (g.is_half_edge(e)) continue;
    remap[e] = out.edges.size();
    out.edges.push_back(g.edges[e]);
  }
  for (auto& e : out.edges)
    if (e.opposite) e.opposite = remap[*e.opposite];
  return out;
}

bool is_connected(const WeightedGraph& g) {
  const std::size_t n = g.vertices();
  if (n <= 1) return true;
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& e : g.edges) {
    adj[e.origin].push_back(e.terminus);
    adj[e.terminus].push_back(e.origin);
  }
  std::vector<bool> seen(n, false);
  std::deque<std::size_t> queue{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!queue.empty()) {
    std::size_t v = queue.front();
    queue.pop_front();
    for (auto w : adj[v])
      if (!seen[w]) {
        seen[w] = true;
        ++count;
        queue.push_back(w);
      }
  }
  return count == n;
}

CheckResult check_axioms(const WeightedGraph& g) {
  auto fail = [](std::string why) { return CheckResult{false, std::move(why)}; };
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    const auto& e = g.edges[k];
    if (e.origin >= g.vertices() || e.terminus >= g.vertices()) return fail("edge endpoint out of range");
    if (e.weight <= 0 || g.vertex_weight[e.origin] % e.weight != 0)
      return fail("w(e) does not divide w(o(e)) for edge " + std::to_string(k));
    if (g.has_opposites) {
      if (!e.opposite || *e.opposite >= g.edges.size()) return fail("edge without opposite");
      const auto& o = g.edges[*e.opposite];
      if (!o.opposite || *o.opposite != k) return fail("opposite of opposite differs for edge " + std::to_string(k));
      if (o.origin != e.terminus || o.terminus != e.origin) return fail("opposite edge has wrong endpoints");
      if (o.weight != e.weight) return fail("w(opposite) != w(e) for edge " + std::to_string(k));
      if (o.length != e.length) return fail("f(opposite) != f(e) for edge " + std::to_string(k));
      if (*e.opposite == k && !g.allows_half_edges) return fail("half-edge in a graph without half-edges");
    } else if (e.opposite) {
      return fail("opposite pairing on a graph without opposites");
    }
  }
  return {};
}

CheckResult check_double_cover(const EnhancedGraph& enh, const WeightedGraph& little) {
  auto fail = [](std::string why) { return CheckResult{false, std::move(why)}; };
  const auto& g = enh.graph;
  const std::size_t h = enh.h;
  if (g.vertices() != 2 * h || little.vertices() != h) return fail("vertex count is not 2h");
  if (g.half_edge_count() != 0) return fail("enhanced graph has half-edges");
  auto pi = [&](std::size_t v) { return v % h; };
  for (std::size_t v = 0; v < 2 * h; ++v) {
    std::size_t iv = enh.iota_vertex[v];
    if (iv == v) return fail("iota fixes a vertex");
    if (enh.iota_vertex[iv] != v) return fail("iota is not an involution on vertices");
    if (pi(iv) != pi(v)) return fail("iota does not commute with the covering map");
    if (g.vertex_weight[v] != little.vertex_weight[pi(v)]) return fail("vertex weight not preserved");
  }
  std::vector<std::vector<std::size_t>> star_count(2 * h);
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    const auto& e = g.edges[k];
    const auto& c = little.edges[enh.cover_edge[k]];
    if ((e.origin < h) == (e.terminus < h)) return fail("edge inside one part");
    if (pi(e.origin) != c.origin || pi(e.terminus) != c.terminus) return fail("covering map breaks incidence");
    if (e.weight != c.weight || e.length != c.length) return fail("covering map breaks weights");
    if (enh.cover_edge[*e.opposite] != *c.opposite) return fail("covering map breaks opposites");
    std::size_t ik = enh.iota_edge[k];
    if (ik == k) return fail("iota fixes an edge");
    if (enh.iota_edge[ik] != k) return fail("iota is not an involution on edges");
    const auto& ie = g.edges[ik];
    if (ie.origin != enh.iota_vertex[e.origin] || ie.terminus != enh.iota_vertex[e.terminus])
      return fail("iota is not a graph map");
    if (enh.cover_edge[ik] != enh.cover_edge[k]) return fail("iota does not commute with the covering map");
    if (enh.iota_edge[*e.opposite] != *ie.opposite) return fail("iota does not commute with opposites");
  }
  // local bijectivity: the star of v maps bijectively onto the star of pi(v)
  for (std::size_t v = 0; v < 2 * h; ++v) {
    std::vector<std::size_t> hits(little.edges.size(), 0);
    for (std::size_t k = 0; k < g.edges.size(); ++k)
      if (g.edges[k].origin == v) ++hits[enh.cover_edge[k]];
    for (std::size_t c = 0; c < little.edges.size(); ++c)
      if (hits[c] != (little.edges[c].origin == pi(v) ? 1u : 0u)) return fail("covering map is not a local bijection");
  }
  // quotient by iota: edge orbits {k, iota k} correspond one-to-one to little edges
  std::vector<std::size_t> preimages(little.edges.size(), 0);
  for (std::size_t k = 0; k < g.edges.size(); ++k) ++preimages[enh.cover_edge[k]];
  for (auto c : preimages)
    if (c != 2) return fail("little edge without exactly two preimages");
  return {};
}

std::string to_dot(const WeightedGraph& g) {
  std::ostringstream s;
  s << "digraph " << g.kind << " {\n";
  for (std::size_t v = 0; v < g.vertices(); ++v)
    s << "  v" << v << " [label=\"v" << v << " (e=" << g.vertex_weight[v] << ")\"];\n";
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    const auto& e = g.edges[k];
    s << "  v" << e.origin << " -> v" << e.terminus << " [label=\"w=" << e.weight << " f=" << e.length;
    if (g.is_half_edge(k)) s << " half-edge\", style=dashed";
    else s << "\"";
    s << "];\n";
  }
  s << "}\n";
  return s.str();
}

namespace {

nlohmann::json matrix_json(const RationalMatrix& m) {
  auto out = nlohmann::json::array();
  for (const auto& row : m) {
    auto r = nlohmann::json::array();
    for (const auto& x : row) r.push_back(to_string(x));
    out.push_back(r);
  }
  return out;
}

}  // namespace

nlohmann::json to_json(const WeightedGraph& g) {
  nlohmann::json j;
  j["kind"] = g.kind;
  j["has_opposites"] = g.has_opposites;
  j["allows_half_edges"] = g.allows_half_edges;
  auto vs = nlohmann::json::array();
  for (std::size_t v = 0; v < g.vertices(); ++v) vs.push_back({{"index", std::to_string(v)}, {"weight", std::to_string(g.vertex_weight[v])}});
  j["vertices"] = vs;
  auto es = nlohmann::json::array();
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    const auto& e = g.edges[k];
    nlohmann::json ej{{"index", std::to_string(k)},
                      {"origin", std::to_string(e.origin)},
                      {"terminus", std::to_string(e.terminus)},
                      {"weight", std::to_string(e.weight)},
                      {"length", std::to_string(e.length)},
                      {"half_edge", g.is_half_edge(k)}};
    ej["opposite"] = e.opposite ? nlohmann::json(std::to_string(*e.opposite)) : nlohmann::json(nullptr);
    es.push_back(ej);
  }
  j["edges"] = es;
  j["half_edges"] = std::to_string(g.half_edge_count());
  j["adjacency"] = matrix_json(g.adjacency());
  j["weighted_adjacency"] = matrix_json(g.weighted_adjacency());
  return j;
}

nlohmann::json to_json(const EnhancedGraph& g) {
  nlohmann::json j = to_json(g.graph);
  auto iv = nlohmann::json::array();
  for (auto v : g.iota_vertex) iv.push_back(std::to_string(v));
  auto ie = nlohmann::json::array();
  for (auto e : g.iota_edge) ie.push_back(std::to_string(e));
  j["iota_vertex"] = iv;
  j["iota_edge"] = ie;
  return j;
}

}  // namespace ssg
