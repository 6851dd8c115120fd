#pragma once

// Big, little and enhanced isogeny graphs in the weighted-graph formalism:
// directed edges with an optional opposite pairing, half-edges (self-paired
// edges), edge weights w(e) dividing w(o(e)) and lengths.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssg/brandt.hpp"
#include "ssg/hermitian.hpp"

namespace ssg {

struct GraphEdge {
  std::size_t origin = 0;
  std::size_t terminus = 0;
  std::optional<std::size_t> opposite;
  i64 weight = 1;
  i64 length = 1;
};

struct WeightedGraph {
  std::string kind;
  std::vector<i64> vertex_weight;
  std::vector<GraphEdge> edges;
  bool has_opposites = false;
  bool allows_half_edges = false;

  std::size_t vertices() const { return vertex_weight.size(); }
  bool is_half_edge(std::size_t e) const { return edges[e].opposite && *edges[e].opposite == e; }
  std::size_t half_edge_count() const;
  /// Number of edges i -> j.
  RationalMatrix adjacency() const;
  /// sum over edges i -> j of w(v_i) / w(e)
  RationalMatrix weighted_adjacency() const;
};

/// Per class i, the ell-isogeny kernels of L_i (Lagrangian sublattices) with
/// the class of their image, grouped into Aut(L_i)-orbits.
struct KernelOrbit {
  IntMatrix rep_key;
  std::size_t size = 0;
  std::size_t target = 0;
  IntMatrix dual_key;  // kernel of the dual isogeny, a key of L_target
  std::size_t opposite = 0;  // orbit index in class `target`
};
struct ClassKernels {
  std::vector<IntMatrix> keys;              // every kernel, enumeration order
  std::vector<std::size_t> orbit_of_key;    // parallel to keys
  std::vector<KernelOrbit> orbits;
};
struct IsogenyData {
  long p = 0;
  std::size_t g = 0;
  i64 ell = 0;
  std::vector<i64> e;
  std::vector<ClassKernels> classes;
};

/// Throws std::logic_error when a kernel's image matches no class, a dual is
/// not integral, or the opposite pairing is inconsistent.
IsogenyData isogeny_data(const PolarizedClassSet& cs, i64 ell, unsigned jobs = 1);

WeightedGraph build_big(const IsogenyData& data);
WeightedGraph build_little(const IsogenyData& data);

struct EnhancedGraph {
  WeightedGraph graph;
  std::size_t h = 0;
  std::vector<std::size_t> iota_vertex;
  std::vector<std::size_t> iota_edge;
  std::vector<std::size_t> cover_edge;  // edge -> little edge
};
EnhancedGraph build_enhanced(const WeightedGraph& little);

WeightedGraph strip_half_edges(const WeightedGraph& g);
bool is_connected(const WeightedGraph& g);

struct CheckResult {
  bool ok = true;
  std::string detail;
};
/// opposite of opposite is the edge itself, o(opp e) = t(e), w and f agree
/// on opposite edges, w(e) | w(o(e)), half-edges only where allowed.
CheckResult check_axioms(const WeightedGraph& g);
/// Covering map to the little graph, fixed-point-free involution, quotient
/// equal to the little graph, bipartiteness.
CheckResult check_double_cover(const EnhancedGraph& enhanced, const WeightedGraph& little);

std::string to_dot(const WeightedGraph& g);
nlohmann::json to_json(const WeightedGraph& g);
nlohmann::json to_json(const EnhancedGraph& g);

}  // namespace ssg
