#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ssqa/model.hpp"

namespace ssqa {

// Undirected simple graph, nodes numbered 1..n_nodes.
struct Graph {
  int n_nodes = 0;
  std::vector<std::pair<int, int>> edges;  // normalized u < v, sorted, unique

  bool has_edge(int u, int v) const;
  void add_edge(int u, int v);
  void normalize();  // sort, dedupe, validate
};

Graph load_graph(const std::string& path);
void save_graph(const Graph& g, const std::string& path);

// A graph-isomorphism decision instance: is graph2 a relabeling of graph1?
struct GiInstance {
  Graph graph1;
  Graph graph2;
  double c1 = 0.75;  // vertex one-hot penalty weight
  double c2 = 0.75;  // edge inconsistency penalty weight
  // Maps graph2 vertex -> graph1 vertex (1-based) when known by construction.
  std::optional<std::vector<int>> truth_perm;
};

// graph1 ~ Erdos-Renyi(n_nodes, edge_prob); graph2 is either a verbatim copy
// or (permute=true) a uniformly random relabeling with truth_perm recorded.
GiInstance generate_gi(int n_nodes, double edge_prob, uint64_t seed,
                       bool permute, double c1 = 0.75, double c2 = 0.75);

// Penalty QUBO over n_nodes^2 bits x_{u,i} ("graph2 vertex u plays graph1
// vertex i"), bit index (u-1)*n_nodes + (i-1):
//   H = c1 * sum_u (1 - sum_i x_{u,i})^2 + c1 * sum_i (1 - sum_u x_{u,i})^2
//     + c2 * [pairs mapped onto a missing edge] + c2 * [edges mapped onto a non-edge]
// Expansion constant 2*c1*n_nodes is carried in the model so a perfect
// mapping sits at energy exactly 0.
QuboModel build_gi_qubo(const GiInstance& inst);

struct VertexMapping {
  int n_nodes = 0;
  std::vector<uint8_t> assign;  // row-major (u,i), entries 0/1

  uint8_t at(int u, int i) const;  // 1-based
  int row_sum(int u) const;
  int col_sum(int i) const;
};

VertexMapping decode_mapping(const BitVector& x, int n_nodes);

enum class MappingVerdict {
  kValidIsomorphism,
  kInvalidAssignment,  // some row or column sum != 1
  kEdgeViolation,      // bijection maps an edge onto a non-edge either way
};

MappingVerdict verify_mapping(const GiInstance& inst, const VertexMapping& m);

}  // namespace ssqa
