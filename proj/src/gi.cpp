#include "ssqa/gi.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ssqa/rng.hpp"

namespace ssqa {

namespace {

// Dense adjacency lookup for the O(n^4) pair scan in build_gi_qubo.
struct Adjacency {
  int n;
  std::vector<uint8_t> adj;

  explicit Adjacency(const Graph& g) : n(g.n_nodes), adj(size_t(g.n_nodes) * g.n_nodes, 0) {
    for (auto [u, v] : g.edges) {
      adj[size_t(u - 1) * n + (v - 1)] = 1;
      adj[size_t(v - 1) * n + (u - 1)] = 1;
    }
  }
  bool operator()(int u, int v) const { return adj[size_t(u - 1) * n + (v - 1)] != 0; }
};

void check_node(int u, int n, const char* what) {
  if (u < 1 || u > n) {
    throw std::invalid_argument(std::string(what) + " node " + std::to_string(u) +
                                " outside [1, " + std::to_string(n) + "]");
  }
}

}  // namespace

bool Graph::has_edge(int u, int v) const {
  if (u > v) std::swap(u, v);
  return std::binary_search(edges.begin(), edges.end(), std::make_pair(u, v));
}

void Graph::add_edge(int u, int v) {
  check_node(u, n_nodes, "edge");
  check_node(v, n_nodes, "edge");
  if (u == v) throw std::invalid_argument("self-loop on node " + std::to_string(u));
  if (u > v) std::swap(u, v);
  edges.emplace_back(u, v);
}

void Graph::normalize() {
  for (auto [u, v] : edges) {
    check_node(u, n_nodes, "edge");
    check_node(v, n_nodes, "edge");
    if (u == v) throw std::invalid_argument("self-loop on node " + std::to_string(u));
    if (u > v) throw std::logic_error("edge not normalized");
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    throw std::invalid_argument("duplicate edge in graph");
  }
}

Graph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file: " + path);
  Graph g;
  std::string line;
  bool have_header = false;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string first;
    if (!(ss >> first)) continue;
    if (first[0] == '#') continue;
    if (!have_header) {
      g.n_nodes = std::stoi(first);
      if (g.n_nodes < 1) throw std::runtime_error(path + ": n_nodes must be >= 1");
      have_header = true;
      continue;
    }
    int u = std::stoi(first), v = 0;
    if (!(ss >> v)) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 'u v'");
    }
    g.add_edge(u, v);
  }
  if (!have_header) throw std::runtime_error(path + ": missing n_nodes header");
  g.normalize();
  return g;
}

void save_graph(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write graph file: " + path);
  out << g.n_nodes << "\n";
  for (auto [u, v] : g.edges) out << u << " " << v << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

GiInstance generate_gi(int n_nodes, double edge_prob, uint64_t seed,
                       bool permute, double c1, double c2) {
  if (n_nodes < 1) throw std::invalid_argument("generate_gi needs n_nodes >= 1");
  if (edge_prob < 0.0 || edge_prob > 1.0) {
    throw std::invalid_argument("edge_prob outside [0, 1]");
  }
  if (c1 <= 0.0 || c2 <= 0.0) throw std::invalid_argument("penalties must be positive");

  GiInstance inst;
  inst.c1 = c1;
  inst.c2 = c2;
  inst.graph1.n_nodes = n_nodes;

  CounterRng edge_rng(seed, kStreamGiEdges);
  for (int u = 1; u <= n_nodes; ++u) {
    for (int v = u + 1; v <= n_nodes; ++v) {
      uint64_t counter = uint64_t(u) * (n_nodes + 1) + v;
      if (edge_rng.uniform01(counter) < edge_prob) inst.graph1.add_edge(u, v);
    }
  }
  inst.graph1.normalize();

  std::vector<int> to_g1(n_nodes + 1);  // graph2 vertex -> graph1 vertex
  std::iota(to_g1.begin(), to_g1.end(), 0);
  if (permute) {
    // Fisher-Yates on the graph1 -> graph2 relabeling.
    std::vector<int> relabel(n_nodes + 1);
    std::iota(relabel.begin(), relabel.end(), 0);
    CounterRng perm_rng(seed, kStreamGiPerm);
    for (int u = n_nodes; u > 1; --u) {
      int w = 1 + int(perm_rng.below(uint64_t(u), uint64_t(u)));
      std::swap(relabel[u], relabel[w]);
    }
    for (int u = 1; u <= n_nodes; ++u) to_g1[relabel[u]] = u;
    inst.graph2.n_nodes = n_nodes;
    for (auto [u, v] : inst.graph1.edges) inst.graph2.add_edge(relabel[u], relabel[v]);
    inst.graph2.normalize();
  } else {
    inst.graph2 = inst.graph1;
  }
  inst.truth_perm = std::vector<int>(to_g1.begin() + 1, to_g1.end());
  return inst;
}

QuboModel build_gi_qubo(const GiInstance& inst) {
  const int n = inst.graph1.n_nodes;
  if (n != inst.graph2.n_nodes) {
    throw std::invalid_argument("graphs must have equal node counts");
  }
  if (inst.c1 <= 0.0 || inst.c2 <= 0.0) {
    throw std::invalid_argument("penalties must be positive");
  }
  const double c1 = inst.c1, c2 = inst.c2;
  QuboModel q(n * n, 2.0 * c1 * n);
  auto idx = [n](int u, int i) { return (u - 1) * n + (i - 1); };

  // One-hot rows (each graph2 vertex plays exactly one role) and columns
  // (each role played exactly once): c1 * (1 - sum x)^2 expanded.
  for (int u = 1; u <= n; ++u) {
    for (int i = 1; i <= n; ++i) {
      q.add_coeff(idx(u, i), idx(u, i), -2.0 * c1);
      for (int i2 = i + 1; i2 <= n; ++i2) q.add_coeff(idx(u, i), idx(u, i2), 2.0 * c1);
      for (int u2 = u + 1; u2 <= n; ++u2) q.add_coeff(idx(u, i), idx(u2, i), 2.0 * c1);
    }
  }

  // Edge consistency: an edge pair of one graph mapped onto a non-edge pair
  // of the other costs c2, in both orientations of the unordered pair.
  Adjacency e1(inst.graph1), e2(inst.graph2);
  for (int u = 1; u <= n; ++u) {
    for (int v = u + 1; v <= n; ++v) {
      bool in2 = e2(u, v);
      for (int i = 1; i <= n; ++i) {
        for (int j = i + 1; j <= n; ++j) {
          if (e1(i, j) == in2) continue;
          q.add_coeff(idx(u, i), idx(v, j), c2);
          q.add_coeff(idx(u, j), idx(v, i), c2);
        }
      }
    }
  }
  return q;
}

uint8_t VertexMapping::at(int u, int i) const {
  check_node(u, n_nodes, "mapping");
  check_node(i, n_nodes, "mapping");
  return assign[size_t(u - 1) * n_nodes + (i - 1)];
}

int VertexMapping::row_sum(int u) const {
  check_node(u, n_nodes, "mapping");
  int s = 0;
  for (int i = 1; i <= n_nodes; ++i) s += at(u, i);
  return s;
}

int VertexMapping::col_sum(int i) const {
  check_node(i, n_nodes, "mapping");
  int s = 0;
  for (int u = 1; u <= n_nodes; ++u) s += at(u, i);
  return s;
}

VertexMapping decode_mapping(const BitVector& x, int n_nodes) {
  if (x.size() != size_t(n_nodes) * n_nodes) {
    throw std::invalid_argument("bit vector length is not n_nodes^2");
  }
  VertexMapping m;
  m.n_nodes = n_nodes;
  m.assign = x;
  for (uint8_t b : m.assign) {
    if (b > 1) throw std::invalid_argument("bit vector entry not 0/1");
  }
  return m;
}

MappingVerdict verify_mapping(const GiInstance& inst, const VertexMapping& m) {
  const int n = inst.graph1.n_nodes;
  if (m.n_nodes != n) throw std::invalid_argument("mapping size mismatch");

  std::vector<int> role(n + 1, 0);  // graph2 vertex -> graph1 vertex
  for (int u = 1; u <= n; ++u) {
    if (m.row_sum(u) != 1) return MappingVerdict::kInvalidAssignment;
    for (int i = 1; i <= n; ++i) {
      if (m.at(u, i)) role[u] = i;
    }
  }
  for (int i = 1; i <= n; ++i) {
    if (m.col_sum(i) != 1) return MappingVerdict::kInvalidAssignment;
  }

  Adjacency e1(inst.graph1), e2(inst.graph2);
  for (int u = 1; u <= n; ++u) {
    for (int v = u + 1; v <= n; ++v) {
      if (e2(u, v) != e1(role[u], role[v])) return MappingVerdict::kEdgeViolation;
    }
  }
  return MappingVerdict::kValidIsomorphism;
}

}  // namespace ssqa
