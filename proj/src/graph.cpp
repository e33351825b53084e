#include "dmfw/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "dmfw/rng.hpp"

namespace dmfw {

std::vector<int> Graph::degrees() const {
  std::vector<int> deg(static_cast<size_t>(n), 0);
  for (const auto& [a, b] : edges) {
    ++deg[static_cast<size_t>(a - 1)];
    ++deg[static_cast<size_t>(b - 1)];
  }
  return deg;
}

std::vector<std::vector<int>> Graph::adjacency() const {
  std::vector<std::vector<int>> adj(static_cast<size_t>(n));
  for (const auto& [a, b] : edges) {
    adj[static_cast<size_t>(a - 1)].push_back(b - 1);
    adj[static_cast<size_t>(b - 1)].push_back(a - 1);
  }
  return adj;
}

bool Graph::connected() const {
  if (n <= 0) return false;
  if (n == 1) return true;
  const auto adj = adjacency();
  std::vector<char> seen(static_cast<size_t>(n), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int visited = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : adj[static_cast<size_t>(v)]) {
      if (!seen[static_cast<size_t>(w)]) {
        seen[static_cast<size_t>(w)] = 1;
        ++visited;
        stack.push_back(w);
      }
    }
  }
  return visited == n;
}

Graph make_graph(int n, std::vector<std::pair<int, int>> edges) {
  if (n < 1) throw std::invalid_argument("graph: agent count must be >= 1");
  for (auto& [a, b] : edges) {
    if (a < 1 || a > n || b < 1 || b > n)
      throw std::invalid_argument("graph: edge endpoint outside [1, n]");
    if (a == b) throw std::invalid_argument("graph: explicit self-loop");
    if (a > b) std::swap(a, b);
  }
  std::sort(edges.begin(), edges.end());
  const auto dup = std::adjacent_find(edges.begin(), edges.end());
  if (dup != edges.end()) throw std::invalid_argument("graph: duplicate edge");
  return Graph{n, std::move(edges)};
}

Graph make_ring(int n) {
  if (n < 1) throw std::invalid_argument("graph: agent count must be >= 1");
  std::vector<std::pair<int, int>> edges;
  if (n == 2) {
    edges.emplace_back(1, 2);
  } else if (n >= 3) {
    for (int i = 1; i < n; ++i) edges.emplace_back(i, i + 1);
    edges.emplace_back(1, n);
  }
  return make_graph(n, std::move(edges));
}

Graph make_complete(int n) {
  if (n < 1) throw std::invalid_argument("graph: agent count must be >= 1");
  std::vector<std::pair<int, int>> edges;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) edges.emplace_back(i, j);
  return make_graph(n, std::move(edges));
}

Graph make_random_connected(int n, double edge_prob, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("graph: agent count must be >= 1");
  if (!(edge_prob >= 0.0 && edge_prob <= 1.0))
    throw std::invalid_argument("graph: edge probability outside [0, 1]");
  auto rng = make_engine(seed, 0x67726170);
  std::bernoulli_distribution coin(edge_prob);
  constexpr int kMaxAttempts = 10000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 1; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j)
        if (coin(rng)) edges.emplace_back(i, j);
    Graph g = make_graph(n, std::move(edges));
    if (g.connected()) return g;
  }
  throw std::runtime_error(
      "graph: no connected sample after 10000 attempts; increase edge probability");
}

Graph read_edge_list(std::istream& in, int n) {
  std::vector<std::pair<int, int>> edges;
  int max_node = 0;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    int a = 0, b = 0;
    if (!(ls >> a)) continue;  // blank or comment-only line
    if (!(ls >> b))
      throw std::runtime_error("edge list: missing second endpoint at line " +
                               std::to_string(lineno));
    std::string trailing;
    if (ls >> trailing)
      throw std::runtime_error("edge list: trailing token at line " + std::to_string(lineno));
    if (a < 1 || b < 1)
      throw std::runtime_error("edge list: endpoints are 1-based, line " +
                               std::to_string(lineno));
    max_node = std::max(max_node, std::max(a, b));
    edges.emplace_back(a, b);
  }
  return make_graph(n > 0 ? n : max_node, std::move(edges));
}

Graph read_edge_list_file(const std::string& path, int n) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("edge list: cannot open " + path);
  return read_edge_list(in, n);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# " << g.n << " agents, " << g.edges.size() << " edges\n";
  for (const auto& [a, b] : g.edges) out << a << ' ' << b << '\n';
}

}  // namespace dmfw
