#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace dmfw {

/// Undirected communication graph over agents 1..n. Self-loops are implicit
/// (every agent always hears itself) and never stored.
struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;  // normalized: first < second, sorted, unique

  bool connected() const;
  std::vector<int> degrees() const;
  std::vector<std::vector<int>> adjacency() const;  // 0-based neighbor lists
};

Graph make_graph(int n, std::vector<std::pair<int, int>> edges);
Graph make_ring(int n);
Graph make_complete(int n);
Graph make_random_connected(int n, double edge_prob, std::uint64_t seed);

/// Edge-list text format: one `i j` pair per line, 1-based, whitespace
/// separated, `#` starts a comment. n defaults to the largest endpoint.
Graph read_edge_list(std::istream& in, int n = 0);
Graph read_edge_list_file(const std::string& path, int n = 0);
void write_edge_list(std::ostream& out, const Graph& g);

}  // namespace dmfw
