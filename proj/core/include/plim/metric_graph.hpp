#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace plim {

// Fiber coordinate value for a coordinate that has been glued away.
inline constexpr int kCollapsed = -1;

// Fiber word: one entry per level, kCollapsed where the vertex sits in B_i.
using Word = std::vector<int>;

enum class Boundary { neumann, dirichlet };

Boundary parse_boundary(const std::string& text);
std::string to_string(Boundary b);

struct Vertex {
  double x = 0.0;
  double y = 0.0;  // second base coordinate, used by planar bases (gasket)
  Word word;
  Boundary boundary = Boundary::neumann;
};

struct Edge {
  int u = 0;
  int v = 0;
  double length = 1.0;
  double weight = 1.0;  // measure density of the sheet carrying this edge
};

/// Finite-level approximation F_i realized as a weighted metric graph.
///
/// Vertex ids are their positions in vertices(). Construction validates the
/// graph: positive lengths and weights, connectivity, distinct
/// (position, word) labels, and sum(length * weight) equal to total_mass.
class MetricGraph {
 public:
  MetricGraph() = default;
  MetricGraph(std::vector<Vertex> vertices, std::vector<Edge> edges, double total_mass);

  const std::vector<Vertex>& vertices() const noexcept { return vertices_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  double total_mass() const noexcept { return total_mass_; }

  double measure() const;  // sum of length * weight
  std::size_t dirichlet_count() const;

 private:
  void validate() const;

  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  double total_mass_ = 0.0;
};

bool is_connected(std::size_t vertex_count, const std::vector<Edge>& edges);

nlohmann::json to_json(const MetricGraph& g);
MetricGraph metric_graph_from_json(const nlohmann::json& j);

}  // namespace plim
