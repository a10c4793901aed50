#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "plim/metric_graph.hpp"

namespace plim {

// A mesh node is either a (non-Dirichlet) graph vertex or an interior point
// step * pitch along an edge, measured from edge.u.
struct MeshNode {
  int vertex = -1;
  int edge = -1;
  int step = 0;

  bool is_vertex() const noexcept { return vertex >= 0; }
};

/// Uniform subdivision of a MetricGraph with lumped node masses.
class Mesh {
 public:
  Mesh(std::shared_ptr<const MetricGraph> graph, double pitch);

  const MetricGraph& graph() const noexcept { return *graph_; }
  double pitch() const noexcept { return pitch_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<MeshNode>& nodes() const noexcept { return nodes_; }
  const Eigen::VectorXd& masses() const noexcept { return masses_; }

  // Number of pitch-length segments on edge e.
  int segments(int edge) const { return segments_[static_cast<std::size_t>(edge)]; }

  // Node index of a vertex, or -1 if the vertex is Dirichlet (eliminated).
  int vertex_node(int vertex) const { return vertex_node_[static_cast<std::size_t>(vertex)]; }

  // Node index at position step along edge; steps 0 and segments(e) are the
  // end vertices and may be -1 when Dirichlet.
  int edge_node(int edge, int step) const;

 private:
  std::shared_ptr<const MetricGraph> graph_;
  double pitch_;
  std::vector<MeshNode> nodes_;
  Eigen::VectorXd masses_;
  std::vector<int> vertex_node_;
  std::vector<int> segments_;
  std::vector<int> edge_first_;  // first interior node of each edge
};

// Throws Error(non_dividing_pitch) when some edge length is not an integer
// multiple of pitch within relative 1e-12.
Mesh discretize(const MetricGraph& g, double pitch);
Mesh discretize(std::shared_ptr<const MetricGraph> g, double pitch);

enum class MassModel {
  lumped,  // half-cell masses, the finite-difference discretization
  degree,  // weighted vertex degree, the probabilistic graph Laplacian
};

/// Stiffness/mass pencil (A, M) with Dirichlet vertices eliminated.
struct DiscreteOperator {
  Eigen::SparseMatrix<double> stiffness;
  Eigen::VectorXd mass;

  std::size_t size() const noexcept { return static_cast<std::size_t>(mass.size()); }
};

DiscreteOperator assemble(const Mesh& m, MassModel model = MassModel::lumped);

// v^T A v
double dirichlet_energy(const DiscreteOperator& d, const Eigen::VectorXd& v);

// sqrt(v^T M v)
double mass_norm(const DiscreteOperator& d, const Eigen::VectorXd& v);

}  // namespace plim
