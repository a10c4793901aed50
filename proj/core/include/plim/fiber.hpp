#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "plim/mesh.hpp"
#include "plim/metric_graph.hpp"

namespace plim {

// Image of a level-i vertex or edge under phi_i, with its G_i label
// (kCollapsed when the item lies in B_i).
struct FiberLink {
  int parent = 0;
  int label = kCollapsed;
};

/// Graph-level data of the maps pi_i / phi_i between levels i and i-1.
///
/// Every level-(i-1) item is either glued (one child, label kCollapsed) or
/// has exactly fiber_size children with labels 0..fiber_size-1. Edges keep
/// their length and orientation under the map.
struct FiberStructure {
  int level = 1;
  int fiber_size = 1;
  std::vector<FiberLink> vertex_links;
  std::vector<FiberLink> edge_links;
};

void validate(const FiberStructure& fs, const MetricGraph& upper, const MetricGraph& lower);

/// Levels F_0..F_n of one construction; fibers[i-1] maps level i to i-1.
struct Tower {
  std::vector<MetricGraph> levels;
  std::vector<FiberStructure> fibers;

  int depth() const noexcept { return static_cast<int>(levels.size()) - 1; }
  const MetricGraph& top() const { return levels.back(); }
  const FiberStructure& fiber(int level) const { return fibers.at(static_cast<std::size_t>(level - 1)); }
};

// Checks every FiberStructure against its graphs and that composed maps
// preserve the base position (phi_i o Phi_i = Phi_{i-1}).
void validate(const Tower& t);

/// Mesh-level fiber correspondence between consecutive levels.
///
/// Provides the pullback phi_i^* (lift), the fiber average (project_down,
/// the tilde-P_i of the construction) and the projector P_i = lift o
/// project_down together with its complement onto the mean-zero part.
class FiberMap {
 public:
  // Throws Error(incompatible_mesh) unless both meshes share the pitch and
  // every lower node has the child count the fiber structure promises.
  FiberMap(const FiberStructure& fs, const Mesh& upper, const Mesh& lower);

  std::size_t upper_size() const noexcept { return parent_.size(); }
  std::size_t lower_size() const noexcept { return children_.size(); }
  int fiber_size() const noexcept { return fiber_size_; }
  int parent(std::size_t node) const { return parent_[node]; }
  int label(std::size_t node) const { return label_[node]; }
  const std::vector<int>& children(std::size_t lower_node) const { return children_[lower_node]; }

  Eigen::VectorXd lift(const Eigen::VectorXd& u) const;
  Eigen::VectorXd project_down(const Eigen::VectorXd& v) const;
  Eigen::VectorXd project(const Eigen::VectorXd& v) const;
  Eigen::VectorXd complement(const Eigen::VectorXd& v) const;

 private:
  int fiber_size_;
  std::vector<int> parent_;
  std::vector<int> label_;
  std::vector<std::vector<int>> children_;
};

}  // namespace plim
