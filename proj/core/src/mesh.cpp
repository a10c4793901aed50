#include "plim/mesh.hpp"

#include <cmath>

#include "plim/error.hpp"

namespace plim {

namespace {

int segment_count(double length, double pitch) {
  const double ratio = length / pitch;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-12 * std::max(1.0, ratio)) return -1;
  return static_cast<int>(rounded);
}

}  // namespace

Mesh::Mesh(std::shared_ptr<const MetricGraph> graph, double pitch) : graph_(std::move(graph)), pitch_(pitch) {
  const auto& g = *graph_;
  if (!(pitch > 0.0)) throw Error(ErrorCode::non_dividing_pitch, "pitch must be positive");
  if (!is_connected(g.vertex_count(), g.edges())) throw Error(ErrorCode::disconnected_graph, "graph is not connected");

  segments_.reserve(g.edge_count());
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const int s = segment_count(g.edges()[e].length, pitch);
    if (s < 0)
      throw Error(ErrorCode::non_dividing_pitch, "pitch " + std::to_string(pitch) + " does not divide edge " +
                                                     std::to_string(e) + " of length " +
                                                     std::to_string(g.edges()[e].length));
    segments_.push_back(s);
  }

  vertex_node_.assign(g.vertex_count(), -1);
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    if (g.vertices()[v].boundary == Boundary::dirichlet) continue;
    vertex_node_[v] = static_cast<int>(nodes_.size());
    nodes_.push_back({static_cast<int>(v), -1, 0});
  }
  edge_first_.reserve(g.edge_count());
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    edge_first_.push_back(static_cast<int>(nodes_.size()));
    for (int s = 1; s < segments_[e]; ++s) nodes_.push_back({-1, static_cast<int>(e), s});
  }

  // Interior nodes carry h * w; each vertex collects h/2 * w per incident edge.
  masses_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nodes_.size()));
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto& edge = g.edges()[e];
    const double half = 0.5 * pitch * edge.weight;
    for (int s = 1; s < segments_[e]; ++s) masses_[edge_first_[e] + s - 1] = pitch * edge.weight;
    if (vertex_node_[static_cast<std::size_t>(edge.u)] >= 0) masses_[vertex_node_[static_cast<std::size_t>(edge.u)]] += half;
    if (vertex_node_[static_cast<std::size_t>(edge.v)] >= 0) masses_[vertex_node_[static_cast<std::size_t>(edge.v)]] += half;
  }
}

int Mesh::edge_node(int edge, int step) const {
  const auto& e = graph_->edges()[static_cast<std::size_t>(edge)];
  if (step == 0) return vertex_node(e.u);
  if (step == segments(edge)) return vertex_node(e.v);
  return edge_first_[static_cast<std::size_t>(edge)] + step - 1;
}

Mesh discretize(const MetricGraph& g, double pitch) {
  return Mesh(std::make_shared<const MetricGraph>(g), pitch);
}

Mesh discretize(std::shared_ptr<const MetricGraph> g, double pitch) { return Mesh(std::move(g), pitch); }

DiscreteOperator assemble(const Mesh& m, MassModel model) {
  const auto& g = m.graph();
  const auto n = static_cast<Eigen::Index>(m.size());
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd degree = Eigen::VectorXd::Zero(n);

  // Triplets are produced edge by edge in a fixed order; setFromTriplets sums
  // duplicates in insertion order, so assembly is reproducible bit for bit.
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto& edge = g.edges()[e];
    const double c = edge.weight / m.pitch();
    const int segs = m.segments(static_cast<int>(e));
    for (int s = 0; s < segs; ++s) {
      const int a = m.edge_node(static_cast<int>(e), s);
      const int b = m.edge_node(static_cast<int>(e), s + 1);
      if (a >= 0) {
        triplets.emplace_back(a, a, c);
        degree[a] += edge.weight;
      }
      if (b >= 0) {
        triplets.emplace_back(b, b, c);
        degree[b] += edge.weight;
      }
      if (a >= 0 && b >= 0) {
        triplets.emplace_back(a, b, -c);
        triplets.emplace_back(b, a, -c);
      }
    }
  }

  DiscreteOperator d;
  d.stiffness.resize(n, n);
  d.stiffness.setFromTriplets(triplets.begin(), triplets.end());
  d.stiffness.makeCompressed();
  d.mass = model == MassModel::lumped ? m.masses() : degree;
  return d;
}

double dirichlet_energy(const DiscreteOperator& d, const Eigen::VectorXd& v) {
  if (static_cast<std::size_t>(v.size()) != d.size())
    throw Error(ErrorCode::dimension_mismatch,
                "vector of size " + std::to_string(v.size()) + " for operator of size " + std::to_string(d.size()));
  return v.dot(d.stiffness * v);
}

double mass_norm(const DiscreteOperator& d, const Eigen::VectorXd& v) {
  if (static_cast<std::size_t>(v.size()) != d.size())
    throw Error(ErrorCode::dimension_mismatch, "vector size does not match operator");
  return std::sqrt(v.dot(d.mass.cwiseProduct(v)));
}

}  // namespace plim
