#pragma once

#include <cstddef>

#include "plim/fiber.hpp"
#include "plim/mesh.hpp"
#include "plim/metric_graph.hpp"

namespace plim::test {

inline MetricGraph unit_interval(Boundary b) {
  return MetricGraph({{0.0, 0.0, {}, b}, {1.0, 0.0, {}, b}}, {{0, 1, 1.0, 1.0}}, 1.0);
}

// Two vertices joined by `strands` parallel edges of the given length, each
// carrying weight 1 / strands.
inline MetricGraph theta(int strands, double length, Boundary b) {
  std::vector<Edge> edges;
  for (int s = 0; s < strands; ++s) edges.push_back({0, 1, length, 1.0 / strands});
  return MetricGraph({{0.0, 0.0, {}, b}, {length, 0.0, {}, b}}, std::move(edges), length);
}

// Level i and level i-1 of a tower at a common pitch, with their pencils
// and the fiber map between them.
struct AdjacentLevels {
  Mesh upper;
  Mesh lower;
  DiscreteOperator a_upper;
  DiscreteOperator a_lower;
  FiberMap map;

  AdjacentLevels(const Tower& t, int i, double pitch, MassModel model = MassModel::lumped)
      : upper(discretize(t.levels[static_cast<std::size_t>(i)], pitch)),
        lower(discretize(t.levels[static_cast<std::size_t>(i - 1)], pitch)),
        a_upper(assemble(upper, model)),
        a_lower(assemble(lower, model)),
        map(t.fiber(i), upper, lower) {}
};

inline double m_inner(const DiscreteOperator& d, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.dot(d.mass.cwiseProduct(b));
}

}  // namespace plim::test
