#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "plim/eigensolve.hpp"
#include "plim/error.hpp"
#include "plim/laakso.hpp"
#include "plim/mesh.hpp"
#include "plim/metric_graph.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace {

using namespace plim;
using plim::test::theta;
using plim::test::unit_interval;

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no plim::Error thrown";
  return ErrorCode::parse_error;
}

TEST(Discretize, NeumannIntervalHalfCellMasses) {
  const Mesh m = discretize(unit_interval(Boundary::neumann), 0.25);
  ASSERT_EQ(m.size(), 5u);
  std::vector<double> masses(m.masses().begin(), m.masses().end());
  std::vector<double> nodes_by_position(5);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const MeshNode& n = m.nodes()[i];
    const int pos = n.is_vertex() ? (n.vertex == 0 ? 0 : 4) : n.step;
    nodes_by_position[static_cast<std::size_t>(pos)] = masses[i];
  }
  EXPECT_EQ(nodes_by_position, (std::vector<double>{0.125, 0.25, 0.25, 0.25, 0.125}));
}

TEST(Discretize, DirichletIntervalDropsEndpoints) {
  const Mesh m = discretize(unit_interval(Boundary::dirichlet), 0.25);
  ASSERT_EQ(m.size(), 3u);
  for (double x : m.masses()) EXPECT_DOUBLE_EQ(x, 0.25);
  EXPECT_EQ(m.vertex_node(0), -1);
  EXPECT_EQ(m.vertex_node(1), -1);
}

TEST(Discretize, TwoStrandThetaHandAssembly) {
  const Mesh m = discretize(theta(2, 1.0, Boundary::dirichlet), 0.5);
  ASSERT_EQ(m.size(), 2u);
  for (double x : m.masses()) EXPECT_DOUBLE_EQ(x, 0.25);
  // each midpoint couples to two Dirichlet ends through weight 1/2 over h = 1/2
  const DiscreteOperator d = assemble(m);
  EXPECT_DOUBLE_EQ(d.stiffness.coeff(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(d.stiffness.coeff(1, 1), 2.0);
  EXPECT_DOUBLE_EQ(d.stiffness.coeff(0, 1), 0.0);
}

TEST(Discretize, NodeCountFormulaAndMassConservation) {
  const Tower t = build_laakso({{2, 3, 3}, 4, Boundary::dirichlet});
  const double h = laakso_pitch({{2, 3, 3}, 4, Boundary::dirichlet});
  for (const MetricGraph& g : t.levels) {
    const Mesh m = discretize(g, h);
    long expected = static_cast<long>(g.vertex_count()) - static_cast<long>(g.dirichlet_count());
    for (const Edge& e : g.edges()) expected += std::lround(e.length / h) - 1;
    EXPECT_EQ(static_cast<long>(m.size()), expected);
    // Dirichlet ends drop half a cell on each of their edges
    double dropped = 0.0;
    for (const Edge& e : g.edges())
      for (int v : {e.u, e.v})
        if (g.vertices()[static_cast<std::size_t>(v)].boundary == Boundary::dirichlet) dropped += 0.5 * h * e.weight;
    EXPECT_NEAR(m.masses().sum() + dropped, g.measure(), 1e-12);
  }
}

TEST(Discretize, NeumannMassEqualsMeasure) {
  const Tower t = build_laakso({{2, 2}, 8, Boundary::neumann});
  for (const MetricGraph& g : t.levels) EXPECT_NEAR(discretize(g, 1.0 / 32).masses().sum(), 1.0, 1e-12);
}

TEST(Discretize, RejectsNonDividingPitch) {
  EXPECT_EQ(code_of([] { discretize(unit_interval(Boundary::neumann), 0.3); }), ErrorCode::non_dividing_pitch);
  EXPECT_EQ(code_of([] { discretize(unit_interval(Boundary::neumann), 0.0); }), ErrorCode::non_dividing_pitch);
}

Vertex at(double x) { return {x, 0.0, {}, Boundary::neumann}; }

TEST(MetricGraphValidation, RejectsBadGraphs) {
  EXPECT_EQ(code_of([] {
              MetricGraph({at(0), at(1), at(2), at(3)}, {{0, 1, 1.0, 1.0}, {2, 3, 1.0, 1.0}}, 2.0);
            }),
            ErrorCode::disconnected_graph);
  EXPECT_EQ(code_of([] { MetricGraph({at(0), at(1)}, {{0, 1, -1.0, 1.0}}, -1.0); }), ErrorCode::invalid_graph);
  EXPECT_EQ(code_of([] { MetricGraph({at(0), at(1)}, {{0, 1, 1.0, 1.0}}, 2.0); }), ErrorCode::invalid_graph);
  EXPECT_EQ(code_of([] { MetricGraph({at(0), at(1)}, {{0, 0, 1.0, 1.0}}, 1.0); }), ErrorCode::invalid_graph);
  EXPECT_EQ(code_of([] { MetricGraph({at(0), at(0)}, {{0, 1, 1.0, 1.0}}, 1.0); }), ErrorCode::invalid_graph);
}

TEST(MetricGraphValidation, JsonRoundTrip) {
  const Tower t = build_laakso({{2, 2}, 8, Boundary::dirichlet});
  const MetricGraph back = metric_graph_from_json(to_json(t.top()));
  ASSERT_EQ(back.vertex_count(), t.top().vertex_count());
  ASSERT_EQ(back.edge_count(), t.top().edge_count());
  EXPECT_EQ(to_json(back), to_json(t.top()));
  EXPECT_EQ(code_of([] { metric_graph_from_json(nlohmann::json::parse(R"({"vertices":1})")); }),
            ErrorCode::parse_error);
}

TEST(Assemble, DirichletIntervalMatchesClosedForm) {
  const int n = 32;
  const double h = 1.0 / n;
  const DiscreteOperator d = assemble(discretize(unit_interval(Boundary::dirichlet), h));
  const EigenPairs p = solve_dense(d, Selection::all());
  ASSERT_EQ(p.size(), static_cast<std::size_t>(n - 1));
  for (int k = 1; k < n; ++k) {
    const double expected = plim::test::fd_interval_eigenvalue(k, h);
    EXPECT_NEAR(p.values[k - 1], expected, 1e-10 * expected) << "k=" << k;
  }
}

TEST(Assemble, NeumannIntervalHasConstantGroundState) {
  const DiscreteOperator d = assemble(discretize(unit_interval(Boundary::neumann), 1.0 / 16));
  const EigenPairs p = solve_dense(d, Selection::smallest(2));
  EXPECT_NEAR(p.values[0], 0.0, 1e-10);
  const Eigen::VectorXd v = p.vectors.col(0);
  EXPECT_NEAR(v.maxCoeff() - v.minCoeff(), 0.0, 1e-10);
}

TEST(Assemble, RowSumsVanishWithoutDirichletNodes) {
  const Tower t = build_laakso({{2, 3}, 4, Boundary::neumann});
  for (const MetricGraph& g : t.levels)
    for (MassModel model : {MassModel::lumped, MassModel::degree}) {
      const DiscreteOperator d = assemble(discretize(g, 1.0 / 24), model);
      const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(d.size()));
      EXPECT_LE((d.stiffness * ones).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(Assemble, StiffnessIsSymmetric) {
  const Tower t = build_laakso({{2, 2}, 4, Boundary::dirichlet});
  const DiscreteOperator d = assemble(discretize(t.top(), 1.0 / 16));
  const Eigen::SparseMatrix<double> diff = d.stiffness - Eigen::SparseMatrix<double>(d.stiffness.transpose());
  EXPECT_EQ(diff.norm(), 0.0);
}

TEST(DirichletEnergy, ConstantOnNeumannGraphIsZero) {
  const Tower t = build_laakso({{2, 2}, 4, Boundary::neumann});
  const DiscreteOperator d = assemble(discretize(t.top(), 1.0 / 16));
  EXPECT_NEAR(dirichlet_energy(d, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(d.size()), 3.0)), 0.0, 1e-12);
}

TEST(DirichletEnergy, MidpointHandComputation) {
  const DiscreteOperator d = assemble(discretize(unit_interval(Boundary::dirichlet), 0.5));
  ASSERT_EQ(d.size(), 1u);
  EXPECT_DOUBLE_EQ(dirichlet_energy(d, Eigen::VectorXd::Ones(1)), 4.0);
}

TEST(DirichletEnergy, ClippingNeverIncreasesEnergy) {
  const Tower t = build_laakso({{2, 2}, 4, Boundary::dirichlet});
  const DiscreteOperator d = assemble(discretize(t.top(), 1.0 / 16));
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-0.5, 1.5);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(d.size()));
    for (auto& x : v) x = u(rng);
    const Eigen::VectorXd c = v.cwiseMax(0.0).cwiseMin(1.0);
    EXPECT_LE(dirichlet_energy(d, c), dirichlet_energy(d, v) + 1e-12);
  }
}

TEST(DirichletEnergy, RejectsWrongSize) {
  const DiscreteOperator d = assemble(discretize(unit_interval(Boundary::dirichlet), 0.25));
  EXPECT_EQ(code_of([&] { dirichlet_energy(d, Eigen::VectorXd::Ones(4)); }), ErrorCode::dimension_mismatch);
  EXPECT_EQ(code_of([&] { mass_norm(d, Eigen::VectorXd::Ones(2)); }), ErrorCode::dimension_mismatch);
}

TEST(Boundary, ParsesNames) {
  EXPECT_EQ(parse_boundary("neumann"), Boundary::neumann);
  EXPECT_EQ(parse_boundary("dirichlet"), Boundary::dirichlet);
  EXPECT_EQ(to_string(Boundary::dirichlet), "dirichlet");
  EXPECT_EQ(code_of([] { parse_boundary("robin"); }), ErrorCode::parse_error);
}

}  // namespace
