#include "plim/pate_a_choux.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "plim/error.hpp"
#include "tower_growth.hpp"

namespace plim {

std::size_t GasketGraph::count_at(int k) const {
  return static_cast<std::size_t>(
      std::count_if(vertex_level.begin(), vertex_level.end(), [k](int l) { return l <= k; }));
}

GasketGraph build_gasket(int m) {
  if (m < 0 || m > 12) throw Error(ErrorCode::invalid_sequence, "gasket level must lie in [0, 12]");
  GasketGraph g;
  g.level = m;
  const std::int64_t side = std::int64_t{1} << m;
  std::map<std::array<std::int64_t, 2>, int> index;
  auto add = [&](std::int64_t a, std::int64_t b, int level) {
    auto [it, inserted] = index.emplace(std::array<std::int64_t, 2>{a, b}, static_cast<int>(g.lattice.size()));
    if (inserted) {
      g.lattice.push_back({a, b});
      g.vertex_level.push_back(level);
    }
    return it->second;
  };

  // Cells are triangles (a, b), (a + s, b), (a, b + s) in lattice units.
  std::vector<std::array<std::int64_t, 2>> cells{{0, 0}};
  add(0, 0, 0);
  add(side, 0, 0);
  add(0, side, 0);
  for (int k = 1; k <= m; ++k) {
    const std::int64_t s = side >> k;
    std::vector<std::array<std::int64_t, 2>> next;
    for (const auto& [a, b] : cells) {
      add(a + s, b, k);
      add(a + s, b + s, k);
      add(a, b + s, k);
      next.push_back({a, b});
      next.push_back({a + s, b});
      next.push_back({a, b + s});
    }
    cells = std::move(next);
  }
  for (const auto& [a, b] : cells) {
    const int p = index.at({a, b});
    const int q = index.at({a + 1, b});
    const int r = index.at({a, b + 1});
    g.edges.emplace_back(p, q);
    g.edges.emplace_back(q, r);
    g.edges.emplace_back(r, p);
  }
  const double h = std::sqrt(3.0) / 2.0;
  for (const auto& [a, b] : g.lattice)
    g.points.push_back({(static_cast<double>(a) + 0.5 * static_cast<double>(b)) / static_cast<double>(side),
                        h * static_cast<double>(b) / static_cast<double>(side)});
  return g;
}

std::size_t gasket_vertex_formula(int m) {
  std::size_t p = 1;
  for (int i = 0; i <= m; ++i) p *= 3;
  return (p + 3) / 2;
}

std::size_t gasket_edge_formula(int m) {
  std::size_t p = 1;
  for (int i = 0; i <= m; ++i) p *= 3;
  return p;
}

namespace {

MetricGraph gasket_metric_graph(const GasketGraph& g, Boundary boundary) {
  std::vector<Vertex> vertices;
  for (std::size_t i = 0; i < g.vertex_count(); ++i) {
    Vertex v;
    v.x = g.points[i][0];
    v.y = g.points[i][1];
    v.boundary = g.vertex_level[i] == 0 ? boundary : Boundary::neumann;
    vertices.push_back(v);
  }
  std::vector<Edge> edges;
  for (const auto& [u, v] : g.edges) edges.push_back({u, v, 1.0, 1.0});
  return MetricGraph(std::move(vertices), std::move(edges), static_cast<double>(g.edge_count()));
}

}  // namespace

SpectrumList gasket_graph_spectrum(const GasketGraph& g, Boundary boundary) {
  const Mesh mesh = discretize(gasket_metric_graph(g, boundary), 1.0);
  const DiscreteOperator d = assemble(mesh, MassModel::degree);
  SpectrumList out;
  if (d.size() > 0) {
    const EigenPairs p = solve_dense(d, Selection::all());
    out = cluster(std::vector<double>(p.values.data(), p.values.data() + p.values.size()));
  }
  out.origin = SpectrumOrigin::numeric(g.level, 1.0);
  out.truncation = out.empty() ? 0.0 : out.entries.back().value;
  return out;
}

SpectrumList to_standard_normalization(const SpectrumList& probabilistic) {
  SpectrumList out = probabilistic;
  for (auto& e : out.entries) e.value *= 4.0;
  out.truncation *= 4.0;
  return out;
}

DecimationReport decimation_check(const SpectrumList& level_m, const SpectrumList& level_m1, double tol) {
  DecimationReport r;
  for (const auto& e : level_m1.entries) {
    DecimationReport::Row row{e.value, e.value * (5.0 - e.value), e.multiplicity, false, false};
    for (const auto& x : level_m.entries)
      if (std::abs(x.value - row.image) <= tol * std::max(1.0, std::abs(x.value))) row.matched = true;
    for (double x : kDecimationExceptional)
      if (std::abs(x - e.value) <= tol * std::max(1.0, x)) row.exceptional = true;
    r.total += e.multiplicity;
    if (row.matched || row.exceptional) r.explained += e.multiplicity;
    r.rows.push_back(row);
  }
  return r;
}

std::vector<double> lowest_branch(int first, int last) {
  std::vector<double> out;
  for (int m = std::max(first, 1); m <= last; ++m) {
    const SpectrumList s = to_standard_normalization(gasket_graph_spectrum(build_gasket(m), Boundary::dirichlet));
    out.push_back(std::pow(5.0, m) * s.entries.front().value);
  }
  return out;
}

void ChouxSpec::validate() const {
  if (fiber_depth < 0) throw Error(ErrorCode::invalid_sequence, "fiber_depth must be non-negative");
  if (gasket_level < fiber_depth)
    throw Error(ErrorCode::resolution_too_coarse, "gasket_level " + std::to_string(gasket_level) +
                                                      " cannot resolve gluing at depth " +
                                                      std::to_string(fiber_depth));
  if (gasket_level > 8) throw Error(ErrorCode::invalid_sequence, "gasket_level above 8 is not supported");
}

ChouxSpec ChouxSpec::from_json(const nlohmann::json& doc) {
  try {
    ChouxSpec s;
    s.fiber_depth = doc.value("fiber_depth", s.fiber_depth);
    s.gasket_level = doc.value("gasket_level", s.gasket_level);
    s.boundary = parse_boundary(doc.value("boundary", plim::to_string(s.boundary)));
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, e.what());
  }
}

nlohmann::json ChouxSpec::to_json() const {
  return {{"fiber_depth", fiber_depth}, {"gasket_level", gasket_level}, {"boundary", plim::to_string(boundary)}};
}

Tower build_choux(const ChouxSpec& spec) {
  spec.validate();
  const GasketGraph g = build_gasket(spec.gasket_level);
  detail::Growth rule;
  rule.fiber_size = [](int) { return 2; };
  rule.copies_vertex = [&](int i, int base, const Word&) { return g.vertex_level[static_cast<std::size_t>(base)] != i; };
  rule.copies_edge = [](int, int, const Word&) { return true; };
  Tower t = detail::grow_tower(gasket_metric_graph(g, spec.boundary), spec.fiber_depth, rule);
  validate(t);
  return t;
}

SpectrumList choux_numeric_spectrum(const ChouxSpec& spec, int level, const SolveOptions& solve) {
  const Tower t = build_choux(spec);
  LevelOptions opt;
  opt.mass = MassModel::degree;
  opt.solve = solve;
  return solve_level(t, level < 0 ? t.depth() : level, 1.0, opt).spectrum;
}

double hausdorff_dimension(const ChouxSpec&) { return std::log(6.0) / std::log(2.0); }

double box_counting_dimension(int first, int last) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (int m = first; m <= last; ++m) {
    const Tower t = build_choux({m, m, Boundary::neumann});
    xs.push_back(m * std::log(2.0));
    ys.push_back(std::log(static_cast<double>(t.top().vertex_count())));
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace plim
