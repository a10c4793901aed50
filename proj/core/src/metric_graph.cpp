#include "plim/metric_graph.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

#include "plim/error.hpp"

namespace plim {

Boundary parse_boundary(const std::string& text) {
  if (text == "neumann") return Boundary::neumann;
  if (text == "dirichlet") return Boundary::dirichlet;
  throw Error(ErrorCode::parse_error, "unknown boundary '" + text + "' (expected neumann or dirichlet)");
}

std::string to_string(Boundary b) { return b == Boundary::neumann ? "neumann" : "dirichlet"; }

namespace {

int find_root(std::vector<int>& parent, int a) {
  while (parent[static_cast<std::size_t>(a)] != a) {
    auto& p = parent[static_cast<std::size_t>(a)];
    p = parent[static_cast<std::size_t>(p)];
    a = p;
  }
  return a;
}

}  // namespace

bool is_connected(std::size_t vertex_count, const std::vector<Edge>& edges) {
  if (vertex_count == 0) return false;
  std::vector<int> parent(vertex_count);
  std::iota(parent.begin(), parent.end(), 0);
  std::size_t components = vertex_count;
  for (const auto& e : edges) {
    int a = find_root(parent, e.u);
    int b = find_root(parent, e.v);
    if (a != b) {
      parent[static_cast<std::size_t>(a)] = b;
      --components;
    }
  }
  return components == 1;
}

MetricGraph::MetricGraph(std::vector<Vertex> vertices, std::vector<Edge> edges, double total_mass)
    : vertices_(std::move(vertices)), edges_(std::move(edges)), total_mass_(total_mass) {
  validate();
}

double MetricGraph::measure() const {
  double sum = 0.0;
  for (const auto& e : edges_) sum += e.length * e.weight;
  return sum;
}

std::size_t MetricGraph::dirichlet_count() const {
  std::size_t n = 0;
  for (const auto& v : vertices_) n += v.boundary == Boundary::dirichlet ? 1 : 0;
  return n;
}

void MetricGraph::validate() const {
  const auto n = static_cast<int>(vertices_.size());
  if (n == 0) throw Error(ErrorCode::invalid_graph, "graph has no vertices");
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const auto& e = edges_[i];
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
      throw Error(ErrorCode::invalid_graph, "edge " + std::to_string(i) + " references a missing vertex");
    if (e.u == e.v) throw Error(ErrorCode::invalid_graph, "edge " + std::to_string(i) + " is a loop");
    if (!(e.length > 0.0) || !std::isfinite(e.length))
      throw Error(ErrorCode::invalid_graph, "edge " + std::to_string(i) + " has non-positive length");
    if (!(e.weight > 0.0) || !std::isfinite(e.weight))
      throw Error(ErrorCode::invalid_graph, "edge " + std::to_string(i) + " has non-positive weight");
  }
  if (!is_connected(vertices_.size(), edges_)) throw Error(ErrorCode::disconnected_graph, "graph is not connected");

  std::map<std::tuple<double, double, Word>, int> seen;
  for (int i = 0; i < n; ++i) {
    const auto& v = vertices_[static_cast<std::size_t>(i)];
    auto [it, inserted] = seen.emplace(std::make_tuple(v.x, v.y, v.word), i);
    if (!inserted)
      throw Error(ErrorCode::invalid_graph, "vertices " + std::to_string(it->second) + " and " + std::to_string(i) +
                                                " share position and fiber word");
  }

  const double m = measure();
  if (std::abs(m - total_mass_) > 1e-12 * std::max(1.0, std::abs(total_mass_)))
    throw Error(ErrorCode::invalid_graph, "total measure " + std::to_string(m) + " differs from declared mass " +
                                              std::to_string(total_mass_));
}

nlohmann::json to_json(const MetricGraph& g) {
  nlohmann::json vertices = nlohmann::json::array();
  for (std::size_t i = 0; i < g.vertices().size(); ++i) {
    const auto& v = g.vertices()[i];
    nlohmann::json jv{{"id", i}, {"x", v.x}, {"word", v.word}, {"boundary", to_string(v.boundary)}};
    if (v.y != 0.0) jv["y"] = v.y;
    vertices.push_back(std::move(jv));
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : g.edges()) edges.push_back({{"u", e.u}, {"v", e.v}, {"length", e.length}, {"weight", e.weight}});
  return {{"vertices", std::move(vertices)}, {"edges", std::move(edges)}, {"total_mass", g.total_mass()}};
}

MetricGraph metric_graph_from_json(const nlohmann::json& j) {
  try {
    const auto& jv = j.at("vertices");
    std::vector<Vertex> vertices(jv.size());
    std::vector<bool> filled(jv.size(), false);
    for (const auto& item : jv) {
      const auto id = item.at("id").get<std::size_t>();
      if (id >= vertices.size() || filled[id])
        throw Error(ErrorCode::parse_error, "vertex ids must be 0..n-1 without repeats");
      Vertex v;
      v.x = item.at("x").get<double>();
      v.y = item.value("y", 0.0);
      v.word = item.value("word", Word{});
      v.boundary = parse_boundary(item.value("boundary", std::string("neumann")));
      vertices[id] = std::move(v);
      filled[id] = true;
    }
    std::vector<Edge> edges;
    for (const auto& item : j.at("edges"))
      edges.push_back({item.at("u").get<int>(), item.at("v").get<int>(), item.at("length").get<double>(),
                       item.value("weight", 1.0)});
    double mass = 0.0;
    if (j.contains("total_mass")) {
      mass = j.at("total_mass").get<double>();
    } else {
      for (const auto& e : edges) mass += e.length * e.weight;
    }
    return MetricGraph(std::move(vertices), std::move(edges), mass);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, e.what());
  }
}

}  // namespace plim
