#include "plim/fiber.hpp"

#include <cmath>
#include <string>

#include "plim/error.hpp"

namespace plim {

namespace {

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

// Children of every parent must be one glued item or a full labelled fiber.
void check_children(const std::vector<FiberLink>& links, std::size_t parent_count, int fiber_size,
                    const char* what) {
  std::vector<std::vector<int>> labels(parent_count);
  for (const auto& link : links) {
    if (link.parent < 0 || static_cast<std::size_t>(link.parent) >= parent_count)
      throw Error(ErrorCode::invalid_graph, std::string(what) + " link to a missing parent");
    labels[static_cast<std::size_t>(link.parent)].push_back(link.label);
  }
  for (std::size_t p = 0; p < parent_count; ++p) {
    const auto& l = labels[p];
    if (l.size() == 1 && l.front() == kCollapsed) continue;
    bool ok = static_cast<int>(l.size()) == fiber_size;
    std::vector<bool> seen(static_cast<std::size_t>(fiber_size), false);
    for (int label : l) {
      if (label < 0 || label >= fiber_size || seen[static_cast<std::size_t>(label)]) {
        ok = false;
        break;
      }
      seen[static_cast<std::size_t>(label)] = true;
    }
    if (!ok)
      throw Error(ErrorCode::invalid_graph, std::string(what) + " " + std::to_string(p) +
                                                " is neither glued nor copied once per fiber label");
  }
}

}  // namespace

void validate(const FiberStructure& fs, const MetricGraph& upper, const MetricGraph& lower) {
  if (fs.fiber_size < 1) throw Error(ErrorCode::invalid_graph, "fiber must be non-empty");
  if (fs.vertex_links.size() != upper.vertex_count() || fs.edge_links.size() != upper.edge_count())
    throw Error(ErrorCode::invalid_graph, "fiber structure does not cover the upper graph");
  check_children(fs.vertex_links, lower.vertex_count(), fs.fiber_size, "vertex");
  check_children(fs.edge_links, lower.edge_count(), fs.fiber_size, "edge");

  for (std::size_t v = 0; v < upper.vertex_count(); ++v) {
    const auto& a = upper.vertices()[v];
    const auto& b = lower.vertices()[static_cast<std::size_t>(fs.vertex_links[v].parent)];
    if (a.x != b.x || a.y != b.y || a.boundary != b.boundary)
      throw Error(ErrorCode::invalid_graph, "vertex " + std::to_string(v) + " moves under the projection");
  }
  for (std::size_t e = 0; e < upper.edge_count(); ++e) {
    const auto& link = fs.edge_links[e];
    const auto& a = upper.edges()[e];
    const auto& b = lower.edges()[static_cast<std::size_t>(link.parent)];
    if (!close(a.length, b.length))
      throw Error(ErrorCode::invalid_graph, "edge " + std::to_string(e) + " changes length under the projection");
    if (fs.vertex_links[static_cast<std::size_t>(a.u)].parent != b.u ||
        fs.vertex_links[static_cast<std::size_t>(a.v)].parent != b.v)
      throw Error(ErrorCode::invalid_graph, "edge " + std::to_string(e) + " endpoints do not project consistently");
    const double expected = link.label == kCollapsed ? b.weight : b.weight / fs.fiber_size;
    if (!close(a.weight, expected))
      throw Error(ErrorCode::invalid_graph, "edge " + std::to_string(e) + " weight breaks the fiber measure");
  }
}

void validate(const Tower& t) {
  if (t.levels.empty()) throw Error(ErrorCode::invalid_graph, "empty tower");
  if (t.fibers.size() + 1 != t.levels.size()) throw Error(ErrorCode::invalid_graph, "one fiber structure per level");
  for (int i = 1; i <= t.depth(); ++i) {
    const auto& fs = t.fiber(i);
    if (fs.level != i) throw Error(ErrorCode::invalid_graph, "fiber structure level out of order");
    validate(fs, t.levels[static_cast<std::size_t>(i)], t.levels[static_cast<std::size_t>(i - 1)]);
  }
  // Composite projections Phi down to F_0 must agree with the base position.
  const auto& top = t.top();
  for (std::size_t v = 0; v < top.vertex_count(); ++v) {
    int current = static_cast<int>(v);
    for (int i = t.depth(); i >= 1; --i) current = t.fiber(i).vertex_links[static_cast<std::size_t>(current)].parent;
    const auto& base = t.levels.front().vertices()[static_cast<std::size_t>(current)];
    if (base.x != top.vertices()[v].x || base.y != top.vertices()[v].y)
      throw Error(ErrorCode::invalid_graph, "composite projection of vertex " + std::to_string(v) + " is inconsistent");
  }
}

FiberMap::FiberMap(const FiberStructure& fs, const Mesh& upper, const Mesh& lower) : fiber_size_(fs.fiber_size) {
  if (!close(upper.pitch(), lower.pitch()))
    throw Error(ErrorCode::incompatible_mesh, "meshes of consecutive levels use different pitches");
  if (fs.vertex_links.size() != upper.graph().vertex_count() || fs.edge_links.size() != upper.graph().edge_count())
    throw Error(ErrorCode::incompatible_mesh, "fiber structure does not describe the upper mesh graph");

  parent_.resize(upper.size());
  label_.resize(upper.size());
  children_.assign(lower.size(), {});
  for (std::size_t n = 0; n < upper.size(); ++n) {
    const auto& node = upper.nodes()[n];
    int p = -1;
    FiberLink link;
    if (node.is_vertex()) {
      link = fs.vertex_links[static_cast<std::size_t>(node.vertex)];
      if (static_cast<std::size_t>(link.parent) < lower.graph().vertex_count()) p = lower.vertex_node(link.parent);
    } else {
      link = fs.edge_links[static_cast<std::size_t>(node.edge)];
      if (static_cast<std::size_t>(link.parent) < lower.graph().edge_count() &&
          lower.segments(link.parent) == upper.segments(node.edge))
        p = lower.edge_node(link.parent, node.step);
    }
    if (p < 0) throw Error(ErrorCode::incompatible_mesh, "mesh node " + std::to_string(n) + " has no image below");
    parent_[n] = p;
    label_[n] = link.label;
    children_[static_cast<std::size_t>(p)].push_back(static_cast<int>(n));
  }
  for (std::size_t p = 0; p < children_.size(); ++p) {
    const auto& c = children_[p];
    const bool glued = c.size() == 1 && label_[static_cast<std::size_t>(c.front())] == kCollapsed;
    if (!glued && static_cast<int>(c.size()) != fiber_size_)
      throw Error(ErrorCode::incompatible_mesh, "lower node " + std::to_string(p) + " has " +
                                                    std::to_string(c.size()) + " preimages");
  }
}

Eigen::VectorXd FiberMap::lift(const Eigen::VectorXd& u) const {
  if (static_cast<std::size_t>(u.size()) != lower_size())
    throw Error(ErrorCode::dimension_mismatch, "lift expects a lower-level vector");
  Eigen::VectorXd out(static_cast<Eigen::Index>(upper_size()));
  for (std::size_t n = 0; n < upper_size(); ++n) out[static_cast<Eigen::Index>(n)] = u[parent_[n]];
  return out;
}

Eigen::VectorXd FiberMap::project_down(const Eigen::VectorXd& v) const {
  if (static_cast<std::size_t>(v.size()) != upper_size())
    throw Error(ErrorCode::dimension_mismatch, "project_down expects an upper-level vector");
  Eigen::VectorXd out(static_cast<Eigen::Index>(lower_size()));
  for (std::size_t p = 0; p < lower_size(); ++p) {
    const auto& c = children_[p];
    if (c.size() == 1) {
      out[static_cast<Eigen::Index>(p)] = v[c.front()];
      continue;
    }
    double sum = 0.0;
    for (int n : c) sum += v[n];
    out[static_cast<Eigen::Index>(p)] = sum / static_cast<double>(c.size());
  }
  return out;
}

Eigen::VectorXd FiberMap::project(const Eigen::VectorXd& v) const { return lift(project_down(v)); }

Eigen::VectorXd FiberMap::complement(const Eigen::VectorXd& v) const { return v - project(v); }

}  // namespace plim
