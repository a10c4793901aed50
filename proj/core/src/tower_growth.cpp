#include "tower_growth.hpp"

#include "plim/error.hpp"

namespace plim::detail {

Tower grow_tower(MetricGraph base, int depth, const Growth& rule) {
  Tower t;
  const double mass = base.total_mass();
  std::vector<int> vertex_base(base.vertex_count());
  std::vector<int> edge_base(base.edge_count());
  for (std::size_t v = 0; v < vertex_base.size(); ++v) vertex_base[v] = static_cast<int>(v);
  for (std::size_t e = 0; e < edge_base.size(); ++e) edge_base[e] = static_cast<int>(e);
  std::vector<Word> edge_words(edge_base.size());
  t.levels.push_back(std::move(base));

  for (int level = 1; level <= depth; ++level) {
    const MetricGraph& lower = t.levels.back();
    const int size = rule.fiber_size(level);
    if (size < 1) throw Error(ErrorCode::invalid_sequence, "fiber size below 1 at level " + std::to_string(level));

    FiberStructure fs;
    fs.level = level;
    fs.fiber_size = size;
    std::vector<Vertex> vertices;
    std::vector<int> next_vertex_base;
    std::vector<std::vector<int>> children(lower.vertex_count());
    for (std::size_t v = 0; v < lower.vertex_count(); ++v) {
      const Vertex& parent = lower.vertices()[v];
      const bool copied = rule.copies_vertex(level, vertex_base[v], parent.word);
      for (int g = 0; g < (copied ? size : 1); ++g) {
        Vertex child = parent;
        child.word.push_back(copied ? g : kCollapsed);
        children[v].push_back(static_cast<int>(vertices.size()));
        fs.vertex_links.push_back({static_cast<int>(v), copied ? g : kCollapsed});
        vertices.push_back(std::move(child));
        next_vertex_base.push_back(vertex_base[v]);
      }
    }

    std::vector<Edge> edges;
    std::vector<int> next_edge_base;
    std::vector<Word> next_edge_words;
    auto endpoint = [&](int v, int g) {
      const auto& c = children[static_cast<std::size_t>(v)];
      if (c.size() == 1) return c.front();
      if (g == kCollapsed)
        throw Error(ErrorCode::invalid_graph, "glued edge ends at a copied vertex at level " + std::to_string(level));
      return c[static_cast<std::size_t>(g)];
    };
    for (std::size_t e = 0; e < lower.edge_count(); ++e) {
      const Edge& parent = lower.edges()[e];
      const bool copied = rule.copies_edge(level, edge_base[e], edge_words[e]);
      for (int g = 0; g < (copied ? size : 1); ++g) {
        const int label = copied ? g : kCollapsed;
        edges.push_back({endpoint(parent.u, label), endpoint(parent.v, label), parent.length,
                         copied ? parent.weight / size : parent.weight});
        fs.edge_links.push_back({static_cast<int>(e), label});
        next_edge_base.push_back(edge_base[e]);
        next_edge_words.push_back(edge_words[e]);
        next_edge_words.back().push_back(label);
      }
    }

    t.levels.emplace_back(std::move(vertices), std::move(edges), mass);
    t.fibers.push_back(std::move(fs));
    vertex_base = std::move(next_vertex_base);
    edge_base = std::move(next_edge_base);
    edge_words = std::move(next_edge_words);
  }
  return t;
}

}  // namespace plim::detail
