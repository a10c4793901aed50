#pragma once

#include <functional>

#include "plim/fiber.hpp"

namespace plim::detail {

// Which items of level i-1 are copied once per fiber label at level i; the
// rest are glued. Items are identified by their index in the base graph
// (every level keeps a reference to it) and their current word.
struct Growth {
  std::function<int(int level)> fiber_size;
  std::function<bool(int level, int base_vertex, const Word& word)> copies_vertex;
  std::function<bool(int level, int base_edge, const Word& word)> copies_edge;
};

// Grows F_1..F_depth from `base` by the replacement rule. Children are
// emitted parent by parent, so the result is deterministic.
Tower grow_tower(MetricGraph base, int depth, const Growth& rule);

}  // namespace plim::detail
