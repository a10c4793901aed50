#pragma once

#include <string>
#include <vector>

#include "plim/eigensolve.hpp"
#include "plim/fiber.hpp"
#include "plim/mesh.hpp"
#include "plim/spectrum.hpp"

namespace plim {

enum class SubspaceTag {
  base,      // level 0, nothing to split against
  pullback,  // P_i v = v: lifted from level i-1
  fresh,     // P_i v = 0: the new subspace D'_i
};

// "base" for level 0, "new@i" otherwise.
std::string origin_tag(int level);

struct SplitPairs {
  EigenPairs pairs;
  std::vector<SubspaceTag> tags;
  // Level at which each vector first appears (0 for the base). With a single
  // fiber map only `level` and `level - 1` are distinguished.
  std::vector<int> origin;
  double max_defect = 0.0;  // largest min(||P v - v||, ||P v||) in the M-norm
};

/// Rotates each (numerically) degenerate eigenspace so that its basis
/// diagonalizes the fiber projectors, then tags every vector pullback or
/// fresh. `chain[k]` maps level k+1 to level k, so chain.back() is P_i of
/// the top level; the lower maps refine pullbacks into their level of
/// origin. Throws Error(unclassifiable_vector) if some vector is neither
/// within tol after rotation.
SplitPairs new_subspace_split(const DiscreteOperator& d, const EigenPairs& pairs,
                              const std::vector<FiberMap>& chain, double tol = 1e-8);
SplitPairs new_subspace_split(const DiscreteOperator& d, const EigenPairs& pairs, const FiberMap& fm,
                              double tol = 1e-8);

struct LevelOptions {
  Selection selection = Selection::all();
  MassModel mass = MassModel::lumped;
  SolveOptions solve;
  bool split = true;
  double split_tol = 1e-8;
};

struct LevelSolution {
  Mesh mesh;
  DiscreteOperator op;
  SplitPairs split;
  std::vector<FiberMap> fiber_maps;  // fiber_maps[k]: level k+1 -> k, empty without split
  SpectrumList spectrum;             // tagged by level of origin
};

// discretize -> assemble -> solve -> (optional) split for one tower level.
LevelSolution solve_level(const Tower& t, int level, double pitch, const LevelOptions& opt);

// Spectra of levels 0..depth at a common pitch, solved concurrently on up to
// `threads` workers; the result is independent of the thread count.
std::vector<SpectrumList> solve_levels(const Tower& t, double pitch, const LevelOptions& opt, int threads = 1);

}  // namespace plim
