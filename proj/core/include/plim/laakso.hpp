#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "plim/fiber.hpp"
#include "plim/levels.hpp"
#include "plim/metric_graph.hpp"
#include "plim/spectrum.hpp"

namespace plim {

/// Laakso space data: the sequence j_1..j_n (each in {j, j+1} for a base
/// j >= 2), mesh refinement r >= 2 and the endpoint condition at {0, 1}.
struct LaaksoSpec {
  std::vector<int> j;
  int refine = 8;
  Boundary boundary = Boundary::neumann;

  int depth() const noexcept { return static_cast<int>(j.size()); }
  // d_n = j_1 * ... * j_n, d_0 = 1
  std::int64_t d(int n) const;
  // Spec truncated to its first n entries.
  LaaksoSpec truncated(int n) const;

  // Throws Error(invalid_sequence).
  void validate() const;

  // {"j":[2,2,3], "depth":3, "refine":8, "boundary":"neumann"}; depth may be
  // omitted and may truncate j.
  static LaaksoSpec from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
};

/// Wormhole positions per level: entry m-1 holds the integers p with
/// p / d_n in L_m \ L_{m-1}, i.e. where fiber coordinate m is glued.
struct WormholeTable {
  std::int64_t denominator = 1;  // d_n
  std::vector<std::vector<std::int64_t>> positions;

  // Level at which grid position p / d_n becomes a wormhole, 0 if never.
  int level_of(std::int64_t p) const;
};

WormholeTable wormholes(const LaaksoSpec& spec);

// Levels F_0..F_n over the common breakpoint grid {p / d_n}. Sheet weights
// 2^-i, total measure 1.
Tower build_laakso(const LaaksoSpec& spec);

// Global pitch 1 / (refine * d_n).
double laakso_pitch(const LaaksoSpec& spec);

// Union of the three closed-form families, truncated at lambda_max, merged by
// exact integer value in units of pi^2. Each entry has multiplicity 1, tag
// listing the families and source listing every (family, n, k). In Neumann
// mode a conventional 0 entry (tag "constant") is prepended.
SpectrumList laakso_analytic_spectrum(const LaaksoSpec& spec, double lambda_max);

// Numeric spectrum of the top level at the given pitch (default:
// laakso_pitch(spec)), tagged by level of origin.
SpectrumList laakso_numeric_spectrum(const LaaksoSpec& spec, double lambda_max, double pitch = 0.0,
                                     const SolveOptions& solve = {});

}  // namespace plim
