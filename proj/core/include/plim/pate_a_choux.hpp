#pragma once

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "plim/fiber.hpp"
#include "plim/levels.hpp"
#include "plim/metric_graph.hpp"
#include "plim/spectrum.hpp"

namespace plim {

/// Level-m graph approximation of the Sierpinski gasket.
///
/// Vertices are ordered by the level at which they first appear, so V_k is
/// the prefix of length |V_k|. Lattice coordinates (a, b) denote the point
/// (a q_1 + b q_2) / 2^m.
struct GasketGraph {
  int level = 0;
  std::vector<std::array<std::int64_t, 2>> lattice;
  std::vector<std::array<double, 2>> points;
  std::vector<int> vertex_level;
  std::vector<std::pair<int, int>> edges;

  std::size_t vertex_count() const noexcept { return points.size(); }
  std::size_t edge_count() const noexcept { return edges.size(); }
  // |V_k| for k <= level
  std::size_t count_at(int k) const;
};

GasketGraph build_gasket(int m);

// |V_m| = (3^{m+1} + 3) / 2 and 3^{m+1}
std::size_t gasket_vertex_formula(int m);
std::size_t gasket_edge_formula(int m);

// Probabilistic graph Laplacian spectrum (pencil: weighted Laplacian, weighted
// degree); Dirichlet mode eliminates the three corners.
SpectrumList gasket_graph_spectrum(const GasketGraph& g, Boundary boundary);

// Scales a probabilistic Dirichlet spectrum to the degree-4 ("standard")
// normalization in which decimation reads lambda = lambda'(5 - lambda').
SpectrumList to_standard_normalization(const SpectrumList& probabilistic);

inline constexpr std::array<double, 3> kDecimationExceptional{2.0, 5.0, 6.0};

struct DecimationReport {
  struct Row {
    double value;       // level m+1 eigenvalue (standard normalization)
    double image;       // value * (5 - value)
    int multiplicity;
    bool matched;       // image found in the level-m spectrum
    bool exceptional;   // value in {2, 5, 6}
  };
  std::vector<Row> rows;
  int explained = 0;    // total multiplicity matched or exceptional
  int total = 0;

  double explained_fraction() const { return total == 0 ? 1.0 : static_cast<double>(explained) / total; }
  bool passed() const { return explained == total; }
};

DecimationReport decimation_check(const SpectrumList& level_m, const SpectrumList& level_m1, double tol = 1e-8);

// 5^m * (smallest Dirichlet eigenvalue, standard normalization) for each
// level in [first, last].
std::vector<double> lowest_branch(int first, int last);

/// Pate a Choux data: number of binary fiber factors and gasket resolution.
struct ChouxSpec {
  int fiber_depth = 1;
  int gasket_level = 2;
  Boundary boundary = Boundary::dirichlet;

  // Throws Error(resolution_too_coarse) if gasket_level < fiber_depth.
  void validate() const;
  static ChouxSpec from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
};

// Levels 0..fiber_depth: gasket sheets with fiber coordinate k glued over
// V_k \ V_{k-1}. Unit edge lengths, sheet weights 2^-i.
Tower build_choux(const ChouxSpec& spec);

// Probabilistic spectrum of fiber level `level` (default: fiber_depth) with
// base / new@i origin tags.
SpectrumList choux_numeric_spectrum(const ChouxSpec& spec, int level = -1, const SolveOptions& solve = {});

// log 6 / log 2
double hausdorff_dimension(const ChouxSpec& spec);

// Least-squares slope of log |F_m vertices| against m log 2 for Choux
// spaces with fiber_depth = gasket_level = m, m in [first, last].
double box_counting_dimension(int first, int last);

}  // namespace plim
