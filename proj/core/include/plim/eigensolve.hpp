#pragma once

#include <cstdint>
#include <limits>

#include <Eigen/Core>

#include "plim/mesh.hpp"

namespace plim {

inline constexpr std::uint64_t kDefaultSeed = 0x5eed2011ULL;
inline constexpr std::size_t kDenseThreshold = 4000;

/// Eigenvalues (ascending) with M-orthonormal eigenvectors in the columns.
struct EigenPairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;

  std::size_t size() const noexcept { return static_cast<std::size_t>(values.size()); }
};

// Which part of the lower spectrum to compute: the `count` smallest, or
// everything <= upper.
struct Selection {
  int count = -1;
  double upper = std::numeric_limits<double>::infinity();

  static Selection smallest(int k) { return {k, std::numeric_limits<double>::infinity()}; }
  static Selection up_to(double lambda) { return {-1, lambda}; }
  static Selection all() { return {}; }
};

EigenPairs solve_dense(const DiscreteOperator& d, Selection sel,
                       std::size_t dense_threshold = kDenseThreshold);

struct LanczosOptions {
  double tol = 1e-12;         // Ritz residual relative to the Ritz value
  bool shift_invert = true;
  double shift = -1.0;        // sigma; must lie below the spectrum
  int krylov_dim = 0;         // 0: chosen from the selection
  int max_restarts = 400;
  std::uint64_t seed = kDefaultSeed;
};

// Lanczos with full reorthogonalization, locking and explicit restarts.
// Each restart runs in the complement of the locked vectors, so repeated
// eigenvalues are found one copy per restart. Throws Error(no_convergence).
EigenPairs solve_lanczos(const DiscreteOperator& d, Selection sel, const LanczosOptions& opt = {});

enum class SolverKind { automatic, dense, lanczos };

struct SolveOptions {
  SolverKind kind = SolverKind::automatic;
  std::size_t dense_threshold = kDenseThreshold;
  // automatic: dense up to this size, Lanczos above it
  std::size_t automatic_dense_limit = 1200;
  LanczosOptions lanczos;
};

EigenPairs solve(const DiscreteOperator& d, Selection sel, const SolveOptions& opt = {});

// max_i ||A v_i - lambda_i M v_i|| / ||v_i||_M
double max_residual(const DiscreteOperator& d, const EigenPairs& p);
// max_{i != j} |v_i^T M v_j| and max_i |v_i^T M v_i - 1|
double orthogonality_defect(const DiscreteOperator& d, const EigenPairs& p);

}  // namespace plim
