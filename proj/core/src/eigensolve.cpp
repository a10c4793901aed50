#include "plim/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "plim/error.hpp"

namespace plim {

namespace {

void check_mass(const DiscreteOperator& d) {
  if (static_cast<std::size_t>(d.stiffness.rows()) != d.size() || d.stiffness.rows() != d.stiffness.cols())
    throw Error(ErrorCode::dimension_mismatch, "stiffness and mass sizes differ");
  for (Eigen::Index i = 0; i < d.mass.size(); ++i)
    if (!(d.mass[i] > 0.0)) throw Error(ErrorCode::not_positive_mass, "mass entry " + std::to_string(i) + " is not positive");
}

// Keeps the requested part of an ascending list of (value, column) pairs.
std::vector<Eigen::Index> select(const Eigen::VectorXd& values, Selection sel) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (sel.count >= 0 && static_cast<int>(keep.size()) >= sel.count) break;
    if (values[i] > sel.upper) break;
    keep.push_back(i);
  }
  return keep;
}

EigenPairs gather(const Eigen::VectorXd& values, const Eigen::MatrixXd& vectors, const std::vector<Eigen::Index>& keep) {
  EigenPairs out;
  out.values.resize(static_cast<Eigen::Index>(keep.size()));
  out.vectors.resize(vectors.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    out.values[static_cast<Eigen::Index>(k)] = values[keep[k]];
    out.vectors.col(static_cast<Eigen::Index>(k)) = vectors.col(keep[k]);
  }
  return out;
}

}  // namespace

EigenPairs solve_dense(const DiscreteOperator& d, Selection sel, std::size_t dense_threshold) {
  if (d.size() > dense_threshold)
    throw Error(ErrorCode::too_large_for_dense,
                std::to_string(d.size()) + " nodes exceed the dense threshold " + std::to_string(dense_threshold));
  check_mass(d);
  if (d.size() == 0) return {};

  const Eigen::VectorXd s_inv = d.mass.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd reduced = s_inv.asDiagonal() * Eigen::MatrixXd(d.stiffness) * s_inv.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(reduced);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::no_convergence, "dense tridiagonal QR did not converge");

  const auto keep = select(es.eigenvalues(), sel);
  EigenPairs out = gather(es.eigenvalues(), es.eigenvectors(), keep);
  out.vectors = s_inv.asDiagonal() * out.vectors;
  return out;
}

EigenPairs solve_lanczos(const DiscreteOperator& d, Selection sel, const LanczosOptions& opt) {
  check_mass(d);
  const auto n = static_cast<Eigen::Index>(d.size());
  if (n == 0 || sel.count == 0) return {};

  const Eigen::VectorXd s = d.mass.cwiseSqrt();
  const Eigen::VectorXd s_inv = s.cwiseInverse();

  // Symmetric operator C whose largest eigenvalues theta map to the smallest
  // lambda: C = S (A - sigma M)^-1 S with lambda = sigma + 1/theta, or
  // C = -S^-1 A S^-1 with lambda = -theta.
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  if (opt.shift_invert) {
    Eigen::SparseMatrix<double> shifted = d.stiffness;
    for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) -= opt.shift * d.mass[i];
    ldlt.compute(shifted);
    if (ldlt.info() != Eigen::Success) throw Error(ErrorCode::no_convergence, "factorization of A - sigma M failed");
  }
  auto apply = [&](const Eigen::VectorXd& q) -> Eigen::VectorXd {
    if (opt.shift_invert) return s.cwiseProduct(ldlt.solve(s.cwiseProduct(q)));
    return -s_inv.cwiseProduct(d.stiffness * s_inv.cwiseProduct(q));
  };
  auto to_lambda = [&](double theta) { return opt.shift_invert ? opt.shift + 1.0 / theta : -theta; };

  double theta_threshold = -std::numeric_limits<double>::infinity();
  if (std::isfinite(sel.upper)) {
    if (opt.shift_invert) {
      if (sel.upper <= opt.shift) return {};
      theta_threshold = 1.0 / (sel.upper - opt.shift);
    } else {
      theta_threshold = -sel.upper;
    }
  }
  const int want = sel.count >= 0 ? static_cast<int>(std::min<Eigen::Index>(sel.count, n)) : -1;

  std::vector<Eigen::VectorXd> locked;
  std::vector<double> locked_theta;
  auto orthogonalize_locked = [&](Eigen::VectorXd& w) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& y : locked) w -= y.dot(w) * y;
  };

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal;
  int krylov = opt.krylov_dim > 0 ? opt.krylov_dim : (want > 0 ? std::max(2 * want + 20, 40) : 80);
  int idle_runs = 0;

  for (int restart = 0;; ++restart) {
    if (restart > opt.max_restarts)
      throw Error(ErrorCode::no_convergence, "Lanczos did not settle after " + std::to_string(restart) + " restarts");
    const Eigen::Index free = n - static_cast<Eigen::Index>(locked.size());
    if (free <= 0) break;
    const Eigen::Index m = std::min<Eigen::Index>(krylov, free);

    Eigen::MatrixXd q(n, m);
    {
      Eigen::VectorXd start(n);
      double norm = 0.0;
      for (int attempt = 0; attempt < 8 && norm < 1e-8; ++attempt) {
        for (Eigen::Index i = 0; i < n; ++i) start[i] = normal(rng);
        start.normalize();
        orthogonalize_locked(start);
        norm = start.norm();
      }
      if (norm < 1e-8) break;  // locked vectors span the space
      q.col(0) = start / norm;
    }

    Eigen::VectorXd alpha(m);
    Eigen::VectorXd beta(m);
    Eigen::Index steps = 0;
    bool invariant = false;
    double scale = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      Eigen::VectorXd w = apply(q.col(j));
      alpha[j] = q.col(j).dot(w);
      scale = std::max(scale, std::abs(alpha[j]));
      w -= alpha[j] * q.col(j);
      if (j > 0) w -= beta[j - 1] * q.col(j - 1);
      for (int pass = 0; pass < 2; ++pass) {
        w -= q.leftCols(j + 1) * (q.leftCols(j + 1).transpose() * w);
        orthogonalize_locked(w);
      }
      beta[j] = w.norm();
      scale = std::max(scale, beta[j]);
      steps = j + 1;
      if (beta[j] <= 1e-14 * scale) {
        invariant = true;
        break;
      }
      if (j + 1 < m) q.col(j + 1) = w / beta[j];
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    {
      Eigen::VectorXd diag = alpha.head(steps);
      Eigen::VectorXd sub = steps > 1 ? Eigen::VectorXd(beta.head(steps - 1)) : Eigen::VectorXd(0);
      tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    }
    const Eigen::VectorXd& theta = tri.eigenvalues();
    const Eigen::MatrixXd& ritz = tri.eigenvectors();
    const double theta_scale = theta.cwiseAbs().maxCoeff();

    double kth_before = -std::numeric_limits<double>::infinity();
    const bool had_enough = want > 0 && static_cast<int>(locked.size()) >= want;
    if (had_enough) {
      std::vector<double> sorted = locked_theta;
      std::nth_element(sorted.begin(), sorted.begin() + (want - 1), sorted.end(), std::greater<>());
      kth_before = sorted[static_cast<std::size_t>(want - 1)];
    }

    bool relevant = false;
    bool top_converged = false;
    int newly_locked = 0;
    for (Eigen::Index i = steps - 1; i >= 0; --i) {
      const double residual = invariant ? 0.0 : std::abs(beta[steps - 1] * ritz(steps - 1, i));
      const bool converged = residual <= opt.tol * std::max(std::abs(theta[i]), 1e-6 * theta_scale);
      if (i == steps - 1) top_converged = converged;
      if (!converged) continue;
      Eigen::VectorXd y = q.leftCols(steps) * ritz.col(i);
      orthogonalize_locked(y);
      const double norm = y.norm();
      if (norm < 0.5) continue;
      locked.push_back(y / norm);
      locked_theta.push_back(theta[i]);
      ++newly_locked;
      if (want > 0 ? theta[i] > kth_before * (1.0 + 1e-12) : theta[i] >= theta_threshold) relevant = true;
    }

    if (want > 0) {
      if (had_enough && !relevant && top_converged) break;
    } else if (!relevant && top_converged) {
      break;
    }
    if (newly_locked == 0) {
      krylov = std::min<int>(static_cast<int>(n), 2 * krylov);
      if (++idle_runs > 30) throw Error(ErrorCode::no_convergence, "Lanczos stalled without converged Ritz pairs");
    }
  }

  const auto count = static_cast<Eigen::Index>(locked.size());
  Eigen::VectorXd values(count);
  Eigen::MatrixXd vectors(n, count);
  for (Eigen::Index k = 0; k < count; ++k) {
    Eigen::VectorXd x = s_inv.cwiseProduct(locked[static_cast<std::size_t>(k)]);
    const double rq = x.dot(d.stiffness * x) / x.dot(d.mass.cwiseProduct(x));
    values[k] = std::isfinite(rq) ? rq : to_lambda(locked_theta[static_cast<std::size_t>(k)]);
    vectors.col(k) = x;
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(count));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
  Eigen::VectorXd sorted_values(count);
  Eigen::MatrixXd sorted_vectors(n, count);
  for (Eigen::Index k = 0; k < count; ++k) {
    sorted_values[k] = values[order[static_cast<std::size_t>(k)]];
    sorted_vectors.col(k) = vectors.col(order[static_cast<std::size_t>(k)]);
  }
  return gather(sorted_values, sorted_vectors, select(sorted_values, sel));
}

EigenPairs solve(const DiscreteOperator& d, Selection sel, const SolveOptions& opt) {
  switch (opt.kind) {
    case SolverKind::dense: return solve_dense(d, sel, opt.dense_threshold);
    case SolverKind::lanczos: return solve_lanczos(d, sel, opt.lanczos);
    case SolverKind::automatic: break;
  }
  const bool everything = sel.count < 0 && !std::isfinite(sel.upper);
  if (d.size() <= opt.automatic_dense_limit || (everything && d.size() <= opt.dense_threshold))
    return solve_dense(d, sel, opt.dense_threshold);
  return solve_lanczos(d, sel, opt.lanczos);
}

double max_residual(const DiscreteOperator& d, const EigenPairs& p) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < p.values.size(); ++k) {
    const Eigen::VectorXd x = p.vectors.col(k);
    const Eigen::VectorXd r = d.stiffness * x - p.values[k] * d.mass.cwiseProduct(x);
    const double norm = std::sqrt(x.dot(d.mass.cwiseProduct(x)));
    worst = std::max(worst, r.norm() / norm);
  }
  return worst;
}

double orthogonality_defect(const DiscreteOperator& d, const EigenPairs& p) {
  const Eigen::MatrixXd gram = p.vectors.transpose() * d.mass.asDiagonal() * p.vectors;
  return (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

}  // namespace plim
