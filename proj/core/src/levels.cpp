#include "plim/levels.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include <Eigen/Eigenvalues>

#include "plim/error.hpp"

namespace plim {

std::string origin_tag(int level) { return level == 0 ? "base" : "new@" + std::to_string(level); }

namespace {

// Q_k v: average v down to level k through the chain, then lift it back.
Eigen::VectorXd through_level(const std::vector<FiberMap>& chain, std::size_t k, const Eigen::VectorXd& v) {
  Eigen::VectorXd u = v;
  for (std::size_t i = chain.size(); i > k; --i) u = chain[i - 1].project_down(u);
  for (std::size_t i = k; i < chain.size(); ++i) u = chain[i].lift(u);
  return u;
}

// Sum of Q_k over k < level. A vector born at level l is an eigenvector with
// eigenvalue level - l, since the ranges of the Q_k are nested.
Eigen::VectorXd origin_operator(const std::vector<FiberMap>& chain, const Eigen::VectorXd& v) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
  for (std::size_t k = 0; k < chain.size(); ++k) out += through_level(chain, k, v);
  return out;
}

SplitPairs split_impl(const DiscreteOperator& d, const EigenPairs& pairs, const std::vector<FiberMap>& chain,
                      int top_level, double tol) {
  if (chain.empty() || chain.back().upper_size() != d.size() ||
      static_cast<std::size_t>(pairs.vectors.rows()) != d.size())
    throw Error(ErrorCode::incompatible_mesh, "fiber maps do not match the eigenvector mesh");

  SplitPairs out;
  out.pairs = pairs;
  const auto count = pairs.values.size();
  out.tags.resize(static_cast<std::size_t>(count));
  out.origin.resize(static_cast<std::size_t>(count));
  const int depth = static_cast<int>(chain.size());

  Eigen::Index start = 0;
  while (start < count) {
    Eigen::Index stop = start + 1;
    const double scale = std::max(std::abs(pairs.values[start]), 1.0);
    while (stop < count && std::abs(pairs.values[stop] - pairs.values[stop - 1]) <= 1e-8 * scale) ++stop;
    const Eigen::Index width = stop - start;

    Eigen::MatrixXd q = out.pairs.vectors.middleCols(start, width);
    Eigen::MatrixXd oq(q.rows(), width);
    for (Eigen::Index c = 0; c < width; ++c) oq.col(c) = origin_operator(chain, q.col(c));
    Eigen::MatrixXd gram = q.transpose() * d.mass.asDiagonal() * oq;
    gram = 0.5 * (gram + gram.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    // Descending eigenvalue of the origin operator means ascending origin.
    Eigen::MatrixXd rotated = q * es.eigenvectors().rowwise().reverse();
    const Eigen::VectorXd weights = es.eigenvalues().reverse();

    for (Eigen::Index c = 0; c < width; ++c) {
      Eigen::VectorXd v = rotated.col(c);
      v /= std::sqrt(v.dot(d.mass.cwiseProduct(v)));
      const Eigen::VectorXd pv = chain.back().project(v);
      const double to_self = mass_norm(d, pv - v);
      const double to_zero = mass_norm(d, pv);
      const double defect = std::min(to_self, to_zero);
      const long rounded = std::lround(weights[c]);
      if (defect > tol || std::abs(weights[c] - static_cast<double>(rounded)) > 1e-6 || rounded < 0 ||
          rounded > depth)
        throw Error(ErrorCode::unclassifiable_vector,
                    "eigenvector at lambda = " + format_double(pairs.values[start + c]) +
                        " is neither fiber-constant nor mean-zero (defect " + format_double(defect) + ")");
      const auto idx = static_cast<std::size_t>(start + c);
      out.tags[idx] = to_self <= to_zero ? SubspaceTag::pullback : SubspaceTag::fresh;
      out.origin[idx] = top_level - static_cast<int>(rounded);
      out.max_defect = std::max(out.max_defect, defect);
      out.pairs.vectors.col(start + c) = v;
    }
    start = stop;
  }
  return out;
}

}  // namespace

SplitPairs new_subspace_split(const DiscreteOperator& d, const EigenPairs& pairs, const std::vector<FiberMap>& chain,
                              double tol) {
  return split_impl(d, pairs, chain, static_cast<int>(chain.size()), tol);
}

SplitPairs new_subspace_split(const DiscreteOperator& d, const EigenPairs& pairs, const FiberMap& fm, double tol) {
  // With one map the levels are "top" (1) and "below" (0); callers shift.
  return split_impl(d, pairs, {fm}, 1, tol);
}

LevelSolution solve_level(const Tower& t, int level, double pitch, const LevelOptions& opt) {
  if (level < 0 || level > t.depth()) throw Error(ErrorCode::invalid_graph, "level outside the tower");
  std::vector<Mesh> meshes;
  const int first = opt.split ? 0 : level;
  for (int i = first; i <= level; ++i)
    meshes.push_back(discretize(std::make_shared<const MetricGraph>(t.levels[static_cast<std::size_t>(i)]), pitch));

  LevelSolution s{meshes.back(), assemble(meshes.back(), opt.mass), {}, {}, {}};
  const EigenPairs pairs = solve(s.op, opt.selection, opt.solve);

  std::vector<std::string> tags;
  if (opt.split && level > 0) {
    for (int i = 1; i <= level; ++i)
      s.fiber_maps.emplace_back(t.fiber(i), meshes[static_cast<std::size_t>(i)],
                                meshes[static_cast<std::size_t>(i - 1)]);
    s.split = new_subspace_split(s.op, pairs, s.fiber_maps, opt.split_tol);
    for (int o : s.split.origin) tags.push_back(origin_tag(o));
  } else {
    s.split.pairs = pairs;
    s.split.tags.assign(pairs.size(), level == 0 ? SubspaceTag::base : SubspaceTag::pullback);
    s.split.origin.assign(pairs.size(), 0);
    tags.assign(pairs.size(), opt.split ? origin_tag(0) : std::string());
  }

  std::vector<double> values(s.split.pairs.values.data(), s.split.pairs.values.data() + s.split.pairs.values.size());
  s.spectrum = opt.split ? cluster(values, tags) : cluster(values);
  s.spectrum.origin = SpectrumOrigin::numeric(level, pitch);
  if (std::isfinite(opt.selection.upper))
    s.spectrum.truncation = opt.selection.upper;
  else
    s.spectrum.truncation = values.empty() ? 0.0 : values.back();
  return s;
}

std::vector<SpectrumList> solve_levels(const Tower& t, double pitch, const LevelOptions& opt, int threads) {
  const int count = t.depth() + 1;
  std::vector<SpectrumList> out(static_cast<std::size_t>(count));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        out[static_cast<std::size_t>(i)] = solve_level(t, i, pitch, opt).spectrum;
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  const int workers = std::clamp(threads, 1, count);
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace plim
