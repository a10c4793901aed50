#include "plim/laakso.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "plim/error.hpp"
#include "tower_growth.hpp"

namespace plim {

namespace {

constexpr std::int64_t kMaxDenominator = std::int64_t{1} << 30;

}  // namespace

std::int64_t LaaksoSpec::d(int n) const {
  std::int64_t out = 1;
  for (int l = 0; l < n; ++l) out *= j.at(static_cast<std::size_t>(l));
  return out;
}

LaaksoSpec LaaksoSpec::truncated(int n) const {
  LaaksoSpec out = *this;
  out.j.resize(static_cast<std::size_t>(std::clamp(n, 0, depth())));
  return out;
}

void LaaksoSpec::validate() const {
  if (refine < 2) throw Error(ErrorCode::invalid_sequence, "refine must be at least 2");
  if (j.empty()) return;
  const int base = *std::min_element(j.begin(), j.end());
  if (base < 2) throw Error(ErrorCode::invalid_sequence, "every j_l must be at least 2");
  std::int64_t denominator = 1;
  for (std::size_t l = 0; l < j.size(); ++l) {
    if (j[l] != base && j[l] != base + 1)
      throw Error(ErrorCode::invalid_sequence, "j_" + std::to_string(l + 1) + " = " + std::to_string(j[l]) +
                                                   " is not in {" + std::to_string(base) + ", " +
                                                   std::to_string(base + 1) + "}");
    denominator *= j[l];
    if (denominator * refine > kMaxDenominator)
      throw Error(ErrorCode::invalid_sequence, "d_n * refine exceeds " + std::to_string(kMaxDenominator));
  }
}

LaaksoSpec LaaksoSpec::from_json(const nlohmann::json& doc) {
  try {
    LaaksoSpec s;
    s.j = doc.at("j").get<std::vector<int>>();
    if (doc.contains("depth")) {
      const int depth = doc.at("depth").get<int>();
      if (depth < 0 || depth > s.depth())
        throw Error(ErrorCode::invalid_sequence,
                    "depth " + std::to_string(depth) + " needs that many j entries (have " +
                        std::to_string(s.depth()) + ")");
      s.j.resize(static_cast<std::size_t>(depth));
    }
    s.refine = doc.value("refine", s.refine);
    s.boundary = parse_boundary(doc.value("boundary", to_string(s.boundary)));
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, e.what());
  }
}

nlohmann::json LaaksoSpec::to_json() const {
  return {{"j", j}, {"depth", depth()}, {"refine", refine}, {"boundary", plim::to_string(boundary)}};
}

int WormholeTable::level_of(std::int64_t p) const {
  for (std::size_t m = 0; m < positions.size(); ++m)
    if (std::binary_search(positions[m].begin(), positions[m].end(), p)) return static_cast<int>(m) + 1;
  return 0;
}

WormholeTable wormholes(const LaaksoSpec& spec) {
  spec.validate();
  WormholeTable t;
  const int n = spec.depth();
  t.denominator = spec.d(n);
  t.positions.resize(static_cast<std::size_t>(n));
  for (std::int64_t p = 1; p < t.denominator; ++p)
    for (int m = 1; m <= n; ++m)
      if (p % (t.denominator / spec.d(m)) == 0) {
        t.positions[static_cast<std::size_t>(m - 1)].push_back(p);
        break;
      }
  return t;
}

Tower build_laakso(const LaaksoSpec& spec) {
  const WormholeTable table = wormholes(spec);
  const std::int64_t dn = table.denominator;
  std::vector<int> level(static_cast<std::size_t>(dn + 1), 0);
  for (std::size_t m = 0; m < table.positions.size(); ++m)
    for (auto p : table.positions[m]) level[static_cast<std::size_t>(p)] = static_cast<int>(m) + 1;

  std::vector<Vertex> vertices;
  for (std::int64_t p = 0; p <= dn; ++p) {
    Vertex v;
    v.x = static_cast<double>(p) / static_cast<double>(dn);
    v.boundary = (p == 0 || p == dn) ? spec.boundary : Boundary::neumann;
    vertices.push_back(v);
  }
  std::vector<Edge> edges;
  for (std::int64_t p = 0; p < dn; ++p)
    edges.push_back({static_cast<int>(p), static_cast<int>(p + 1), 1.0 / static_cast<double>(dn), 1.0});

  detail::Growth rule;
  rule.fiber_size = [](int) { return 2; };
  rule.copies_vertex = [&](int i, int base, const Word&) { return level[static_cast<std::size_t>(base)] != i; };
  rule.copies_edge = [](int, int, const Word&) { return true; };
  Tower t = detail::grow_tower(MetricGraph(std::move(vertices), std::move(edges), 1.0), spec.depth(), rule);
  validate(t);
  return t;
}

double laakso_pitch(const LaaksoSpec& spec) {
  return 1.0 / static_cast<double>(static_cast<std::int64_t>(spec.refine) * spec.d(spec.depth()));
}

SpectrumList laakso_analytic_spectrum(const LaaksoSpec& spec, double lambda_max) {
  spec.validate();
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  // keys are eigenvalues in units of pi^2
  struct Sources {
    std::set<std::string> families;
    std::vector<std::string> items;
  };
  std::map<std::int64_t, Sources> keys;
  const double bound = lambda_max / pi2;
  auto add = [&](std::int64_t key, const char* family, int n, std::int64_t k) {
    auto& s = keys[key];
    s.families.insert(family);
    s.items.push_back(std::string(family) + ":n=" + std::to_string(n) + ":k=" + std::to_string(k));
  };
  for (int n = 0; n <= spec.depth(); ++n) {
    const auto dn = spec.d(n);
    const auto d2 = dn * dn;
    for (std::int64_t k = 1; static_cast<double>(k * k * d2) <= bound; ++k) add(k * k * d2, "f1", n, k);
    if (n >= 2)
      for (std::int64_t k = 1; static_cast<double>(4 * k * k * d2) <= bound; ++k) add(4 * k * k * d2, "f2", n, k);
    if (n >= 1)
      for (std::int64_t k = 0; static_cast<double>(4 * (2 * k + 1) * (2 * k + 1) * d2) <= bound; ++k)
        add(4 * (2 * k + 1) * (2 * k + 1) * d2, "f3", n, k);
  }

  SpectrumList out;
  out.origin = SpectrumOrigin::analytic("laakso");
  out.truncation = lambda_max;
  if (spec.boundary == Boundary::neumann) out.entries.push_back({0.0, 1, "constant", "constant"});
  for (auto& [key, s] : keys) {
    SpectrumEntry e;
    e.value = static_cast<double>(key) * pi2;
    if (e.value > lambda_max) continue;
    for (const auto& f : s.families) e.tag += (e.tag.empty() ? "" : "+") + f;
    for (const auto& item : s.items) e.source += (e.source.empty() ? "" : "|") + item;
    out.entries.push_back(std::move(e));
  }
  return out;
}

SpectrumList laakso_numeric_spectrum(const LaaksoSpec& spec, double lambda_max, double pitch,
                                     const SolveOptions& solve) {
  const Tower t = build_laakso(spec);
  LevelOptions opt;
  opt.selection = Selection::up_to(lambda_max);
  opt.solve = solve;
  return solve_level(t, t.depth(), pitch > 0.0 ? pitch : laakso_pitch(spec), opt).spectrum;
}

}  // namespace plim
