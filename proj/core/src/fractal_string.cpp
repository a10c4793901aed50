#include "plim/fractal_string.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "plim/error.hpp"
#include "tower_growth.hpp"

namespace plim {

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;
constexpr std::int64_t kExactBound = 1000000;
__extension__ using Wide = __int128;

bool is_exact(const Rational& r, double x) { return std::abs(r.value() - x) <= 1e-12 * std::abs(x); }

}  // namespace

StringSpec StringSpec::truncated(int n) const {
  StringSpec out = *this;
  const auto keep = static_cast<std::size_t>(std::clamp(n, 0, depth()));
  out.lengths.resize(keep);
  out.mults.resize(std::min(keep, out.mults.size()));
  return out;
}

void StringSpec::validate() const {
  if (lengths.empty()) throw Error(ErrorCode::invalid_sequence, "a fractal string needs at least one length");
  if (lengths.size() != mults.size()) throw Error(ErrorCode::invalid_sequence, "one multiplicity per length");
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (!(lengths[i] > 0.0) || !std::isfinite(lengths[i]))
      throw Error(ErrorCode::invalid_sequence, "length " + std::to_string(i + 1) + " is not positive");
    if (mults[i] < 1) throw Error(ErrorCode::invalid_sequence, "multiplicity " + std::to_string(i + 1) + " below 1");
    if (i > 0 && !(lengths[i] < lengths[i - 1]))
      throw Error(ErrorCode::infeasible_nesting, "length " + std::to_string(i + 1) + " = " +
                                                     format_double(lengths[i]) + " does not fit inside length " +
                                                     std::to_string(i) + " = " + format_double(lengths[i - 1]));
  }
}

StringSpec StringSpec::from_json(const nlohmann::json& doc) {
  try {
    StringSpec s;
    s.lengths = doc.at("lengths").get<std::vector<double>>();
    s.mults = doc.at("mults").get<std::vector<int>>();
    if (doc.contains("depth")) {
      const int depth = doc.at("depth").get<int>();
      if (depth < 1 || depth > s.depth())
        throw Error(ErrorCode::invalid_sequence, "depth must lie in [1, " + std::to_string(s.depth()) + "]");
      s = s.truncated(depth);
    }
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, e.what());
  }
}

nlohmann::json StringSpec::to_json() const { return {{"lengths", lengths}, {"mults", mults}, {"depth", depth()}}; }

Rational rationalize(double x, std::int64_t bound) {
  if (!std::isfinite(x) || bound < 1) throw Error(ErrorCode::no_common_pitch, "cannot rationalize " + format_double(x));
  // Continued-fraction convergents h/k, stopping before k exceeds the bound.
  std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double rest = x;
  Rational best{static_cast<std::int64_t>(std::llround(x)), 1};
  for (int step = 0; step < 64; ++step) {
    const double a = std::floor(rest);
    if (std::abs(a) > 1e15) break;
    const auto ai = static_cast<std::int64_t>(a);
    const std::int64_t h2 = ai * h1 + h0;
    const std::int64_t k2 = ai * k1 + k0;
    if (k2 > bound) break;
    best = {h2, k2};
    if (is_exact(best, x) || rest - a < 1e-15) break;
    rest = 1.0 / (rest - a);
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
  }
  return best;
}

SpectrumList string_analytic_spectrum(const StringSpec& s, double lambda_max) {
  s.validate();
  // Eigenvalue (pi k / l_i)^2 is keyed by k / l_i, kept as an exact fraction
  // k q_i / p_i when every length is rational.
  std::vector<Rational> rational;
  bool exact = true;
  for (double l : s.lengths) {
    rational.push_back(rationalize(l, kExactBound));
    exact = exact && rational.back().num > 0 && is_exact(rational.back(), l);
  }

  struct Item {
    std::int64_t num;  // k * q_i
    std::int64_t den;  // p_i
    double value;
    std::size_t i;
    std::int64_t k;
  };
  std::vector<Item> items;
  for (std::size_t i = 0; i < s.lengths.size(); ++i) {
    for (std::int64_t k = 1;; ++k) {
      const double root = std::numbers::pi * static_cast<double>(k) / s.lengths[i];
      const double value = root * root;
      if (value > lambda_max) break;
      Item it{0, 1, value, i, k};
      if (exact) {
        const std::int64_t num = k * rational[i].den;
        const std::int64_t den = rational[i].num;
        const std::int64_t g = std::gcd(num, den);
        it.num = num / g;
        it.den = den / g;
        const double q = static_cast<double>(it.num) / static_cast<double>(it.den);
        it.value = kPi2 * q * q;
      }
      items.push_back(it);
    }
  }
  auto less = [&](const Item& a, const Item& b) {
    if (exact) {
      const Wide l = static_cast<Wide>(a.num) * b.den;
      const Wide r = static_cast<Wide>(b.num) * a.den;
      if (l != r) return l < r;
    } else if (a.value != b.value) {
      return a.value < b.value;
    }
    return a.i < b.i;
  };
  std::sort(items.begin(), items.end(), less);

  SpectrumList out;
  out.origin = SpectrumOrigin::analytic("string");
  out.truncation = lambda_max;
  for (std::size_t a = 0; a < items.size();) {
    std::size_t b = a + 1;
    auto same = [&](const Item& x, const Item& y) {
      if (exact) return x.num == y.num && x.den == y.den;
      return std::abs(x.value - y.value) <= 1e-12 * std::max(x.value, y.value);
    };
    while (b < items.size() && same(items[a], items[b])) ++b;
    SpectrumEntry e;
    e.value = items[a].value;
    e.multiplicity = 0;
    for (std::size_t c = a; c < b; ++c) {
      const auto& it = items[c];
      e.multiplicity += s.mults[it.i];
      const std::string id = "l" + std::to_string(it.i + 1);
      if (e.tag.find(id) == std::string::npos) e.tag += (e.tag.empty() ? "" : "+") + id;
      e.source += (e.source.empty() ? "" : "|") + std::string("i=") + std::to_string(it.i + 1) +
                  ":k=" + std::to_string(it.k) + ":m=" + std::to_string(s.mults[it.i]);
    }
    if (e.value <= lambda_max) out.entries.push_back(std::move(e));
    a = b;
  }
  return out;
}

Tower build_stitched(const StringSpec& s) {
  s.validate();
  const double l1 = s.lengths.front();
  // Common breakpoints 0 < l1 - l2 < ... < l1 - lN < l1.
  std::vector<double> points{0.0};
  for (std::size_t i = 1; i < s.lengths.size(); ++i) points.push_back(l1 - s.lengths[i]);
  points.push_back(l1);

  std::vector<Vertex> vertices;
  for (std::size_t p = 0; p < points.size(); ++p) {
    Vertex v;
    v.x = points[p];
    v.boundary = (p == 0 || p + 1 == points.size()) ? Boundary::dirichlet : Boundary::neumann;
    vertices.push_back(v);
  }
  std::vector<Edge> edges;
  for (std::size_t p = 0; p + 1 < points.size(); ++p)
    edges.push_back({static_cast<int>(p), static_cast<int>(p + 1), points[p + 1] - points[p], 1.0});

  auto on_distinguished_sheet = [](const Word& w) {
    return std::all_of(w.begin(), w.end(), [](int c) { return c == 0; });
  };
  // The copied region at level i >= 2 is the open segment (l1 - l_i, l1);
  // its breakpoint index is i - 1.
  detail::Growth rule;
  rule.fiber_size = [&](int i) { return i == 1 ? s.mults[0] : s.mults[static_cast<std::size_t>(i - 1)] + 1; };
  rule.copies_vertex = [&](int i, int base, const Word& w) {
    const int last = static_cast<int>(points.size()) - 1;
    const int left = i == 1 ? 0 : i - 1;
    return base > left && base < last && on_distinguished_sheet(w);
  };
  rule.copies_edge = [&](int i, int base, const Word& w) {
    const int left = i == 1 ? 0 : i - 1;
    return base >= left && on_distinguished_sheet(w);
  };
  Tower t = detail::grow_tower(MetricGraph(std::move(vertices), std::move(edges), l1), s.depth(), rule);
  validate(t);
  return t;
}

PitchChoice common_pitch(const StringSpec& s, int refine, std::int64_t denominator_bound, bool approximate) {
  s.validate();
  if (refine < 1) throw Error(ErrorCode::no_common_pitch, "refine must be positive");
  PitchChoice c;
  for (double l : s.lengths) {
    const Rational r = rationalize(l, denominator_bound);
    if (r.num <= 0 || (!approximate && !is_exact(r, l)))
      throw Error(ErrorCode::no_common_pitch, "length " + format_double(l) + " has no rational form with denominator <= " +
                                                  std::to_string(denominator_bound));
    const std::int64_t g = std::gcd(c.denominator, r.den);
    if (c.denominator / g > (std::int64_t{1} << 40) / r.den)
      throw Error(ErrorCode::no_common_pitch, "common denominator of the lengths is too large");
    c.denominator = c.denominator / g * r.den;
    c.used_lengths.push_back(r.value());
    c.max_relative_perturbation = std::max(c.max_relative_perturbation, std::abs(r.value() - l) / l);
  }
  c.pitch = 1.0 / (static_cast<double>(refine) * static_cast<double>(c.denominator));
  return c;
}

SpectrumList stitched_numeric_spectrum(const StringSpec& s, double lambda_max, double pitch,
                                       const SolveOptions& solve) {
  const Tower t = build_stitched(s);
  LevelOptions opt;
  opt.selection = Selection::up_to(lambda_max);
  opt.solve = solve;
  return solve_level(t, t.depth(), pitch, opt).spectrum;
}

double zeta_abscissa(const StringSpec& string) {
  string.validate();
  // D from the growth of the cumulative count against 1 / l_i.
  std::vector<double> xs;
  std::vector<double> ys;
  double count = 0.0;
  for (std::size_t i = 0; i < string.lengths.size(); ++i) {
    count += string.mults[i];
    xs.push_back(-std::log(string.lengths[i]));
    ys.push_back(std::log(count));
  }
  double dimension = 0.0;
  if (xs.size() >= 2) {
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom > 0.0) dimension = std::max(0.0, (n * sxy - sx * sy) / denom);
  }
  return std::max(0.5, dimension / 2.0);
}

double zeta_abscissa(const SpectrumList& spectrum) {
  std::vector<double> xs;
  std::vector<double> ys;
  double count = 0.0;
  for (const auto& e : spectrum.entries) {
    count += e.multiplicity;
    if (e.value <= 0.0) continue;
    xs.push_back(std::log(e.value));
    ys.push_back(std::log(count));
  }
  if (xs.size() < 2) return 0.5;
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  return denom > 0.0 ? (n * sxy - sx * sy) / denom : 0.5;
}

double zeta_partial(const SpectrumList& spectrum, double s, double lambda_max, bool require_convergence) {
  if (!(s > 0.0)) throw Error(ErrorCode::divergent_range, "zeta exponent must be positive");
  if (require_convergence && s <= zeta_abscissa(spectrum))
    throw Error(ErrorCode::divergent_range, "exponent " + format_double(s) + " is at or below the abscissa estimate");
  double sum = 0.0;
  for (const auto& e : spectrum.entries) {
    if (e.value > lambda_max) break;
    if (e.value > 0.0) sum += e.multiplicity * std::pow(e.value, -s);
  }
  return sum;
}

double zeta_partial(const StringSpec& string, double s, double lambda_max, bool require_convergence) {
  if (!(s > 0.0)) throw Error(ErrorCode::divergent_range, "zeta exponent must be positive");
  if (require_convergence && s <= zeta_abscissa(string))
    throw Error(ErrorCode::divergent_range, "exponent " + format_double(s) + " is at or below the abscissa estimate");
  return zeta_partial(string_analytic_spectrum(string, lambda_max), s, lambda_max, false);
}

}  // namespace plim
