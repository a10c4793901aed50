#include "plim/compare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "plim/error.hpp"

namespace plim {

namespace {

double relative_gap(double value, double reference) {
  return std::abs(value - reference) / std::max(std::abs(reference), 1.0);
}

// Index of the entry nearest to x, or -1 for an empty list.
int nearest(const SpectrumList& s, double x) {
  auto it = std::lower_bound(s.entries.begin(), s.entries.end(), x,
                             [](const SpectrumEntry& e, double v) { return e.value < v; });
  int best = -1;
  double gap = std::numeric_limits<double>::infinity();
  for (auto c : {it, it == s.entries.begin() ? it : std::prev(it)}) {
    if (c == s.entries.end()) continue;
    const double g = std::abs(c->value - x);
    if (g < gap) {
      gap = g;
      best = static_cast<int>(c - s.entries.begin());
    }
  }
  return best;
}

// Values of two lists paired position by position after expansion, with the
// entry index of each value in `fine`.
struct Paired {
  std::vector<double> coarse;
  std::vector<double> fine;
  std::vector<std::size_t> fine_entry;
};

Paired pair_expanded(const SpectrumList& coarse, const SpectrumList& fine) {
  Paired p;
  p.coarse = coarse.expanded();
  for (std::size_t e = 0; e < fine.entries.size(); ++e)
    for (int k = 0; k < fine.entries[e].multiplicity; ++k) {
      p.fine.push_back(fine.entries[e].value);
      p.fine_entry.push_back(e);
    }
  const std::size_t n = std::min(p.coarse.size(), p.fine.size());
  p.coarse.resize(n);
  p.fine.resize(n);
  p.fine_entry.resize(n);
  return p;
}

}  // namespace

double FdErrorModel::relative_tolerance(double lambda) const {
  return std::max(constant * std::abs(lambda) * pitch * pitch, floor);
}

NestingReport verify_nesting(const SpectrumList& lower, const SpectrumList& upper, double tol) {
  if (lower.origin.kind == SpectrumOrigin::Kind::numeric && upper.origin.kind == SpectrumOrigin::Kind::numeric &&
      std::abs(lower.origin.pitch - upper.origin.pitch) > 1e-12 * std::max(lower.origin.pitch, upper.origin.pitch))
    throw Error(ErrorCode::misaligned_meshes, "spectra were computed at pitches " + format_double(lower.origin.pitch) +
                                                  " and " + format_double(upper.origin.pitch));
  const double cut = std::min(lower.truncation, upper.truncation);
  NestingReport r;
  std::vector<int> left(upper.entries.size());
  for (std::size_t i = 0; i < upper.entries.size(); ++i) left[i] = upper.entries[i].multiplicity;

  for (const auto& e : lower.entries) {
    if (e.value > cut) break;
    ++r.compared;
    int need = e.multiplicity;
    auto it = std::lower_bound(upper.entries.begin(), upper.entries.end(), e.value * (1.0 - tol) - tol,
                               [](const SpectrumEntry& u, double v) { return u.value < v; });
    for (; it != upper.entries.end() && need > 0; ++it) {
      const double gap = relative_gap(it->value, e.value);
      if (gap > tol) {
        if (it->value > e.value) break;
        continue;
      }
      auto& avail = left[static_cast<std::size_t>(it - upper.entries.begin())];
      const int take = std::min(avail, need);
      if (take > 0) r.max_deviation = std::max(r.max_deviation, gap);
      avail -= take;
      need -= take;
    }
    if (need > 0) r.unmatched.push_back({e.value, need});
  }
  for (std::size_t i = 0; i < upper.entries.size(); ++i)
    if (upper.entries[i].value <= cut && left[i] > 0) r.surplus.push_back({upper.entries[i].value, left[i]});
  return r;
}

bool CompareReport::passed() const {
  return missed_analytic.empty() && std::all_of(rows.begin(), rows.end(), [](const Row& r) { return r.matched; });
}

CompareReport compare_spectra(const SpectrumList& numeric, const SpectrumList& analytic, const CompareOptions& opt) {
  CompareReport r;
  r.check_multiplicity = opt.check_multiplicity;
  const double limit = opt.limit > 0.0 ? opt.limit : numeric.truncation;
  std::vector<bool> hit(analytic.entries.size(), false);

  for (const auto& e : numeric.entries) {
    if (e.value > limit) break;
    CompareReport::Row row{e.value, std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::infinity(),
                           opt.model.relative_tolerance(e.value), e.multiplicity, 0, false};
    const int k = nearest(analytic, e.value);
    if (k >= 0) {
      const auto& a = analytic.entries[static_cast<std::size_t>(k)];
      row.analytic = a.value;
      row.analytic_mult = a.multiplicity;
      row.deviation = relative_gap(e.value, a.value);
      row.matched = row.deviation <= row.tolerance && (!opt.check_multiplicity || a.multiplicity == e.multiplicity);
      if (row.deviation <= row.tolerance) hit[static_cast<std::size_t>(k)] = true;
      r.max_deviation = std::max(r.max_deviation, row.deviation);
    }
    r.rows.push_back(row);
  }

  const double required = std::min(limit, analytic.truncation) * (1.0 - opt.completeness_margin);
  for (std::size_t i = 0; i < analytic.entries.size(); ++i)
    if (analytic.entries[i].value <= required && !hit[i]) r.missed_analytic.push_back(analytic.entries[i].value);
  return r;
}

SpectrumList richardson(const SpectrumList& coarse, const SpectrumList& fine) {
  const Paired p = pair_expanded(coarse, fine);
  std::vector<std::size_t> order(p.fine.size());
  std::vector<double> extrapolated(p.fine.size());
  for (std::size_t i = 0; i < p.fine.size(); ++i) extrapolated[i] = (4.0 * p.fine[i] - p.coarse[i]) / 3.0;
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return extrapolated[a] < extrapolated[b]; });

  std::vector<double> sorted;
  for (auto i : order) sorted.push_back(extrapolated[i]);
  SpectrumList out = cluster(sorted);
  std::size_t pos = 0;
  for (auto& e : out.entries) {
    const auto& src = fine.entries[p.fine_entry[order[pos]]];
    e.tag = src.tag;
    e.source = src.source;
    pos += static_cast<std::size_t>(e.multiplicity);
  }
  out.origin = SpectrumOrigin::analytic("richardson(" + format_double(coarse.origin.pitch) + "," +
                                        format_double(fine.origin.pitch) + ")");
  out.truncation = std::min(coarse.truncation, fine.truncation);
  return out;
}

double ConvergenceReport::order() const {
  if (rows.empty()) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (const auto& r : rows) sum += r.ratio;
  return std::log2(sum / static_cast<double>(rows.size()));
}

ConvergenceReport convergence(const SpectrumList& coarse, const SpectrumList& fine, const SpectrumList& reference) {
  ConvergenceReport r;
  const Paired p = pair_expanded(coarse, fine);
  for (std::size_t i = 0; i < p.fine.size(); ++i) {
    const int k = nearest(reference, p.fine[i]);
    if (k < 0) continue;
    const double ref = reference.entries[static_cast<std::size_t>(k)].value;
    if (ref == 0.0) continue;
    const double ec = std::abs(p.coarse[i] - ref);
    const double ef = std::abs(p.fine[i] - ref);
    if (ef <= 1e-13 * ref) continue;  // below round-off, no order to measure
    r.rows.push_back({ref, ec, ef, ec / ef});
  }
  if (!r.rows.empty()) {
    r.min_ratio = r.max_ratio = r.rows.front().ratio;
    for (const auto& row : r.rows) {
      r.min_ratio = std::min(r.min_ratio, row.ratio);
      r.max_ratio = std::max(r.max_ratio, row.ratio);
    }
  }
  return r;
}

nlohmann::json to_json(const NestingReport& r) {
  nlohmann::json unmatched = nlohmann::json::array();
  for (const auto& m : r.unmatched) unmatched.push_back({{"value", m.value}, {"missing", m.missing}});
  nlohmann::json surplus = nlohmann::json::array();
  for (const auto& s : r.surplus) surplus.push_back({{"value", s.value}, {"multiplicity", s.multiplicity}});
  return {{"passed", r.passed()},          {"compared", r.compared}, {"unmatched_count", r.unmatched.size()},
          {"max_deviation", r.max_deviation}, {"unmatched", unmatched}, {"surplus", surplus}};
}

nlohmann::json to_json(const CompareReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    nlohmann::json j{{"numeric", row.numeric},     {"deviation", row.deviation}, {"tolerance", row.tolerance},
                     {"numeric_mult", row.numeric_mult}, {"analytic_mult", row.analytic_mult},
                     {"matched", row.matched}};
    j["analytic"] = std::isnan(row.analytic) ? nlohmann::json(nullptr) : nlohmann::json(row.analytic);
    if (!std::isfinite(row.deviation)) j["deviation"] = nullptr;
    rows.push_back(std::move(j));
  }
  return {{"passed", r.passed()},
          {"check_multiplicity", r.check_multiplicity},
          {"max_deviation", r.max_deviation},
          {"missed_analytic", r.missed_analytic},
          {"rows", rows}};
}

nlohmann::json to_json(const ConvergenceReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"reference", row.reference},
                    {"error_coarse", row.error_coarse},
                    {"error_fine", row.error_fine},
                    {"ratio", row.ratio}});
  nlohmann::json j{{"min_ratio", r.min_ratio}, {"max_ratio", r.max_ratio}, {"rows", rows}};
  j["order"] = r.rows.empty() ? nlohmann::json(nullptr) : nlohmann::json(r.order());
  return j;
}

}  // namespace plim
