#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace plim {

struct SpectrumEntry {
  double value = 0.0;
  int multiplicity = 1;
  std::string tag;     // base / new@i origins, or analytic family ids
  std::string source;  // per-tag counts or (family, n, k) provenance
};

struct SpectrumOrigin {
  enum class Kind { numeric, analytic };

  Kind kind = Kind::numeric;
  int level = 0;         // numeric only
  double pitch = 0.0;    // numeric only
  std::string formula;   // analytic only

  static SpectrumOrigin numeric(int level, double pitch) { return {Kind::numeric, level, pitch, {}}; }
  static SpectrumOrigin analytic(std::string formula) { return {Kind::analytic, 0, 0.0, std::move(formula)}; }
};

/// Sorted eigenvalues with multiplicities, truncated at `truncation`.
struct SpectrumList {
  std::vector<SpectrumEntry> entries;
  SpectrumOrigin origin;
  double truncation = 0.0;

  std::size_t size() const noexcept { return entries.size(); }
  bool empty() const noexcept { return entries.empty(); }
  int total_multiplicity() const;
  // Eigenvalues repeated by multiplicity.
  std::vector<double> expanded() const;
  // Throws Error(invalid_graph) if values are not strictly increasing or a
  // multiplicity is < 1.
  void check() const;
};

inline constexpr double kClusterRelTol = 1e-7;
inline constexpr double kClusterAbsTol = 1e-9;

// Gap-based multiplicity detection on sorted values: a new cluster starts when
// the gap to the previous value exceeds rel_tol * max(|a|,|b|) + abs_tol.
SpectrumList cluster(std::span<const double> sorted, double rel_tol = kClusterRelTol,
                     double abs_tol = kClusterAbsTol);

// Same, carrying one tag per value; entry tag joins the distinct tags with
// '+' and source records the count per tag ("base=2;new@1=1").
SpectrumList cluster(std::span<const double> sorted, std::span<const std::string> tags,
                     double rel_tol = kClusterRelTol, double abs_tol = kClusterAbsTol);

// N(lambda): total multiplicity of eigenvalues <= lambda. Throws
// Error(beyond_truncation) if lambda exceeds the list's truncation.
int counting_function(const SpectrumList& s, double lambda);

std::string to_csv(const SpectrumList& s);
SpectrumList spectrum_from_csv(const std::string& text, SpectrumOrigin origin = {}, double truncation = 0.0);

nlohmann::json to_json(const SpectrumList& s);
SpectrumList spectrum_from_json(const nlohmann::json& j);

// 17 significant digits, the round-trip format used for every float written.
std::string format_double(double x);

}  // namespace plim
