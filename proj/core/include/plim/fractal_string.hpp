#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "plim/fiber.hpp"
#include "plim/levels.hpp"
#include "plim/spectrum.hpp"

namespace plim {

/// Fractal string: strictly decreasing lengths l_i with multiplicities m_i.
struct StringSpec {
  std::vector<double> lengths;
  std::vector<int> mults;

  int depth() const noexcept { return static_cast<int>(lengths.size()); }
  StringSpec truncated(int n) const;

  // Throws Error(infeasible_nesting) for non-decreasing lengths and
  // Error(invalid_sequence) for malformed entries.
  void validate() const;

  // {"lengths":[...], "mults":[...], "depth":N}; depth truncates.
  static StringSpec from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
};

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// Best rational approximation with denominator <= bound (continued fractions).
Rational rationalize(double x, std::int64_t bound);

// lambda_{i,k} = pi^2 k^2 / l_i^2 with multiplicity m_i, merged exactly when
// the lengths are rational (denominator <= 10^6) and by relative 1e-12
// otherwise.
SpectrumList string_analytic_spectrum(const StringSpec& s, double lambda_max);

// Levels F_0..F_N of the stitched construction. F_0 = [0, l_1] with Dirichlet
// endpoints; level 1 makes m_1 strands; level i >= 2 duplicates the open
// right-end segment of length l_i on the all-zero sheet into m_i + 1 copies.
Tower build_stitched(const StringSpec& s);

struct PitchChoice {
  double pitch = 0.0;
  std::int64_t denominator = 1;  // lcm of the length denominators
  std::vector<double> used_lengths;
  double max_relative_perturbation = 0.0;  // max |dl / l|
};

// Pitch 1 / (refine * lcm(q_i)) for rational lengths p_i / q_i with q_i <=
// denominator_bound. With approximate = false lengths must be rational to
// 1e-12 relative; otherwise the nearest rationals are used and the length
// perturbation is reported. Throws Error(no_common_pitch).
PitchChoice common_pitch(const StringSpec& s, int refine, std::int64_t denominator_bound = 1000000,
                         bool approximate = false);

SpectrumList stitched_numeric_spectrum(const StringSpec& s, double lambda_max, double pitch,
                                       const SolveOptions& solve = {});

// Sum of multiplicity * lambda^-s over entries <= lambda_max. Throws
// Error(divergent_range) when require_convergence and s is at or below the
// abscissa estimate.
double zeta_partial(const SpectrumList& spectrum, double s, double lambda_max, bool require_convergence = false);
double zeta_partial(const StringSpec& string, double s, double lambda_max, bool require_convergence = false);

// Abscissa of convergence of the spectral zeta function: max(1/2, D/2) with D
// the abscissa of sum m_i l_i^sigma estimated from the entries.
double zeta_abscissa(const StringSpec& string);
// Weyl exponent estimate: slope of log N(lambda) against log lambda.
double zeta_abscissa(const SpectrumList& spectrum);

}  // namespace plim
