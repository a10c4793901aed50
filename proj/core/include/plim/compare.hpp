#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "plim/spectrum.hpp"

namespace plim {

/// Eigenvalue error model of the second-order scheme: an eigenvalue lambda
/// computed at pitch h is trusted to relative accuracy constant * lambda * h^2
/// (that is constant * (k_eff pi h)^2 with k_eff = sqrt(lambda)/pi).
struct FdErrorModel {
  double pitch = 0.0;
  double constant = 0.1;
  double floor = 1e-9;  // deviations are absolute below 1, so this also covers a round-off zero

  double relative_tolerance(double lambda) const;
};

struct NestingReport {
  struct Miss {
    double value;
    int missing;  // multiplicity not found in the upper list
  };
  struct Extra {
    double value;
    int multiplicity;
  };

  std::vector<Miss> unmatched;
  std::vector<Extra> surplus;
  double max_deviation = 0.0;  // relative, over matched entries
  int compared = 0;

  bool passed() const { return unmatched.empty(); }
};

// Multiset inclusion of `lower` in `upper` below the common truncation.
// Throws Error(misaligned_meshes) when both lists are numeric with different
// pitches.
NestingReport verify_nesting(const SpectrumList& lower, const SpectrumList& upper, double tol = 1e-9);

struct CompareReport {
  struct Row {
    double numeric;
    double analytic;       // nearest analytic value (NaN when none)
    double deviation;      // relative
    double tolerance;      // relative
    int numeric_mult;
    int analytic_mult;
    bool matched;
  };

  std::vector<Row> rows;
  std::vector<double> missed_analytic;  // analytic entries never attained
  double max_deviation = 0.0;
  bool check_multiplicity = false;

  bool passed() const;
};

struct CompareOptions {
  FdErrorModel model;
  bool check_multiplicity = false;
  // analytic entries above truncation * (1 - completeness_margin) are not
  // required to be attained
  double completeness_margin = 0.05;
  // only numeric entries <= limit are compared (defaults to truncation)
  double limit = -1.0;
};

CompareReport compare_spectra(const SpectrumList& numeric, const SpectrumList& analytic,
                              const CompareOptions& opt);

// Pairs clusters of two numeric lists computed at pitches h and h/2 and
// returns (4 lambda_{h/2} - lambda_h) / 3 for each.
SpectrumList richardson(const SpectrumList& coarse, const SpectrumList& fine);

struct ConvergenceReport {
  struct Row {
    double reference;
    double error_coarse;
    double error_fine;
    double ratio;
  };
  std::vector<Row> rows;
  double min_ratio = 0.0;
  double max_ratio = 0.0;

  double order() const;  // log2 of the mean ratio
};

// Error ratios |lambda_h - ref| / |lambda_{h/2} - ref| against the nearest
// reference value, for entries with a nonzero reference.
ConvergenceReport convergence(const SpectrumList& coarse, const SpectrumList& fine,
                              const SpectrumList& reference);

nlohmann::json to_json(const NestingReport& r);
nlohmann::json to_json(const CompareReport& r);
nlohmann::json to_json(const ConvergenceReport& r);

}  // namespace plim
