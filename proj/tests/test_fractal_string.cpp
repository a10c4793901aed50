#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "plim/compare.hpp"
#include "plim/error.hpp"
#include "plim/fractal_string.hpp"
#include "plim/levels.hpp"
#include "support/oracles.hpp"

namespace {

using namespace plim;
using plim::test::kPi2;

StringSpec cantor(int depth) {
  StringSpec s;
  for (int i = 1; i <= depth; ++i) {
    s.lengths.push_back(std::pow(3.0, -i));
    s.mults.push_back(1 << (i - 1));
  }
  return s;
}

ErrorCode code_of_spec(const StringSpec& s) {
  try {
    s.validate();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::dimension_mismatch;  // no error
}

// multiplicity carried by one origin tag inside a clustered entry
int tagged(const SpectrumEntry& e, const std::string& tag) {
  std::istringstream in(e.source);
  std::string item;
  while (std::getline(in, item, ';')) {
    const auto eq = item.rfind('=');
    if (item.substr(0, eq) == tag) return std::stoi(item.substr(eq + 1));
  }
  return 0;
}

TEST(StringSpec, Validation) {
  EXPECT_EQ(code_of_spec({{0.5, 0.25}, {1, 1}}), ErrorCode::dimension_mismatch);
  EXPECT_EQ(code_of_spec({{0.25, 0.5}, {1, 1}}), ErrorCode::infeasible_nesting);
  EXPECT_EQ(code_of_spec({{0.5, 0.5}, {1, 1}}), ErrorCode::infeasible_nesting);
  EXPECT_EQ(code_of_spec({{0.5}, {0}}), ErrorCode::invalid_sequence);
  EXPECT_EQ(code_of_spec({{-0.5}, {1}}), ErrorCode::invalid_sequence);
  EXPECT_EQ(code_of_spec({{0.5, 0.25}, {1}}), ErrorCode::invalid_sequence);
  const StringSpec s = StringSpec::from_json(R"({"lengths":[0.5,0.25,0.125], "mults":[1,2,3], "depth":2})"_json);
  EXPECT_EQ(s.depth(), 2);
  EXPECT_EQ(StringSpec::from_json(s.to_json()).to_json(), s.to_json());
}

TEST(StringAnalytic, SingleInterval) {
  const SpectrumList s = string_analytic_spectrum({{1.0}, {1}}, 100.0);
  ASSERT_EQ(s.size(), 3u);
  for (int k = 1; k <= 3; ++k) {
    EXPECT_NEAR(s.entries[static_cast<std::size_t>(k - 1)].value, k * k * kPi2, 1e-12 * k * k * kPi2);
    EXPECT_EQ(s.entries[static_cast<std::size_t>(k - 1)].multiplicity, 1);
  }
}

TEST(StringAnalytic, CantorStringMergesCoincidences) {
  const SpectrumList s = string_analytic_spectrum(cantor(4), 100.0 * kPi2);
  // direct enumeration of (i, k) pairs
  std::map<long, int> oracle;
  const StringSpec c = cantor(4);
  for (std::size_t i = 0; i < c.lengths.size(); ++i)
    for (long k = 1;; ++k) {
      const long key = k * k * std::lround(std::pow(9.0, static_cast<double>(i + 1)));
      if (key > 100) break;
      oracle[key] += c.mults[i];
    }
  ASSERT_EQ(s.size(), oracle.size());
  std::size_t idx = 0;
  for (auto [key, mult] : oracle) {
    EXPECT_NEAR(s.entries[idx].value / kPi2, static_cast<double>(key), 1e-12 * static_cast<double>(key));
    EXPECT_EQ(s.entries[idx].multiplicity, mult) << key;
    ++idx;
  }
  EXPECT_EQ(s.entries[0].multiplicity, 1);   // 9 pi^2
  EXPECT_EQ(s.entries[1].multiplicity, 1);   // 36 pi^2
  EXPECT_EQ(s.entries[2].multiplicity, 3);   // 81 pi^2
}

TEST(StringAnalytic, BelowFirstEigenvalueIsEmpty) {
  EXPECT_TRUE(string_analytic_spectrum({{0.5}, {2}}, 3.9 * kPi2).empty());
}

TEST(StringAnalytic, IrrationalLengthsStillMerge) {
  const double a = 1.0 / std::sqrt(2.0);
  const SpectrumList s = string_analytic_spectrum({{a, a / 2.0}, {1, 1}}, 17.0 * kPi2 / (a * a));
  // k = 2 of l_1 coincides with k = 1 of l_2
  int doubles = 0;
  for (const auto& e : s.entries) doubles += e.multiplicity == 2;
  EXPECT_EQ(doubles, 2);
}

TEST(BuildStitched, ThetaGraph) {
  const Tower t = build_stitched({{0.5}, {3}});
  ASSERT_EQ(t.depth(), 1);
  const MetricGraph& g = t.top();
  EXPECT_EQ(g.vertex_count(), 2u);
  EXPECT_EQ(g.edge_count(), 3u);
  EXPECT_EQ(g.dirichlet_count(), 2u);
  for (const Edge& e : g.edges()) {
    EXPECT_DOUBLE_EQ(e.length, 0.5);
    EXPECT_DOUBLE_EQ(e.weight, 1.0 / 3.0);
  }
}

TEST(BuildStitched, ExtraStrandAtTheRightEnd) {
  const Tower t = build_stitched({{0.5, 0.25}, {1, 1}});
  const MetricGraph& g = t.top();
  EXPECT_EQ(g.vertex_count(), 3u);
  ASSERT_EQ(g.edge_count(), 3u);
  int strands = 0;
  for (const Edge& e : g.edges()) {
    const auto& u = g.vertices()[static_cast<std::size_t>(e.u)];
    const auto& v = g.vertices()[static_cast<std::size_t>(e.v)];
    const double lo = std::min(u.x, v.x);
    const double hi = std::max(u.x, v.x);
    EXPECT_DOUBLE_EQ(e.length, 0.25);
    if (lo == 0.25 && hi == 0.5) {
      ++strands;
      EXPECT_DOUBLE_EQ(e.weight, 0.5);
    } else {
      EXPECT_EQ(lo, 0.0);
      EXPECT_DOUBLE_EQ(e.weight, 1.0);
    }
  }
  EXPECT_EQ(strands, 2);
  EXPECT_NEAR(g.measure(), 0.5, 1e-15);
}

TEST(BuildStitched, SingleStrandLeavesTheIntervalAlone) {
  const Tower t = build_stitched({{0.75}, {1}});
  EXPECT_EQ(t.top().vertex_count(), 2u);
  EXPECT_EQ(t.top().edge_count(), 1u);
  EXPECT_EQ(t.levels[0].edge_count(), 1u);
}

TEST(BuildStitched, RejectsIncreasingLengths) {
  try {
    build_stitched({{0.25, 0.5}, {1, 1}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::infeasible_nesting);
  }
}

TEST(CommonPitch, RationalAndApproximateLengths) {
  const PitchChoice p = common_pitch({{0.5, 0.25}, {1, 1}}, 16);
  EXPECT_EQ(p.denominator, 4);
  EXPECT_DOUBLE_EQ(p.pitch, 1.0 / 64);
  EXPECT_EQ(p.max_relative_perturbation, 0.0);

  const StringSpec irrational{{1.0 / std::sqrt(2.0), 1.0 / std::numbers::pi}, {1, 1}};
  try {
    common_pitch(irrational, 4, 1000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::no_common_pitch);
  }
  const PitchChoice a = common_pitch(irrational, 4, 100, true);
  EXPECT_GT(a.max_relative_perturbation, 0.0);
  EXPECT_LT(a.max_relative_perturbation, 1e-3);
  for (std::size_t i = 0; i < 2; ++i) {
    const double steps = a.used_lengths[i] / a.pitch;
    EXPECT_NEAR(steps, std::round(steps), 1e-9);
  }
}

TEST(Rationalize, ContinuedFractions) {
  const Rational third = rationalize(1.0 / 3.0, 1000);
  EXPECT_EQ(third.num, 1);
  EXPECT_EQ(third.den, 3);
  const Rational pi = rationalize(std::numbers::pi, 1000);
  EXPECT_EQ(pi.num, 355);
  EXPECT_EQ(pi.den, 113);
}

TEST(StitchedNumeric, TwoIntervalsWithCoincidences) {
  const StringSpec s{{0.5, 0.25}, {1, 1}};
  const double h = common_pitch(s, 16).pitch;
  const SpectrumList numeric = stitched_numeric_spectrum(s, 70.0 * kPi2, h);
  const double expected[][2] = {{4, 1}, {16, 2}, {36, 1}, {64, 2}};
  ASSERT_GE(numeric.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    const double exact = expected[i][0] * kPi2;
    EXPECT_NEAR(numeric.entries[i].value, exact, 0.1 * exact * h * h * exact) << exact;
    EXPECT_EQ(numeric.entries[i].multiplicity, static_cast<int>(expected[i][1])) << exact;
  }
}

TEST(StitchedNumeric, ThetaGraphTripleEigenvalues) {
  const StringSpec s{{0.5}, {3}};
  const double h = common_pitch(s, 16).pitch;
  const SpectrumList numeric = stitched_numeric_spectrum(s, 40.0 * kPi2, h);
  ASSERT_EQ(numeric.size(), 3u);
  for (std::size_t k = 1; k <= 3; ++k) {
    EXPECT_EQ(numeric.entries[k - 1].multiplicity, 3);
    // one pullback of the Dirichlet interval plus two mean-zero strand modes
    EXPECT_EQ(tagged(numeric.entries[k - 1], "base"), 1);
    EXPECT_EQ(tagged(numeric.entries[k - 1], "new@1"), 2);
  }
}

TEST(StitchedNumeric, NewModesAreDirichletIntervalModes) {
  const StringSpec s{{0.5, 0.25, 0.125}, {2, 2, 3}};
  const double h = common_pitch(s, 16).pitch;
  const double lambda = 4.0 * kPi2 / (0.125 * 0.125);
  const SpectrumList numeric = stitched_numeric_spectrum(s, lambda, h);
  for (int i = 0; i <= 3; ++i) {
    const double l = s.lengths[static_cast<std::size_t>(std::max(i, 1) - 1)];
    const int mult = i == 0 ? 1 : i == 1 ? s.mults[0] - 1 : s.mults[static_cast<std::size_t>(i - 1)];
    std::map<long, int> got;
    for (const auto& e : numeric.entries) {
      const int n = tagged(e, origin_tag(i));
      if (n == 0) continue;
      const double k = std::sqrt(e.value) * l / plim::test::kPi;
      EXPECT_NEAR(k, std::round(k), 0.01 * k) << "level " << i << " value " << e.value;
      got[std::lround(k)] += n;
    }
    ASSERT_FALSE(got.empty()) << "level " << i;
    for (auto [k, n] : got)
      if (k * k * kPi2 / (l * l) <= lambda / 2.0) {
        EXPECT_EQ(n, mult) << "level " << i << " k=" << k;
      }
  }
}

TEST(StitchedNumeric, NewVectorsVanishOutsideTheirStrands) {
  const StringSpec s{{0.5, 0.25}, {2, 2}};
  const Tower t = build_stitched(s);
  LevelOptions opt;
  opt.selection = Selection::up_to(200.0 * kPi2);
  for (int level = 1; level <= 2; ++level) {
    const LevelSolution sol = solve_level(t, level, common_pitch(s, 8).pitch, opt);
    const FiberMap& fm = sol.fiber_maps.back();
    int fresh = 0;
    for (std::size_t k = 0; k < sol.split.pairs.size(); ++k) {
      if (sol.split.tags[k] != SubspaceTag::fresh) continue;
      ++fresh;
      const Eigen::VectorXd v = sol.split.pairs.vectors.col(static_cast<Eigen::Index>(k));
      for (std::size_t n = 0; n < fm.upper_size(); ++n)
        if (fm.label(n) == kCollapsed) {
          EXPECT_LE(std::abs(v[static_cast<Eigen::Index>(n)]), 1e-8);
        }
    }
    EXPECT_GT(fresh, 0);
  }
}

TEST(StitchedNumeric, IsospectralForCommensurableSpecs) {
  const std::vector<StringSpec> specs{{{0.5}, {2}},
                                      {{0.5, 1.0 / 3.0}, {1, 2}},
                                      {{0.5, 0.25, 0.125}, {1, 1, 1}},
                                      {{0.75, 0.5, 0.25}, {2, 1, 3}},
                                      {{1.0, 1.0 / 3.0, 1.0 / 9.0}, {1, 2, 4}}};
  for (const StringSpec& s : specs) {
    const PitchChoice p = common_pitch(s, 16);
    const double lambda = 64.0 * kPi2 / (s.lengths[0] * s.lengths[0]);
    const SpectrumList numeric = stitched_numeric_spectrum(s, lambda, p.pitch);
    CompareOptions opt;
    opt.model = {p.pitch, 0.1, 1e-9};
    opt.check_multiplicity = true;
    opt.completeness_margin = 0.0;
    opt.limit = lambda / 2.0;
    const CompareReport r = compare_spectra(numeric, string_analytic_spectrum(s, lambda), opt);
    EXPECT_TRUE(r.passed()) << to_json(r).dump();
  }
}

TEST(StitchedNumeric, DepthNestingAtAlignedPitch) {
  const StringSpec s{{0.5, 0.25, 0.125}, {2, 1, 2}};
  const double h = common_pitch(s, 8).pitch;
  const double lambda = 3000.0;
  SpectrumList previous;
  for (int n = 1; n <= 3; ++n) {
    const SpectrumList now = stitched_numeric_spectrum(s.truncated(n), lambda, h);
    if (n > 1) {
      const NestingReport r = verify_nesting(previous, now, 1e-9);
      EXPECT_TRUE(r.unmatched.empty()) << "depth " << n;
      EXPECT_LE(r.max_deviation, 1e-9);
    }
    previous = now;
  }
}

TEST(Zeta, UnitIntervalApproachesOneSixth) {
  const double lambda = std::pow(std::numbers::pi * 1e4, 2);
  const double z = zeta_partial(StringSpec{{1.0}, {1}}, 1.0, lambda);
  EXPECT_NEAR(z, 1.0 / 6.0, 1e-3);
  EXPECT_LT(z, 1.0 / 6.0);
  EXPECT_EQ(zeta_partial(StringSpec{{1.0}, {1}}, 1.0, 5.0), 0.0);
}

TEST(Zeta, MonotoneInCutoff) {
  double previous = 0.0;
  for (double cut = 10.0; cut < 1e5; cut *= 3.0) {
    const double z = zeta_partial(cantor(3), 1.0, cut);
    EXPECT_GE(z, previous);
    previous = z;
  }
}

TEST(Zeta, HomogeneityUnderScaling) {
  const StringSpec base{{0.75, 0.5, 0.25}, {2, 1, 3}};
  const double lambda = 2000.0 * kPi2;
  for (double c : {0.5, 0.25, 1.0 / 3.0}) {
    StringSpec scaled = base;
    for (double& l : scaled.lengths) l *= c;
    const SpectrumList a = string_analytic_spectrum(base, lambda);
    const SpectrumList b = string_analytic_spectrum(scaled, lambda / (c * c));
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a.entries[i].multiplicity, b.entries[i].multiplicity);
      EXPECT_NEAR(b.entries[i].value, a.entries[i].value / (c * c), 1e-14 * b.entries[i].value);
    }
    for (double s : {1.0, 1.5, 2.0}) {
      const double za = zeta_partial(base, s, lambda);
      const double zb = zeta_partial(scaled, s, lambda / (c * c));
      EXPECT_NEAR(zb, std::pow(c, 2.0 * s) * za, 1e-12 * zb);
    }
  }
}

TEST(Zeta, AbscissaAndDivergence) {
  EXPECT_NEAR(zeta_abscissa(StringSpec{{1.0}, {1}}), 0.5, 1e-12);
  EXPECT_NEAR(zeta_abscissa(cantor(12)), 0.5, 1e-12);  // max(1/2, D/2) with D < 1
  try {
    zeta_partial(StringSpec{{1.0}, {1}}, 0.4, 1e4, true);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::divergent_range);
  }
  EXPECT_NO_THROW(zeta_partial(StringSpec{{1.0}, {1}}, 0.4, 1e4, false));
  const SpectrumList weyl = string_analytic_spectrum({{1.0}, {1}}, 1e6);
  EXPECT_NEAR(zeta_abscissa(weyl), 0.5, 0.02);
}

}  // namespace
