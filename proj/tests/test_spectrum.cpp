#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "plim/compare.hpp"
#include "plim/eigensolve.hpp"
#include "plim/error.hpp"
#include "plim/fractal_string.hpp"
#include "plim/laakso.hpp"
#include "plim/levels.hpp"
#include "plim/spectrum.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace {

using namespace plim;
using plim::test::kPi2;
using plim::test::unit_interval;

SpectrumList numeric_interval(double h, double lambda) {
  const DiscreteOperator d = assemble(discretize(unit_interval(Boundary::dirichlet), h));
  const EigenPairs p = solve(d, Selection::up_to(lambda));
  SpectrumList s = cluster(std::vector<double>(p.values.data(), p.values.data() + p.values.size()));
  s.origin = SpectrumOrigin::numeric(0, h);
  s.truncation = lambda;
  return s;
}

SpectrumList list_of(std::vector<std::pair<double, int>> values, double truncation) {
  SpectrumList s;
  for (auto [v, m] : values) s.entries.push_back({v, m, {}, {}});
  s.truncation = truncation;
  return s;
}

TEST(Cluster, MergesNearDuplicates) {
  const std::vector<double> v{4.0, 4.0 + 1e-12, 9.0};
  const SpectrumList s = cluster(v);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_NEAR(s.entries[0].value, 4.0, 1e-12);
  EXPECT_EQ(s.entries[0].multiplicity, 2);
  EXPECT_EQ(s.entries[1].value, 9.0);
  EXPECT_EQ(s.entries[1].multiplicity, 1);
}

TEST(Cluster, ExactDuplicatesSumMultiplicity) {
  const std::vector<double> v{1.0, 4.0, 4.0, 4.0, 9.0};
  const SpectrumList s = cluster(v);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s.entries[1].multiplicity, 3);
  EXPECT_EQ(s.total_multiplicity(), 5);
  EXPECT_EQ(s.expanded(), v);
}

TEST(Cluster, EmptyInput) {
  const SpectrumList s = cluster(std::vector<double>{});
  EXPECT_TRUE(s.empty());
  EXPECT_EQ(s.total_multiplicity(), 0);
}

TEST(Cluster, TagCountsInSource) {
  const std::vector<double> v{1.0, 1.0, 1.0, 2.0};
  const std::vector<std::string> tags{"base", "new@1", "new@1", "new@2"};
  const SpectrumList s = cluster(v, tags);
  EXPECT_EQ(s.entries[0].tag, "base+new@1");
  EXPECT_EQ(s.entries[0].source, "base=1;new@1=2");
  EXPECT_EQ(s.entries[1].tag, "new@2");
  EXPECT_THROW(cluster(v, std::vector<std::string>{"x"}), Error);
}

TEST(CountingFunction, IntervalExamples) {
  const SpectrumList s = string_analytic_spectrum({{1.0}, {1}}, 200.0);
  EXPECT_EQ(counting_function(s, 50.0), 2);
  EXPECT_EQ(counting_function(s, 5.0), 0);
  EXPECT_EQ(counting_function(s, 200.0), s.total_multiplicity());
  try {
    counting_function(s, 201.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::beyond_truncation);
  }
}

TEST(CountingFunction, CantorStringMatchesDirectSummation) {
  StringSpec cantor;
  for (int i = 1; i <= 6; ++i) {
    cantor.lengths.push_back(std::pow(3.0, -i));
    cantor.mults.push_back(1 << (i - 1));
  }
  const double lambda_max = 400.0 * kPi2;
  const SpectrumList s = string_analytic_spectrum(cantor, lambda_max);
  auto oracle = [&](double lambda) {
    int n = 0;
    for (std::size_t i = 0; i < cantor.lengths.size(); ++i)
      n += cantor.mults[i] * static_cast<int>(std::floor(cantor.lengths[i] * std::sqrt(lambda) / plim::test::kPi));
    return n;
  };
  EXPECT_EQ(counting_function(s, 90.0 * kPi2), oracle(90.0 * kPi2));
  EXPECT_EQ(counting_function(s, 90.0 * kPi2), 5);
  int previous = 0;
  for (double x = 1.0; x < 400.0; x += 3.7) {
    const int n = counting_function(s, x * kPi2);
    EXPECT_EQ(n, oracle(x * kPi2)) << "lambda = " << x << " pi^2";
    EXPECT_GE(n, previous);
    previous = n;
  }
}

TEST(SpectrumIo, CsvRoundTripIsExact) {
  SpectrumList s = list_of({{0.1, 1}, {std::sqrt(2.0), 2}, {1e5 / 3.0, 3}}, 1e5);
  s.entries[1].tag = "base+new@1";
  s.entries[1].source = "base=1;new@1=1";
  const std::string csv = to_csv(s);
  EXPECT_EQ(csv.rfind("eigenvalue,multiplicity,tag,source\n", 0), 0u);
  const SpectrumList back = spectrum_from_csv(csv);
  ASSERT_EQ(back.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(back.entries[i].value, s.entries[i].value);
    EXPECT_EQ(back.entries[i].multiplicity, s.entries[i].multiplicity);
    EXPECT_EQ(back.entries[i].tag, s.entries[i].tag);
    EXPECT_EQ(back.entries[i].source, s.entries[i].source);
  }
  EXPECT_EQ(to_csv(back), csv);
}

TEST(SpectrumIo, JsonRoundTripKeepsOrigin) {
  SpectrumList s = list_of({{1.0, 1}, {2.0, 2}}, 3.0);
  s.origin = SpectrumOrigin::numeric(2, 0.125);
  const SpectrumList back = spectrum_from_json(to_json(s));
  EXPECT_EQ(back.origin.kind, SpectrumOrigin::Kind::numeric);
  EXPECT_EQ(back.origin.level, 2);
  EXPECT_EQ(back.origin.pitch, 0.125);
  EXPECT_EQ(back.truncation, 3.0);
  EXPECT_EQ(back.expanded(), s.expanded());
}

TEST(SpectrumIo, MalformedCsvIsRejected) {
  for (const char* bad : {"eigenvalue,multiplicity,tag,source\nabc,1,,\n",
                          "eigenvalue,multiplicity,tag,source\n1.0,0,,\n",
                          "eigenvalue,multiplicity,tag,source\n2.0,1,,\n1.0,1,,\n", "wrong header\n"}) {
    EXPECT_THROW(spectrum_from_csv(bad), Error) << bad;
  }
}

TEST(FormatDouble, SeventeenSignificantDigits) {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 123456789.123456789, std::numbers::pi})
    EXPECT_EQ(std::stod(format_double(x)), x);
}

TEST(VerifyNesting, LaaksoLevelOneInsideLevelTwo) {
  const LaaksoSpec spec{{2, 2}, 8, Boundary::neumann};
  LevelOptions opt;
  opt.selection = Selection::up_to(500.0);
  const auto levels = solve_levels(build_laakso(spec), laakso_pitch(spec), opt);
  const NestingReport r = verify_nesting(levels[1], levels[2], 1e-9);
  EXPECT_TRUE(r.unmatched.empty());
  EXPECT_LE(r.max_deviation, 1e-9);
  EXPECT_GT(r.compared, 0);
  EXPECT_FALSE(r.surplus.empty());
}

TEST(VerifyNesting, IdenticalListsHaveNoSurplus) {
  const SpectrumList s = list_of({{1.0, 1}, {4.0, 2}}, 5.0);
  const NestingReport r = verify_nesting(s, s);
  EXPECT_TRUE(r.passed());
  EXPECT_TRUE(r.surplus.empty());
  EXPECT_EQ(r.max_deviation, 0.0);
}

TEST(VerifyNesting, ReportsMissingEigenvalue) {
  const SpectrumList lower = list_of({{1.0, 1}, {4.0, 2}}, 5.0);
  const SpectrumList upper = list_of({{1.0, 1}, {4.0, 1}}, 5.0);
  const NestingReport r = verify_nesting(lower, upper);
  ASSERT_EQ(r.unmatched.size(), 1u);
  EXPECT_EQ(r.unmatched[0].value, 4.0);
  EXPECT_EQ(r.unmatched[0].missing, 1);
  EXPECT_FALSE(r.passed());
}

TEST(VerifyNesting, RejectsMisalignedPitches) {
  SpectrumList a = list_of({{1.0, 1}}, 2.0);
  SpectrumList b = a;
  a.origin = SpectrumOrigin::numeric(0, 0.1);
  b.origin = SpectrumOrigin::numeric(1, 0.05);
  try {
    verify_nesting(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::misaligned_meshes);
  }
}

TEST(CompareSpectra, IntervalWithinFdModel) {
  const double h = 1.0 / 64;
  const SpectrumList numeric = numeric_interval(h, 64.5 * kPi2);
  const SpectrumList analytic = string_analytic_spectrum({{1.0}, {1}}, 64.5 * kPi2);
  CompareOptions opt;
  opt.model = {h, 0.1, 1e-9};
  const CompareReport r = compare_spectra(numeric, analytic, opt);
  EXPECT_TRUE(r.passed());
  ASSERT_GE(r.rows.size(), 8u);
  for (std::size_t k = 1; k <= 8; ++k) {
    const auto& row = r.rows[k - 1];
    const double bound = std::pow(static_cast<double>(k) * plim::test::kPi * h, 2) / 10.0;
    EXPECT_LE(row.deviation, bound) << "k=" << k;
  }
}

TEST(CompareSpectra, AnalyticAgainstItselfIsExact) {
  const SpectrumList a = laakso_analytic_spectrum({{2, 2}, 8, Boundary::neumann}, 300.0);
  CompareOptions opt;
  opt.model = {0.01, 0.1, 1e-9};
  opt.check_multiplicity = true;
  const CompareReport r = compare_spectra(a, a, opt);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.max_deviation, 0.0);
  EXPECT_TRUE(r.missed_analytic.empty());
}

TEST(CompareSpectra, FlagsOutliersAndMissedEntries) {
  const SpectrumList analytic = list_of({{10.0, 1}, {40.0, 1}}, 50.0);
  CompareOptions opt;
  opt.model = {0.01, 0.1, 1e-9};
  const CompareReport off = compare_spectra(list_of({{10.0, 1}, {41.0, 1}}, 50.0), analytic, opt);
  EXPECT_FALSE(off.passed());
  const CompareReport missed = compare_spectra(list_of({{10.0, 1}}, 50.0), analytic, opt);
  ASSERT_EQ(missed.missed_analytic.size(), 1u);
  EXPECT_EQ(missed.missed_analytic[0], 40.0);
  EXPECT_FALSE(missed.passed());
  opt.check_multiplicity = true;
  EXPECT_FALSE(compare_spectra(list_of({{10.0, 2}, {40.0, 1}}, 50.0), analytic, opt).passed());
}

TEST(Convergence, PitchHalvingGivesSecondOrder) {
  const double lambda = 65.0 * kPi2;
  const SpectrumList coarse = numeric_interval(1.0 / 64, lambda);
  const SpectrumList fine = numeric_interval(1.0 / 128, lambda);
  const SpectrumList exact = string_analytic_spectrum({{1.0}, {1}}, lambda);
  const ConvergenceReport r = convergence(coarse, fine, exact);
  ASSERT_GE(r.rows.size(), 8u);
  EXPECT_GE(r.min_ratio, 3.6);
  EXPECT_LE(r.max_ratio, 4.4);
  EXPECT_NEAR(r.order(), 2.0, 0.1);
}

TEST(Richardson, RemovesLeadingError) {
  const double lambda = 20.0 * kPi2;
  const SpectrumList coarse = numeric_interval(1.0 / 32, lambda);
  const SpectrumList fine = numeric_interval(1.0 / 64, lambda);
  const SpectrumList r = richardson(coarse, fine);
  ASSERT_EQ(r.size(), 4u);
  for (int k = 1; k <= 4; ++k) {
    const double exact = k * k * kPi2;
    const double raw = std::abs(fine.entries[static_cast<std::size_t>(k - 1)].value - exact);
    EXPECT_LT(std::abs(r.entries[static_cast<std::size_t>(k - 1)].value - exact), raw / 50.0);
  }
}

TEST(FdErrorModel, TolerancesScaleWithLambdaAndPitch) {
  const FdErrorModel m{0.01, 0.1, 1e-9};
  EXPECT_DOUBLE_EQ(m.relative_tolerance(100.0), 0.1 * 100.0 * 1e-4);
  EXPECT_DOUBLE_EQ(m.relative_tolerance(0.0), 1e-9);
}

TEST(Reports, SerializeToJson) {
  const SpectrumList s = list_of({{1.0, 1}}, 2.0);
  const nlohmann::json j = to_json(verify_nesting(s, s));
  EXPECT_TRUE(j.contains("unmatched"));
  EXPECT_TRUE(j.contains("max_deviation"));
}

}  // namespace
