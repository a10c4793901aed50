#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "plim/compare.hpp"
#include "plim/fractal_string.hpp"
#include "plim/laakso.hpp"
#include "plim/levels.hpp"
#include "plim/pate_a_choux.hpp"
#include "plim/spectrum.hpp"

namespace plim::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;
constexpr double kLaaksoLambda = 200.0;
constexpr double kAnalyticHeadroom = 1.25;
// analytic entries up to (1 - margin) * lambda_max must be attained
constexpr double kCompletenessMargin = 0.25;
constexpr double kRichardsonConstant = 10.0;
constexpr double kRawConstant = 0.1;
constexpr double kNestingTol = 1e-9;
constexpr double kFdFloor = 1e-9;
constexpr int kStringRefine = 16;
constexpr double kZetaTerms = 1e4;

struct Tolerances {
  double nesting = kNestingTol;
  double floor = kFdFloor;
};

Tolerances tolerances(std::optional<double> tol) {
  if (!tol) return {};
  if (!(*tol > 0.0)) throw Error(ErrorCode::parse_error, "--tol must be positive");
  return {*tol, *tol};
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::parse_error, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::parse_error, "cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

SpectrumList read_spectrum(const fs::path& path, SpectrumOrigin origin, double truncation) {
  try {
    return spectrum_from_csv(read_text(path), std::move(origin), truncation);
  } catch (const Error& e) {
    throw Error(ErrorCode::parse_error, path.filename().string() + ": " + e.what());
  }
}

SolveOptions solve_options(const RunConfig& cfg) {
  SolveOptions s;
  s.lanczos.seed = cfg.seed;
  return s;
}

fs::path prepare_out(const RunConfig& cfg) {
  if (cfg.out.empty()) throw Error(ErrorCode::parse_error, "--out is required");
  fs::create_directories(cfg.out);
  return cfg.out;
}

std::string level_file(int i) { return "level" + std::to_string(i) + ".csv"; }

json nesting_json(const std::vector<SpectrumList>& levels, double tol) {
  json pairs = json::array();
  bool passed = true;
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
    const NestingReport r = verify_nesting(levels[i], levels[i + 1], tol);
    passed = passed && r.passed() && r.max_deviation <= tol;
    json j = to_json(r);
    j["lower"] = i;
    j["upper"] = i + 1;
    pairs.push_back(std::move(j));
  }
  json sizes = json::array();
  for (const auto& l : levels) sizes.push_back(l.total_multiplicity());
  return {{"tolerance", tol}, {"eigenvalue_counts", sizes}, {"pairs", pairs}, {"passed", passed}};
}

// Per-tag multiplicities recorded in a clustered entry's source field.
std::map<std::string, int> tag_counts(const SpectrumEntry& e) {
  std::map<std::string, int> out;
  std::istringstream in(e.source);
  std::string item;
  while (std::getline(in, item, ';')) {
    const auto eq = item.rfind('=');
    if (eq == std::string::npos) continue;
    out[item.substr(0, eq)] += std::stoi(item.substr(eq + 1));
  }
  if (out.empty() && !e.tag.empty()) out[e.tag] = e.multiplicity;
  return out;
}

SpectrumList with_origin(const SpectrumList& s, int level) {
  SpectrumList out;
  out.origin = s.origin;
  out.truncation = s.truncation;
  const std::string tag = origin_tag(level);
  for (const auto& e : s.entries) {
    const auto counts = tag_counts(e);
    const auto it = counts.find(tag);
    if (it != counts.end() && it->second > 0) out.entries.push_back({e.value, it->second, tag, {}});
  }
  return out;
}

// ---- laakso ---------------------------------------------------------------

json laakso_compare(const SpectrumList& coarse, const SpectrumList& fine, const SpectrumList& analytic,
                    double lambda, double pitch, const Tolerances& tol) {
  CompareOptions rich;
  rich.model = {pitch, kRichardsonConstant, tol.floor};
  rich.completeness_margin = kCompletenessMargin;
  rich.limit = lambda;
  const CompareReport extrapolated = compare_spectra(richardson(coarse, fine), analytic, rich);
  CompareOptions raw = rich;
  raw.model.constant = kRawConstant;
  const CompareReport direct = compare_spectra(coarse, analytic, raw);
  const ConvergenceReport order = convergence(coarse, fine, analytic);
  return {{"lambda_max", lambda},
          {"pitch", pitch},
          {"completeness_limit", lambda * (1.0 - kCompletenessMargin)},
          {"richardson", to_json(extrapolated)},
          {"raw", to_json(direct)},
          {"convergence", to_json(order)},
          {"passed", extrapolated.passed() && direct.passed()}};
}

// ---- string ---------------------------------------------------------------

json string_checks(const SpectrumList& numeric, const SpectrumList& analytic, const StringSpec& spec, double lambda,
                   double pitch, const Tolerances& tol) {
  CompareOptions opt;
  opt.model = {pitch, kRawConstant, tol.floor};
  opt.check_multiplicity = true;
  opt.completeness_margin = 0.0;
  opt.limit = lambda / 2.0;
  const CompareReport values = compare_spectra(numeric, analytic, opt);
  bool passed = values.passed();

  json levels = json::array();
  for (int i = 0; i <= spec.depth(); ++i) {
    const double length = spec.lengths[static_cast<std::size_t>(std::max(i, 1) - 1)];
    const int mult = i == 0 ? 1 : i == 1 ? spec.mults[0] - 1 : spec.mults[static_cast<std::size_t>(i - 1)];
    SpectrumList expected;
    expected.truncation = lambda;
    if (mult > 0) expected = string_analytic_spectrum(StringSpec{{length}, {mult}}, lambda);
    const CompareReport r = compare_spectra(with_origin(numeric, i), expected, opt);
    passed = passed && r.passed();
    levels.push_back({{"level", i},
                      {"tag", origin_tag(i)},
                      {"interval_length", length},
                      {"expected_multiplicity", mult},
                      {"report", to_json(r)}});
  }
  return {{"compared_up_to", lambda / 2.0}, {"values", to_json(values)}, {"levels", levels}, {"passed", passed}};
}

std::vector<double> zeta_exponents() { return {1.0, 1.5, 2.0}; }

std::string zeta_csv(const StringSpec& used, double lambda) {
  const double big = std::pow(std::numbers::pi * kZetaTerms / used.lengths.front(), 2.0);
  std::string out = "s,partial_sum,lambda_max\n";
  for (double s : zeta_exponents())
    for (double cut : {lambda, big})
      out += format_double(s) + "," + format_double(zeta_partial(used, s, cut, true)) + "," + format_double(cut) + "\n";
  return out;
}

// ---- choux ----------------------------------------------------------------

std::pair<int, int> gasket_range(const ChouxSpec& spec) { return {1, std::max(spec.gasket_level, 2)}; }

std::string gasket_file(int m) { return "gasket_dirichlet_m" + std::to_string(m) + ".csv"; }

json decimation_json(const std::vector<SpectrumList>& gaskets, int first) {
  json pairs = json::array();
  bool passed = true;
  for (std::size_t k = 0; k + 1 < gaskets.size(); ++k) {
    const DecimationReport r = decimation_check(gaskets[k], gaskets[k + 1]);
    passed = passed && r.passed();
    json rows = json::array();
    for (const auto& row : r.rows)
      rows.push_back({{"value", row.value},
                      {"image", row.image},
                      {"multiplicity", row.multiplicity},
                      {"matched", row.matched},
                      {"exceptional", row.exceptional}});
    pairs.push_back({{"m", first + static_cast<int>(k)},
                     {"explained", r.explained},
                     {"total", r.total},
                     {"explained_fraction", r.explained_fraction()},
                     {"rows", rows}});
  }
  json branch = json::array();
  for (std::size_t k = 0; k < gaskets.size(); ++k) {
    const int m = first + static_cast<int>(k);
    branch.push_back({{"m", m}, {"renormalized", std::pow(5.0, m) * gaskets[k].entries.front().value}});
  }
  return {{"normalization", "standard"},
          {"exceptional", kDecimationExceptional},
          {"pairs", pairs},
          {"lowest_branch", branch},
          {"passed", passed}};
}

json dimension_json(const ChouxSpec& spec) {
  const double dh = hausdorff_dimension(spec);
  const double box = box_counting_dimension(4, 6);
  return {{"hausdorff", dh},
          {"one_plus_log3_over_log2", 1.0 + std::log(3.0) / std::log(2.0)},
          {"box_counting_estimate", box},
          {"box_counting_levels", {4, 6}},
          {"box_counting_relative_gap", std::abs(box - dh) / dh}};
}

json manifest(const std::string& command, const json& spec, double lambda, double pitch, const RunConfig& cfg,
              const std::vector<std::string>& files) {
  json m{{"command", command}, {"spec", spec}, {"lambda_max", lambda}, {"pitch", pitch}, {"seed", cfg.seed},
         {"files", files}};
  m["tol"] = cfg.tol ? json(*cfg.tol) : json(nullptr);
  return m;
}

const char* verdict(bool ok) { return ok ? "pass" : "FAIL"; }

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::parse_error:
    case ErrorCode::invalid_sequence:
    case ErrorCode::resolution_too_coarse:
    case ErrorCode::infeasible_nesting:
    case ErrorCode::invalid_graph:
    case ErrorCode::non_dividing_pitch:
    case ErrorCode::disconnected_graph:
      return kSpecError;
    case ErrorCode::no_common_pitch:
      return kIncommensurable;
    default:
      return kSolverFailure;
  }
}

int run_laakso(const RunConfig& cfg, std::ostream& log) {
  LaaksoSpec spec = LaaksoSpec::from_json(read_json(cfg.spec));
  if (cfg.refine) spec.refine = *cfg.refine;
  if (cfg.boundary) spec.boundary = *cfg.boundary;
  spec.validate();
  const Tolerances tol = tolerances(cfg.tol);
  const double lambda = cfg.lambda_max.value_or(kLaaksoLambda);
  const double pitch = cfg.pitch.value_or(laakso_pitch(spec));

  const Tower tower = build_laakso(spec);
  LevelOptions opt;
  opt.selection = Selection::up_to(lambda);
  opt.solve = solve_options(cfg);
  const std::vector<SpectrumList> levels = solve_levels(tower, pitch, opt, cfg.threads);
  const SpectrumList fine = solve_level(tower, tower.depth(), pitch / 2.0, opt).spectrum;
  const SpectrumList analytic = laakso_analytic_spectrum(spec, lambda * kAnalyticHeadroom);

  const fs::path out = prepare_out(cfg);
  std::vector<std::string> files{"analytic.csv", "numeric.csv", "numeric_half.csv", "compare.json", "nesting.json"};
  write_text(out / "analytic.csv", to_csv(analytic));
  write_text(out / "numeric.csv", to_csv(levels.back()));
  write_text(out / "numeric_half.csv", to_csv(fine));
  for (std::size_t i = 0; i < levels.size(); ++i) {
    files.push_back(level_file(static_cast<int>(i)));
    write_text(out / files.back(), to_csv(levels[i]));
  }
  const json compare = laakso_compare(levels.back(), fine, analytic, lambda, pitch, tol);
  const json nesting = nesting_json(levels, tol.nesting);
  write_json(out / "compare.json", compare);
  write_json(out / "nesting.json", nesting);
  files.push_back("manifest.json");
  json m = manifest("laakso", spec.to_json(), lambda, pitch, cfg, files);
  m["analytic_truncation"] = lambda * kAnalyticHeadroom;
  write_json(out / "manifest.json", m);

  log << "laakso depth " << spec.depth() << ", pitch " << format_double(pitch) << ": "
      << levels.back().total_multiplicity() << " eigenvalues <= " << format_double(lambda) << "; compare "
      << verdict(compare["passed"]) << ", nesting " << verdict(nesting["passed"]) << "\n";
  return kOk;
}

int run_choux(const RunConfig& cfg, std::ostream& log) {
  ChouxSpec spec = ChouxSpec::from_json(read_json(cfg.spec));
  if (cfg.boundary) spec.boundary = *cfg.boundary;
  spec.validate();
  if (cfg.pitch && *cfg.pitch != 1.0)
    throw Error(ErrorCode::non_dividing_pitch, "gasket graphs use unit edges; --pitch must be 1");
  const Tolerances tol = tolerances(cfg.tol);

  const Tower tower = build_choux(spec);
  LevelOptions opt;
  opt.mass = MassModel::degree;
  opt.solve = solve_options(cfg);
  if (cfg.lambda_max) opt.selection = Selection::up_to(*cfg.lambda_max);
  const std::vector<SpectrumList> levels = solve_levels(tower, 1.0, opt, cfg.threads);

  const auto [first, last] = gasket_range(spec);
  std::vector<SpectrumList> gaskets;
  for (int m = first; m <= last; ++m)
    gaskets.push_back(to_standard_normalization(gasket_graph_spectrum(build_gasket(m), Boundary::dirichlet)));

  const fs::path out = prepare_out(cfg);
  std::vector<std::string> files;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    files.push_back("numeric_depth" + std::to_string(i) + ".csv");
    write_text(out / files.back(), to_csv(levels[i]));
  }
  for (int m = first; m <= last; ++m) {
    files.push_back(gasket_file(m));
    write_text(out / files.back(), to_csv(gaskets[static_cast<std::size_t>(m - first)]));
  }
  const json nesting = nesting_json(levels, tol.nesting);
  const json decimation = decimation_json(gaskets, first);
  write_json(out / "nesting.json", nesting);
  write_json(out / "decimation.json", decimation);
  write_json(out / "dimension.json", dimension_json(spec));
  files.insert(files.end(), {"nesting.json", "decimation.json", "dimension.json", "manifest.json"});
  json m = manifest("choux", spec.to_json(), cfg.lambda_max ? *cfg.lambda_max : levels.back().truncation, 1.0, cfg,
                    files);
  m["gasket_levels"] = {first, last};
  write_json(out / "manifest.json", m);

  log << "choux fiber depth " << spec.fiber_depth << ", gasket level " << spec.gasket_level << ": "
      << levels.back().total_multiplicity() << " eigenvalues; nesting " << verdict(nesting["passed"])
      << ", decimation " << verdict(decimation["passed"]) << "\n";
  return kOk;
}

int run_string(const RunConfig& cfg, std::ostream& log) {
  const json doc = read_json(cfg.spec);
  const StringSpec spec = StringSpec::from_json(doc);
  const Tolerances tol = tolerances(cfg.tol);
  const int refine = cfg.refine.value_or(doc.value("refine", kStringRefine));
  const bool approximate = doc.contains("denominator_bound");
  const auto bound = doc.value("denominator_bound", std::int64_t{1000000});
  const PitchChoice choice = common_pitch(spec, refine, bound, approximate);
  StringSpec used = spec;
  used.lengths = choice.used_lengths;
  const double lambda = cfg.lambda_max.value_or(doc.value("lambda_max", 64.0 * kPi2 / (used.lengths[0] * used.lengths[0])));
  const double pitch = cfg.pitch.value_or(choice.pitch);

  const Tower tower = build_stitched(used);
  LevelOptions opt;
  opt.selection = Selection::up_to(lambda);
  opt.solve = solve_options(cfg);
  const std::vector<SpectrumList> levels = solve_levels(tower, pitch, opt, cfg.threads);
  const SpectrumList analytic = string_analytic_spectrum(used, lambda);

  json iso = string_checks(levels.back(), analytic, used, lambda, pitch, tol);
  iso["nesting"] = nesting_json(levels, tol.nesting);
  iso["passed"] = iso["passed"].get<bool>() && iso["nesting"]["passed"].get<bool>();
  iso["perturbation"] = {{"approximate", approximate},
                         {"denominator", choice.denominator},
                         {"used_lengths", choice.used_lengths},
                         {"max_relative_length_perturbation", choice.max_relative_perturbation},
                         {"eigenvalue_sensitivity_bound", 2.0 * choice.max_relative_perturbation}};
  iso["lambda_max"] = lambda;
  iso["pitch"] = pitch;

  const fs::path out = prepare_out(cfg);
  std::vector<std::string> files{"analytic.csv", "numeric.csv", "isospectrality.json", "zeta.csv"};
  write_text(out / "analytic.csv", to_csv(analytic));
  write_text(out / "numeric.csv", to_csv(levels.back()));
  for (std::size_t i = 0; i < levels.size(); ++i) {
    files.push_back(level_file(static_cast<int>(i)));
    write_text(out / files.back(), to_csv(levels[i]));
  }
  write_json(out / "isospectrality.json", iso);
  write_text(out / "zeta.csv", zeta_csv(used, lambda));
  files.push_back("manifest.json");
  json m = manifest("string", spec.to_json(), lambda, pitch, cfg, files);
  m["used_lengths"] = choice.used_lengths;
  write_json(out / "manifest.json", m);

  log << "string depth " << spec.depth() << ", pitch " << format_double(pitch) << ": "
      << levels.back().total_multiplicity() << " eigenvalues <= " << format_double(lambda) << "; isospectrality "
      << verdict(iso["passed"]) << "\n";
  return kOk;
}

int run_verify(const fs::path& dir, std::optional<double> tol_override, std::ostream& log) {
  const json m = read_json(dir / "manifest.json");
  const Tolerances tol = tolerances(tol_override);
  bool ok = true;
  auto report = [&](const std::string& what, bool passed) {
    log << "[" << (passed ? "PASS" : "FAIL") << "] " << what << "\n";
    ok = ok && passed;
  };
  try {
    const std::string command = m.at("command");
    const double lambda = m.at("lambda_max");
    const double pitch = m.at("pitch");

    if (command == "laakso") {
      const LaaksoSpec spec = LaaksoSpec::from_json(m.at("spec"));
      const SpectrumList analytic =
          read_spectrum(dir / "analytic.csv", SpectrumOrigin::analytic("laakso"), m.at("analytic_truncation"));
      const SpectrumList coarse =
          read_spectrum(dir / "numeric.csv", SpectrumOrigin::numeric(spec.depth(), pitch), lambda);
      const SpectrumList fine =
          read_spectrum(dir / "numeric_half.csv", SpectrumOrigin::numeric(spec.depth(), pitch / 2.0), lambda);
      std::vector<SpectrumList> levels;
      for (int i = 0; i <= spec.depth(); ++i)
        levels.push_back(read_spectrum(dir / level_file(i), SpectrumOrigin::numeric(i, pitch), lambda));
      report("laakso numeric vs analytic set", laakso_compare(coarse, fine, analytic, lambda, pitch, tol)["passed"]);
      report("laakso level nesting", nesting_json(levels, tol.nesting)["passed"]);
      read_json(dir / "compare.json");
      read_json(dir / "nesting.json");
    } else if (command == "choux") {
      const ChouxSpec spec = ChouxSpec::from_json(m.at("spec"));
      std::vector<SpectrumList> levels;
      for (int i = 0; i <= spec.fiber_depth; ++i)
        levels.push_back(read_spectrum(dir / ("numeric_depth" + std::to_string(i) + ".csv"),
                                       SpectrumOrigin::numeric(i, 1.0), 0.0));
      const int first = m.at("gasket_levels").at(0);
      const int last = m.at("gasket_levels").at(1);
      std::vector<SpectrumList> gaskets;
      for (int g = first; g <= last; ++g)
        gaskets.push_back(read_spectrum(dir / gasket_file(g), SpectrumOrigin::numeric(g, 1.0), 0.0));
      report("choux fiber-depth nesting", nesting_json(levels, tol.nesting)["passed"]);
      report("gasket decimation", decimation_json(gaskets, first)["passed"]);
      const json dim = read_json(dir / "dimension.json");
      report("hausdorff constant", dim.at("hausdorff").get<double>() == hausdorff_dimension(spec));
      read_json(dir / "nesting.json");
      read_json(dir / "decimation.json");
    } else if (command == "string") {
      StringSpec used = StringSpec::from_json(m.at("spec"));
      used.lengths = m.at("used_lengths").get<std::vector<double>>();
      const SpectrumList analytic = read_spectrum(dir / "analytic.csv", SpectrumOrigin::analytic("string"), lambda);
      const SpectrumList numeric =
          read_spectrum(dir / "numeric.csv", SpectrumOrigin::numeric(used.depth(), pitch), lambda);
      std::vector<SpectrumList> levels;
      for (int i = 0; i <= used.depth(); ++i)
        levels.push_back(read_spectrum(dir / level_file(i), SpectrumOrigin::numeric(i, pitch), lambda));
      report("string isospectrality", string_checks(numeric, analytic, used, lambda, pitch, tol)["passed"]);
      report("string level nesting", nesting_json(levels, tol.nesting)["passed"]);

      std::istringstream zeta(read_text(dir / "zeta.csv"));
      std::string line;
      std::getline(zeta, line);
      if (line != "s,partial_sum,lambda_max") throw Error(ErrorCode::parse_error, "zeta.csv: bad header");
      bool zeta_ok = true;
      int rows = 0;
      while (std::getline(zeta, line)) {
        if (line.empty()) continue;
        double s = 0, sum = 0, cut = 0;
        char c1 = 0, c2 = 0;
        std::istringstream row(line);
        if (!(row >> s >> c1 >> sum >> c2 >> cut) || c1 != ',' || c2 != ',')
          throw Error(ErrorCode::parse_error, "zeta.csv: bad row '" + line + "'");
        const double expected = zeta_partial(used, s, cut);
        zeta_ok = zeta_ok && std::abs(sum - expected) <= std::max(tol.floor, 1e-12) * std::abs(expected);
        ++rows;
      }
      report("zeta partial sums", zeta_ok && rows == 6);
      read_json(dir / "isospectrality.json");
    } else {
      throw Error(ErrorCode::parse_error, "manifest names unknown command '" + command + "'");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("manifest.json: ") + e.what());
  }
  return ok ? kOk : kChecksFailed;
}

int run(const RunConfig& cfg, std::ostream& log) {
  try {
    if (cfg.command == "laakso") return run_laakso(cfg, log);
    if (cfg.command == "choux") return run_choux(cfg, log);
    if (cfg.command == "string") return run_string(cfg, log);
    if (cfg.command == "verify") return run_verify(cfg.out, cfg.tol, log);
    log << "error: unknown command '" << cfg.command << "'\n";
    return kSpecError;
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    log << "error: " << e.what() << "\n";
    return kSpecError;
  }
}

}  // namespace plim::cli
