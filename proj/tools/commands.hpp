#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "plim/eigensolve.hpp"
#include "plim/error.hpp"
#include "plim/metric_graph.hpp"

namespace plim::cli {

enum ExitCode : int {
  kOk = 0,
  kChecksFailed = 1,
  kSpecError = 2,
  kSolverFailure = 3,
  kIncommensurable = 4,
};

struct RunConfig {
  std::string command;
  std::filesystem::path spec;
  std::filesystem::path out;
  std::optional<double> lambda_max;
  std::optional<int> refine;
  std::optional<double> pitch;
  std::optional<Boundary> boundary;
  std::uint64_t seed = kDefaultSeed;
  std::optional<double> tol;  // relative tolerance floor for every comparison
  int threads = 1;
};

int exit_code_for(ErrorCode code);

// Each command writes its files under cfg.out and returns an ExitCode;
// library errors are reported on `log` and mapped by exit_code_for.
int run(const RunConfig& cfg, std::ostream& log);

int run_laakso(const RunConfig& cfg, std::ostream& log);
int run_choux(const RunConfig& cfg, std::ostream& log);
int run_string(const RunConfig& cfg, std::ostream& log);
// Re-reads the outputs of a previous run in `dir` and recomputes its checks.
int run_verify(const std::filesystem::path& dir, std::optional<double> tol, std::ostream& log);

}  // namespace plim::cli
