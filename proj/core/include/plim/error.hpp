#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace plim {

enum class ErrorCode {
  invalid_graph,
  non_dividing_pitch,
  disconnected_graph,
  dimension_mismatch,
  incompatible_mesh,
  too_large_for_dense,
  not_positive_mass,
  no_convergence,
  misaligned_meshes,
  beyond_truncation,
  invalid_sequence,
  resolution_too_coarse,
  infeasible_nesting,
  no_common_pitch,
  divergent_range,
  unclassifiable_vector,
  parse_error,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace plim
