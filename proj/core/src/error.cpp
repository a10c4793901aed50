#include "plim/error.hpp"

namespace plim {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_graph: return "InvalidGraph";
    case ErrorCode::non_dividing_pitch: return "NonDividingPitch";
    case ErrorCode::disconnected_graph: return "DisconnectedGraph";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::incompatible_mesh: return "IncompatibleMesh";
    case ErrorCode::too_large_for_dense: return "TooLargeForDense";
    case ErrorCode::not_positive_mass: return "NotPositiveMass";
    case ErrorCode::no_convergence: return "NoConvergence";
    case ErrorCode::misaligned_meshes: return "MisalignedMeshes";
    case ErrorCode::beyond_truncation: return "BeyondTruncation";
    case ErrorCode::invalid_sequence: return "InvalidSequence";
    case ErrorCode::resolution_too_coarse: return "ResolutionTooCoarse";
    case ErrorCode::infeasible_nesting: return "InfeasibleNesting";
    case ErrorCode::no_common_pitch: return "NoCommonPitch";
    case ErrorCode::divergent_range: return "DivergentRange";
    case ErrorCode::unclassifiable_vector: return "UnclassifiableVector";
    case ErrorCode::parse_error: return "ParseError";
  }
  return "Unknown";
}

}  // namespace plim
