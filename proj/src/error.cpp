#include "rcd/error.hpp"

namespace rcd {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_size: return "invalid-size";
    case ErrorKind::invalid_tau: return "invalid-tau";
    case ErrorKind::infeasible_cap: return "infeasible-cap";
    case ErrorKind::uncovered_node: return "uncovered-node";
    case ErrorKind::dimension_mismatch: return "dimension-mismatch";
    case ErrorKind::index_out_of_range: return "index-out-of-range";
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::singular_scaling: return "singular-scaling";
    case ErrorKind::infeasible_start: return "infeasible-start";
    case ErrorKind::disconnected_support: return "disconnected-support";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::not_in_subspace: return "not-in-subspace";
    case ErrorKind::nonpositive_sigma: return "nonpositive-sigma";
    case ErrorKind::unbounded_radius: return "unbounded-radius";
    case ErrorKind::not_reached: return "not-reached";
    case ErrorKind::no_bracket: return "no-bracket";
    case ErrorKind::iteration_cap: return "iteration-cap";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::enumeration_too_large: return "enumeration-too-large";
    case ErrorKind::io: return "io";
    case ErrorKind::parse: return "parse";
  }
  return "unknown";
}

}  // namespace rcd
