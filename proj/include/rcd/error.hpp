#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rcd {

enum class ErrorKind {
  invalid_size,
  invalid_tau,
  infeasible_cap,
  uncovered_node,
  dimension_mismatch,
  index_out_of_range,
  invalid_argument,
  singular_scaling,
  infeasible_start,
  disconnected_support,
  unsupported,
  not_in_subspace,
  nonpositive_sigma,
  unbounded_radius,
  not_reached,
  no_bracket,
  iteration_cap,
  divergence,
  enumeration_too_large,
  io,
  parse,
};

std::string_view to_string(ErrorKind kind);

/// Library error. `kind()` lets callers (the CLI in particular) map failures
/// to exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace rcd
