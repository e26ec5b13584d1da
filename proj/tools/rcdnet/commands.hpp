#pragma once

#include <filesystem>
#include <ostream>

#include "config.hpp"

namespace rcdnet {

struct CommandContext {
  std::filesystem::path out_dir = ".";
  bool quiet = false;
  std::ostream* log = nullptr;  // progress lines; nullptr or quiet: silent
};

/// Per (tau, seed): solve_tau{t}_seed{s}.csv. Per tau: solve_tau{t}.csv with
/// k, k_over_N, gap_mean, gap_min, gap_max, bound_thm1, bound_thm3.
void cmd_solve(const Config& config, const CommandContext& ctx);

/// Per tau: design_tau{t}.csv (one row per distribution) and
/// dist_tau{t}_{name}.csv (index, probability, v0 .. v{tau-1}).
void cmd_design(const Config& config, const CommandContext& ctx);

/// compare.csv: projected gradient, center-free, RCD_2 uniform and RCD_2
/// inverse-Lipschitz mean gaps on the k / N grid.
void cmd_compare(const Config& config, const CommandContext& ctx);

/// Per tau: feasibility_tau{t}.csv with k, infeas_mean, infeas_bound,
/// subopt_mean, subopt_bound.
void cmd_feasibility(const Config& config, const CommandContext& ctx);

/// Per tau: sdp_rate_tau{t}.dat-s and sdp_lambda2_tau{t}.dat-s with layout maps.
void cmd_export_sdp(const Config& config, const CommandContext& ctx);

}  // namespace rcdnet
