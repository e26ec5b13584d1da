#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "config.hpp"
#include "rcd/certificates.hpp"
#include "rcd/feasibility.hpp"
#include "rcd/graph.hpp"
#include "rcd/objective.hpp"
#include "rcd/probdesign.hpp"
#include "rcd/solver.hpp"

namespace rcdnet {

/// Complete graphs with more paths than this are sampled without enumeration.
inline constexpr double kImplicitPathThreshold = 2e5;

rcd::Network build_network(const TopologyConfig& config);
rcd::SeparableObjective build_objective(const ObjectiveConfig& config, int n_nodes);

/// x* and f* from the multiplier oracle (scalar blocks) or in closed form
/// (quadratic family, any block size).
struct Optimum {
  rcd::BlockMatrix x;
  double f;
};
Optimum solve_optimum(const ObjectiveConfig& config, const rcd::SeparableObjective& obj);

struct DistributionChoice {
  rcd::PathDistribution dist;
  std::optional<rcd::GTau> gtau;  // empty when it has no closed form
  std::optional<double> design_value;
};

/// Enumerates paths (or uses the complete-graph law) and builds the requested
/// distribution. Designs need enumerated paths.
DistributionChoice build_distribution(const rcd::Network& g, const TopologyConfig& topology,
                                      const rcd::SeparableObjective& obj, int tau, DistKind kind,
                                      double alpha, const DesignConfig& design);

std::shared_ptr<const rcd::PathSet> enumerate_for(const rcd::Network& g,
                                                  const TopologyConfig& topology, int tau);

/// Seed s of a batch runs with base_seed + s. Runs go through the OpenMP pool.
std::vector<std::uint64_t> seed_list(std::uint64_t base_seed, int count);

std::vector<rcd::SolveReport> run_seeds(const rcd::SeparableObjective& obj, const rcd::Network& g,
                                        const rcd::PathDistribution& dist,
                                        const rcd::BlockMatrix& x0, const rcd::RunOptions& base,
                                        const std::vector<std::uint64_t>& seeds);

/// Mean / min / max gap over runs that share one trace grid.
struct GapSummary {
  std::vector<long long> k;
  std::vector<double> mean, min, max;
};
GapSummary summarize(const std::vector<rcd::SolveReport>& runs, double f_star);

/// First recorded k with gap <= eps in one run.
double first_k_below(const rcd::SolveReport& run, double f_star, double eps);

/// Per-node certificate inputs at x0 (scalar blocks only; empty otherwise).
struct Certificates {
  std::optional<Eigen::VectorXd> radii;
  std::optional<double> lambda2;
  std::optional<double> sigma_g;
  std::optional<double> radius_sq;  // box bound on the squared dual-norm radius
  bool thm3_applies = false;
};
Certificates certificates_for(const rcd::SeparableObjective& obj, const rcd::Network& g,
                              const DistributionChoice& choice, DistKind kind, double f0,
                              const Optimum& opt);

/// Least-squares slope and coefficient of determination of y against x.
struct LinearFit {
  double slope;
  double intercept;
  double r_squared;
};
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Explicit distribution as index, probability, v0 .. v{tau-1}.
void write_distribution_csv(const rcd::PathDistribution& dist, const std::string& name,
                            const std::filesystem::path& path);
rcd::PathDistribution read_distribution_csv(const std::filesystem::path& path);

}  // namespace rcdnet
