#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rcd/feasibility.hpp"
#include "rcd/graph.hpp"
#include "rcd/objective.hpp"
#include "rcd/probdesign.hpp"

namespace rcdnet {

/// Invalid configuration; `line` is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, std::string field, const std::string& message);

  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

struct TopologyConfig {
  rcd::TopologySpec spec;
  std::optional<std::size_t> path_cap;
  std::uint64_t path_seed = 0;
};

struct ObjectiveConfig {
  enum class Family { quad_logistic, quadratic };
  Family family = Family::quad_logistic;
  std::uint64_t seed = 0;
  double min_curvature = 0.0;
  int block_dim = 1;
  std::optional<rcd::QuadLogisticParams> params;  // explicit quad_logistic coefficients
  Eigen::VectorXd curvature;                      // quadratic; empty: all ones
  std::optional<rcd::BlockMatrix> centers;        // quadratic; empty: seeded draw
};

enum class DistKind {
  uniform,
  inverse_lipschitz,
  lipschitz_power,
  designed_lambda2,
  designed_sigma
};
std::string to_string(DistKind kind);

struct RunConfig {
  std::vector<int> taus{2};
  DistKind distribution = DistKind::inverse_lipschitz;
  double alpha = 1.0;
  int seeds = 20;
  long long iterations = 0;    // 0: 200 N
  long long trace_stride = 0;  // 0: N / tau
  std::uint64_t base_seed = 0;
};

struct DesignConfig {
  int iterations = 400;
  rcd::StepRule step;
  bool export_sdp = false;
  std::optional<Eigen::VectorXd> radii;  // empty: level-set radii at x0 = 0
};

struct RandomBalls {
  int count = 5;
  int dim = 2;
  std::uint64_t seed = 0;
  double distance = 5.0;  // |v0 - shared point|
};

struct FeasibilityConfig {
  rcd::FeasibilityProblem problem;
  bool loose_lipschitz = false;
  double dykstra_tol = 1e-12;
};

struct Config {
  TopologyConfig topology;
  ObjectiveConfig objective;
  RunConfig run;
  DesignConfig design;
  std::optional<FeasibilityConfig> feasibility;
};

Config parse_config(const std::string& text);
Config load_config(const std::filesystem::path& path);

/// N balls around a shared point, each containing B(point, margin), with v0
/// at `distance` from the point. Deterministic in the seed.
rcd::FeasibilityProblem make_random_balls(const RandomBalls& spec);

}  // namespace rcdnet
