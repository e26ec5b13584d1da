#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "csv.hpp"
#include "rcd/error.hpp"
#include "rcd/kernels.hpp"
#include "rcd/oracle.hpp"

namespace rcdnet {

rcd::Network build_network(const TopologyConfig& config) { return rcd::make_topology(config.spec); }

rcd::SeparableObjective build_objective(const ObjectiveConfig& config, int n_nodes) {
  if (config.family == ObjectiveConfig::Family::quad_logistic) {
    if (config.params) return rcd::make_quad_logistic(*config.params);
    return rcd::make_quad_logistic(n_nodes, config.seed, config.min_curvature);
  }
  Eigen::VectorXd curvature =
      config.curvature.size() ? config.curvature : Eigen::VectorXd::Ones(n_nodes);
  rcd::BlockMatrix centers;
  if (config.centers) {
    centers = *config.centers;
  } else {
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> draw(-15.0, 15.0);
    centers.resize(n_nodes, config.block_dim);
    for (Eigen::Index i = 0; i < centers.size(); ++i) centers.data()[i] = draw(rng);
  }
  return rcd::make_quadratic(std::move(curvature), std::move(centers));
}

Optimum solve_optimum(const ObjectiveConfig& config, const rcd::SeparableObjective& obj) {
  if (config.family == ObjectiveConfig::Family::quadratic) {
    // a_i (x_i - c_i) = lambda for all i with sum x_i = 0.
    const Eigen::VectorXd a =
        config.curvature.size() ? config.curvature : Eigen::VectorXd::Ones(obj.n_nodes());
    const rcd::BlockMatrix centers = [&] {
      if (config.centers) return *config.centers;
      std::mt19937_64 rng(config.seed);
      std::uniform_real_distribution<double> draw(-15.0, 15.0);
      rcd::BlockMatrix c(obj.n_nodes(), config.block_dim);
      for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = draw(rng);
      return c;
    }();
    const Eigen::VectorXd inv = a.cwiseInverse();
    const Eigen::RowVectorXd lambda = -centers.colwise().sum() / inv.sum();
    rcd::BlockMatrix x = centers + inv * lambda;
    return {x, obj.eval(x)};
  }
  const auto m = rcd::oracle::optimal_multiplier(obj);
  rcd::BlockMatrix x = m.x;
  return {x, m.f};
}

std::shared_ptr<const rcd::PathSet> enumerate_for(const rcd::Network& g,
                                                  const TopologyConfig& topology, int tau) {
  return std::make_shared<const rcd::PathSet>(
      rcd::enumerate_paths(g, tau, topology.path_cap, topology.path_seed));
}

DistributionChoice build_distribution(const rcd::Network& g, const TopologyConfig& topology,
                                      const rcd::SeparableObjective& obj, int tau, DistKind kind,
                                      double alpha, const DesignConfig& design) {
  const auto& lip = obj.lipschitz();
  const int n = g.n_nodes();
  const bool designed = kind == DistKind::designed_lambda2 || kind == DistKind::designed_sigma;
  const bool implicit = g.is_complete() && !designed && !topology.path_cap &&
                        rcd::complete_graph_path_count(n, tau) > kImplicitPathThreshold;

  if (implicit) {
    const rcd::CompletePaths space{n, tau};
    auto dist = kind == DistKind::uniform             ? rcd::dist_uniform(space)
                : kind == DistKind::inverse_lipschitz ? rcd::dist_inverse_lipschitz(space, lip)
                                                      : rcd::dist_lipschitz_power(space, lip, alpha);
    std::optional<rcd::GTau> gt;
    try {
      gt = rcd::assemble_g_tau(lip, dist);
    } catch (const rcd::Error& e) {
      if (e.kind() != rcd::ErrorKind::unsupported) throw;
    }
    return {std::move(dist), std::move(gt), std::nullopt};
  }

  auto ps = enumerate_for(g, topology, tau);
  const rcd::DesignOptions options{design.iterations, design.step};
  switch (kind) {
    case DistKind::uniform: {
      auto d = rcd::dist_uniform(ps);
      auto gt = rcd::assemble_g_tau(lip, d);
      return {std::move(d), std::move(gt), std::nullopt};
    }
    case DistKind::inverse_lipschitz: {
      auto d = rcd::dist_inverse_lipschitz(ps, lip);
      auto gt = rcd::assemble_g_tau(lip, d);
      return {std::move(d), std::move(gt), std::nullopt};
    }
    case DistKind::lipschitz_power: {
      auto d = rcd::dist_lipschitz_power(ps, lip, alpha);
      auto gt = rcd::assemble_g_tau(lip, d);
      return {std::move(d), std::move(gt), std::nullopt};
    }
    case DistKind::designed_lambda2: {
      auto r = rcd::design_max_lambda2(ps, lip, options);
      auto gt = rcd::assemble_g_tau(lip, r.distribution);
      return {std::move(r.distribution), std::move(gt), r.value};
    }
    case DistKind::designed_sigma: {
      if (!obj.strong_convexity() || (obj.strong_convexity()->array() <= 0.0).any())
        rcd::fail(rcd::ErrorKind::nonpositive_sigma,
                  "designed_sigma needs a positive strong-convexity constant on every node");
      auto r = rcd::design_max_sigma(ps, lip, *obj.strong_convexity(), options);
      auto gt = rcd::assemble_g_tau(lip, r.distribution);
      return {std::move(r.distribution), std::move(gt), r.value};
    }
  }
  rcd::fail(rcd::ErrorKind::invalid_argument, "unknown distribution kind");
}

std::vector<std::uint64_t> seed_list(std::uint64_t base_seed, int count) {
  std::vector<std::uint64_t> seeds(count);
  for (int s = 0; s < count; ++s) seeds[s] = base_seed + static_cast<std::uint64_t>(s);
  return seeds;
}

std::vector<rcd::SolveReport> run_seeds(const rcd::SeparableObjective& obj, const rcd::Network& g,
                                        const rcd::PathDistribution& dist,
                                        const rcd::BlockMatrix& x0, const rcd::RunOptions& base,
                                        const std::vector<std::uint64_t>& seeds) {
  std::vector<rcd::SolveReport> out(seeds.size());
  rcd::kernels::parallel::for_each_index(seeds.size(), [&](std::size_t s) {
    rcd::RunOptions options = base;
    options.seed = seeds[s];
    out[s] = rcd::run(obj, g, dist, x0, options);
  });
  return out;
}

GapSummary summarize(const std::vector<rcd::SolveReport>& runs, double f_star) {
  GapSummary s;
  if (runs.empty()) return s;
  const auto& grid = runs.front().trace;
  for (const auto& r : runs)
    if (r.trace.size() != grid.size())
      rcd::fail(rcd::ErrorKind::dimension_mismatch, "runs do not share a trace grid");
  for (std::size_t p = 0; p < grid.size(); ++p) {
    double sum = 0.0, lo = INFINITY, hi = -INFINITY;
    for (const auto& r : runs) {
      if (r.trace[p].k != grid[p].k)
        rcd::fail(rcd::ErrorKind::dimension_mismatch, "runs do not share a trace grid");
      const double gap = r.trace[p].f - f_star;
      sum += gap;
      lo = std::min(lo, gap);
      hi = std::max(hi, gap);
    }
    s.k.push_back(grid[p].k);
    s.mean.push_back(sum / static_cast<double>(runs.size()));
    s.min.push_back(lo);
    s.max.push_back(hi);
  }
  return s;
}

double first_k_below(const rcd::SolveReport& run, double f_star, double eps) {
  return rcd::iterations_to_gap(rcd::gap_trace(run.trace, f_star), eps);
}

Certificates certificates_for(const rcd::SeparableObjective& obj, const rcd::Network& g,
                              const DistributionChoice& choice, DistKind kind, double f0,
                              const Optimum& opt) {
  Certificates c;
  if (choice.gtau) {
    c.lambda2 = rcd::lambda2(*choice.gtau);
    if (obj.strong_convexity() && (obj.strong_convexity()->array() > 0.0).all())
      c.sigma_g = rcd::compute_sigma_g(*choice.gtau, *obj.strong_convexity());
  }
  if (obj.block_dim() == 1) {
    c.radii = rcd::level_set_radii(obj, f0, opt.x.col(0));
    if (choice.gtau) c.radius_sq = rcd::box_radius_sq(*choice.gtau, obj.lipschitz(), *c.radii).value;
  }
  c.thm3_applies = g.is_complete() && kind == DistKind::inverse_lipschitz;
  return c;
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  if (x.size() != y.size() || x.size() < 2)
    rcd::fail(rcd::ErrorKind::invalid_size, "a line fit needs at least two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  const double r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  return {slope, my - slope * mx, r2};
}

void write_distribution_csv(const rcd::PathDistribution& dist, const std::string& name,
                            const std::filesystem::path& path) {
  const auto& ps = dist.path_set();
  CsvTable t;
  t.add_meta("name", name);
  t.add_meta("n_nodes", std::to_string(ps.n_nodes));
  t.add_meta("tau", std::to_string(ps.tau));
  t.columns = {"index", "probability"};
  for (int v = 0; v < ps.tau; ++v) t.columns.push_back("v" + std::to_string(v));
  const auto& p = dist.probabilities();
  for (std::size_t k = 0; k < ps.size(); ++k) {
    std::vector<double> row{static_cast<double>(k), p[k]};
    for (int v : ps.paths[k]) row.push_back(v);
    t.rows.push_back(std::move(row));
  }
  write_csv_atomic(t, path);
}

rcd::PathDistribution read_distribution_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const auto* n = t.find_meta("n_nodes");
  const auto* tau = t.find_meta("tau");
  if (!n || !tau) rcd::fail(rcd::ErrorKind::parse, path.string() + ": missing n_nodes / tau");
  auto ps = std::make_shared<rcd::PathSet>();
  ps->n_nodes = std::stoi(*n);
  ps->tau = std::stoi(*tau);
  if (t.columns.size() != static_cast<std::size_t>(ps->tau) + 2)
    rcd::fail(rcd::ErrorKind::parse, path.string() + ": expected tau vertex columns");
  std::vector<double> p;
  for (const auto& row : t.rows) {
    p.push_back(row[1]);
    std::vector<int> verts;
    for (std::size_t c = 2; c < row.size(); ++c) {
      if (row[c] != std::floor(row[c]) || row[c] < 0 || row[c] >= ps->n_nodes)
        rcd::fail(rcd::ErrorKind::parse, path.string() + ": bad vertex");
      verts.push_back(static_cast<int>(row[c]));
    }
    ps->paths.push_back(std::move(verts));
  }
  return rcd::PathDistribution(std::move(ps), std::move(p));
}

}  // namespace rcdnet
