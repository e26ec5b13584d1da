#include "commands.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "csv.hpp"
#include "experiments.hpp"
#include "rcd/error.hpp"
#include "rcd/kernels.hpp"
#include "rcd/oracle.hpp"
#include "rcd/sdpa.hpp"

namespace rcdnet {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void say(const CommandContext& ctx, const std::string& line) {
  if (!ctx.quiet && ctx.log) *ctx.log << line << '\n';
}

std::string tag(int tau) { return "tau" + std::to_string(tau); }

long long budget(const Config& c) {
  return c.run.iterations > 0 ? c.run.iterations : 200LL * c.topology.spec.n_nodes;
}

rcd::BlockMatrix zeros(const rcd::SeparableObjective& obj) {
  return rcd::BlockMatrix::Zero(obj.n_nodes(), obj.block_dim());
}

double or_nan(const std::optional<double>& v) { return v ? *v : kNaN; }

Eigen::VectorXd sdp_radii(const Config& c, const rcd::SeparableObjective& obj) {
  if (c.design.radii) return *c.design.radii;
  if (obj.block_dim() != 1)
    rcd::fail(rcd::ErrorKind::unsupported, "level-set radii need scalar blocks; set design.radii");
  const Optimum opt = solve_optimum(c.objective, obj);
  return rcd::level_set_radii(obj, obj.eval(zeros(obj)), opt.x.col(0));
}

}  // namespace

void cmd_solve(const Config& c, const CommandContext& ctx) {
  const auto g = build_network(c.topology);
  const auto obj = build_objective(c.objective, g.n_nodes());
  const Optimum opt = solve_optimum(c.objective, obj);
  const rcd::BlockMatrix x0 = zeros(obj);
  const double f0 = obj.eval(x0);
  const int n = g.n_nodes();
  const auto seeds = seed_list(c.run.base_seed, c.run.seeds);

  for (int tau : c.run.taus) {
    const auto choice = build_distribution(g, c.topology, obj, tau, c.run.distribution,
                                           c.run.alpha, c.design);
    const auto cert = certificates_for(obj, g, choice, c.run.distribution, f0, opt);
    rcd::RunOptions ro;
    ro.stop.max_iters = budget(c);
    ro.trace_stride = c.run.trace_stride;
    const auto runs = run_seeds(obj, g, choice.dist, x0, ro, seeds);

    for (std::size_t s = 0; s < runs.size(); ++s) {
      CsvTable t;
      t.add_meta("tau", std::to_string(tau));
      t.add_meta("N", std::to_string(n));
      t.add_meta("seed", std::to_string(seeds[s]));
      t.add_meta("distribution", to_string(c.run.distribution));
      t.add_meta("f_star", opt.f);
      t.add_meta("stop", std::string(rcd::to_string(runs[s].reason)));
      t.columns = {"k", "k_over_N", "f", "gap"};
      for (const auto& p : runs[s].trace)
        t.rows.push_back({static_cast<double>(p.k), static_cast<double>(p.k) / n, p.f, p.f - opt.f});
      write_csv_atomic(t, ctx.out_dir / ("solve_" + tag(tau) + "_seed" + std::to_string(seeds[s]) + ".csv"));
    }

    const auto summary = summarize(runs, opt.f);
    CsvTable t;
    t.add_meta("tau", std::to_string(tau));
    t.add_meta("N", std::to_string(n));
    t.add_meta("distribution", to_string(c.run.distribution));
    t.add_meta("seeds", std::to_string(seeds.size()));
    t.add_meta("base_seed", std::to_string(c.run.base_seed));
    t.add_meta("f_star", opt.f);
    t.add_meta("f0", f0);
    t.add_meta("lambda2", or_nan(cert.lambda2));
    t.add_meta("sigma_g", or_nan(cert.sigma_g));
    t.add_meta("radius_sq", or_nan(cert.radius_sq));
    if (cert.radii) {
      t.add_meta("sum_L_R2", obj.lipschitz().dot(cert.radii->cwiseAbs2()));
    }
    t.columns = {"k", "k_over_N", "gap_mean", "gap_min", "gap_max", "bound_thm1", "bound_thm3"};
    for (std::size_t p = 0; p < summary.k.size(); ++p) {
      const double k = static_cast<double>(summary.k[p]);
      const double b1 = cert.radius_sq ? rcd::bound_thm1(std::sqrt(*cert.radius_sq), k) : kNaN;
      const double b3 = cert.thm3_applies && cert.radii
                            ? rcd::bound_thm3(obj.lipschitz(), *cert.radii, n, tau, k)
                            : kNaN;
      t.rows.push_back({k, k / n, summary.mean[p], summary.min[p], summary.max[p], b1, b3});
    }
    write_csv_atomic(t, ctx.out_dir / ("solve_" + tag(tau) + ".csv"));
    say(ctx, "solve tau=" + std::to_string(tau) + " final mean gap " +
                 format_number(summary.mean.empty() ? kNaN : summary.mean.back()));
  }
}

void cmd_design(const Config& c, const CommandContext& ctx) {
  const auto g = build_network(c.topology);
  const auto obj = build_objective(c.objective, g.n_nodes());
  const auto& lip = obj.lipschitz();
  const auto& sigma = obj.strong_convexity();
  const bool has_sigma = sigma && (sigma->array() > 0.0).all();
  const rcd::DesignOptions options{c.design.iterations, c.design.step};

  for (int tau : c.run.taus) {
    const auto ps = enumerate_for(g, c.topology, tau);
    std::vector<std::pair<std::string, rcd::PathDistribution>> dists;
    dists.emplace_back("uniform", rcd::dist_uniform(ps));
    dists.emplace_back("inverse_lipschitz", rcd::dist_inverse_lipschitz(ps, lip));
    dists.emplace_back("lipschitz_power", rcd::dist_lipschitz_power(ps, lip, c.run.alpha));
    dists.emplace_back("designed_lambda2", rcd::design_max_lambda2(ps, lip, options).distribution);
    if (has_sigma)
      dists.emplace_back("designed_sigma", rcd::design_max_sigma(ps, lip, *sigma, options).distribution);

    CsvTable report;
    report.add_meta("tau", std::to_string(tau));
    report.add_meta("N", std::to_string(g.n_nodes()));
    report.add_meta("paths", std::to_string(ps->size()));
    report.add_meta("alpha", c.run.alpha);
    report.columns = {"distribution", "lambda2", "sigma_g"};
    for (std::size_t d = 0; d < dists.size(); ++d) {
      const auto& [name, dist] = dists[d];
      report.add_meta("distribution_" + std::to_string(d), name);
      const auto gt = rcd::assemble_g_tau(lip, dist);
      const double sg = has_sigma ? rcd::compute_sigma_g(gt, *sigma) : kNaN;
      report.rows.push_back({static_cast<double>(d), rcd::lambda2(gt), sg});

      const auto file = ctx.out_dir / ("dist_" + tag(tau) + "_" + name + ".csv");
      write_distribution_csv(dist, name, file);
      const auto back = read_distribution_csv(file);
      bool same = back.path_set().paths == ps->paths;
      for (std::size_t k = 0; same && k < ps->size(); ++k)
        same = std::abs(back.probabilities()[k] - dist.probabilities()[k]) <= 1e-12;
      if (!same) rcd::fail(rcd::ErrorKind::io, file.string() + " does not read back identically");
      say(ctx, "design tau=" + std::to_string(tau) + " " + name + " lambda2 " +
                   format_number(report.rows.back()[1]));
    }
    write_csv_atomic(report, ctx.out_dir / ("design_" + tag(tau) + ".csv"));

    if (c.design.export_sdp) {
      rcd::export_sdp(*ps, lip, sdp_radii(c, obj), ctx.out_dir / ("sdp_rate_" + tag(tau) + ".dat-s"));
      rcd::export_lambda2_sdp(*ps, lip, ctx.out_dir / ("sdp_lambda2_" + tag(tau) + ".dat-s"));
    }
  }
}

void cmd_compare(const Config& c, const CommandContext& ctx) {
  const auto g = build_network(c.topology);
  const auto obj = build_objective(c.objective, g.n_nodes());
  const Optimum opt = solve_optimum(c.objective, obj);
  const rcd::BlockMatrix x0 = zeros(obj);
  const int n = g.n_nodes();
  const long long total = budget(c);
  const long long full = std::max<long long>(1, total / n);
  const auto seeds = seed_list(c.run.base_seed, c.run.seeds);

  rcd::BaselineOptions bo;
  bo.iterations = full;
  bo.trace_stride = 1;
  const auto pg = rcd::run_projected_gradient(obj, x0, bo);
  const auto cf = rcd::run_center_free(obj, g, x0, bo);

  rcd::RunOptions ro;
  ro.stop.max_iters = full * n;
  ro.trace_stride = n;
  std::vector<GapSummary> rcd_means;
  double rcd_residual = 0.0;
  for (DistKind kind : {DistKind::uniform, DistKind::inverse_lipschitz}) {
    const auto choice = build_distribution(g, c.topology, obj, 2, kind, 1.0, c.design);
    const auto runs = run_seeds(obj, g, choice.dist, x0, ro, seeds);
    for (const auto& r : runs) rcd_residual = std::max(rcd_residual, rcd::coupling_residual(r.x));
    rcd_means.push_back(summarize(runs, opt.f));
  }

  CsvTable t;
  t.add_meta("N", std::to_string(n));
  t.add_meta("seeds", std::to_string(seeds.size()));
  t.add_meta("f_star", opt.f);
  t.add_meta("l_max", obj.lipschitz().maxCoeff());
  t.add_meta("residual_projected_gradient", rcd::coupling_residual(pg.x));
  t.add_meta("residual_center_free", rcd::coupling_residual(cf.x));
  t.add_meta("residual_rcd_max", rcd_residual);
  t.columns = {"k", "k_over_N", "projected_gradient", "center_free", "rcd2_uniform",
               "rcd2_inverse_lipschitz"};
  const std::size_t rows = std::min({pg.trace.size(), cf.trace.size(), rcd_means[0].k.size(),
                                     rcd_means[1].k.size()});
  for (std::size_t p = 0; p < rows; ++p) {
    const long long k = pg.trace[p].k;
    if (cf.trace[p].k != k || rcd_means[0].k[p] != k || rcd_means[1].k[p] != k)
      rcd::fail(rcd::ErrorKind::dimension_mismatch, "compare traces are not aligned");
    t.rows.push_back({static_cast<double>(k), static_cast<double>(k) / n, pg.trace[p].f - opt.f,
                      cf.trace[p].f - opt.f, rcd_means[0].mean[p], rcd_means[1].mean[p]});
  }
  write_csv_atomic(t, ctx.out_dir / "compare.csv");
  if (!t.rows.empty()) {
    const auto& last = t.rows.back();
    say(ctx, "compare final gaps: pg " + format_number(last[2]) + ", center-free " +
                 format_number(last[3]) + ", rcd2 uniform " + format_number(last[4]) +
                 ", rcd2 inverse_lipschitz " + format_number(last[5]));
  }
}

void cmd_feasibility(const Config& c, const CommandContext& ctx) {
  if (!c.feasibility) throw ConfigError(0, "feasibility", "section is required by this command");
  const auto& fc = *c.feasibility;
  const auto& prob = fc.problem;
  const auto g = build_network(c.topology);
  const int n = g.n_nodes();
  if (static_cast<int>(prob.sets.size()) != n)
    throw ConfigError(0, "feasibility.sets", "need one set per node");

  const Eigen::VectorXd v_star = rcd::oracle::alternating_projections(prob.sets, prob.v0, fc.dykstra_tol);
  // weights sum to one
  const double g_star = (v_star - prob.v0).squaredNorm();
  const auto dual = rcd::make_dual_objective(prob, fc.loose_lipschitz);
  const Eigen::VectorXd sigma = rcd::primal_sigma(prob, fc.loose_lipschitz);
  const auto seeds = seed_list(c.run.base_seed, c.run.seeds);

  for (int tau : c.run.taus) {
    const auto choice = build_distribution(g, c.topology, dual, tau, c.run.distribution,
                                           c.run.alpha, c.design);
    std::optional<rcd::PrimalBounds> bounds;
    if (choice.gtau && prob.interior) {
      const double r2 = rcd::slater_radius_sq(prob, rcd::lambda2(*choice.gtau));
      bounds = rcd::primal_error_bounds(r2, *choice.gtau, sigma);
    }
    rcd::ProjectionOptions po;
    po.iterations = budget(c);
    po.trace_stride = c.run.trace_stride;
    po.loose_lipschitz = fc.loose_lipschitz;
    std::vector<rcd::ProjectionResult> results(seeds.size());
    rcd::kernels::parallel::for_each_index(seeds.size(), [&](std::size_t s) {
      auto o = po;
      o.seed = seeds[s];
      results[s] = rcd::solve_projection(prob, g, choice.dist, o);
    });

    CsvTable t;
    t.add_meta("tau", std::to_string(tau));
    t.add_meta("N", std::to_string(n));
    t.add_meta("seeds", std::to_string(seeds.size()));
    t.add_meta("g_star", g_star);
    t.add_meta("loose_lipschitz", fc.loose_lipschitz ? "true" : "false");
    for (Eigen::Index d = 0; d < v_star.size(); ++d)
      t.add_meta("v_star_" + std::to_string(d), v_star[d]);
    t.add_meta("radius_sq", bounds ? bounds->radius_sq : kNaN);
    t.add_meta("lambda_n", bounds ? bounds->lambda_n : kNaN);
    t.add_meta("sigma_min", bounds ? bounds->sigma_min : kNaN);
    t.columns = {"k", "infeas_mean", "infeas_bound", "subopt_mean", "subopt_bound"};
    const auto& grid = results.front().snapshots;
    for (std::size_t p = 0; p < grid.size(); ++p) {
      double infeas = 0.0, subopt = 0.0;
      for (const auto& r : results) {
        if (r.snapshots.size() != grid.size() || r.snapshots[p].k != grid[p].k)
          rcd::fail(rcd::ErrorKind::dimension_mismatch, "feasibility traces are not aligned");
        infeas += rcd::weighted_infeasibility(r.snapshots[p].u, v_star, sigma);
        subopt += std::abs(rcd::primal_value(prob, r.snapshots[p].u) - g_star);
      }
      const double k = static_cast<double>(grid[p].k);
      const double m = static_cast<double>(results.size());
      t.rows.push_back({k, infeas / m, bounds ? bounds->infeasibility(k) : kNaN, subopt / m,
                        bounds ? bounds->suboptimality(k) : kNaN});
    }
    write_csv_atomic(t, ctx.out_dir / ("feasibility_" + tag(tau) + ".csv"));
    if (!t.rows.empty())
      say(ctx, "feasibility tau=" + std::to_string(tau) + " final infeasibility " +
                   format_number(t.rows.back()[1]));
  }
}

void cmd_export_sdp(const Config& c, const CommandContext& ctx) {
  const auto g = build_network(c.topology);
  const auto obj = build_objective(c.objective, g.n_nodes());
  const Eigen::VectorXd radii = sdp_radii(c, obj);
  for (int tau : c.run.taus) {
    const auto ps = enumerate_for(g, c.topology, tau);
    const auto rate = ctx.out_dir / ("sdp_rate_" + tag(tau) + ".dat-s");
    const auto l2 = ctx.out_dir / ("sdp_lambda2_" + tag(tau) + ".dat-s");
    rcd::export_sdp(*ps, obj.lipschitz(), radii, rate);
    rcd::export_lambda2_sdp(*ps, obj.lipschitz(), l2);
    say(ctx, "wrote " + rate.string() + " and " + l2.string());
  }
}

}  // namespace rcdnet
