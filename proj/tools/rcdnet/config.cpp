#include "config.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "rcd/error.hpp"

namespace rcdnet {

ConfigError::ConfigError(int line, std::string field, const std::string& message)
    : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                         (field.empty() ? "" : field + ": ") + message),
      line_(line),
      field_(std::move(field)) {}

std::string to_string(DistKind kind) {
  switch (kind) {
    case DistKind::uniform: return "uniform";
    case DistKind::inverse_lipschitz: return "inverse_lipschitz";
    case DistKind::lipschitz_power: return "lipschitz_power";
    case DistKind::designed_lambda2: return "designed_lambda2";
    case DistKind::designed_sigma: return "designed_sigma";
  }
  return "unknown";
}

namespace {

int line_of(const YAML::Node& node) { return node.Mark().is_null() ? 0 : node.Mark().line + 1; }

// A mapping node together with its dotted path, for diagnostics.
class Section {
 public:
  Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (node_ && !node_.IsMap()) throw ConfigError(line_of(node_), path_, "expected a mapping");
  }

  bool has(const std::string& key) const { return node_ && node_[key]; }
  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  YAML::Node raw(const std::string& key) const { return node_ ? node_[key] : YAML::Node(); }
  int line() const { return line_of(node_); }

  template <class T>
  T get(const std::string& key, T fallback) const {
    return has(key) ? convert<T>(node_[key], field(key)) : fallback;
  }
  template <class T>
  T require(const std::string& key) const {
    if (!has(key)) throw ConfigError(line(), field(key), "required field is missing");
    return convert<T>(node_[key], field(key));
  }
  Section sub(const std::string& key) const { return Section(raw(key), field(key)); }

  void only(const std::set<std::string>& allowed) const {
    if (!node_) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) throw ConfigError(line_of(kv.first), field(key), "unknown field");
    }
  }

  template <class T>
  static T convert(const YAML::Node& n, const std::string& where) {
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError(line_of(n), where, "cannot read value '" + YAML::Dump(n) + "'");
    }
  }

 private:
  YAML::Node node_;
  std::string path_;
};

Eigen::VectorXd vector_of(const YAML::Node& n, const std::string& where) {
  if (!n.IsSequence()) throw ConfigError(line_of(n), where, "expected a list of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(n.size()));
  for (std::size_t k = 0; k < n.size(); ++k)
    v[static_cast<Eigen::Index>(k)] = Section::convert<double>(n[k], where);
  return v;
}

rcd::BlockMatrix matrix_of(const YAML::Node& n, const std::string& where) {
  if (!n.IsSequence() || n.size() == 0)
    throw ConfigError(line_of(n), where, "expected a non-empty list of rows");
  rcd::BlockMatrix m;
  for (std::size_t r = 0; r < n.size(); ++r) {
    const Eigen::VectorXd row = n[r].IsSequence() ? vector_of(n[r], where)
                                                  : Eigen::VectorXd::Constant(1, Section::convert<double>(n[r], where));
    if (r == 0) m.resize(static_cast<Eigen::Index>(n.size()), row.size());
    if (row.size() != m.cols()) throw ConfigError(line_of(n[r]), where, "rows differ in length");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

template <class T>
T positive(const Section& s, const std::string& key, T fallback) {
  const T v = s.get<T>(key, fallback);
  if (!(v > 0)) throw ConfigError(line_of(s.raw(key)), s.field(key), "must be positive");
  return v;
}

TopologyConfig parse_topology(const Section& s) {
  s.only({"kind", "n", "edge_prob", "seed", "path_cap", "path_seed"});
  TopologyConfig t;
  const auto kind = s.get<std::string>("kind", "complete");
  if (kind == "complete") t.spec.kind = rcd::TopologyKind::complete;
  else if (kind == "ring") t.spec.kind = rcd::TopologyKind::ring;
  else if (kind == "star") t.spec.kind = rcd::TopologyKind::star;
  else if (kind == "random_connected") t.spec.kind = rcd::TopologyKind::random_connected;
  else
    throw ConfigError(line_of(s.raw("kind")), s.field("kind"),
                      "expected complete, ring, star or random_connected");
  t.spec.n_nodes = s.get<int>("n", 200);
  if (t.spec.n_nodes < 2) throw ConfigError(line_of(s.raw("n")), s.field("n"), "need n >= 2");
  t.spec.edge_prob = s.get<double>("edge_prob", 0.5);
  if (!(t.spec.edge_prob > 0.0 && t.spec.edge_prob <= 1.0))
    throw ConfigError(line_of(s.raw("edge_prob")), s.field("edge_prob"), "must lie in (0, 1]");
  t.spec.seed = s.get<std::uint64_t>("seed", 0);
  if (s.has("path_cap")) t.path_cap = positive<std::size_t>(s, "path_cap", 1);
  t.path_seed = s.get<std::uint64_t>("path_seed", 0);
  return t;
}

ObjectiveConfig parse_objective(const Section& s, int n_nodes) {
  s.only({"family", "seed", "min_curvature", "block_dim", "a", "b", "c", "d", "curvature",
          "centers"});
  ObjectiveConfig o;
  const auto family = s.get<std::string>("family", "quad_logistic");
  if (family == "quad_logistic") o.family = ObjectiveConfig::Family::quad_logistic;
  else if (family == "quadratic") o.family = ObjectiveConfig::Family::quadratic;
  else
    throw ConfigError(line_of(s.raw("family")), s.field("family"),
                      "expected quad_logistic or quadratic");
  o.seed = s.get<std::uint64_t>("seed", 0);
  o.min_curvature = s.get<double>("min_curvature", 0.0);
  if (o.min_curvature < 0.0 || o.min_curvature > 15.0)
    throw ConfigError(line_of(s.raw("min_curvature")), s.field("min_curvature"),
                      "must lie in [0, 15]");
  o.block_dim = positive<int>(s, "block_dim", 1);

  auto sized = [&](const std::string& key) {
    Eigen::VectorXd v = vector_of(s.raw(key), s.field(key));
    if (v.size() != n_nodes)
      throw ConfigError(line_of(s.raw(key)), s.field(key),
                        "expected " + std::to_string(n_nodes) + " entries");
    return v;
  };
  if (o.family == ObjectiveConfig::Family::quad_logistic) {
    if (o.block_dim != 1)
      throw ConfigError(line_of(s.raw("block_dim")), s.field("block_dim"),
                        "quad_logistic is scalar");
    const int given = s.has("a") + s.has("b") + s.has("c") + s.has("d");
    if (given != 0 && given != 4)
      throw ConfigError(s.line(), s.field("a"), "give all of a, b, c, d or none");
    if (given == 4) {
      o.params = rcd::QuadLogisticParams{sized("a"), sized("b"), sized("c"), sized("d")};
      if ((o.params->a.array() < 0.0).any())
        throw ConfigError(line_of(s.raw("a")), s.field("a"), "entries must be >= 0");
    }
  } else {
    if (s.has("curvature")) {
      const auto node = s.raw("curvature");
      o.curvature = node.IsSequence()
                        ? sized("curvature")
                        : Eigen::VectorXd::Constant(n_nodes, Section::convert<double>(node, s.field("curvature")));
      if ((o.curvature.array() <= 0.0).any())
        throw ConfigError(line_of(node), s.field("curvature"), "must be positive");
    }
    if (s.has("centers")) {
      o.centers = matrix_of(s.raw("centers"), s.field("centers"));
      if (o.centers->rows() != n_nodes || o.centers->cols() != o.block_dim)
        throw ConfigError(line_of(s.raw("centers")), s.field("centers"),
                          "expected an N x block_dim matrix");
    }
  }
  return o;
}

DistKind parse_dist(const Section& s, const std::string& key, DistKind fallback) {
  if (!s.has(key)) return fallback;
  const auto name = s.get<std::string>(key, "");
  for (DistKind k : {DistKind::uniform, DistKind::inverse_lipschitz, DistKind::lipschitz_power,
                     DistKind::designed_lambda2, DistKind::designed_sigma})
    if (name == to_string(k)) return k;
  throw ConfigError(line_of(s.raw(key)), s.field(key),
                    "expected uniform, inverse_lipschitz, lipschitz_power, designed_lambda2 or "
                    "designed_sigma");
}

RunConfig parse_run(const Section& s, int n_nodes) {
  s.only({"tau", "distribution", "alpha", "seeds", "iterations", "trace_stride", "base_seed"});
  RunConfig r;
  if (s.has("tau")) {
    const auto node = s.raw("tau");
    r.taus.clear();
    if (node.IsSequence())
      for (const auto& t : node) r.taus.push_back(Section::convert<int>(t, s.field("tau")));
    else
      r.taus.push_back(Section::convert<int>(node, s.field("tau")));
    for (int t : r.taus)
      if (t < 2 || t > n_nodes)
        throw ConfigError(line_of(node), s.field("tau"), "every tau must lie in [2, n]");
  }
  r.distribution = parse_dist(s, "distribution", DistKind::inverse_lipschitz);
  r.alpha = s.get<double>("alpha", 1.0);
  r.seeds = positive<int>(s, "seeds", 20);
  r.iterations = s.get<long long>("iterations", 0);
  if (r.iterations < 0)
    throw ConfigError(line_of(s.raw("iterations")), s.field("iterations"), "must be >= 0");
  r.trace_stride = s.get<long long>("trace_stride", 0);
  r.base_seed = s.get<std::uint64_t>("base_seed", 0);
  return r;
}

DesignConfig parse_design(const Section& s, int n_nodes) {
  s.only({"iterations", "step", "step_scale", "export_sdp", "radii"});
  DesignConfig d;
  d.iterations = positive<int>(s, "iterations", 400);
  const auto step = s.get<std::string>("step", "diminishing");
  if (step == "diminishing") d.step.kind = rcd::StepRule::Kind::diminishing;
  else if (step == "constant") d.step.kind = rcd::StepRule::Kind::constant;
  else throw ConfigError(line_of(s.raw("step")), s.field("step"), "expected diminishing or constant");
  d.step.scale = s.get<double>("step_scale", 0.0);
  if (d.step.scale < 0.0)
    throw ConfigError(line_of(s.raw("step_scale")), s.field("step_scale"), "must be >= 0");
  d.export_sdp = s.get<bool>("export_sdp", false);
  if (s.has("radii")) {
    Eigen::VectorXd r = vector_of(s.raw("radii"), s.field("radii"));
    if (r.size() != n_nodes || (r.array() <= 0.0).any())
      throw ConfigError(line_of(s.raw("radii")), s.field("radii"),
                        "expected " + std::to_string(n_nodes) + " positive entries");
    d.radii = r;
  }
  return d;
}

rcd::ConvexSet parse_set(const YAML::Node& node, const std::string& where) {
  Section s(node, where);
  s.only({"kind", "lo", "hi", "center", "radius", "normal", "offset"});
  const auto kind = s.require<std::string>("kind");
  try {
    if (kind == "box")
      return rcd::ConvexSet::box(vector_of(s.raw("lo"), s.field("lo")),
                                 vector_of(s.raw("hi"), s.field("hi")));
    if (kind == "ball")
      return rcd::ConvexSet::ball(vector_of(s.raw("center"), s.field("center")),
                                  s.require<double>("radius"));
    if (kind == "halfspace")
      return rcd::ConvexSet::halfspace(vector_of(s.raw("normal"), s.field("normal")),
                                       s.require<double>("offset"));
  } catch (const rcd::Error& e) {
    throw ConfigError(s.line(), where, e.what());
  }
  throw ConfigError(line_of(s.raw("kind")), s.field("kind"), "expected box, ball or halfspace");
}

FeasibilityConfig parse_feasibility(const Section& s, int n_nodes) {
  s.only({"v0", "weights", "sets", "interior", "random_balls", "loose_lipschitz", "dykstra_tol"});
  FeasibilityConfig f;
  f.loose_lipschitz = s.get<bool>("loose_lipschitz", false);
  f.dykstra_tol = positive<double>(s, "dykstra_tol", 1e-12);
  if (s.has("random_balls")) {
    if (s.has("sets") || s.has("v0"))
      throw ConfigError(s.line(), s.field("random_balls"), "conflicts with explicit sets / v0");
    const auto rb = s.sub("random_balls");
    rb.only({"dim", "seed", "distance"});
    RandomBalls spec;
    spec.count = n_nodes;
    spec.dim = positive<int>(rb, "dim", 2);
    spec.seed = rb.get<std::uint64_t>("seed", 0);
    spec.distance = positive<double>(rb, "distance", 5.0);
    f.problem = make_random_balls(spec);
  } else {
    f.problem.v0 = vector_of(s.raw("v0"), s.field("v0"));
    const auto sets = s.raw("sets");
    if (!sets || !sets.IsSequence())
      throw ConfigError(s.line(), s.field("sets"), "expected a list of sets");
    for (std::size_t k = 0; k < sets.size(); ++k)
      f.problem.sets.push_back(parse_set(sets[k], s.field("sets") + "[" + std::to_string(k) + "]"));
    if (static_cast<int>(f.problem.sets.size()) != n_nodes)
      throw ConfigError(line_of(sets), s.field("sets"),
                        "expected one set per node (" + std::to_string(n_nodes) + ")");
    f.problem.weights = Eigen::VectorXd::Constant(n_nodes, 1.0 / n_nodes);
    if (s.has("interior")) {
      const auto in = s.sub("interior");
      in.only({"center", "radius"});
      f.problem.interior = rcd::InteriorBall{vector_of(in.raw("center"), in.field("center")),
                                             positive<double>(in, "radius", 1.0)};
    }
  }
  if (s.has("weights")) {
    Eigen::VectorXd w = vector_of(s.raw("weights"), s.field("weights"));
    if (w.size() != n_nodes || (w.array() <= 0.0).any())
      throw ConfigError(line_of(s.raw("weights")), s.field("weights"),
                        "expected " + std::to_string(n_nodes) + " positive entries");
    f.problem.weights = w / w.sum();
  }
  try {
    f.problem.validate();
  } catch (const rcd::Error& e) {
    throw ConfigError(s.line(), s.field(""), e.what());
  }
  return f;
}

}  // namespace

Config parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.mark.line + 1, "", e.msg);
  }
  if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  Section top(root, "");
  top.only({"topology", "objective", "run", "design", "feasibility"});
  Config c;
  c.topology = parse_topology(top.sub("topology"));
  const int n = c.topology.spec.n_nodes;
  c.objective = parse_objective(top.sub("objective"), n);
  c.run = parse_run(top.sub("run"), n);
  c.design = parse_design(top.sub("design"), n);
  if (top.has("feasibility")) c.feasibility = parse_feasibility(top.sub("feasibility"), n);
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "", "cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

rcd::FeasibilityProblem make_random_balls(const RandomBalls& spec) {
  if (spec.count < 1 || spec.dim < 1) throw ConfigError(0, "random_balls", "need count, dim >= 1");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> offset(1.0, 3.0), margin(0.5, 1.5);
  auto direction = [&] {
    Eigen::VectorXd u(spec.dim);
    for (auto& v : u) v = gauss(rng);
    return Eigen::VectorXd(u / u.norm());
  };

  rcd::FeasibilityProblem prob;
  double smallest_margin = INFINITY;
  for (int i = 0; i < spec.count; ++i) {
    const Eigen::VectorXd u = direction();
    const double d = offset(rng), m = margin(rng);
    prob.sets.push_back(rcd::ConvexSet::ball(d * u, d + m));
    smallest_margin = std::min(smallest_margin, m);
  }
  const Eigen::VectorXd w = direction();
  double dist = spec.distance;
  auto inside_all = [&](const Eigen::VectorXd& z) {
    for (const auto& s : prob.sets)
      if (!s.contains(z, 0.0)) return false;
    return true;
  };
  while (inside_all(dist * w)) dist *= 2.0;
  prob.v0 = dist * w;
  prob.weights = Eigen::VectorXd::Constant(spec.count, 1.0 / spec.count);
  prob.interior = rcd::InteriorBall{Eigen::VectorXd::Zero(spec.dim), smallest_margin};
  return prob;
}

}  // namespace rcdnet
