#include "rcd/sdpa.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "rcd/error.hpp"
#include "rcd/probdesign.hpp"

namespace rcd {

std::vector<Eigen::MatrixXd> SdpaProblem::slack(const Eigen::VectorXd& y) const {
  if (y.size() != n_vars) fail(ErrorKind::dimension_mismatch, "point has wrong length");
  std::vector<Eigen::MatrixXd> blocks;
  for (int s : block_sizes) blocks.push_back(Eigen::MatrixXd::Zero(std::abs(s), std::abs(s)));
  for (const auto& e : entries) {
    const double w = e.matrix == 0 ? -1.0 : y[e.matrix - 1];
    auto& b = blocks[e.block - 1];
    b(e.i - 1, e.j - 1) += w * e.value;
    if (e.i != e.j) b(e.j - 1, e.i - 1) += w * e.value;
  }
  return blocks;
}

double SdpaProblem::min_eigenvalue(const Eigen::VectorXd& y) const {
  double lowest = INFINITY;
  for (const auto& b : slack(y)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b, Eigen::EigenvaluesOnly);
    lowest = std::min(lowest, eig.eigenvalues().minCoeff());
  }
  return lowest;
}

void write_sdpa(const SdpaProblem& problem, std::ostream& out) {
  for (const auto& c : problem.comments) out << "* " << c << '\n';
  out << problem.n_vars << " = mDIM\n";
  out << problem.block_sizes.size() << " = nBLOCK\n";
  for (std::size_t b = 0; b < problem.block_sizes.size(); ++b)
    out << (b ? " " : "") << problem.block_sizes[b];
  out << " = bLOCKsTRUCT\n";
  out << std::setprecision(17);
  for (int k = 0; k < problem.n_vars; ++k) out << (k ? " " : "") << problem.c[k];
  out << '\n';
  for (const auto& e : problem.entries)
    out << e.matrix << ' ' << e.block << ' ' << e.i << ' ' << e.j << ' ' << e.value << '\n';
  if (!out) fail(ErrorKind::io, "failed to write SDPA data");
}

namespace {

// Header lines may carry trailing "= name" labels and the separators , ( ) { }.
std::istringstream header_line(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '*' || line[0] == '"') continue;
    if (auto eq = line.find('='); eq != std::string::npos) line.resize(eq);
    for (char& ch : line)
      if (ch == ',' || ch == '(' || ch == ')' || ch == '{' || ch == '}') ch = ' ';
    return std::istringstream(line);
  }
  fail(ErrorKind::parse, "unexpected end of SDPA data");
}

}  // namespace

SdpaProblem read_sdpa(std::istream& in) {
  SdpaProblem p;
  int n_blocks = 0;
  if (!(header_line(in) >> p.n_vars) || p.n_vars < 1) fail(ErrorKind::parse, "bad mDIM");
  if (!(header_line(in) >> n_blocks) || n_blocks < 1) fail(ErrorKind::parse, "bad nBLOCK");
  {
    auto line = header_line(in);
    p.block_sizes.resize(n_blocks);
    for (auto& s : p.block_sizes)
      if (!(line >> s) || s == 0) fail(ErrorKind::parse, "bad block structure");
  }
  {
    p.c.resize(p.n_vars);
    int read = 0;
    while (read < p.n_vars) {
      auto line = header_line(in);
      double v;
      while (read < p.n_vars && line >> v) p.c[read++] = v;
    }
  }
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    SdpaEntry e;
    if (!(fields >> e.matrix >> e.block >> e.i >> e.j >> e.value))
      fail(ErrorKind::parse, "bad entry line " + std::to_string(line_no) + ": " + line);
    if (e.matrix < 0 || e.matrix > p.n_vars || e.block < 1 || e.block > n_blocks)
      fail(ErrorKind::parse, "entry out of range on line " + std::to_string(line_no));
    const int size = std::abs(p.block_sizes[e.block - 1]);
    if (e.i < 1 || e.j < 1 || e.i > size || e.j > size)
      fail(ErrorKind::parse, "entry index out of range on line " + std::to_string(line_no));
    if (e.i > e.j) std::swap(e.i, e.j);
    if (p.block_sizes[e.block - 1] < 0 && e.i != e.j)
      fail(ErrorKind::parse, "off-diagonal entry in a diagonal block");
    p.entries.push_back(e);
  }
  return p;
}

bool same_problem(const SdpaProblem& a, const SdpaProblem& b, double tol) {
  if (a.n_vars != b.n_vars || a.block_sizes != b.block_sizes) return false;
  if ((a.c - b.c).cwiseAbs().maxCoeff() > tol) return false;
  if (a.entries.size() != b.entries.size()) return false;
  auto key = [](const SdpaEntry& e) { return std::tie(e.matrix, e.block, e.i, e.j); };
  auto sorted = [&](std::vector<SdpaEntry> v) {
    std::sort(v.begin(), v.end(), [&](const auto& x, const auto& y) { return key(x) < key(y); });
    return v;
  };
  const auto ea = sorted(a.entries), eb = sorted(b.entries);
  for (std::size_t k = 0; k < ea.size(); ++k) {
    if (key(ea[k]) != key(eb[k])) return false;
    if (std::abs(ea[k].value - eb[k].value) > tol) return false;
  }
  return true;
}

namespace {

void add_upper(SdpaProblem& p, int matrix, int block, const Eigen::MatrixXd& m, int offset) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i <= j; ++i)
      if (m(i, j) != 0.0)
        p.entries.push_back({matrix, block, static_cast<int>(i) + offset + 1,
                             static_cast<int>(j) + offset + 1, m(i, j)});
}

void check_inputs(const PathSet& ps, const Eigen::VectorXd& lipschitz) {
  if (ps.paths.empty()) fail(ErrorKind::invalid_size, "empty path set");
  if (lipschitz.size() != ps.n_nodes)
    fail(ErrorKind::dimension_mismatch, "one Lipschitz constant per node required");
}

Eigen::MatrixXd path_matrix(const PathSet& ps, const Eigen::VectorXd& lipschitz, std::size_t k) {
  std::vector<double> w(ps.size(), 0.0);
  w[k] = 1.0;
  return assemble_g_tau_matrix(lipschitz, ps, w);
}

std::string path_label(const std::vector<int>& path) {
  std::string s;
  for (std::size_t r = 0; r < path.size(); ++r) s += (r ? "-" : "") + std::to_string(path[r]);
  return s;
}

}  // namespace

SdpaProblem build_rate_bound_sdp(const PathSet& ps, const Eigen::VectorXd& lipschitz,
                                 const Eigen::VectorXd& radii) {
  check_inputs(ps, lipschitz);
  const int n = ps.n_nodes;
  const int np = static_cast<int>(ps.size());
  if (radii.size() != n) fail(ErrorKind::dimension_mismatch, "one radius per node required");
  if ((radii.array() <= 0.0).any()) fail(ErrorKind::invalid_argument, "radii must be positive");

  SdpaProblem p;
  p.n_vars = np + 1 + n;
  const int lp = np + 1 + n + 2;
  p.block_sizes = {2 * n, -lp};
  p.c = Eigen::VectorXd::Zero(p.n_vars);
  p.c.tail(n) = radii.cwiseAbs2();
  p.comments = {"rate-bound design: y = (p[" + std::to_string(np) + "], zeta, nu[" +
                std::to_string(n) + "]); see the .map.txt sidecar"};

  for (int i = 0; i < n; ++i) p.entries.push_back({0, 1, i + 1, n + i + 1, -1.0});
  p.entries.push_back({0, 2, lp - 1, lp - 1, 1.0});
  p.entries.push_back({0, 2, lp, lp, -1.0});

  for (int k = 0; k < np; ++k) {
    add_upper(p, k + 1, 1, path_matrix(ps, lipschitz, k), 0);
    p.entries.push_back({k + 1, 2, k + 1, k + 1, 1.0});
    p.entries.push_back({k + 1, 2, lp - 1, lp - 1, 1.0});
    p.entries.push_back({k + 1, 2, lp, lp, -1.0});
  }
  const int zeta = np + 1;
  add_upper(p, zeta, 1, Eigen::MatrixXd::Ones(n, n), 0);
  p.entries.push_back({zeta, 2, zeta, zeta, 1.0});
  for (int i = 0; i < n; ++i) {
    const int var = np + 2 + i;
    p.entries.push_back({var, 1, n + i + 1, n + i + 1, 1.0});
    p.entries.push_back({var, 2, var, var, 1.0});
  }
  return p;
}

SdpaProblem build_max_lambda2_sdp(const PathSet& ps, const Eigen::VectorXd& lipschitz) {
  check_inputs(ps, lipschitz);
  const int n = ps.n_nodes;
  const int np = static_cast<int>(ps.size());
  SdpaProblem p;
  p.n_vars = np + 1;
  const int lp = np + 2;
  p.block_sizes = {n, -lp};
  p.c = Eigen::VectorXd::Zero(p.n_vars);
  p.c[np] = -1.0;
  p.comments = {"lambda2 design: y = (p[" + std::to_string(np) + "], t); see the .map.txt sidecar"};

  const Eigen::MatrixXd centering =
      Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  add_upper(p, 0, 1, -Eigen::MatrixXd::Constant(n, n, 1.0 / n), 0);
  p.entries.push_back({0, 2, lp - 1, lp - 1, 1.0});
  p.entries.push_back({0, 2, lp, lp, -1.0});
  for (int k = 0; k < np; ++k) {
    add_upper(p, k + 1, 1, path_matrix(ps, lipschitz, k), 0);
    p.entries.push_back({k + 1, 2, k + 1, k + 1, 1.0});
    p.entries.push_back({k + 1, 2, lp - 1, lp - 1, 1.0});
    p.entries.push_back({k + 1, 2, lp, lp, -1.0});
  }
  add_upper(p, np + 1, 1, -centering, 0);
  return p;
}

Eigen::VectorXd rate_bound_heuristic_point(const PathSet& ps, const Eigen::VectorXd& lipschitz,
                                           const std::vector<double>& p) {
  check_inputs(ps, lipschitz);
  if (p.size() != ps.size()) fail(ErrorKind::dimension_mismatch, "one probability per path");
  const int n = ps.n_nodes;
  const int np = static_cast<int>(ps.size());
  const double t = lambda2(make_gtau(assemble_g_tau_matrix(lipschitz, ps, p)));
  if (!(t > 0.0)) fail(ErrorKind::disconnected_support, "lambda2 must be positive");
  Eigen::VectorXd y(np + 1 + n);
  for (int k = 0; k < np; ++k) y[k] = p[k];
  y[np] = t / n;
  y.tail(n).setConstant(1.0 / t);
  return y;
}

namespace {

void write_checked(const SdpaProblem& problem, const std::filesystem::path& out,
                   const std::vector<std::string>& map_lines) {
  {
    std::ofstream file(out);
    if (!file) fail(ErrorKind::io, "cannot open " + out.string());
    write_sdpa(problem, file);
  }
  {
    std::ofstream map(out.string() + ".map.txt");
    if (!map) fail(ErrorKind::io, "cannot open " + out.string() + ".map.txt");
    for (const auto& l : map_lines) map << l << '\n';
    if (!map) fail(ErrorKind::io, "failed to write the variable map");
  }
  std::ifstream back(out);
  if (!back) fail(ErrorKind::io, "cannot reopen " + out.string());
  if (!same_problem(problem, read_sdpa(back)))
    fail(ErrorKind::io, "SDPA file " + out.string() + " does not parse back to the same problem");
}

}  // namespace

void export_sdp(const PathSet& ps, const Eigen::VectorXd& lipschitz, const Eigen::VectorXd& radii,
                const std::filesystem::path& out) {
  const auto problem = build_rate_bound_sdp(ps, lipschitz, radii);
  const int n = ps.n_nodes;
  const int np = static_cast<int>(ps.size());
  std::vector<std::string> map{
      "# SDPA variables are 1-based; minimize sum_i R_i^2 nu_i",
      "# block 1: [[sum_k p_k G_k + zeta e e^T, I], [I, diag(nu)]] >= 0 (size " +
          std::to_string(2 * n) + ")",
      "# block 2: diagonal p >= 0, zeta >= 0, nu >= 0, sum p - 1 >= 0, 1 - sum p >= 0 (size " +
          std::to_string(np + 3 + n) + ")",
      "# variable kind index detail"};
  for (int k = 0; k < np; ++k)
    map.push_back(std::to_string(k + 1) + " p " + std::to_string(k) + " " +
                  path_label(ps.paths[k]));
  map.push_back(std::to_string(np + 1) + " zeta 0 -");
  for (int i = 0; i < n; ++i) {
    std::ostringstream r;
    r << std::setprecision(17) << radii[i];
    map.push_back(std::to_string(np + 2 + i) + " nu " + std::to_string(i) + " R=" + r.str());
  }
  write_checked(problem, out, map);
}

void export_lambda2_sdp(const PathSet& ps, const Eigen::VectorXd& lipschitz,
                        const std::filesystem::path& out) {
  const auto problem = build_max_lambda2_sdp(ps, lipschitz);
  const int np = static_cast<int>(ps.size());
  std::vector<std::string> map{
      "# SDPA variables are 1-based; minimize -t",
      "# block 1: sum_k p_k G_k + e e^T / N - t (I - e e^T / N) >= 0",
      "# block 2: diagonal p >= 0, sum p - 1 >= 0, 1 - sum p >= 0",
      "# variable kind index detail"};
  for (int k = 0; k < np; ++k)
    map.push_back(std::to_string(k + 1) + " p " + std::to_string(k) + " " +
                  path_label(ps.paths[k]));
  map.push_back(std::to_string(np + 1) + " t 0 -");
  write_checked(problem, out, map);
}

}  // namespace rcd
