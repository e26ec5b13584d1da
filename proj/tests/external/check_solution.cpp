// Reads a .dat-s problem and the "objective"/"y" lines printed by
// solve_sdpa.py, then checks the LMI at y and the reported objective.
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "rcd/sdpa.hpp"

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: check_solution problem.dat-s solution.txt\n";
    return 2;
  }
  std::ifstream problem_in(argv[1]);
  const auto problem = rcd::read_sdpa(problem_in);

  std::ifstream sol(argv[2]);
  std::string line, tag;
  double objective = 0.0;
  Eigen::VectorXd y(problem.n_vars);
  bool have_y = false;
  while (std::getline(sol, line)) {
    std::istringstream ls(line);
    ls >> tag;
    if (tag == "objective") ls >> objective;
    if (tag == "y") {
      for (int k = 0; k < problem.n_vars; ++k) ls >> y[k];
      have_y = static_cast<bool>(ls);
    }
  }
  if (!have_y) {
    std::cerr << "no solution vector in " << argv[2] << '\n';
    return 1;
  }
  const double min_eig = problem.min_eigenvalue(y);
  const double obj_dev = std::abs(problem.objective(y) - objective);
  std::cout << "min slack eigenvalue " << min_eig << ", objective " << problem.objective(y)
            << '\n';
  return min_eig >= -1e-8 && obj_dev <= 1e-8 * (1.0 + std::abs(objective)) ? 0 : 1;
}
