#pragma once

#include <functional>
#include <vector>

namespace conveyor {

// Shared bookkeeping for the local searches: counts evaluations against a
// budget and records the best point seen.
struct SearchState {
  std::function<double(const std::vector<double>&)> f;  // minimized
  int max_evals = 0;
  int evals = 0;
  double best = 0.0;
  std::vector<double> best_x;
  bool exhausted = false;

  double eval(const std::vector<double>& x);
  bool budget_left() const { return evals < max_evals; }
};

// Quasi-Newton descent (BFGS inverse-Hessian update) with forward-difference
// gradients and backtracking line search. Returns when the improvement stays
// below tol for a few sweeps or the budget runs out.
void bfgs_descend(SearchState& st, std::vector<double> x0, double fd_step,
                  double tol);

// Nelder-Mead simplex polish around x0 with the given initial spread.
void nelder_mead(SearchState& st, std::vector<double> x0, double spread,
                 double tol);

}  // namespace conveyor
