#ifndef ATTOPT_SOCP_SOLVER_HPP
#define ATTOPT_SOCP_SOLVER_HPP

#include "attopt/cone_program.hpp"

namespace attopt {

struct SolverSettings {
  double gap_tol = 1e-8;   // absolute complementarity gap
  double rel_gap_tol = 1e-8;
  double feas_tol = 1e-8;  // primal/dual residual tolerance
  int max_iters = 100;
  int equil_iters = 3;      // Ruiz equilibration sweeps
  double static_reg = 1e-8; // quasi-definite KKT regularization
  int kkt_refinements = 1;  // iterative refinement steps per solve
  double step_back = 0.99;  // fraction of the distance to the cone boundary
  double sigma_min = 1e-4;
  double sigma_max = 0.9999;
  bool verbose = false;
};

/**
 * Primal-dual interior-point solver for the canonical cone program,
 * using the homogeneous self-dual embedding with Nesterov-Todd scalings
 * on second-order cones, a Mehrotra predictor-corrector step, and a
 * sparse LDL' factorization of the statically regularized KKT system.
 *
 * Deterministic: identical programs produce identical iterate sequences.
 */
ConeSolution solve_cone_program(const ConeProgram &prog,
                                const SolverSettings &settings = {});

}  // namespace attopt

#endif
