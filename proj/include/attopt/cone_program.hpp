#ifndef ATTOPT_CONE_PROGRAM_HPP
#define ATTOPT_CONE_PROGRAM_HPP

#include <Eigen/Sparse>
#include <string>
#include <vector>

#include "attopt/quaternion.hpp"

namespace attopt {

using SparseMatrix = Eigen::SparseMatrix<double>;
using VecX = Eigen::VectorXd;

/**
 * Ordered cone layout of the slack vector. Rows of the constraint matrix
 * are grouped zero cone first, then the nonnegative orthant, then the
 * second-order cones in listed order.
 */
struct ConeLayout {
  int zero_dim = 0;
  int nonneg_dim = 0;
  std::vector<int> soc_dims;

  int total() const {
    int t = zero_dim + nonneg_dim;
    for (int d : soc_dims) t += d;
    return t;
  }
};

/**
 * Canonical conic program
 *
 *   minimize    c' x
 *   subject to  A x + s = b,  s in {0}^z x R+^l x SOC(q_1) x ... x SOC(q_N)
 *
 * The zero cone carries the equality constraints.
 */
struct ConeProgram {
  VecX c;
  SparseMatrix A;
  VecX b;
  ConeLayout cones;

  int num_vars() const { return static_cast<int>(c.size()); }
  int num_rows() const { return static_cast<int>(b.size()); }

  /// Debug dump for cross-checking against external solvers.
  std::string to_json() const;
};

enum class SolveStatus {
  optimal,
  infeasible,   // primal infeasible (certificate found)
  unbounded,    // dual infeasible
  max_iters,
  numerical,
};

std::string to_string(SolveStatus s);

struct ConeSolution {
  VecX x;  // primal
  VecX y;  // dual multipliers, one per row
  VecX s;  // slacks, one per row
  SolveStatus status = SolveStatus::numerical;
  double objective = 0.0;
  // Complementarity gap of the internally cost-normalized problem;
  // status == optimal implies gap <= gap_tol and residuals <= feas_tol.
  double gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
};

/**
 * Cheap structural diagnostics: dimension mismatches, empty or
 * undersized cones, all-zero rows, duplicated-row rank warnings.
 * Returns an empty list for a well-formed program.
 */
std::vector<std::string> validate(const ConeProgram &p);

/// Incremental triplet-based builder; keeps assembly deterministic.
class ConeProgramBuilder {
 public:
  explicit ConeProgramBuilder(int num_vars);

  void set_objective(int var, double coeff);

  // Rows are appended in call order; the cone layout is derived from the
  // order in which the begin_* markers are invoked (zero rows first, then
  // orthant, then SOCs; enforced at build()).
  int add_row(const std::vector<std::pair<int, double>> &entries, double rhs);

  void mark_zero_rows_end();
  void mark_nonneg_rows_end();
  void begin_soc();
  void end_soc();

  ConeProgram build();

 private:
  int num_vars_;
  VecX c_;
  std::vector<Eigen::Triplet<double>> triplets_;
  std::vector<double> rhs_;
  ConeLayout layout_;
  int rows_ = 0;
  int stage_ = 0;  // 0 zero, 1 nonneg, 2 socs
  int soc_start_ = -1;
};

}  // namespace attopt

#endif
