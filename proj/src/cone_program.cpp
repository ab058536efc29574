#include "attopt/cone_program.hpp"

#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace attopt {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal:
      return "optimal";
    case SolveStatus::infeasible:
      return "infeasible";
    case SolveStatus::unbounded:
      return "unbounded";
    case SolveStatus::max_iters:
      return "max_iters";
    case SolveStatus::numerical:
      return "numerical";
  }
  return "unknown";
}

std::string ConeProgram::to_json() const {
  nlohmann::json j;
  j["n"] = num_vars();
  j["m"] = num_rows();
  j["c"] = std::vector<double>(c.data(), c.data() + c.size());
  j["b"] = std::vector<double>(b.data(), b.data() + b.size());
  std::vector<int> rows, cols;
  std::vector<double> vals;
  for (int k = 0; k < A.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) {
      rows.push_back(static_cast<int>(it.row()));
      cols.push_back(static_cast<int>(it.col()));
      vals.push_back(it.value());
    }
  }
  j["A"] = {{"rows", rows}, {"cols", cols}, {"vals", vals}};
  j["cones"] = {{"zero", cones.zero_dim},
                {"nonneg", cones.nonneg_dim},
                {"soc", cones.soc_dims}};
  return j.dump(2);
}

std::vector<std::string> validate(const ConeProgram &p) {
  std::vector<std::string> issues;

  if (p.A.rows() != p.b.size()) {
    issues.push_back("row count mismatch: A has " +
                     std::to_string(p.A.rows()) + " rows, b has " +
                     std::to_string(p.b.size()));
  }
  if (p.A.cols() != p.c.size()) {
    issues.push_back("column count mismatch: A has " +
                     std::to_string(p.A.cols()) + " cols, c has " +
                     std::to_string(p.c.size()));
  }
  if (p.cones.total() != p.b.size()) {
    issues.push_back("cone dims sum to " + std::to_string(p.cones.total()) +
                     " but the slack dimension is " +
                     std::to_string(p.b.size()));
  }
  if (p.cones.zero_dim < 0 || p.cones.nonneg_dim < 0) {
    issues.push_back("negative cone dimension");
  }
  for (size_t i = 0; i < p.cones.soc_dims.size(); ++i) {
    if (p.cones.soc_dims[i] < 2) {
      issues.push_back("second-order cone " + std::to_string(i) +
                       " has dimension " +
                       std::to_string(p.cones.soc_dims[i]) + " (< 2)");
    }
  }

  // all-zero rows and duplicate-row detection in one transpose pass
  std::vector<std::vector<std::pair<int, double>>> row_entries(
      static_cast<size_t>(p.A.rows()));
  for (int k = 0; k < p.A.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(p.A, k); it; ++it) {
      row_entries[static_cast<size_t>(it.row())].emplace_back(
          static_cast<int>(it.col()), it.value());
    }
  }
  std::map<std::string, int> seen;
  for (int r = 0; r < p.A.rows(); ++r) {
    if (row_entries[static_cast<size_t>(r)].empty()) {
      issues.push_back("row " + std::to_string(r) + " of A is all-zero");
      continue;
    }
    if (r < p.cones.zero_dim) {
      std::ostringstream key;
      for (const auto &[cidx, v] : row_entries[static_cast<size_t>(r)]) {
        key << cidx << ":" << v << ";";
      }
      key << "=" << p.b(r);
      auto [it, inserted] = seen.emplace(key.str(), r);
      if (!inserted) {
        issues.push_back("equality rows " + std::to_string(it->second) +
                         " and " + std::to_string(r) +
                         " are duplicates (rank deficiency)");
      }
    }
  }
  return issues;
}

ConeProgramBuilder::ConeProgramBuilder(int num_vars) : num_vars_(num_vars) {
  c_ = VecX::Zero(num_vars);
}

void ConeProgramBuilder::set_objective(int var, double coeff) {
  c_(var) = coeff;
}

int ConeProgramBuilder::add_row(
    const std::vector<std::pair<int, double>> &entries, double rhs) {
  for (const auto &[col, val] : entries) {
    if (col < 0 || col >= num_vars_) {
      throw std::out_of_range("ConeProgramBuilder: column out of range");
    }
    triplets_.emplace_back(rows_, col, val);
  }
  rhs_.push_back(rhs);
  return rows_++;
}

void ConeProgramBuilder::mark_zero_rows_end() {
  if (stage_ != 0) {
    throw std::logic_error("ConeProgramBuilder: zero rows already closed");
  }
  layout_.zero_dim = rows_;
  stage_ = 1;
}

void ConeProgramBuilder::mark_nonneg_rows_end() {
  if (stage_ != 1) {
    throw std::logic_error("ConeProgramBuilder: orthant stage not active");
  }
  layout_.nonneg_dim = rows_ - layout_.zero_dim;
  stage_ = 2;
}

void ConeProgramBuilder::begin_soc() {
  if (stage_ != 2 || soc_start_ >= 0) {
    throw std::logic_error("ConeProgramBuilder: begin_soc out of order");
  }
  soc_start_ = rows_;
}

void ConeProgramBuilder::end_soc() {
  if (soc_start_ < 0) {
    throw std::logic_error("ConeProgramBuilder: end_soc without begin_soc");
  }
  layout_.soc_dims.push_back(rows_ - soc_start_);
  soc_start_ = -1;
}

ConeProgram ConeProgramBuilder::build() {
  if (stage_ == 0) mark_zero_rows_end();
  if (stage_ == 1) mark_nonneg_rows_end();
  if (soc_start_ >= 0) {
    throw std::logic_error("ConeProgramBuilder: unterminated SOC block");
  }
  ConeProgram p;
  p.c = c_;
  p.b = Eigen::Map<VecX>(rhs_.data(), static_cast<int>(rhs_.size()));
  p.A.resize(rows_, num_vars_);
  p.A.setFromTriplets(triplets_.begin(), triplets_.end());
  p.A.makeCompressed();
  p.cones = layout_;
  return p;
}

}  // namespace attopt
