#include "attopt/socp_solver.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <vector>

namespace attopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct SocBlock {
  int start = 0;  // offset within the cone part
  int dim = 0;
  double eta_sq = 1.0;
  VecX wbar;  // normalized NT point, wbar(0)^2 - ||tail||^2 = 1
};

// Stable roots of a*x^2 + b*x + c = 0; returns the smallest positive
// root, or +inf when none exists.
double smallest_positive_root(double a, double b, double c) {
  if (std::abs(a) < 1e-300) {
    if (std::abs(b) < 1e-300) return kInf;
    const double r = -c / b;
    return r > 0.0 ? r : kInf;
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return kInf;
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
  double r1 = q / a;
  double r2 = (std::abs(q) > 1e-300) ? c / q : kInf;
  if (r1 > r2) std::swap(r1, r2);
  if (r1 > 0.0) return r1;
  if (r2 > 0.0) return r2;
  return kInf;
}

class Ipm {
 public:
  Ipm(const ConeProgram &prog, const SolverSettings &st) : st_(st) {
    n_ = prog.num_vars();
    p_ = prog.cones.zero_dim;
    m_ = prog.num_rows() - p_;
    n_lc_ = prog.cones.nonneg_dim;

    int off = n_lc_;
    for (int d : prog.cones.soc_dims) {
      SocBlock blk;
      blk.start = off;
      blk.dim = d;
      blk.wbar = VecX::Zero(d);
      socs_.push_back(blk);
      off += d;
    }
    if (off != m_) {
      throw std::invalid_argument("solver: cone dims do not match rows");
    }

    // Split rows into the equality part and the cone part.
    std::vector<Eigen::Triplet<double>> ta, tg;
    for (int k = 0; k < prog.A.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(prog.A, k); it; ++it) {
        if (it.row() < p_) {
          ta.emplace_back(static_cast<int>(it.row()),
                          static_cast<int>(it.col()), it.value());
        } else {
          tg.emplace_back(static_cast<int>(it.row()) - p_,
                          static_cast<int>(it.col()), it.value());
        }
      }
    }
    A_.resize(p_, n_);
    A_.setFromTriplets(ta.begin(), ta.end());
    A_.makeCompressed();
    G_.resize(m_, n_);
    G_.setFromTriplets(tg.begin(), tg.end());
    G_.makeCompressed();
    b_ = prog.b.head(p_);
    h_ = prog.b.tail(m_);
    c_ = prog.c;

    equilibrate();

    // Cost normalization: the central path is then invariant under a
    // rescaled objective, so the argmin does not move with ||c||.
    cost_scale_ = std::max(1e-12, c_.lpNorm<Eigen::Infinity>());
    c_ /= cost_scale_;
    At_ = A_.transpose();
    Gt_ = G_.transpose();
    setup_kkt();
  }

  ConeSolution run() {
    ConeSolution out;
    out.x = VecX::Zero(n_);
    out.y = VecX::Zero(p_ + m_);
    out.s = VecX::Zero(p_ + m_);

    if (m_ == 0) {
      solve_equality_only(out);
      return out;
    }

    if (!initialize()) {
      out.status = SolveStatus::numerical;
      return out;
    }

    SolveStatus status = SolveStatus::max_iters;
    double best_merit = kInf;
    Iterate best = cur_;
    int iter = 0;

    for (iter = 0; iter <= st_.max_iters; ++iter) {
      compute_residuals();
      update_statistics();
      if (st_.verbose) {
        std::printf("%3d  pcost=% .6e dcost=% .6e gap=%.3e pres=%.3e "
                    "dres=%.3e k/t=%.3e\n",
                    iter, info_.pcost, info_.dcost, info_.gap, info_.pres,
                    info_.dres, cur_.kap / cur_.tau);
      }

      if (!std::isfinite(info_.pcost) || !std::isfinite(info_.gap)) {
        status = SolveStatus::numerical;
        break;
      }

      const double merit = std::max({info_.pres, info_.dres,
                                     std::abs(info_.gap)});
      if (merit < best_merit) {
        best_merit = merit;
        best = cur_;
        best_info_ = info_;
      }

      if (check_optimal()) {
        status = SolveStatus::optimal;
        break;
      }
      if (check_primal_infeasible()) {
        status = SolveStatus::infeasible;
        break;
      }
      if (check_dual_infeasible()) {
        status = SolveStatus::unbounded;
        break;
      }
      if (iter == st_.max_iters) {
        status = SolveStatus::max_iters;
        break;
      }

      if (!update_scalings()) {
        cur_ = best;
        compute_residuals();
        update_statistics();
        status = check_optimal() ? SolveStatus::optimal
                                 : SolveStatus::numerical;
        break;
      }
      update_kkt_scalings();
      ldlt_.factorize(K_);
      if (ldlt_.info() != Eigen::Success) {
        status = SolveStatus::numerical;
        break;
      }

      // Direction from the constant right-hand side [-c; b; h].
      kkt_solve(rhs1_, dx1_, dy1_, dz1_);

      // Affine (predictor) direction.
      rhs2_.head(n_) = rx_;
      rhs2_.segment(n_, p_) = -ry_;
      rhs2_.tail(m_) = cur_.s - rz_;
      kkt_solve(rhs2_, dx2_, dy2_, dz2_);

      const double dtau_denom =
          cur_.kap / cur_.tau - c_.dot(dx1_) - b_.dot(dy1_) - h_.dot(dz1_);
      const double dtau_aff =
          (rt_ - cur_.kap + c_.dot(dx2_) + b_.dot(dy2_) + h_.dot(dz2_)) /
          dtau_denom;
      dz2_ += dtau_aff * dz1_;
      scale(dz2_, w_dz_);           // W * dz_aff
      ds_by_w_ = -w_dz_ - lambda_;  // W^-T ds_aff
      const double dkap_aff = -cur_.kap - cur_.kap / cur_.tau * dtau_aff;

      scale(ds_by_w_, ds_);  // unscaled ds_aff
      const double alpha_aff = std::min(
          1.0, step_to_boundary(cur_.s, ds_, cur_.z, dz2_, cur_.tau, dtau_aff,
                                cur_.kap, dkap_aff));

      const double sigma =
          std::clamp(std::pow(1.0 - alpha_aff, 3.0), st_.sigma_min,
                     st_.sigma_max);
      const double sigma_mu = sigma * info_.mu;

      // Combined (corrector) right-hand side.
      conic_product(lambda_, lambda_, ds1_);
      conic_product(ds_by_w_, w_dz_, ds2_);
      ds1_ += ds2_;
      ds1_.head(n_lc_).array() -= sigma_mu;
      for (const SocBlock &blk : socs_) {
        ds1_(blk.start) -= sigma_mu;
      }
      conic_division(lambda_, ds1_, ds_by_w_);  // lambda \ ds
      scale(ds_by_w_, ds2_);                    // W (lambda \ ds)

      const double one_minus_sigma = 1.0 - sigma;
      rhs2_.head(n_) = one_minus_sigma * rx_;
      rhs2_.segment(n_, p_) = -one_minus_sigma * ry_;
      rhs2_.tail(m_) = -one_minus_sigma * rz_ + ds2_;
      kkt_solve(rhs2_, dx2_, dy2_, dz2_);

      const double bkap =
          cur_.kap * cur_.tau + dkap_aff * dtau_aff - sigma_mu;
      const double dtau = (one_minus_sigma * rt_ - bkap / cur_.tau +
                           c_.dot(dx2_) + b_.dot(dy2_) + h_.dot(dz2_)) /
                          dtau_denom;
      dx2_ += dtau * dx1_;
      dy2_ += dtau * dy1_;
      dz2_ += dtau * dz1_;
      scale(dz2_, w_dz_);
      ds_by_w_ = -(ds_by_w_ + w_dz_);
      scale(ds_by_w_, ds_);
      const double dkap = -(bkap + cur_.kap * dtau) / cur_.tau;

      const double alpha =
          st_.step_back * step_to_boundary(cur_.s, ds_, cur_.z, dz2_,
                                           cur_.tau, dtau, cur_.kap, dkap);
      const double step = std::min(1.0, alpha);
      if (step < 1e-10) {
        cur_ = best;
        compute_residuals();
        update_statistics();
        status = check_optimal() ? SolveStatus::optimal
                                 : SolveStatus::numerical;
        break;
      }

      cur_.x += step * dx2_;
      cur_.y += step * dy2_;
      cur_.z += step * dz2_;
      cur_.s += step * ds_;
      cur_.tau += step * dtau;
      cur_.kap += step * dkap;
    }

    if (status == SolveStatus::max_iters && best_merit < kInf) {
      cur_ = best;
      compute_residuals();
      update_statistics();
      if (check_optimal()) status = SolveStatus::optimal;
    }

    finalize(out, status, iter);
    return out;
  }

 private:
  struct Iterate {
    VecX x, y, z, s;
    double tau = 1.0, kap = 1.0;
  };

  struct Info {
    double pcost = 0, dcost = 0, gap = 0, relgap = kInf;
    double pres = kInf, dres = kInf, mu = 0;
    double pinfres = kInf, dinfres = kInf;
    double cx = 0, by = 0, hz = 0;
  };

  // ---- setup ---------------------------------------------------------

  void equilibrate() {
    x_equil_ = VecX::Ones(n_);
    a_equil_ = VecX::Ones(p_);
    g_equil_ = VecX::Ones(m_);

    auto sqrt_or_one = [](double v) {
      return (std::abs(v) < 1e-6) ? 1.0 : std::sqrt(v);
    };

    for (int sweep = 0; sweep < st_.equil_iters; ++sweep) {
      VecX xt = VecX::Zero(n_), at = VecX::Zero(p_), gt = VecX::Zero(m_);
      for (int k = 0; k < A_.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(A_, k); it; ++it) {
          const double v = std::abs(it.value());
          xt(it.col()) = std::max(xt(it.col()), v);
          at(it.row()) = std::max(at(it.row()), v);
        }
      }
      for (int k = 0; k < G_.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(G_, k); it; ++it) {
          const double v = std::abs(it.value());
          xt(it.col()) = std::max(xt(it.col()), v);
          gt(it.row()) = std::max(gt(it.row()), v);
        }
      }
      // one scaling per cone so the cone geometry is preserved
      for (const SocBlock &blk : socs_) {
        const double total = gt.segment(blk.start, blk.dim).maxCoeff();
        gt.segment(blk.start, blk.dim).setConstant(total);
      }
      xt = xt.unaryExpr(sqrt_or_one);
      at = at.unaryExpr(sqrt_or_one);
      gt = gt.unaryExpr(sqrt_or_one);

      for (int k = 0; k < A_.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(A_, k); it; ++it) {
          it.valueRef() /= at(it.row()) * xt(it.col());
        }
      }
      for (int k = 0; k < G_.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(G_, k); it; ++it) {
          it.valueRef() /= gt(it.row()) * xt(it.col());
        }
      }
      x_equil_ = x_equil_.cwiseProduct(xt);
      a_equil_ = a_equil_.cwiseProduct(at);
      g_equil_ = g_equil_.cwiseProduct(gt);
    }
    c_ = c_.cwiseQuotient(x_equil_);
    b_ = b_.cwiseQuotient(a_equil_);
    h_ = h_.cwiseQuotient(g_equil_);
  }

  void setup_kkt() {
    dim_k_ = n_ + p_ + m_;
    std::vector<Eigen::Triplet<double>> trips;

    for (int i = 0; i < n_; ++i) {
      trips.emplace_back(i, i, st_.static_reg);
    }
    for (int k = 0; k < A_.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(A_, k); it; ++it) {
        trips.emplace_back(n_ + static_cast<int>(it.row()),
                           static_cast<int>(it.col()), it.value());
      }
    }
    for (int i = 0; i < p_; ++i) {
      trips.emplace_back(n_ + i, n_ + i, -st_.static_reg);
    }
    for (int k = 0; k < G_.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(G_, k); it; ++it) {
        trips.emplace_back(n_ + p_ + static_cast<int>(it.row()),
                           static_cast<int>(it.col()), it.value());
      }
    }
    // scaling block -(W^2 + reg I): orthant diagonal, dense SOC blocks
    for (int i = 0; i < n_lc_; ++i) {
      const int d = n_ + p_ + i;
      trips.emplace_back(d, d, -1.0 - st_.static_reg);
    }
    for (const SocBlock &blk : socs_) {
      const int base = n_ + p_ + blk.start;
      for (int i = 0; i < blk.dim; ++i) {
        for (int j = 0; j <= i; ++j) {
          const double v = (i == j) ? -1.0 - st_.static_reg : 0.0;
          trips.emplace_back(base + i, base + j, v);
        }
      }
    }

    K_.resize(dim_k_, dim_k_);
    K_.setFromTriplets(trips.begin(), trips.end());
    K_.makeCompressed();

    // cache pointers into the compressed storage for the scaling block
    for (int i = 0; i < n_lc_; ++i) {
      const int d = n_ + p_ + i;
      v_ptrs_.push_back(&K_.coeffRef(d, d));
    }
    for (const SocBlock &blk : socs_) {
      const int base = n_ + p_ + blk.start;
      for (int i = 0; i < blk.dim; ++i) {
        for (int j = 0; j <= i; ++j) {
          v_ptrs_.push_back(&K_.coeffRef(base + i, base + j));
        }
      }
    }

    ldlt_.analyzePattern(K_);

    rhs1_ = VecX::Zero(dim_k_);
    rhs1_.head(n_) = -c_;
    rhs1_.segment(n_, p_) = b_;
    rhs1_.tail(m_) = h_;
    rhs2_ = VecX::Zero(dim_k_);

    lambda_ = VecX::Zero(m_);
    w_dz_ = VecX::Zero(m_);
    ds_by_w_ = VecX::Zero(m_);
    ds_ = VecX::Zero(m_);
    ds1_ = VecX::Zero(m_);
    ds2_ = VecX::Zero(m_);
    dx1_ = VecX::Zero(n_);
    dy1_ = VecX::Zero(p_);
    dz1_ = VecX::Zero(m_);
    dx2_ = VecX::Zero(n_);
    dy2_ = VecX::Zero(p_);
    dz2_ = VecX::Zero(m_);

    lp_v_ = VecX::Ones(n_lc_);
    lp_w_ = VecX::Ones(n_lc_);

    res_x0_ = std::max(1.0, c_.norm());
    res_y0_ = std::max(1.0, b_.norm());
    res_z0_ = std::max(1.0, h_.norm());
  }

  // ---- initialization -------------------------------------------------

  bool initialize() {
    // identity scaling is already in place from setup_kkt
    ldlt_.factorize(K_);
    if (ldlt_.info() != Eigen::Success) return false;

    VecX r0 = VecX::Zero(dim_k_);
    r0.segment(n_, p_) = b_;
    r0.tail(m_) = h_;
    VecX dx(n_), dy(p_), dz(m_);
    kkt_solve(r0, dx, dy, dz);
    cur_.x = dx;
    bring_to_cone(VecX(-dz), cur_.s);

    VecX r1 = VecX::Zero(dim_k_);
    r1.head(n_) = -c_;
    kkt_solve(r1, dx, dy, dz);
    cur_.y = dy;
    bring_to_cone(dz, cur_.z);

    cur_.tau = 1.0;
    cur_.kap = 1.0;
    return true;
  }

  void bring_to_cone(const VecX &r, VecX &out) {
    double alpha = -1e-3;
    for (int i = 0; i < n_lc_; ++i) {
      if (r(i) <= 0.0 && -r(i) > alpha) alpha = -r(i);
    }
    for (const SocBlock &blk : socs_) {
      const double res =
          r(blk.start) - r.segment(blk.start + 1, blk.dim - 1).norm();
      if (res <= 0.0 && -res > alpha) alpha = -res;
    }
    alpha += 1.0;
    out = r;
    out.head(n_lc_).array() += alpha;
    for (const SocBlock &blk : socs_) {
      out(blk.start) += alpha;
    }
  }

  // ---- residuals and termination --------------------------------------

  void compute_residuals() {
    rx_ = -Gt_ * cur_.z;
    if (p_ > 0) rx_ -= At_ * cur_.y;
    hresx_ = rx_.norm();
    rx_ -= cur_.tau * c_;

    if (p_ > 0) {
      ry_ = A_ * cur_.x;
      hresy_ = ry_.norm();
      ry_ -= cur_.tau * b_;
    } else {
      ry_.resize(0);
      hresy_ = 0.0;
    }

    rz_ = cur_.s + G_ * cur_.x;
    hresz_ = rz_.norm();
    rz_ -= cur_.tau * h_;

    info_.cx = c_.dot(cur_.x);
    info_.by = p_ > 0 ? b_.dot(cur_.y) : 0.0;
    info_.hz = h_.dot(cur_.z);
    rt_ = cur_.kap + info_.cx + info_.by + info_.hz;
  }

  void update_statistics() {
    const double nx = cur_.x.norm(), ny = cur_.y.norm(), nz = cur_.z.norm(),
                 ns = cur_.s.norm();
    info_.gap = cur_.s.dot(cur_.z);
    info_.mu = (info_.gap + cur_.kap * cur_.tau) /
               (n_lc_ + static_cast<int>(socs_.size()) + 1);
    info_.pcost = info_.cx / cur_.tau;
    info_.dcost = -(info_.hz + info_.by) / cur_.tau;
    if (info_.pcost < 0.0) {
      info_.relgap = info_.gap / (-info_.pcost);
    } else if (info_.dcost > 0.0) {
      info_.relgap = info_.gap / info_.dcost;
    } else {
      info_.relgap = kInf;
    }
    const double nry =
        p_ > 0 ? ry_.norm() / std::max(res_y0_ + nx, 1.0) : 0.0;
    const double nrz = rz_.norm() / std::max(res_z0_ + nx + ns, 1.0);
    info_.pres = std::max(nry, nrz) / cur_.tau;
    info_.dres = rx_.norm() / std::max(res_x0_ + ny + nz, 1.0) / cur_.tau;

    info_.pinfres = kInf;
    info_.dinfres = kInf;
    if ((info_.hz + info_.by) / std::max(ny + nz, 1.0) < -st_.rel_gap_tol) {
      info_.pinfres = hresx_ / std::max(ny + nz, 1.0);
    }
    if (info_.cx / std::max(nx, 1.0) < -st_.rel_gap_tol) {
      info_.dinfres = std::max(hresy_ / std::max(nx, 1.0),
                               hresz_ / std::max(nx + ns, 1.0));
    }
  }

  bool check_optimal() const {
    return (-info_.cx > 0.0 || -info_.by - info_.hz >= -st_.gap_tol) &&
           info_.pres < st_.feas_tol && info_.dres < st_.feas_tol &&
           (info_.gap < st_.gap_tol || info_.relgap < st_.rel_gap_tol);
  }

  bool check_primal_infeasible() const {
    return (info_.pinfres < st_.feas_tol && cur_.tau < cur_.kap) ||
           (cur_.tau < st_.feas_tol && cur_.kap < st_.feas_tol &&
            info_.pinfres < st_.feas_tol);
  }

  bool check_dual_infeasible() const {
    return info_.dinfres < st_.feas_tol && cur_.tau < cur_.kap;
  }

  // ---- NT scalings -----------------------------------------------------

  bool update_scalings() {
    for (int i = 0; i < n_lc_; ++i) {
      if (cur_.s(i) <= 0.0 || cur_.z(i) <= 0.0) return false;
    }
    lp_v_ = cur_.s.head(n_lc_).cwiseQuotient(cur_.z.head(n_lc_));
    lp_w_ = lp_v_.cwiseSqrt();

    for (SocBlock &blk : socs_) {
      const auto sseg = cur_.s.segment(blk.start, blk.dim);
      const auto zseg = cur_.z.segment(blk.start, blk.dim);
      const double sres =
          sseg(0) * sseg(0) - sseg.tail(blk.dim - 1).squaredNorm();
      const double zres =
          zseg(0) * zseg(0) - zseg.tail(blk.dim - 1).squaredNorm();
      if (sres <= 0.0 || zres <= 0.0) return false;
      const double snorm = std::sqrt(sres), znorm = std::sqrt(zres);
      const VecX sbar = sseg / snorm;
      const VecX zbar = zseg / znorm;
      blk.eta_sq = snorm / znorm;
      const double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zbar)));
      blk.wbar(0) = (0.5 / gamma) * (sbar(0) + zbar(0));
      blk.wbar.tail(blk.dim - 1) =
          (0.5 / gamma) *
          (sbar.tail(blk.dim - 1) - zbar.tail(blk.dim - 1));
    }
    scale(cur_.z, lambda_);
    return true;
  }

  // out = W * v  (W symmetric positive definite NT scaling)
  void scale(const VecX &v, VecX &out) const {
    out.head(n_lc_) = lp_w_.cwiseProduct(v.head(n_lc_));
    for (const SocBlock &blk : socs_) {
      const auto vseg = v.segment(blk.start, blk.dim);
      const double a = blk.wbar(0);
      const auto q = blk.wbar.tail(blk.dim - 1);
      const double zeta = q.dot(vseg.tail(blk.dim - 1));
      const double eta = std::sqrt(blk.eta_sq);
      out(blk.start) = eta * (a * vseg(0) + zeta);
      out.segment(blk.start + 1, blk.dim - 1) =
          eta * (vseg.tail(blk.dim - 1) + (vseg(0) + zeta / (1.0 + a)) * q);
    }
  }

  // w = u o v (Jordan product per cone)
  void conic_product(const VecX &u, const VecX &v, VecX &w) const {
    w.head(n_lc_) = u.head(n_lc_).cwiseProduct(v.head(n_lc_));
    for (const SocBlock &blk : socs_) {
      const auto useg = u.segment(blk.start, blk.dim);
      const auto vseg = v.segment(blk.start, blk.dim);
      w(blk.start) = useg.dot(vseg);
      w.segment(blk.start + 1, blk.dim - 1) =
          useg(0) * vseg.tail(blk.dim - 1) + vseg(0) * useg.tail(blk.dim - 1);
    }
  }

  // v = u \ w (inverse Jordan product)
  void conic_division(const VecX &u, const VecX &w, VecX &v) const {
    v.head(n_lc_) = w.head(n_lc_).cwiseQuotient(u.head(n_lc_));
    for (const SocBlock &blk : socs_) {
      const auto useg = u.segment(blk.start, blk.dim);
      const auto wseg = w.segment(blk.start, blk.dim);
      const double rho =
          useg(0) * useg(0) - useg.tail(blk.dim - 1).squaredNorm();
      const double zeta = useg.tail(blk.dim - 1).dot(wseg.tail(blk.dim - 1));
      v(blk.start) = (useg(0) * wseg(0) - zeta) / rho;
      v.segment(blk.start + 1, blk.dim - 1) =
          ((zeta / useg(0) - wseg(0)) / rho) * useg.tail(blk.dim - 1) +
          wseg.tail(blk.dim - 1) / useg(0);
    }
  }

  void update_kkt_scalings() {
    size_t ptr = 0;
    for (int i = 0; i < n_lc_; ++i) {
      *v_ptrs_[ptr++] = -lp_v_(i) - st_.static_reg;
    }
    // -(eta^2 (2 wbar wbar' - J) + reg I), lower triangle
    for (const SocBlock &blk : socs_) {
      for (int i = 0; i < blk.dim; ++i) {
        for (int j = 0; j <= i; ++j) {
          double jmat = 0.0;
          if (i == j) jmat = (i == 0) ? 1.0 : -1.0;
          double v =
              -blk.eta_sq * (2.0 * blk.wbar(i) * blk.wbar(j) - jmat);
          if (i == j) v -= st_.static_reg;
          *v_ptrs_[ptr++] = v;
        }
      }
    }
  }

  // y += (W^2) * x restricted to the cone part (for refinement residuals)
  void add_w2_times(const VecX &x, VecX &y) const {
    y.head(n_lc_) += lp_v_.cwiseProduct(x.head(n_lc_));
    for (const SocBlock &blk : socs_) {
      const auto xseg = x.segment(blk.start, blk.dim);
      VecX jx = xseg;
      jx.tail(blk.dim - 1) *= -1.0;
      y.segment(blk.start, blk.dim) +=
          blk.eta_sq * (2.0 * blk.wbar.dot(xseg) * blk.wbar - jx);
    }
  }

  // ---- KKT solve with iterative refinement ----------------------------

  void kkt_solve(const VecX &rhs, VecX &dx, VecX &dy, VecX &dz) {
    VecX sol = ldlt_.solve(rhs);
    const bool identity_scaling = lambda_.isZero(0.0);

    for (int it = 0; it < st_.kkt_refinements; ++it) {
      VecX err(dim_k_);
      const auto sx = sol.head(n_);
      const auto sy = sol.segment(n_, p_);
      const auto sz = sol.tail(m_);

      err.head(n_) = rhs.head(n_) - Gt_ * sz - st_.static_reg * sx;
      if (p_ > 0) err.head(n_) -= At_ * sy;
      err.segment(n_, p_) =
          rhs.segment(n_, p_) - A_ * sx + st_.static_reg * sy;
      err.tail(m_) = rhs.tail(m_) - G_ * sx + st_.static_reg * sz;
      if (identity_scaling) {
        err.tail(m_) += sz;
      } else {
        VecX tmp = VecX::Zero(m_);
        add_w2_times(sz, tmp);
        err.tail(m_) += tmp;
      }

      if (err.lpNorm<Eigen::Infinity>() <
          1e-14 * (1.0 + rhs.lpNorm<Eigen::Infinity>())) {
        break;
      }
      sol += ldlt_.solve(err);
    }

    dx = sol.head(n_);
    dy = sol.segment(n_, p_);
    dz = sol.tail(m_);
  }

  // ---- cone boundary step ----------------------------------------------

  double step_to_boundary(const VecX &s, const VecX &ds, const VecX &z,
                          const VecX &dz, double tau, double dtau, double kap,
                          double dkap) const {
    double alpha = kInf;
    auto take = [&alpha](double a) {
      if (a > 0.0 && a < alpha) alpha = a;
    };

    for (int i = 0; i < n_lc_; ++i) {
      if (ds(i) < 0.0) take(-s(i) / ds(i));
      if (dz(i) < 0.0) take(-z(i) / dz(i));
    }
    for (const SocBlock &blk : socs_) {
      auto soc_alpha = [&](const VecX &v, const VecX &dv) {
        const auto v0 = v(blk.start);
        const auto d0 = dv(blk.start);
        const auto v1 = v.segment(blk.start + 1, blk.dim - 1);
        const auto d1 = dv.segment(blk.start + 1, blk.dim - 1);
        const double a = d0 * d0 - d1.squaredNorm();
        const double b2 = 2.0 * (v0 * d0 - v1.dot(d1));
        const double c = v0 * v0 - v1.squaredNorm();
        take(smallest_positive_root(a, b2, c));
      };
      soc_alpha(s, ds);
      soc_alpha(z, dz);
    }
    if (dtau < 0.0) take(-tau / dtau);
    if (dkap < 0.0) take(-kap / dkap);
    return alpha;
  }

  // ---- equality-only corner case ---------------------------------------

  void solve_equality_only(ConeSolution &out) {
    ldlt_.factorize(K_);
    if (ldlt_.info() != Eigen::Success) {
      out.status = SolveStatus::numerical;
      return;
    }
    VecX rhs = VecX::Zero(dim_k_);
    rhs.head(n_) = -c_;
    rhs.segment(n_, p_) = b_;
    VecX sol = ldlt_.solve(rhs);
    out.x = sol.head(n_).cwiseQuotient(x_equil_);
    out.y.head(p_) = cost_scale_ * sol.segment(n_, p_).cwiseQuotient(a_equil_);
    const double pres = (A_ * sol.head(n_) - b_).norm();
    const double dres = (At_ * sol.segment(n_, p_) + c_).norm();
    out.status = (pres < st_.feas_tol * res_y0_ && dres < st_.feas_tol * 10.0)
                     ? SolveStatus::optimal
                     : SolveStatus::numerical;
    out.objective = cost_scale_ * c_.dot(sol.head(n_));
    out.primal_residual = pres;
    out.dual_residual = dres;
  }

  // ---- wrap-up -----------------------------------------------------------

  void finalize(ConeSolution &out, SolveStatus status, int iters) {
    const double tau = cur_.tau;
    const bool cert = status == SolveStatus::infeasible ||
                      status == SolveStatus::unbounded;
    // Certificates are rays: report them unscaled by tau.
    const double denom = cert ? 1.0 : tau;

    out.x = cur_.x.cwiseQuotient(x_equil_) / denom;
    out.y = VecX::Zero(p_ + m_);
    out.s = VecX::Zero(p_ + m_);
    if (p_ > 0) {
      out.y.head(p_) = cost_scale_ * cur_.y.cwiseQuotient(a_equil_) / denom;
    }
    out.y.tail(m_) = cost_scale_ * cur_.z.cwiseQuotient(g_equil_) / denom;
    out.s.tail(m_) = cur_.s.cwiseProduct(g_equil_) / denom;
    out.status = status;
    out.objective = cost_scale_ * info_.pcost;
    out.gap = info_.gap;
    out.primal_residual = info_.pres;
    out.dual_residual = info_.dres;
    out.iterations = iters;
  }

  SolverSettings st_;
  int n_ = 0, p_ = 0, m_ = 0, n_lc_ = 0, dim_k_ = 0;
  double cost_scale_ = 1.0;
  std::vector<SocBlock> socs_;

  SparseMatrix A_, G_, At_, Gt_;
  VecX b_, h_, c_;
  VecX x_equil_, a_equil_, g_equil_;

  SparseMatrix K_;
  std::vector<double *> v_ptrs_;
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower> ldlt_;

  Iterate cur_;
  Info info_, best_info_;

  VecX lp_v_, lp_w_;  // orthant scaling w^2 and w
  VecX lambda_;
  VecX rx_, ry_, rz_;
  double rt_ = 0, hresx_ = 0, hresy_ = 0, hresz_ = 0;
  double res_x0_ = 1, res_y0_ = 1, res_z0_ = 1;
  VecX rhs1_, rhs2_;
  VecX dx1_, dy1_, dz1_, dx2_, dy2_, dz2_;
  VecX w_dz_, ds_by_w_, ds_, ds1_, ds2_;
};

}  // namespace

ConeSolution solve_cone_program(const ConeProgram &prog,
                                const SolverSettings &settings) {
  if (prog.A.rows() != prog.b.size() || prog.A.cols() != prog.c.size() ||
      prog.cones.total() != prog.b.size()) {
    throw std::invalid_argument(
        "solve_cone_program: inconsistent program dimensions");
  }
  Ipm ipm(prog, settings);
  return ipm.run();
}

}  // namespace attopt
