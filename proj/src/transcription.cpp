#include "attopt/transcription.hpp"

#include <cmath>
#include <stdexcept>

namespace attopt {

ScalingMap ScalingMap::from_params(const SatelliteParams &p,
                                   double t_reference) {
  ScalingMap m;
  // body-rate scale: full rotor momentum driven through the strongest
  // torque axis against the smallest inertia
  double row_sum_max = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    row_sum_max = std::max(row_sum_max, p.Ar.row(axis).cwiseAbs().sum());
  }
  Eigen::SelfAdjointEigenSolver<Mat3> es(p.J);
  const double omega_scale =
      row_sum_max * p.r_max / es.eigenvalues().minCoeff();

  m.x_scale.segment<4>(0).setOnes();  // quaternion components are O(1)
  m.x_scale.segment<3>(4).setConstant(omega_scale);
  m.x_scale.segment<4>(7).setConstant(p.r_max);
  m.u_scale.setConstant(p.u_max);
  m.t_scale = std::max(t_reference, 1e-6);
  return m;
}

namespace {

// A stack stores its attitude as a unit quaternion, so quaternion
// components must map through unchanged.
void require_unit_quaternion_scaling(const ScalingMap &m) {
  if ((m.x_scale.head<4>() - Vec4::Ones()).norm() != 0.0 ||
      m.x_offset.head<4>().norm() != 0.0) {
    throw std::invalid_argument(
        "ScalingMap: quaternion components must use unit scale");
  }
}

}  // namespace

DecisionStack ScalingMap::scale(const DecisionStack &stack) const {
  require_unit_quaternion_scaling(*this);
  DecisionStack out = stack;
  for (int k = 0; k < stack.num_nodes(); ++k) {
    const Vec11 xs = scale_state(stack.states[k].to_vector());
    out.states[k].omega = xs.segment<3>(4);
    out.states[k].rotor_momentum = xs.segment<4>(7);
    out.inputs[k] = scale_input(stack.inputs[k]);
  }
  out.t_f = scale_time(stack.t_f);
  return out;
}

DecisionStack ScalingMap::unscale(const DecisionStack &stack) const {
  require_unit_quaternion_scaling(*this);
  DecisionStack out = stack;
  for (int k = 0; k < stack.num_nodes(); ++k) {
    const Vec11 xs = unscale_state(stack.states[k].to_vector());
    out.states[k].omega = xs.segment<3>(4);
    out.states[k].rotor_momentum = xs.segment<4>(7);
    out.inputs[k] = unscale_input(stack.inputs[k]);
  }
  out.t_f = unscale_time(stack.t_f);
  return out;
}

namespace {

// Combined integration state for one FOH interval.
struct FohState {
  Vec11 x;
  Mat11 Psi;  // inverse state transition matrix
  Mat11x4 Bm, Bp;
  Vec11 Sig, e;

  FohState operator+(const FohState &o) const {
    return {x + o.x, Psi + o.Psi, Bm + o.Bm, Bp + o.Bp, Sig + o.Sig, e + o.e};
  }
  FohState operator*(double a) const {
    return {a * x, a * Psi, a * Bm, a * Bp, a * Sig, a * e};
  }
};

FohState foh_derivative(const FohState &y, double lam_minus,
                        const ControlInput &u_k, const ControlInput &u_kp1,
                        double tf, const SatelliteParams &p) {
  const double lam_plus = 1.0 - lam_minus;
  const ControlInput u = lam_minus * u_k + lam_plus * u_kp1;
  const auto jac = detail::jacobians_raw(y.x, u, tf, p);

  FohState d;
  d.x = tf * jac.Sigma;
  d.Psi = -y.Psi * jac.A;
  d.Bm = y.Psi * (lam_minus * jac.B);
  d.Bp = y.Psi * (lam_plus * jac.B);
  d.Sig = y.Psi * jac.Sigma;
  d.e = y.Psi * jac.offset;
  return d;
}

}  // namespace

DiscreteLtvSystem discretize_foh(const DecisionStack &nominal,
                                 const SatelliteParams &p, int substeps) {
  const int K = nominal.num_nodes();
  if (K < 2 || static_cast<int>(nominal.inputs.size()) != K) {
    throw std::invalid_argument("discretize_foh: need K >= 2 nodes");
  }
  if (!(nominal.t_f > 0.0)) {
    throw std::invalid_argument("discretize_foh: t_f must be positive");
  }

  DiscreteLtvSystem sys;
  sys.tau.resize(K);
  for (int k = 0; k < K; ++k) {
    sys.tau[k] = static_cast<double>(k) / (K - 1);
  }
  sys.A.resize(K - 1);
  sys.B_minus.resize(K - 1);
  sys.B_plus.resize(K - 1);
  sys.Sigma.resize(K - 1);
  sys.offset.resize(K - 1);

  const double dtau = 1.0 / (K - 1);
  const double h = dtau / substeps;

  for (int k = 0; k + 1 < K; ++k) {
    FohState y;
    y.x = nominal.states[k].to_vector();
    y.Psi = Mat11::Identity();
    y.Bm.setZero();
    y.Bp.setZero();
    y.Sig.setZero();
    y.e.setZero();

    const ControlInput &u0 = nominal.inputs[k];
    const ControlInput &u1 = nominal.inputs[k + 1];

    for (int s = 0; s < substeps; ++s) {
      const double lam0 = 1.0 - static_cast<double>(s) / substeps;
      const double lam_half = 1.0 - (static_cast<double>(s) + 0.5) / substeps;
      const double lam1 = 1.0 - static_cast<double>(s + 1) / substeps;

      const FohState k1 = foh_derivative(y, lam0, u0, u1, nominal.t_f, p);
      const FohState k2 =
          foh_derivative(y + k1 * (0.5 * h), lam_half, u0, u1, nominal.t_f, p);
      const FohState k3 =
          foh_derivative(y + k2 * (0.5 * h), lam_half, u0, u1, nominal.t_f, p);
      const FohState k4 =
          foh_derivative(y + k3 * h, lam1, u0, u1, nominal.t_f, p);
      y = y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }

    const Mat11 A_k = y.Psi.inverse();
    sys.A[k] = A_k;
    sys.B_minus[k] = A_k * y.Bm;
    sys.B_plus[k] = A_k * y.Bp;
    sys.Sigma[k] = A_k * y.Sig;
    sys.offset[k] = A_k * y.e;

    if (!sys.A[k].allFinite() || !sys.B_minus[k].allFinite() ||
        !sys.B_plus[k].allFinite() || !sys.Sigma[k].allFinite() ||
        !sys.offset[k].allFinite()) {
      throw std::runtime_error(
          "discretize_foh: non-finite discretization at interval " +
          std::to_string(k));
    }
  }
  return sys;
}

PowerEnergyRows convexify_power_energy(const DecisionStack &nominal,
                                       const SatelliteParams &p) {
  PowerEnergyRows rows;
  const int K = nominal.num_nodes();
  constexpr double kDeadZone = 1e-9;

  auto surrogate_sign = [&](double u, double r) {
    const double prod = u * r;
    if (std::abs(prod) < kDeadZone) return 0.0;
    return prod > 0.0 ? 1.0 : -1.0;
  };

  if (p.P_max.has_value()) {
    for (int k = 0; k < K; ++k) {
      LinearPowerRow row;
      row.node = k;
      double pbar = 0.0;
      for (int i = 0; i < 4; ++i) {
        const double ui = nominal.inputs[k](i);
        const double ri = nominal.states[k].rotor_momentum(i);
        const double sgn = surrogate_sign(ui, ri);
        row.du(i) = sgn * ri / p.Jr;
        row.dr(i) = sgn * ui / p.Jr;
        pbar += sgn * ui * ri / p.Jr;
      }
      // gradient terms double-count the bilinear value at the nominal
      row.constant = -pbar;
      rows.power.push_back(row);
    }
  }

  if (p.E_max.has_value()) {
    LinearEnergyRow row;
    row.du.resize(K, Vec4::Zero());
    row.dr.resize(K, Vec4::Zero());
    const double w = nominal.t_f / (K - 1);
    double sum_pbar = 0.0;
    for (int k = 0; k < K; ++k) {
      for (int i = 0; i < 4; ++i) {
        const double ui = nominal.inputs[k](i);
        const double ri = nominal.states[k].rotor_momentum(i);
        const double sgn = surrogate_sign(ui, ri);
        row.du[k](i) = w * sgn * ri / p.Jr;
        row.dr[k](i) = w * sgn * ui / p.Jr;
        sum_pbar += sgn * ui * ri / p.Jr;
      }
    }
    row.dtf = sum_pbar / (K - 1);
    const double ebar = w * sum_pbar;
    row.constant = -2.0 * ebar;  // value(nominal) = ebar
    rows.energy = row;
  }
  return rows;
}

namespace {

// Shared assembly of both transcribed problems. Variable layout:
// [x_k u_k]*K | (t_f) | v+/v- | tr epigraphs | (u epigraphs) |
// (q/w error epigraphs). Row order: dynamics, boundary | t_f floor,
// boxes, v >= 0, error caps, power, energy | SOCs.
struct Assembler {
  const DecisionStack &nominal;
  const DiscreteLtvSystem &ltv;
  const SatelliteParams &p;
  const TranscriptionConfig &cfg;
  const ScalingMap &sc;
  const PointingScheduleSpec *spec = nullptr;  // multi-target only

  TranscriptionMap map;
  int K = 0;

  TranscribedProblem assemble(const Vec11 *x_init, const Vec11 *x_final) {
    K = nominal.num_nodes();
    const bool min_time = (spec == nullptr);
    map.K = K;
    map.has_tf = min_time;

    int n = 15 * K;
    if (min_time) {
      map.tf_index = n;
      n += 1;
    }
    map.v_base = n;
    n += 22 * (K - 1);
    map.tr_base = n;
    n += K;
    if (min_time) {
      map.tr_tf_index = n;
      n += 1;
    }
    if (!min_time) {
      map.u_epi_base = n;
      n += K;
      map.q_epi_index.assign(spec->targets.size(), -1);
      map.w_epi_index.assign(spec->targets.size(), -1);
      for (size_t t = 0; t < spec->targets.size(); ++t) {
        if (spec->targets[t].attitude.has_value()) {
          map.q_epi_index[t] = n++;
        }
        if (spec->targets[t].body_rate.has_value()) {
          map.w_epi_index[t] = n++;
        }
      }
    }
    map.num_vars = n;

    ConeProgramBuilder bld(n);
    set_objective(bld, min_time);
    emit_dynamics_rows(bld, min_time);
    emit_boundary_rows(bld, x_init, x_final);
    bld.mark_zero_rows_end();
    emit_orthant_rows(bld, min_time);
    bld.mark_nonneg_rows_end();
    emit_soc_rows(bld, min_time);

    TranscribedProblem out;
    out.program = bld.build();
    out.map = map;
    return out;
  }

  void set_objective(ConeProgramBuilder &bld, bool min_time) {
    if (min_time) {
      // minimize t_f in seconds: the published penalty weights are
      // calibrated against physical maneuver time
      bld.set_objective(map.tf_index, sc.t_scale);
    }
    for (int k = 0; k + 1 < K; ++k) {
      for (int j = 0; j < 11; ++j) {
        bld.set_objective(map.vp_offset(k) + j, cfg.w_vc);
        bld.set_objective(map.vm_offset(k) + j, cfg.w_vc);
      }
    }
    for (int k = 0; k < K; ++k) {
      bld.set_objective(map.tr_index(k), 1.0);
    }
    if (min_time) {
      bld.set_objective(map.tr_tf_index, 1.0);
    }
    if (!min_time) {
      // control-effort integral in normalized time
      for (int k = 0; k < K; ++k) {
        bld.set_objective(map.u_epi_base + k, spec->rho / (K - 1));
      }
      for (size_t t = 0; t < spec->targets.size(); ++t) {
        if (map.q_epi_index[t] >= 0 && !spec->eps_q.has_value()) {
          bld.set_objective(map.q_epi_index[t], 1.0);
        }
        if (map.w_epi_index[t] >= 0 && !spec->eps_omega.has_value()) {
          bld.set_objective(map.w_epi_index[t], spec->gamma);
        }
      }
    }
  }

  void emit_dynamics_rows(ConeProgramBuilder &bld, bool min_time) {
    const Vec11 &Sx = sc.x_scale;
    const Vec11 &ox = sc.x_offset;
    const Vec4 &Su = sc.u_scale;
    const Vec4 &ou = sc.u_offset;

    for (int k = 0; k + 1 < K; ++k) {
      const Mat11 &A = ltv.A[k];
      const Mat11x4 &Bm = ltv.B_minus[k];
      const Mat11x4 &Bp = ltv.B_plus[k];
      const Vec11 &Sig = ltv.Sigma[k];
      const Vec11 &e = ltv.offset[k];

      for (int j = 0; j < 11; ++j) {
        std::vector<std::pair<int, double>> entries;
        entries.reserve(32);
        for (int c = 0; c < 11; ++c) {
          const double v = A(j, c) * Sx(c);
          if (v != 0.0) entries.push_back({map.x_offset(k) + c, v / Sx(j)});
        }
        for (int c = 0; c < 4; ++c) {
          const double vm = Bm(j, c) * Su(c);
          if (vm != 0.0) entries.push_back({map.u_offset(k) + c, vm / Sx(j)});
          const double vp = Bp(j, c) * Su(c);
          if (vp != 0.0) {
            entries.push_back({map.u_offset(k + 1) + c, vp / Sx(j)});
          }
        }
        entries.push_back({map.x_offset(k + 1) + j, -1.0});
        entries.push_back({map.vp_offset(k) + j, 1.0});
        entries.push_back({map.vm_offset(k) + j, -1.0});

        // constant part: scaling offsets plus e_k; the Sigma term joins
        // it when t_f is a fixed parameter
        double rhs = e(j);
        rhs += A.row(j).dot(ox) + (Bm.row(j) + Bp.row(j)).dot(ou);
        rhs -= ox(j);
        if (min_time) {
          entries.push_back({map.tf_index, Sig(j) * sc.t_scale / Sx(j)});
          rhs += Sig(j) * sc.t_offset;
        } else {
          rhs += Sig(j) * spec->t_f;
        }
        bld.add_row(entries, -rhs / Sx(j));
      }
    }
  }

  void emit_boundary_rows(ConeProgramBuilder &bld, const Vec11 *x_init,
                          const Vec11 *x_final) {
    if (x_init != nullptr) {
      const Vec11 xs = sc.scale_state(*x_init);
      for (int j = 0; j < 11; ++j) {
        bld.add_row({{map.x_offset(0) + j, 1.0}}, xs(j));
      }
    }
    if (x_final != nullptr) {
      const Vec11 xs = sc.scale_state(*x_final);
      for (int j = 0; j < 11; ++j) {
        bld.add_row({{map.x_offset(K - 1) + j, 1.0}}, xs(j));
      }
    }
  }

  void emit_orthant_rows(ConeProgramBuilder &bld, bool min_time) {
    const Vec11 &Sx = sc.x_scale;
    const Vec11 &ox = sc.x_offset;
    const Vec4 &Su = sc.u_scale;
    const Vec4 &ou = sc.u_offset;

    if (min_time) {
      bld.add_row({{map.tf_index, -sc.t_scale}}, sc.t_offset - cfg.t_min_floor);
    }

    for (int k = 0; k < K; ++k) {
      for (int i = 0; i < 4; ++i) {  // |r_i| <= r_max
        const int col = map.x_offset(k) + 7 + i;
        bld.add_row({{col, Sx(7 + i)}}, p.r_max - ox(7 + i));
        bld.add_row({{col, -Sx(7 + i)}}, p.r_max + ox(7 + i));
      }
      for (int i = 0; i < 4; ++i) {  // |u_i| <= u_max
        const int col = map.u_offset(k) + i;
        bld.add_row({{col, Su(i)}}, p.u_max - ou(i));
        bld.add_row({{col, -Su(i)}}, p.u_max + ou(i));
      }
      if (cfg.omega_max.has_value()) {
        for (int i = 0; i < 3; ++i) {
          const int col = map.x_offset(k) + 4 + i;
          bld.add_row({{col, Sx(4 + i)}}, *cfg.omega_max - ox(4 + i));
          bld.add_row({{col, -Sx(4 + i)}}, *cfg.omega_max + ox(4 + i));
        }
      }
    }

    for (int k = 0; k + 1 < K; ++k) {
      for (int j = 0; j < 11; ++j) {
        bld.add_row({{map.vp_offset(k) + j, -1.0}}, 0.0);
      }
      for (int j = 0; j < 11; ++j) {
        bld.add_row({{map.vm_offset(k) + j, -1.0}}, 0.0);
      }
    }

    if (!min_time) {
      for (size_t t = 0; t < spec->targets.size(); ++t) {
        if (map.q_epi_index[t] >= 0 && spec->eps_q.has_value() &&
            std::isfinite(*spec->eps_q)) {
          bld.add_row({{map.q_epi_index[t], 1.0}}, *spec->eps_q);
        }
        if (map.w_epi_index[t] >= 0 && spec->eps_omega.has_value() &&
            std::isfinite(*spec->eps_omega)) {
          bld.add_row({{map.w_epi_index[t], 1.0}}, *spec->eps_omega);
        }
      }
    }

    const PowerEnergyRows pe = convexify_power_energy(nominal, p);
    for (const LinearPowerRow &row : pe.power) {
      std::vector<std::pair<int, double>> entries;
      double rhs = *p.P_max - row.constant;
      for (int i = 0; i < 4; ++i) {
        if (row.du(i) != 0.0) {
          entries.push_back({map.u_offset(row.node) + i, row.du(i) * Su(i)});
          rhs -= row.du(i) * ou(i);
        }
        if (row.dr(i) != 0.0) {
          entries.push_back(
              {map.x_offset(row.node) + 7 + i, row.dr(i) * Sx(7 + i)});
          rhs -= row.dr(i) * ox(7 + i);
        }
      }
      if (entries.empty()) {
        continue;  // zero gradient: row is vacuous at this nominal
      }
      bld.add_row(entries, rhs);
    }
    if (pe.energy.has_value()) {
      const LinearEnergyRow &row = *pe.energy;
      std::vector<std::pair<int, double>> entries;
      double rhs = *p.E_max - row.constant;
      for (int k = 0; k < K; ++k) {
        for (int i = 0; i < 4; ++i) {
          if (row.du[k](i) != 0.0) {
            entries.push_back({map.u_offset(k) + i, row.du[k](i) * Su(i)});
            rhs -= row.du[k](i) * ou(i);
          }
          if (row.dr[k](i) != 0.0) {
            entries.push_back(
                {map.x_offset(k) + 7 + i, row.dr[k](i) * Sx(7 + i)});
            rhs -= row.dr[k](i) * ox(7 + i);
          }
        }
      }
      if (min_time) {
        entries.push_back({map.tf_index, row.dtf * sc.t_scale});
        rhs -= row.dtf * sc.t_offset;
      } else {
        rhs -= row.dtf * spec->t_f;
      }
      if (!entries.empty()) {
        bld.add_row(entries, rhs);
      }
    }
  }

  void emit_soc_rows(ConeProgramBuilder &bld, bool min_time) {
    const DecisionStack nominal_scaled = sc.scale(nominal);

    // per-coordinate trust-region weights on the scaled variables;
    // physical mode folds the scale back in so the penalty reads
    // w_tr * (z_phys - zbar_phys)
    Vec11 wx = Vec11::Constant(cfg.w_tr);
    Vec4 wu = Vec4::Constant(cfg.w_tr);
    double wt = cfg.w_tr;
    if (cfg.tr_physical_units) {
      wx = cfg.w_tr * sc.x_scale;
      wu = cfg.w_tr * sc.u_scale;
      wt = cfg.w_tr * sc.t_scale;
    }

    for (int k = 0; k < K; ++k) {
      bld.begin_soc();
      bld.add_row({{map.tr_index(k), -1.0}}, 0.0);
      const Vec11 xbar = nominal_scaled.states[k].to_vector();
      for (int j = 0; j < 11; ++j) {
        bld.add_row({{map.x_offset(k) + j, -wx(j)}}, -wx(j) * xbar(j));
      }
      const Vec4 ubar = nominal_scaled.inputs[k];
      for (int j = 0; j < 4; ++j) {
        bld.add_row({{map.u_offset(k) + j, -wu(j)}}, -wu(j) * ubar(j));
      }
      bld.end_soc();
    }
    if (min_time) {
      // final time enters the trust region once, not per node
      bld.begin_soc();
      bld.add_row({{map.tr_tf_index, -1.0}}, 0.0);
      bld.add_row({{map.tf_index, -wt}}, -wt * nominal_scaled.t_f);
      bld.end_soc();
    }

    if (min_time) return;

    const Vec11 &Sx = sc.x_scale;
    const Vec11 &ox = sc.x_offset;
    const Vec4 &Su = sc.u_scale;
    const Vec4 &ou = sc.u_offset;

    // rho ||u_k||_2 epigraphs, physical units
    for (int k = 0; k < K; ++k) {
      bld.begin_soc();
      bld.add_row({{map.u_epi_base + k, -1.0}}, 0.0);
      for (int i = 0; i < 4; ++i) {
        bld.add_row({{map.u_offset(k) + i, -Su(i)}}, ou(i));
      }
      bld.end_soc();
    }

    for (size_t t = 0; t < spec->targets.size(); ++t) {
      const NodeTarget &tgt = spec->targets[t];
      if (tgt.node < 0 || tgt.node >= K) {
        throw std::invalid_argument("assemble_multi_target: node " +
                                    std::to_string(tgt.node) +
                                    " outside the grid");
      }
      if (map.q_epi_index[t] >= 0) {
        // || E(qbar) q - qI ||: affine in q, exactly convex
        const Mat4 E = error_quaternion_matrix(*tgt.attitude);
        bld.begin_soc();
        bld.add_row({{map.q_epi_index[t], -1.0}}, 0.0);
        for (int j = 0; j < 4; ++j) {
          std::vector<std::pair<int, double>> entries;
          double rhs = (j == 3) ? -1.0 : 0.0;  // minus identity quaternion
          for (int c = 0; c < 4; ++c) {
            entries.push_back({map.x_offset(tgt.node) + c, -E(j, c) * Sx(c)});
            rhs += E(j, c) * ox(c);
          }
          bld.add_row(entries, rhs);
        }
        bld.end_soc();
      }
      if (map.w_epi_index[t] >= 0) {
        bld.begin_soc();
        bld.add_row({{map.w_epi_index[t], -1.0}}, 0.0);
        for (int i = 0; i < 3; ++i) {
          bld.add_row({{map.x_offset(tgt.node) + 4 + i, -Sx(4 + i)}},
                      ox(4 + i) - (*tgt.body_rate)(i));
        }
        bld.end_soc();
      }
    }
  }
};

}  // namespace

TranscribedProblem assemble_min_time(const DecisionStack &nominal,
                                     const DiscreteLtvSystem &ltv,
                                     const MinTimeBoundary &bc,
                                     const SatelliteParams &p,
                                     const TranscriptionConfig &cfg,
                                     const ScalingMap &scaling) {
  if (nominal.num_nodes() < 2) {
    throw std::invalid_argument("assemble_min_time: need K >= 2 nodes");
  }
  const GyrostatState xi = GyrostatState::rest(bc.q_initial);
  const GyrostatState xf = GyrostatState::rest(bc.q_final);
  const Vec11 xi_v = xi.to_vector();
  const Vec11 xf_v = xf.to_vector();

  Assembler asmb{nominal, ltv, p, cfg, scaling};
  return asmb.assemble(&xi_v, &xf_v);
}

TranscribedProblem assemble_multi_target(const DecisionStack &nominal,
                                         const DiscreteLtvSystem &ltv,
                                         const PointingScheduleSpec &spec,
                                         const GyrostatState &x_initial,
                                         const SatelliteParams &p,
                                         const TranscriptionConfig &cfg,
                                         const ScalingMap &scaling) {
  if (spec.targets.empty()) {
    throw std::invalid_argument("assemble_multi_target: empty observation set");
  }
  if (!(spec.t_f > 0.0)) {
    throw std::invalid_argument("assemble_multi_target: t_f must be fixed");
  }
  const Vec11 xi_v = x_initial.to_vector();
  Assembler asmb{nominal, ltv, p, cfg, scaling, &spec};
  return asmb.assemble(&xi_v, nullptr);
}

DecisionStack extract_solution(const ConeSolution &sol,
                               const TranscriptionMap &map,
                               const ScalingMap &scaling, double fixed_tf) {
  DecisionStack stack;
  stack.states.resize(map.K);
  stack.inputs.resize(map.K);
  for (int k = 0; k < map.K; ++k) {
    Vec11 xs;
    for (int j = 0; j < 11; ++j) xs(j) = sol.x(map.x_offset(k) + j);
    stack.states[k] = GyrostatState::from_vector(scaling.unscale_state(xs));
    Vec4 us;
    for (int j = 0; j < 4; ++j) us(j) = sol.x(map.u_offset(k) + j);
    stack.inputs[k] = scaling.unscale_input(us);
  }
  stack.t_f =
      map.has_tf ? scaling.unscale_time(sol.x(map.tf_index)) : fixed_tf;
  stack.virtual_controls_scaled.resize(map.K - 1);
  for (int k = 0; k + 1 < map.K; ++k) {
    Vec11 v;
    for (int j = 0; j < 11; ++j) {
      v(j) = sol.x(map.vp_offset(k) + j) - sol.x(map.vm_offset(k) + j);
    }
    stack.virtual_controls_scaled[k] = v;
  }
  return stack;
}

}  // namespace attopt
