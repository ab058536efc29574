#ifndef ATTOPT_SLEW_ATLAS_HPP
#define ATTOPT_SLEW_ATLAS_HPP

#include <string>
#include <vector>

#include "attopt/scp.hpp"

namespace attopt {

/// Axis-angle grid of rotations to solve the slew campaign over.
struct RotationGrid {
  std::vector<Vec3> axes;
  std::vector<double> angles_deg;  // never zero

  /// 100 equidistributed axes x 88 signed angles (8800 tuples).
  static RotationGrid production_grid();

  /// 12 axes x 12 angles for desk-scale runs.
  static RotationGrid desk_grid();

  /// The 88-angle list: +-{1..10} deg in 1-deg steps, +-{15..180} in 5s.
  static std::vector<double> production_angles();
};

struct AtlasEntry {
  int axis_idx = 0;
  double angle_deg = 0.0;
  double t_min_s = 0.0;
  double energy_j = 0.0;
  bool converged = false;
  int iters = 0;
};

/// Per-axis least-squares models T = a theta^b and E = c theta + d
/// (theta in radians, valid for |theta| > 1 deg).
struct AxisFit {
  int axis_idx = 0;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double r2_time = 0.0;
  double r2_energy = 0.0;
};

struct SlewAtlas {
  uint64_t params_hash = 0;
  std::vector<Vec3> axes;
  std::vector<double> angles_deg;
  std::vector<AtlasEntry> entries;
  std::vector<AxisFit> fits;

  std::string to_json() const;
  static SlewAtlas from_json(const std::string &text);
  void save(const std::string &path) const;
  static SlewAtlas load(const std::string &path);
};

/**
 * Solves one minimum-time instance per (axis, angle) tuple, identity
 * attitude to the axis-angle rotation, rest to rest. Instances run
 * independently across `jobs` threads; failures are recorded in the
 * entries rather than dropped.
 */
SlewAtlas build_atlas(const RotationGrid &grid, const SatelliteParams &p,
                      const ScpConfig &cfg, int jobs = 1);

/// Least-squares fits per axis over converged entries with |theta| > 1
/// deg. Throws when an axis has fewer than 4 usable points.
std::vector<AxisFit> fit_models(const SlewAtlas &atlas);

struct SlewQueryResult {
  double min_time_s = 0.0;
  double energy_j = 0.0;
};

/**
 * Minimum time / energy estimate for the relative rotation from one
 * attitude to another: nearest tabulated axis by great-circle distance,
 * linear interpolation between bracketing angles, per-axis fit outside
 * the tabulated range. Exact at grid knots.
 */
SlewQueryResult query_atlas(const SlewAtlas &atlas, const UnitQuaternion &from,
                            const UnitQuaternion &to);

struct MinTimeOracle {
  double time_s = 0.0;
  bool momentum_saturated = false;  // half-maneuver exceeds r_max/u_max
};

/**
 * Rest-to-rest double-integrator time 2 sqrt(theta J_axis / tau_axis)
 * about a principal axis (0 = x, 1 = y, 2 = z) with all four rotors
 * saturating. Test oracle; flags when the unsaturated-momentum
 * assumption breaks.
 */
MinTimeOracle analytic_min_time_oracle(const SatelliteParams &p, int axis,
                                       double theta_rad);

}  // namespace attopt

#endif
