#ifndef ATTOPT_MISSION_HPP
#define ATTOPT_MISSION_HPP

#include <string>
#include <vector>

#include "attopt/slew_atlas.hpp"
#include "attopt/transcription.hpp"

namespace attopt {

// spherical Earth with uniform rotation
inline constexpr double kEarthRadiusKm = 6378.137;
inline constexpr double kMuEarthKm3S2 = 398600.4418;
inline constexpr double kEarthRotationRadS = 7.2921159e-5;

struct CircularOrbit {
  double altitude_km = 710.0;
  double inclination_deg = 98.5;
  double raan_deg = 0.0;
  double arg_lat_deg = 0.0;  // argument of latitude at epoch
  double epoch_s = 0.0;

  double radius_km() const { return kEarthRadiusKm + altitude_km; }
  double period_s() const;
};

struct GroundTarget {
  std::string id;
  double lat_deg = 0.0;
  double lon_deg = 0.0;  // normalized to (-180, 180]
  std::string region;
};

struct EciState {
  Vec3 position_km;
  Vec3 velocity_kms;
};

/// Two-body circular motion in ECI.
EciState propagate(const CircularOrbit &orbit, double t_s);

/// Spherical-Earth ECEF position spun by the Earth rotation angle.
Vec3 target_eci(const GroundTarget &target, double t_s);

/**
 * Attitude of the pointing frame w.r.t. ECI: z-axis along the
 * satellite-to-target line, x-axis the velocity component orthogonal to
 * it, y completing the right-hand triad. Throws when the velocity is
 * parallel to the pointing direction.
 */
UnitQuaternion pointing_quaternion(const EciState &sat,
                                   const Vec3 &target_pos_km);

struct AccessWindow {
  double start_s = 0.0;
  double end_s = 0.0;
};

/**
 * Sampled visibility intervals per target: line of sight above the
 * horizon and off-nadir angle within the bound.
 */
std::vector<std::vector<AccessWindow>> access_windows(
    const CircularOrbit &orbit, const std::vector<GroundTarget> &targets,
    double horizon_s, double max_off_nadir_deg, double step_s);

struct ScheduleEntry {
  double t_s = 0.0;
  UnitQuaternion attitude;
  Vec3 body_rate = Vec3::Zero();
  std::string target_id;
};

struct PointingSchedule {
  double sample_s = 1.0;
  std::vector<ScheduleEntry> entries;

  std::string to_json() const;
  static PointingSchedule from_json(const std::string &text);
  void save(const std::string &path) const;
  static PointingSchedule load(const std::string &path);
};

struct SkippedTarget {
  std::string target_id;
  std::string reason;
};

struct SweepScheduleResult {
  PointingSchedule schedule;
  std::vector<SkippedTarget> skipped;
};

/**
 * Greedy whiskbroom schedule: regions ordered by first access, each
 * region finished before the next, rows swept serpentine starting from
 * the first accessible point. Consecutive observations are separated by
 * the atlas slew estimate rounded up to whole samples plus a rest margin
 * covering the zero-rate flanking samples around each observation.
 * Throws when nothing is observable inside the horizon.
 */
SweepScheduleResult build_sweep_schedule(
    const CircularOrbit &orbit, const std::vector<GroundTarget> &targets,
    const SlewAtlas &atlas, double sample_s, double horizon_s,
    double max_off_nadir_deg = 45.0, int rest_margin_samples = 2);

/// Largest shortfall (s) of an entry gap versus its atlas slew estimate;
/// a dynamically plausible schedule audits to <= 0.
double audit_schedule(const PointingSchedule &schedule, const SlewAtlas &atlas);

/// targets CSV: id,lat_deg,lon_deg,region (header row required)
std::vector<GroundTarget> read_targets_csv(const std::string &path);

/**
 * Node-indexed observation set for the fixed-time transcription:
 * scheduled attitudes land on their nearest node, observation nodes and
 * their immediate neighbors carry zero desired body rate.
 */
PointingScheduleSpec schedule_to_spec(const PointingSchedule &schedule,
                                      double t_f, int K, double gamma = 1e5,
                                      double rho = 1.0);

}  // namespace attopt

#endif
