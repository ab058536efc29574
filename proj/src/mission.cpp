#include "attopt/mission.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace attopt {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

Mat3 rot_z(double angle) {
  Mat3 m;
  m << std::cos(angle), -std::sin(angle), 0.0,  //
      std::sin(angle), std::cos(angle), 0.0,    //
      0.0, 0.0, 1.0;
  return m;
}

Mat3 rot_x(double angle) {
  Mat3 m;
  m << 1.0, 0.0, 0.0,                           //
      0.0, std::cos(angle), -std::sin(angle),   //
      0.0, std::sin(angle), std::cos(angle);
  return m;
}

}  // namespace

double CircularOrbit::period_s() const {
  const double r = radius_km();
  return 2.0 * std::numbers::pi * std::sqrt(r * r * r / kMuEarthKm3S2);
}

EciState propagate(const CircularOrbit &orbit, double t_s) {
  if (orbit.altitude_km <= 0.0 || orbit.inclination_deg < 0.0 ||
      orbit.inclination_deg > 180.0) {
    throw std::invalid_argument("propagate: invalid orbit");
  }
  const double r = orbit.radius_km();
  const double n = std::sqrt(kMuEarthKm3S2 / (r * r * r));
  const double u = orbit.arg_lat_deg * kDeg + n * (t_s - orbit.epoch_s);
  const Mat3 plane = rot_z(orbit.raan_deg * kDeg) *
                     rot_x(orbit.inclination_deg * kDeg);
  EciState s;
  s.position_km = plane * Vec3(r * std::cos(u), r * std::sin(u), 0.0);
  s.velocity_kms = plane * Vec3(-r * n * std::sin(u), r * n * std::cos(u), 0.0);
  return s;
}

Vec3 target_eci(const GroundTarget &target, double t_s) {
  const double lat = target.lat_deg * kDeg;
  const double lon = target.lon_deg * kDeg;
  const Vec3 ecef(kEarthRadiusKm * std::cos(lat) * std::cos(lon),
                  kEarthRadiusKm * std::cos(lat) * std::sin(lon),
                  kEarthRadiusKm * std::sin(lat));
  return rot_z(kEarthRotationRadS * t_s) * ecef;
}

UnitQuaternion pointing_quaternion(const EciState &sat,
                                   const Vec3 &target_pos_km) {
  const Vec3 line = target_pos_km - sat.position_km;
  if (line.norm() < 1e-9) {
    throw std::invalid_argument(
        "pointing_quaternion: target coincides with the satellite");
  }
  const Vec3 z = line.normalized();
  Vec3 x = sat.velocity_kms - sat.velocity_kms.dot(z) * z;
  if (x.norm() < 1e-9) {
    throw std::invalid_argument(
        "pointing_quaternion: velocity parallel to the pointing vector");
  }
  x.normalize();
  const Vec3 y = z.cross(x);
  Mat3 R;
  R.col(0) = x;
  R.col(1) = y;
  R.col(2) = z;
  return quaternion_from_rotation_matrix(R);
}

std::vector<std::vector<AccessWindow>> access_windows(
    const CircularOrbit &orbit, const std::vector<GroundTarget> &targets,
    double horizon_s, double max_off_nadir_deg, double step_s) {
  if (step_s <= 0.0) {
    throw std::invalid_argument("access_windows: step must be positive");
  }
  const double cos_max = std::cos(max_off_nadir_deg * kDeg);
  std::vector<std::vector<AccessWindow>> windows(targets.size());
  std::vector<bool> open(targets.size(), false);

  for (double t = orbit.epoch_s; t <= orbit.epoch_s + horizon_s;
       t += step_s) {
    const EciState sat = propagate(orbit, t);
    const Vec3 nadir = -sat.position_km.normalized();
    for (size_t i = 0; i < targets.size(); ++i) {
      const Vec3 tp = target_eci(targets[i], t);
      const Vec3 los = tp - sat.position_km;
      // visible above the target's local horizon
      const bool above = (sat.position_km - tp).dot(tp) > 0.0;
      const bool within = los.normalized().dot(nadir) >= cos_max;
      const bool ok = above && within;
      if (ok && !open[i]) {
        windows[i].push_back({t, t});
        open[i] = true;
      } else if (ok && open[i]) {
        windows[i].back().end_s = t;
      } else if (!ok) {
        open[i] = false;
      }
    }
  }
  return windows;
}

std::string PointingSchedule::to_json() const {
  nlohmann::json j;
  j["sample_s"] = sample_s;
  nlohmann::json entries_json = nlohmann::json::array();
  for (const ScheduleEntry &e : entries) {
    entries_json.push_back(
        {{"t_s", e.t_s},
         {"q", {e.attitude.coeffs()(0), e.attitude.coeffs()(1),
                e.attitude.coeffs()(2), e.attitude.coeffs()(3)}},
         {"w", {e.body_rate(0), e.body_rate(1), e.body_rate(2)}},
         {"target_id", e.target_id}});
  }
  j["entries"] = entries_json;
  return j.dump(2);
}

PointingSchedule PointingSchedule::from_json(const std::string &text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  PointingSchedule s;
  s.sample_s = j.at("sample_s").get<double>();
  for (const auto &je : j.at("entries")) {
    ScheduleEntry e;
    e.t_s = je.at("t_s").get<double>();
    const auto &q = je.at("q");
    e.attitude = UnitQuaternion(q.at(0).get<double>(), q.at(1).get<double>(),
                                q.at(2).get<double>(), q.at(3).get<double>());
    const auto &w = je.at("w");
    e.body_rate = Vec3(w.at(0).get<double>(), w.at(1).get<double>(),
                       w.at(2).get<double>());
    e.target_id = je.at("target_id").get<std::string>();
    s.entries.push_back(e);
  }
  return s;
}

void PointingSchedule::save(const std::string &path) const {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("PointingSchedule::save: cannot open " + path);
  }
  out << to_json() << '\n';
}

PointingSchedule PointingSchedule::load(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("PointingSchedule::load: cannot open " + path);
  }
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_json(text);
}

namespace {

struct TargetAccess {
  const GroundTarget *target = nullptr;
  size_t index = 0;
  std::vector<AccessWindow> windows;

  double first_access() const {
    return windows.empty() ? std::numeric_limits<double>::infinity()
                           : windows.front().start_s;
  }
};

// serpentine sweep over latitude rows, starting at the row and end of
// the first accessible target
std::vector<const TargetAccess *> sweep_order(
    std::vector<const TargetAccess *> accessible) {
  const TargetAccess *first = *std::min_element(
      accessible.begin(), accessible.end(),
      [](const TargetAccess *a, const TargetAccess *b) {
        return a->first_access() < b->first_access();
      });

  // cluster rows by latitude
  std::map<long long, std::vector<const TargetAccess *>> rows;
  auto row_key = [](double lat) {
    return static_cast<long long>(std::llround(lat * 1e6));
  };
  for (const TargetAccess *ta : accessible) {
    rows[row_key(ta->target->lat_deg)].push_back(ta);
  }
  for (auto &[key, row] : rows) {
    std::sort(row.begin(), row.end(),
              [](const TargetAccess *a, const TargetAccess *b) {
                return a->target->lon_deg < b->target->lon_deg;
              });
  }

  std::vector<long long> row_keys;
  for (const auto &[key, row] : rows) row_keys.push_back(key);
  const long long start_key = row_key(first->target->lat_deg);
  const auto start_it =
      std::find(row_keys.begin(), row_keys.end(), start_key);
  const size_t start_idx =
      static_cast<size_t>(start_it - row_keys.begin());

  // visit rows monotonically away from the starting row, toward the
  // farther extreme
  std::vector<long long> ordered;
  const bool go_up = start_idx < row_keys.size() - start_idx - 1;
  if (go_up) {
    for (size_t i = start_idx; i < row_keys.size(); ++i)
      ordered.push_back(row_keys[i]);
    for (size_t i = start_idx; i-- > 0;) ordered.push_back(row_keys[i]);
  } else {
    for (size_t i = start_idx + 1; i-- > 0;) ordered.push_back(row_keys[i]);
    for (size_t i = start_idx + 1; i < row_keys.size(); ++i)
      ordered.push_back(row_keys[i]);
  }

  // the first row starts at the first-accessible target's end
  std::vector<const TargetAccess *> result;
  bool reverse = false;
  {
    auto &row0 = rows[ordered.front()];
    const auto pos = std::find(row0.begin(), row0.end(), first);
    reverse = (pos - row0.begin()) >
              static_cast<long>(row0.size()) / 2;
  }
  for (long long key : ordered) {
    auto row = rows[key];
    if (reverse) std::reverse(row.begin(), row.end());
    result.insert(result.end(), row.begin(), row.end());
    reverse = !reverse;  // whiskbroom alternation
  }
  return result;
}

}  // namespace

SweepScheduleResult build_sweep_schedule(
    const CircularOrbit &orbit, const std::vector<GroundTarget> &targets,
    const SlewAtlas &atlas, double sample_s, double horizon_s,
    double max_off_nadir_deg, int rest_margin_samples) {
  if (sample_s <= 0.0) {
    throw std::invalid_argument("build_sweep_schedule: bad sample time");
  }
  const auto windows =
      access_windows(orbit, targets, horizon_s, max_off_nadir_deg, sample_s);

  std::vector<TargetAccess> access(targets.size());
  for (size_t i = 0; i < targets.size(); ++i) {
    access[i] = {&targets[i], i, windows[i]};
  }

  // group by region, order regions by their earliest access
  std::map<std::string, std::vector<const TargetAccess *>> regions;
  for (const TargetAccess &ta : access) {
    if (!ta.windows.empty()) {
      regions[ta.target->region].push_back(&ta);
    }
  }
  if (regions.empty()) {
    throw std::runtime_error(
        "build_sweep_schedule: no observable target in the horizon");
  }
  std::vector<std::pair<double, std::string>> region_order;
  for (const auto &[name, list] : regions) {
    double first = std::numeric_limits<double>::infinity();
    for (const TargetAccess *ta : list) {
      first = std::min(first, ta->first_access());
    }
    region_order.emplace_back(first, name);
  }
  std::sort(region_order.begin(), region_order.end());

  SweepScheduleResult result;
  result.schedule.sample_s = sample_s;

  auto round_up = [&](double t) {
    return std::ceil(t / sample_s - 1e-9) * sample_s;
  };

  bool have_prev = false;
  UnitQuaternion q_prev;
  double t_prev = orbit.epoch_s;

  for (const auto &[first_t, region_name] : region_order) {
    for (const TargetAccess *ta : sweep_order(regions[region_name])) {
      bool placed = false;
      for (const AccessWindow &win : ta->windows) {
        double t_c = round_up(std::max(win.start_s, t_prev));
        // pointing attitude and slew demand interact through the
        // observation epoch; a couple of sweeps settle it
        UnitQuaternion q_c;
        const double margin = rest_margin_samples * sample_s;
        // the pointing attitude drifts with the orbital motion, so the
        // slew demand grows as the candidate epoch slides; iterate until
        // the separation covers the demand at the realized epoch
        for (int pass = 0; pass < 8; ++pass) {
          q_c = pointing_quaternion(propagate(orbit, t_c),
                                    target_eci(*ta->target, t_c));
          if (!have_prev) break;
          const double slew = query_atlas(atlas, q_prev, q_c).min_time_s;
          const double earliest = round_up(
              std::max(win.start_s, t_prev + slew + margin));
          if (earliest <= t_c) break;
          t_c = earliest;
        }
        if (t_c > win.end_s + 1e-9) continue;  // try a later pass
        ScheduleEntry entry;
        entry.t_s = t_c;
        entry.attitude = q_c;
        entry.body_rate = Vec3::Zero();
        entry.target_id = ta->target->id;
        result.schedule.entries.push_back(entry);
        q_prev = q_c;
        t_prev = t_c;
        have_prev = true;
        placed = true;
        break;
      }
      if (!placed) {
        result.skipped.push_back(
            {ta->target->id, "access window shorter than the slew demand"});
      }
    }
  }
  return result;
}

double audit_schedule(const PointingSchedule &schedule,
                      const SlewAtlas &atlas) {
  double worst = 0.0;
  for (size_t i = 1; i < schedule.entries.size(); ++i) {
    const auto &a = schedule.entries[i - 1];
    const auto &b = schedule.entries[i];
    const double needed =
        query_atlas(atlas, a.attitude, b.attitude).min_time_s;
    worst = std::max(worst, needed - (b.t_s - a.t_s));
  }
  return worst;
}

std::vector<GroundTarget> read_targets_csv(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("read_targets_csv: cannot open " + path);
  }
  std::vector<GroundTarget> targets;
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("read_targets_csv: empty file " + path);
  }
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string id, lat, lon, region;
    if (!std::getline(ss, id, ',') || !std::getline(ss, lat, ',') ||
        !std::getline(ss, lon, ',') || !std::getline(ss, region)) {
      throw std::runtime_error("read_targets_csv: malformed line " +
                               std::to_string(line_no) + " in " + path);
    }
    GroundTarget t;
    t.id = id;
    t.lat_deg = std::stod(lat);
    t.lon_deg = std::stod(lon);
    t.region = region;
    if (std::abs(t.lat_deg) > 90.0) {
      throw std::runtime_error("read_targets_csv: latitude out of range on line " +
                               std::to_string(line_no));
    }
    while (t.lon_deg <= -180.0) t.lon_deg += 360.0;
    while (t.lon_deg > 180.0) t.lon_deg -= 360.0;
    targets.push_back(t);
  }
  return targets;
}

PointingScheduleSpec schedule_to_spec(const PointingSchedule &schedule,
                                      double t_f, int K, double gamma,
                                      double rho) {
  PointingScheduleSpec spec;
  spec.t_f = t_f;
  spec.gamma = gamma;
  spec.rho = rho;

  const double dt = t_f / (K - 1);
  std::map<int, NodeTarget> by_node;
  for (const ScheduleEntry &e : schedule.entries) {
    const int node = static_cast<int>(std::llround(e.t_s / dt));
    if (node < 0 || node >= K) {
      throw std::invalid_argument(
          "schedule_to_spec: entry at t = " + std::to_string(e.t_s) +
          " s falls outside the horizon");
    }
    NodeTarget &tgt = by_node[node];
    tgt.node = node;
    tgt.attitude = e.attitude;
    tgt.body_rate = e.body_rate;
    // zero desired rate on the flanking samples when they exist
    for (int nb : {node - 1, node + 1}) {
      if (nb < 0 || nb >= K) continue;
      NodeTarget &f = by_node[nb];
      f.node = nb;
      if (!f.body_rate.has_value()) f.body_rate = Vec3::Zero();
    }
  }
  for (const auto &[node, tgt] : by_node) {
    spec.targets.push_back(tgt);
  }
  return spec;
}

}  // namespace attopt
