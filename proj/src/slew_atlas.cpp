#include "attopt/slew_atlas.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace attopt {

std::vector<double> RotationGrid::production_angles() {
  std::vector<double> angles;
  for (int a = -180; a <= -15; a += 5) angles.push_back(a);
  for (int a = -10; a <= -1; ++a) angles.push_back(a);
  for (int a = 1; a <= 10; ++a) angles.push_back(a);
  for (int a = 15; a <= 180; a += 5) angles.push_back(a);
  return angles;
}

RotationGrid RotationGrid::production_grid() {
  RotationGrid g;
  g.axes = equidistributed_axes(100);
  g.angles_deg = production_angles();
  return g;
}

RotationGrid RotationGrid::desk_grid() {
  RotationGrid g;
  g.axes = equidistributed_axes(12);
  g.angles_deg = {-180, -120, -90, -60, -30, -10, 10, 30, 60, 90, 120, 180};
  return g;
}

std::string SlewAtlas::to_json() const {
  nlohmann::json j;
  j["params_hash"] = params_hash;
  nlohmann::json jaxes = nlohmann::json::array();
  for (const Vec3 &a : axes) {
    jaxes.push_back({a(0), a(1), a(2)});
  }
  j["axes"] = jaxes;
  j["angles_deg"] = angles_deg;
  nlohmann::json jentries = nlohmann::json::array();
  for (const AtlasEntry &e : entries) {
    jentries.push_back({{"axis_idx", e.axis_idx},
                        {"angle_deg", e.angle_deg},
                        {"t_min_s", e.t_min_s},
                        {"energy_j", e.energy_j},
                        {"converged", e.converged},
                        {"iters", e.iters}});
  }
  j["entries"] = jentries;
  nlohmann::json jfits = nlohmann::json::array();
  for (const AxisFit &f : fits) {
    jfits.push_back({{"axis_idx", f.axis_idx},
                     {"a", f.a},
                     {"b", f.b},
                     {"c", f.c},
                     {"d", f.d},
                     {"r2_time", f.r2_time},
                     {"r2_energy", f.r2_energy}});
  }
  j["fits"] = jfits;
  return j.dump(2);
}

SlewAtlas SlewAtlas::from_json(const std::string &text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  SlewAtlas atlas;
  atlas.params_hash = j.at("params_hash").get<uint64_t>();
  for (const auto &ja : j.at("axes")) {
    atlas.axes.emplace_back(ja.at(0).get<double>(), ja.at(1).get<double>(),
                            ja.at(2).get<double>());
  }
  atlas.angles_deg = j.at("angles_deg").get<std::vector<double>>();
  for (const auto &je : j.at("entries")) {
    AtlasEntry e;
    e.axis_idx = je.at("axis_idx").get<int>();
    e.angle_deg = je.at("angle_deg").get<double>();
    e.t_min_s = je.at("t_min_s").get<double>();
    e.energy_j = je.at("energy_j").get<double>();
    e.converged = je.at("converged").get<bool>();
    e.iters = je.at("iters").get<int>();
    atlas.entries.push_back(e);
  }
  for (const auto &jf : j.at("fits")) {
    AxisFit f;
    f.axis_idx = jf.at("axis_idx").get<int>();
    f.a = jf.at("a").get<double>();
    f.b = jf.at("b").get<double>();
    f.c = jf.at("c").get<double>();
    f.d = jf.at("d").get<double>();
    f.r2_time = jf.value("r2_time", 0.0);
    f.r2_energy = jf.value("r2_energy", 0.0);
    atlas.fits.push_back(f);
  }
  return atlas;
}

void SlewAtlas::save(const std::string &path) const {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("SlewAtlas::save: cannot open " + path);
  }
  out << to_json() << '\n';
}

SlewAtlas SlewAtlas::load(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("SlewAtlas::load: cannot open " + path);
  }
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_json(text);
}

SlewAtlas build_atlas(const RotationGrid &grid, const SatelliteParams &p,
                      const ScpConfig &cfg, int jobs) {
  if (grid.axes.empty() || grid.angles_deg.empty()) {
    throw std::invalid_argument("build_atlas: empty grid");
  }
  for (double a : grid.angles_deg) {
    if (a == 0.0) {
      throw std::invalid_argument("build_atlas: zero angle in grid");
    }
  }

  SlewAtlas atlas;
  atlas.params_hash = p.content_hash();
  atlas.axes = grid.axes;
  atlas.angles_deg = grid.angles_deg;

  const int n_axes = static_cast<int>(grid.axes.size());
  const int n_angles = static_cast<int>(grid.angles_deg.size());
  const int total = n_axes * n_angles;
  atlas.entries.resize(total);

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int idx = next.fetch_add(1); idx < total; idx = next.fetch_add(1)) {
      const int axis_idx = idx / n_angles;
      const int angle_idx = idx % n_angles;
      const double angle_deg = grid.angles_deg[angle_idx];
      const double theta = angle_deg * std::numbers::pi / 180.0;
      const UnitQuaternion target =
          axis_angle_to_quaternion({grid.axes[axis_idx], theta});

      AtlasEntry e;
      e.axis_idx = axis_idx;
      e.angle_deg = angle_deg;
      try {
        const ScpResult r =
            solve_min_time(UnitQuaternion::identity(), target, p, cfg);
        e.converged = r.converged;
        e.iters = r.iterations;
        e.t_min_s = r.t_f;
        e.energy_j = cumulative_energy(replay_nonlinear(r.solution, p), p);
      } catch (const std::exception &) {
        e.converged = false;
      }
      atlas.entries[idx] = e;
    }
  };

  const int n_threads = std::max(1, std::min(jobs, total));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto &t : pool) t.join();
  }
  return atlas;
}

namespace {

struct LinFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LinFit least_squares(const std::vector<double> &x,
                     const std::vector<double> &y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LinFit f;
  const double denom = n * sxx - sx * sx;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double mean_y = sy / n;
  for (size_t i = 0; i < x.size(); ++i) {
    const double fit = f.slope * x[i] + f.intercept;
    ss_res += (y[i] - fit) * (y[i] - fit);
    ss_tot += (y[i] - mean_y) * (y[i] - mean_y);
  }
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

}  // namespace

std::vector<AxisFit> fit_models(const SlewAtlas &atlas) {
  std::vector<AxisFit> fits;
  for (int axis = 0; axis < static_cast<int>(atlas.axes.size()); ++axis) {
    std::vector<double> log_theta, log_time, theta, energy;
    for (const AtlasEntry &e : atlas.entries) {
      if (e.axis_idx != axis || !e.converged) continue;
      const double th = std::abs(e.angle_deg) * std::numbers::pi / 180.0;
      if (std::abs(e.angle_deg) <= 1.0) continue;  // fit domain
      log_theta.push_back(std::log(th));
      log_time.push_back(std::log(e.t_min_s));
      theta.push_back(th);
      energy.push_back(e.energy_j);
    }
    if (log_theta.size() < 4) {
      throw std::runtime_error("fit_models: axis " + std::to_string(axis) +
                               " has " + std::to_string(log_theta.size()) +
                               " converged points, need at least 4");
    }
    const LinFit time_fit = least_squares(log_theta, log_time);
    const LinFit energy_fit = least_squares(theta, energy);
    AxisFit f;
    f.axis_idx = axis;
    f.a = std::exp(time_fit.intercept);
    f.b = time_fit.slope;
    f.c = energy_fit.slope;
    f.d = energy_fit.intercept;
    f.r2_time = time_fit.r2;
    f.r2_energy = energy_fit.r2;
    fits.push_back(f);
  }
  return fits;
}

SlewQueryResult query_atlas(const SlewAtlas &atlas, const UnitQuaternion &from,
                            const UnitQuaternion &to) {
  if (atlas.entries.empty()) {
    throw std::invalid_argument("query_atlas: empty atlas");
  }
  const AxisAngle rel = quaternion_to_axis_angle(error_quaternion(to, from));
  if (rel.angle_rad < 1e-12) {
    return {0.0, 0.0};
  }

  // nearest tabulated axis up to antipodal equivalence
  int best_axis = 0;
  double best_dot = 0.0;
  for (int i = 0; i < static_cast<int>(atlas.axes.size()); ++i) {
    const double d = rel.axis.dot(atlas.axes[i]);
    if (std::abs(d) > std::abs(best_dot)) {
      best_dot = d;
      best_axis = i;
    }
  }
  const double signed_deg = (best_dot >= 0.0 ? 1.0 : -1.0) * rel.angle_rad *
                            180.0 / std::numbers::pi;

  // collect this axis's converged entries sorted by signed angle
  std::vector<const AtlasEntry *> axis_entries;
  for (const AtlasEntry &e : atlas.entries) {
    if (e.axis_idx == best_axis && e.converged) {
      axis_entries.push_back(&e);
    }
  }
  std::sort(axis_entries.begin(), axis_entries.end(),
            [](const AtlasEntry *a, const AtlasEntry *b) {
              return a->angle_deg < b->angle_deg;
            });

  const AxisFit *fit = nullptr;
  for (const AxisFit &f : atlas.fits) {
    if (f.axis_idx == best_axis) fit = &f;
  }
  auto fit_eval = [&](double deg) -> SlewQueryResult {
    if (fit == nullptr) {
      throw std::runtime_error(
          "query_atlas: angle outside the table and no fit stored");
    }
    const double th = std::abs(deg) * std::numbers::pi / 180.0;
    return {fit->a * std::pow(th, fit->b),
            std::max(0.0, fit->c * th + fit->d)};
  };

  if (axis_entries.empty()) {
    return fit_eval(signed_deg);
  }
  if (signed_deg <= axis_entries.front()->angle_deg - 1e-12 ||
      signed_deg >= axis_entries.back()->angle_deg + 1e-12) {
    return fit_eval(signed_deg);
  }
  // bracketing entries with linear interpolation, exact at knots
  const AtlasEntry *lo = axis_entries.front();
  const AtlasEntry *hi = axis_entries.back();
  for (size_t i = 0; i + 1 < axis_entries.size(); ++i) {
    if (axis_entries[i]->angle_deg <= signed_deg &&
        signed_deg <= axis_entries[i + 1]->angle_deg) {
      lo = axis_entries[i];
      hi = axis_entries[i + 1];
      break;
    }
  }
  if (lo->angle_deg == hi->angle_deg) {
    return {lo->t_min_s, lo->energy_j};
  }
  const double w = (signed_deg - lo->angle_deg) /
                   (hi->angle_deg - lo->angle_deg);
  return {(1.0 - w) * lo->t_min_s + w * hi->t_min_s,
          (1.0 - w) * lo->energy_j + w * hi->energy_j};
}

MinTimeOracle analytic_min_time_oracle(const SatelliteParams &p, int axis,
                                       double theta_rad) {
  if (axis < 0 || axis > 2) {
    throw std::invalid_argument("analytic_min_time_oracle: axis must be 0..2");
  }
  const double tau = p.Ar.row(axis).cwiseAbs().sum() * p.u_max;
  MinTimeOracle out;
  out.time_s = 2.0 * std::sqrt(std::abs(theta_rad) * p.J(axis, axis) / tau);
  out.momentum_saturated = 0.5 * out.time_s > p.r_max / p.u_max;
  return out;
}

}  // namespace attopt
