// attopt: satellite attitude trajectory optimization toolkit
//
// Subcommands: slew, plan, atlas build|fit|query, schedule build, track.
// Exit codes: 0 ok, 1 usage/config, 2 non-convergence, 3 solver failure.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "attopt/mission.hpp"
#include "attopt/tracking.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace attopt;

namespace {

constexpr const char *kVersion = "attopt 0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitSolverFailure = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open " + path);
  }
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

uint64_t fnv1a(const std::string &bytes) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

json parse_json_file(const std::string &path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error &e) {
    throw ConfigError(path + ": " + e.what());
  }
}

SatelliteParams load_params(const std::string &path) {
  if (path.empty()) {
    return SatelliteParams::reference();
  }
  const json j = parse_json_file(path);
  try {
    Mat3 J;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) J(r, c) = j.at("J").at(r).at(c);
    Mat3x4 Ar;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 4; ++c) Ar(r, c) = j.at("Ar").at(r).at(c);
    std::optional<double> P_max, E_max;
    if (j.contains("P_max") && !j["P_max"].is_null()) P_max = j["P_max"];
    if (j.contains("E_max") && !j["E_max"].is_null()) E_max = j["E_max"];
    return SatelliteParams::validated(J, Ar, j.at("r_max"), j.at("u_max"),
                                      j.at("Jr"), P_max, E_max);
  } catch (const json::exception &e) {
    throw ConfigError(path + ": " + e.what());
  } catch (const std::invalid_argument &e) {
    throw ConfigError(path + ": " + e.what());
  }
}

ScpConfig load_scp(const std::string &path) {
  ScpConfig cfg;
  if (path.empty()) return cfg;
  const json j = parse_json_file(path);
  try {
    cfg.K = j.value("K", cfg.K);
    cfg.N_max = j.value("N_max", cfg.N_max);
    cfg.w_vc = j.value("w_vc", cfg.w_vc);
    cfg.w_tr = j.value("w_tr", cfg.w_tr);
    cfg.eps_vc = j.value("eps_vc", cfg.eps_vc);
    cfg.eps_tr = j.value("eps_tr", cfg.eps_tr);
    cfg.gamma = j.value("gamma", cfg.gamma);
    cfg.rho = j.value("rho", cfg.rho);
    cfg.t_f = j.value("t_f", cfg.t_f);
    cfg.t_min_floor = j.value("t_min_floor", cfg.t_min_floor);
    if (j.contains("bounds") && j["bounds"].contains("omega_max") &&
        !j["bounds"]["omega_max"].is_null()) {
      cfg.omega_max = j["bounds"]["omega_max"];
    }
  } catch (const json::exception &e) {
    throw ConfigError(path + ": " + e.what());
  }
  return cfg;
}

CircularOrbit load_orbit(const std::string &path) {
  CircularOrbit orbit;
  if (path.empty()) return orbit;
  const json j = parse_json_file(path);
  try {
    orbit.altitude_km = j.value("altitude_km", orbit.altitude_km);
    orbit.inclination_deg = j.value("inclination_deg", orbit.inclination_deg);
    orbit.raan_deg = j.value("raan_deg", orbit.raan_deg);
    orbit.arg_lat_deg = j.value("arg_lat_deg", orbit.arg_lat_deg);
    orbit.epoch_s = j.value("epoch_s", orbit.epoch_s);
  } catch (const json::exception &e) {
    throw ConfigError(path + ": " + e.what());
  }
  return orbit;
}

UnitQuaternion parse_quat(const std::string &text) {
  std::stringstream ss(text);
  std::vector<double> vals;
  std::string cell;
  while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
  if (vals.size() != 4) {
    throw ConfigError("quaternion needs four comma-separated values: " + text);
  }
  return UnitQuaternion(vals[0], vals[1], vals[2], vals[3]);
}

Vec3 parse_vec3(const std::string &text) {
  std::stringstream ss(text);
  std::vector<double> vals;
  std::string cell;
  while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
  if (vals.size() != 3) {
    throw ConfigError("axis needs three comma-separated values: " + text);
  }
  return Vec3(vals[0], vals[1], vals[2]);
}

// One manifest per run, the only artifact that carries a timestamp.
class Manifest {
 public:
  explicit Manifest(std::string command) : command_(std::move(command)) {
    start_ = std::chrono::steady_clock::now();
  }

  void record_config(const std::string &label, const std::string &path) {
    if (path.empty()) {
      configs_[label] = {{"path", nullptr}, {"hash", nullptr}};
    } else {
      configs_[label] = {{"path", path}, {"hash", fnv1a(read_file(path))}};
    }
  }

  void record_output(const std::string &path) { outputs_.push_back(path); }

  void write(const fs::path &dir) const {
    json j;
    j["command"] = command_;
    j["tool_version"] = kVersion;
    j["configs"] = configs_;
    j["outputs"] = outputs_;
    j["determinism"] =
        "seed-free: identical inputs reproduce byte-identical outputs";
    j["wall_clock_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      start_)
            .count();
    const auto now = std::chrono::system_clock::now();
    j["finished_unix_s"] =
        std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch())
            .count();
    std::ofstream out(dir / "manifest.json");
    out << j.dump(2) << '\n';
  }

 private:
  std::string command_;
  json configs_ = json::object();
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point start_;
};

fs::path ensure_out_dir(const std::string &out) {
  fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path &path, const std::string &text) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("cannot write " + path.string());
  }
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
}

int finish_scp_run(const ScpResult &result, const DecisionStack &solution,
                   const SatelliteParams &p, const fs::path &dir,
                   Manifest &manifest, const std::string &traj_name) {
  const Trajectory traj = stack_to_trajectory(solution);
  traj.write_csv((dir / traj_name).string(), p);
  manifest.record_output((dir / traj_name).string());
  write_text(dir / "convergence.json", result.history_json());
  manifest.record_output((dir / "convergence.json").string());
  manifest.write(dir);

  if (result.failed_iteration > 0) {
    std::cerr << "solver failure: " << result.message << "\n";
    return kExitSolverFailure;
  }
  if (!result.converged) {
    std::cerr << "not converged after " << result.iterations
              << " iterations (flag = 0)\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_slew(const std::string &axis_text, double angle_deg,
             const std::string &to_quat, const std::string &from_quat,
             const std::string &params_path, const std::string &scp_path,
             const std::string &out) {
  const SatelliteParams p = load_params(params_path);
  const ScpConfig cfg = load_scp(scp_path);

  const UnitQuaternion q0 =
      from_quat.empty() ? UnitQuaternion::identity() : parse_quat(from_quat);
  UnitQuaternion qf;
  if (!to_quat.empty()) {
    qf = parse_quat(to_quat);
  } else {
    if (angle_deg == 0.0) {
      throw ConfigError("zero rotation: give --angle-deg or --to-quat");
    }
    qf = hamilton_product(
        q0, axis_angle_to_quaternion({parse_vec3(axis_text).normalized(),
                                      angle_deg * std::numbers::pi / 180.0}));
  }

  Manifest manifest("slew");
  manifest.record_config("params", params_path);
  manifest.record_config("scp", scp_path);
  const fs::path dir = ensure_out_dir(out);

  const ScpResult result = solve_min_time(q0, qf, p, cfg);
  std::cout << "minimum-time slew: t_f = " << result.t_f
            << " s, converged = " << result.converged
            << ", iterations = " << result.iterations << "\n";
  return finish_scp_run(result, result.solution, p, dir, manifest,
                        "trajectory.csv");
}

int cmd_plan(const std::string &schedule_path, const std::string &params_path,
             const std::string &scp_path, const std::string &from_quat,
             double t0_in, const std::string &out) {
  const SatelliteParams p = load_params(params_path);
  ScpConfig cfg = load_scp(scp_path);
  const PointingSchedule schedule_abs = PointingSchedule::load(schedule_path);
  if (schedule_abs.entries.empty()) {
    throw ConfigError(schedule_path + ": schedule has no entries");
  }

  // shift to the planning horizon; default lead-in is ten samples
  PointingSchedule schedule = schedule_abs;
  const double t0 =
      t0_in >= 0.0
          ? t0_in
          : schedule.entries.front().t_s - 10.0 * schedule.sample_s;
  for (auto &e : schedule.entries) e.t_s -= t0;
  if (schedule.entries.front().t_s < 0.0) {
    throw ConfigError("--t0 later than the first schedule entry");
  }

  double t_f = cfg.t_f;
  if (t_f <= 0.0) {
    t_f = std::ceil(schedule.entries.back().t_s / schedule.sample_s + 10.0) *
          schedule.sample_s;
  }
  if (schedule.entries.back().t_s > t_f) {
    throw ConfigError("schedule times exceed the planning horizon t_f");
  }
  const int K = static_cast<int>(std::llround(t_f / schedule.sample_s)) + 1;
  cfg.K = K;
  cfg.t_f = t_f;

  const PointingScheduleSpec spec =
      schedule_to_spec(schedule, t_f, K, cfg.gamma, cfg.rho);
  const GyrostatState x0 = GyrostatState::rest(
      from_quat.empty() ? schedule.entries.front().attitude
                        : parse_quat(from_quat));

  Manifest manifest("plan");
  manifest.record_config("schedule", schedule_path);
  manifest.record_config("params", params_path);
  manifest.record_config("scp", scp_path);
  const fs::path dir = ensure_out_dir(out);

  const ScpResult result = solve_multi_target(spec, x0, p, cfg);

  // schedule-tracking quality of the planned reference
  if (result.failed_iteration == 0) {
    std::vector<GyrostatState> states(result.solution.states.begin(),
                                      result.solution.states.end());
    std::vector<ReferencePoint> points;
    for (const NodeTarget &t : spec.targets) {
      if (t.attitude.has_value()) {
        points.push_back(
            {t.node, *t.attitude, t.body_rate.value_or(Vec3::Zero())});
      }
    }
    const ErrorMetrics m = error_metrics(states, points);
    write_text(dir / "metrics.json", m.to_json("plan", "nominal"));
    manifest.record_output((dir / "metrics.json").string());
    std::cout << "plan: K = " << K << ", t_f = " << t_f
              << " s, q_e_avg = " << m.q_e_avg << ", q_e_max = " << m.q_e_max
              << "\n";
  }
  return finish_scp_run(result, result.solution, p, dir, manifest,
                        "trajectory.csv");
}

RotationGrid make_grid(int axes, const std::string &angles_text) {
  RotationGrid grid;
  if (angles_text == "production") {
    grid = RotationGrid::production_grid();
    grid.axes = equidistributed_axes(axes);
  } else if (angles_text == "desk" || angles_text.empty()) {
    grid = RotationGrid::desk_grid();
    grid.axes = equidistributed_axes(axes);
  } else {
    grid.axes = equidistributed_axes(axes);
    std::stringstream ss(angles_text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      grid.angles_deg.push_back(std::stod(cell));
    }
  }
  return grid;
}

int cmd_atlas_build(int axes, const std::string &angles_text, int jobs,
                    const std::string &params_path,
                    const std::string &scp_path,
                    const std::string &out_file) {
  const SatelliteParams p = load_params(params_path);
  const ScpConfig cfg = load_scp(scp_path);
  const RotationGrid grid = make_grid(axes, angles_text);

  Manifest manifest("atlas build");
  manifest.record_config("params", params_path);
  manifest.record_config("scp", scp_path);

  SlewAtlas atlas = build_atlas(grid, p, cfg, jobs);
  int failures = 0;
  for (const auto &e : atlas.entries) {
    if (!e.converged) ++failures;
  }
  atlas.save(out_file);
  manifest.record_output(out_file);
  manifest.write(fs::path(out_file).parent_path().empty()
                     ? fs::path(".")
                     : fs::path(out_file).parent_path());
  std::cout << "atlas: " << atlas.entries.size() << " instances, " << failures
            << " failures -> " << out_file << "\n";
  return failures == 0 ? kExitOk : kExitNotConverged;
}

int cmd_atlas_fit(const std::string &atlas_path, const std::string &out_file) {
  SlewAtlas atlas = SlewAtlas::load(atlas_path);
  atlas.fits = fit_models(atlas);
  const std::string out = out_file.empty() ? atlas_path : out_file;
  atlas.save(out);
  for (const AxisFit &f : atlas.fits) {
    std::cout << "axis " << f.axis_idx << ": T = " << f.a << " theta^" << f.b
              << ", E = " << f.c << " theta + " << f.d
              << "  (R2 = " << f.r2_time << ", " << f.r2_energy << ")\n";
  }
  return kExitOk;
}

int cmd_atlas_query(const std::string &atlas_path,
                    const std::string &from_quat, const std::string &to_quat,
                    const std::string &axis_text, double angle_deg) {
  const SlewAtlas atlas = SlewAtlas::load(atlas_path);
  const UnitQuaternion q0 =
      from_quat.empty() ? UnitQuaternion::identity() : parse_quat(from_quat);
  UnitQuaternion qf;
  if (!to_quat.empty()) {
    qf = parse_quat(to_quat);
  } else {
    qf = hamilton_product(
        q0, axis_angle_to_quaternion({parse_vec3(axis_text).normalized(),
                                      angle_deg * std::numbers::pi / 180.0}));
  }
  const SlewQueryResult r = query_atlas(atlas, q0, qf);
  json j;
  j["min_time_s"] = r.min_time_s;
  j["energy_j"] = r.energy_j;
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_schedule_build(const std::string &targets_path,
                       const std::string &orbit_path,
                       const std::string &atlas_path, double max_off_nadir,
                       double horizon, double sample,
                       const std::string &out_file) {
  const auto targets = read_targets_csv(targets_path);
  const CircularOrbit orbit = load_orbit(orbit_path);
  const SlewAtlas atlas = SlewAtlas::load(atlas_path);

  Manifest manifest("schedule build");
  manifest.record_config("targets", targets_path);
  manifest.record_config("orbit", orbit_path);
  manifest.record_config("atlas", atlas_path);

  const SweepScheduleResult result = build_sweep_schedule(
      orbit, targets, atlas, sample, horizon, max_off_nadir);
  result.schedule.save(out_file);
  manifest.record_output(out_file);

  const double worst = audit_schedule(result.schedule, atlas);
  std::cout << "schedule: " << result.schedule.entries.size()
            << " observations, " << result.skipped.size()
            << " skipped, slew-audit slack = " << -worst << " s\n";
  for (const auto &skip : result.skipped) {
    std::cout << "  skipped " << skip.target_id << ": " << skip.reason << "\n";
  }
  manifest.write(fs::path(out_file).parent_path().empty()
                     ? fs::path(".")
                     : fs::path(out_file).parent_path());
  return kExitOk;
}

int cmd_track(const std::string &traj_path, const std::string &params_path,
              const std::string &schedule_path, const std::string &mode_text,
              const std::string &perturb_path, const std::string &out) {
  const SatelliteParams p_nominal = load_params(params_path);
  const Trajectory ref_traj = Trajectory::read_csv(traj_path);
  if (ref_traj.samples.size() < 2) {
    throw ConfigError(traj_path + ": reference needs at least two samples");
  }

  DecisionStack reference;
  reference.t_f = ref_traj.samples.back().t;
  for (const auto &s : ref_traj.samples) {
    reference.states.push_back(s.state);
    reference.inputs.push_back(s.u);
  }

  SatelliteParams p_true = p_nominal;
  std::string inertia_label = "nominal";
  if (!perturb_path.empty()) {
    const json j = parse_json_file(perturb_path);
    Mat3 Jt;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) Jt(r, c) = j.at("J").at(r).at(c);
    p_true = SatelliteParams::validated(Jt, p_nominal.Ar, p_nominal.r_max,
                                        p_nominal.u_max, p_nominal.Jr,
                                        p_nominal.P_max, p_nominal.E_max);
    inertia_label = "perturbed";
  }

  // observation set: schedule nodes when given, otherwise every node
  std::vector<int> observation_nodes;
  if (!schedule_path.empty()) {
    const PointingSchedule schedule = PointingSchedule::load(schedule_path);
    const double dt = reference.t_f / (reference.num_nodes() - 1);
    for (const auto &e : schedule.entries) {
      const int node = static_cast<int>(std::llround(e.t_s / dt));
      if (node >= 0 && node < reference.num_nodes()) {
        observation_nodes.push_back(node);
      }
    }
  }
  if (observation_nodes.empty()) {
    for (int k = 0; k < reference.num_nodes(); ++k) {
      observation_nodes.push_back(k);
    }
  }

  const TrackingMode mode =
      (mode_text == "cl") ? TrackingMode::closed_loop : TrackingMode::open_loop;

  Manifest manifest("track");
  manifest.record_config("traj", traj_path);
  manifest.record_config("params", params_path);
  manifest.record_config("schedule", schedule_path);
  manifest.record_config("perturb-inertia", perturb_path);
  const fs::path dir = ensure_out_dir(out);

  const GainSchedule gains = design_tracking_gains(
      reference, p_nominal, LqrWeights::defaults(), observation_nodes);
  const Trajectory sim = simulate_tracking(reference, gains, p_true, mode);

  sim.write_csv((dir / "tracked.csv").string(), p_true);
  manifest.record_output((dir / "tracked.csv").string());

  std::vector<GyrostatState> states;
  for (const auto &s : sim.samples) states.push_back(s.state);
  const ErrorMetrics m = error_metrics(states, reference_points(reference));
  write_text(dir / "metrics.json", m.to_json(mode_text, inertia_label));
  manifest.record_output((dir / "metrics.json").string());
  manifest.write(dir);

  std::cout << "track (" << mode_text << ", " << inertia_label
            << "): q_e_max = " << m.q_e_max << ", q_e_avg = " << m.q_e_avg
            << ", w_e_max = " << m.w_e_max << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"satellite attitude trajectory optimization toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string params_path, scp_path, out_dir;

  auto *slew = app.add_subcommand("slew", "minimum-time rest-to-rest slew");
  std::string slew_axis = "1,0,0", slew_to, slew_from;
  double slew_angle = 0.0;
  slew->add_option("--axis", slew_axis, "rotation axis x,y,z");
  slew->add_option("--angle-deg", slew_angle, "rotation angle, degrees");
  slew->add_option("--to-quat", slew_to, "target quaternion q1,q2,q3,q4");
  slew->add_option("--from-quat", slew_from, "initial quaternion");
  slew->add_option("--params", params_path, "satellite parameters JSON");
  slew->add_option("--scp", scp_path, "SCP configuration JSON");
  slew->add_option("--out", out_dir, "output directory");

  auto *plan = app.add_subcommand("plan", "multi-target pointing trajectory");
  std::string plan_schedule, plan_from;
  double plan_t0 = -1.0;
  plan->add_option("--schedule", plan_schedule, "pointing schedule JSON")
      ->required();
  plan->add_option("--params", params_path, "satellite parameters JSON");
  plan->add_option("--scp", scp_path, "SCP configuration JSON");
  plan->add_option("--from-quat", plan_from, "initial attitude");
  plan->add_option("--t0", plan_t0,
                   "horizon start on the schedule clock (default: ten "
                   "samples before the first entry)");
  plan->add_option("--out", out_dir, "output directory");

  auto *atlas = app.add_subcommand("atlas", "slew time/energy atlas");
  atlas->require_subcommand(1);
  auto *abuild = atlas->add_subcommand("build", "run the slew campaign");
  int atlas_axes = 12, atlas_jobs = 1;
  std::string atlas_angles = "desk", atlas_out = "atlas.json";
  abuild->add_option("--axes", atlas_axes, "number of equidistributed axes");
  abuild->add_option("--angles", atlas_angles,
                     "'desk', 'production', or a,b,c degrees");
  abuild->add_option("--jobs", atlas_jobs, "parallel workers");
  abuild->add_option("--params", params_path, "satellite parameters JSON");
  abuild->add_option("--scp", scp_path, "SCP configuration JSON");
  abuild->add_option("--out", atlas_out, "atlas JSON path");

  auto *afit = atlas->add_subcommand("fit", "fit per-axis models");
  std::string fit_atlas, fit_out;
  afit->add_option("--atlas", fit_atlas, "atlas JSON path")->required();
  afit->add_option("--out", fit_out, "output path (default: in place)");

  auto *aquery = atlas->add_subcommand("query", "slew estimate");
  std::string query_atlas_path, query_from, query_to, query_axis = "1,0,0";
  double query_angle = 0.0;
  aquery->add_option("--atlas", query_atlas_path, "atlas JSON path")
      ->required();
  aquery->add_option("--from-quat", query_from, "initial quaternion");
  aquery->add_option("--to-quat", query_to, "target quaternion");
  aquery->add_option("--axis", query_axis, "rotation axis x,y,z");
  aquery->add_option("--angle-deg", query_angle, "rotation angle, degrees");

  auto *sched = app.add_subcommand("schedule", "pointing schedules");
  sched->require_subcommand(1);
  auto *sbuild = sched->add_subcommand("build", "sweep-pattern schedule");
  std::string sched_targets, sched_orbit, sched_atlas,
      sched_out = "schedule.json";
  double sched_off_nadir = 45.0, sched_horizon = 600.0, sched_sample = 1.0;
  sbuild->add_option("--targets", sched_targets, "targets CSV")->required();
  sbuild->add_option("--orbit", sched_orbit, "orbit JSON");
  sbuild->add_option("--atlas", sched_atlas, "atlas JSON for slew estimates")
      ->required();
  sbuild->add_option("--max-off-nadir", sched_off_nadir, "degrees");
  sbuild->add_option("--horizon", sched_horizon, "seconds");
  sbuild->add_option("--sample", sched_sample, "sample time, seconds");
  sbuild->add_option("--out", sched_out, "schedule JSON path");

  auto *track = app.add_subcommand("track", "LQR tracking simulation");
  std::string track_traj, track_schedule, track_mode = "cl", track_perturb;
  track->add_option("--traj", track_traj, "reference trajectory CSV")
      ->required();
  track->add_option("--params", params_path, "satellite parameters JSON");
  track->add_option("--schedule", track_schedule,
                    "schedule JSON for the observation set");
  track->add_option("--mode", track_mode, "cl (closed) or ol (open loop)")
      ->check(CLI::IsMember({"cl", "ol"}));
  track->add_option("--perturb-inertia", track_perturb,
                    "JSON with a perturbed J matrix");
  track->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (slew->parsed()) {
      return cmd_slew(slew_axis, slew_angle, slew_to, slew_from, params_path,
                      scp_path, out_dir);
    }
    if (plan->parsed()) {
      return cmd_plan(plan_schedule, params_path, scp_path, plan_from, plan_t0,
                      out_dir);
    }
    if (atlas->parsed()) {
      if (abuild->parsed()) {
        return cmd_atlas_build(atlas_axes, atlas_angles, atlas_jobs,
                               params_path, scp_path, atlas_out);
      }
      if (afit->parsed()) {
        return cmd_atlas_fit(fit_atlas, fit_out);
      }
      if (aquery->parsed()) {
        return cmd_atlas_query(query_atlas_path, query_from, query_to,
                               query_axis, query_angle);
      }
    }
    if (sched->parsed() && sbuild->parsed()) {
      return cmd_schedule_build(sched_targets, sched_orbit, sched_atlas,
                                sched_off_nadir, sched_horizon, sched_sample,
                                sched_out);
    }
    if (track->parsed()) {
      return cmd_track(track_traj, params_path, track_schedule, track_mode,
                       track_perturb, out_dir);
    }
  } catch (const ConfigError &e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
