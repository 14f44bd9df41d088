#include "conemcf/runs.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "conemcf/csvio.hpp"

namespace conemcf {

using nlohmann::json;
namespace fs = std::filesystem;

const char* version_string() { return "cone-mcf 0.1.0"; }

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

void write_manifest(const fs::path& path, json j, double elapsed) {
  j["version"] = version_string();
  j["elapsed_seconds"] = elapsed;
  write_text(path, j.dump(2) + "\n");
}

json angle_json(const AngleSpec& a) {
  json j;
  switch (a.kind) {
    case AngleSpec::Kind::Constant:
      j["kind"] = "constant";
      j["k"] = a.k;
      break;
    case AngleSpec::Kind::Sinusoid:
      j["kind"] = "sinusoid";
      j["k0"] = a.k0;
      j["ksup"] = a.ksup;
      j["eps"] = a.eps;
      break;
    case AngleSpec::Kind::File:
      j["kind"] = "file";
      j["path"] = a.file;
      break;
  }
  return j;
}

}  // namespace

AngleFunction AngleSpec::build() const {
  switch (kind) {
    case Kind::Constant:
      return AngleFunction::constant(k);
    case Kind::Sinusoid:
      return AngleFunction::sinusoidal(k0, ksup, eps);
    case Kind::File:
      return load_angle_file(file);
  }
  throw SolverError("angle spec: unknown kind");
}

AngleFunction load_angle_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw SolverError("cannot open angle file: " + path.string());
  double period = -1;
  std::vector<double> us, ks;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("period=");
      if (pos != std::string::npos) period = std::stod(line.substr(pos + 7));
      continue;
    }
    if (line.find_first_of("0123456789") == std::string::npos) continue;  // header row
    std::istringstream ss(line);
    double u, k;
    char comma;
    if (ss >> u >> comma >> k) {
      us.push_back(u);
      ks.push_back(k);
    }
  }
  if (period <= 0)
    throw SolverError("angle file must declare its period in a '# period=EPS' line");
  return AngleFunction::from_samples(std::move(us), std::move(ks), period);
}

ProfileRunResult run_profile_cmd(const ProfileCmd& cmd) {
  const double start = now_seconds();
  ProfileSolveConfig cfg;
  cfg.grid_m = cmd.grid_m;
  cfg.eps_schedule.clear();
  for (double e = 1e-2; e >= cmd.eps_floor * (1 - 1e-12); e *= 0.5)
    cfg.eps_schedule.push_back(e);
  if (cfg.eps_schedule.empty()) cfg.eps_schedule.push_back(cmd.eps_floor);

  ProfileRunResult res{solve_profile(cmd.dim, cmd.slope, cfg), {}};
  const auto& p = res.profile;

  CsvTable t;
  t.header = "z,Phi,Phi_prime,Phi_second";
  for (std::size_t i = 0; i < p.z.size(); ++i)
    t.rows.push_back({p.z[i], p.Phi[i], p.Phi_p[i], p.Phi_pp[i]});
  write_csv(cmd.out, t);
  res.files.push_back(cmd.out);

  json meta;
  meta["N"] = p.dim;
  meta["k"] = p.slope;
  meta["P"] = p.P;
  meta["eps_floor"] = p.eps_floor;
  meta["extension"] = p.extension();
  meta["tolerances"] = {{"tol_p_bisect", cfg.tol_p_bisect},
                        {"p_accept", cfg.p_accept},
                        {"newton_tol", cfg.newton_tol},
                        {"rtol", cfg.shoot.rtol},
                        {"atol", cfg.shoot.atol},
                        {"tol_classify", cfg.shoot.tol_classify},
                        {"event_tol", cfg.shoot.event_tol}};
  meta["grid_m"] = cmd.grid_m;
  fs::path meta_path = cmd.out;
  meta_path.replace_extension(".meta.json");
  write_manifest(meta_path, meta, now_seconds() - start);
  res.files.push_back(meta_path);
  return res;
}

EvolveRunResult run_evolve_cmd(const EvolveCmd& cmd) {
  const double start = now_seconds();
  fs::create_directories(cmd.out_dir);
  const AngleFunction angle = cmd.angle.build();

  ProfileSolveConfig pcfg;
  const auto prof = solve_profile(cmd.dim, angle.k0(), pcfg);
  const SelfSimilarSolution lower{prof, cmd.t0};
  const auto init = make_selfsimilar_initial(
      lower, angle, 4 * cmd.grid, angle.period() > 0 ? angle.period() : 0.25 * lower.radius(0));

  SolverConfig scfg;
  scfg.dim = cmd.dim;
  scfg.M = cmd.grid;
  scfg.dt_max = cmd.dt_max;
  scfg.scheme = cmd.scheme;

  std::vector<double> outs(cmd.outputs + 1);
  for (int i = 0; i <= cmd.outputs; ++i) outs[i] = cmd.t_end * i / cmd.outputs;

  EvolveRunResult res;
  res.series = cmd.scheme == Scheme::Transformed
                   ? evolve(init, angle, scfg, cmd.t_end, outs)
                   : solve_direct(init, angle, scfg, cmd.t_end, outs);

  CsvTable t;
  t.header = "t,zeta,v,r,u,u_r";
  for (std::size_t n = 0; n < res.series.times.size(); ++n) {
    const auto& g = res.series.graphs[n];
    const double tn = res.series.times[n];
    for (std::size_t i = 0; i < g.r.size(); ++i) {
      // zeta = r/u in both schemes; v(zeta) = u by definition.
      t.rows.push_back({tn, g.r[i] / g.w[i], g.w[i], g.r[i], g.w[i], g.wp[i]});
    }
  }
  const fs::path snap = cmd.out_dir / "snapshots.csv";
  write_csv(snap, t);
  res.files.push_back(snap);

  json man;
  man["command"] = "evolve";
  man["dim"] = cmd.dim;
  man["angle"] = angle_json(cmd.angle);
  man["t0"] = cmd.t0;
  man["t_end"] = cmd.t_end;
  man["grid"] = cmd.grid;
  man["scheme"] = cmd.scheme == Scheme::Transformed ? "transformed" : "direct";
  man["dt_max"] = cmd.dt_max;
  man["dt_init"] = SolverConfig{}.dt_init;
  man["outputs"] = cmd.outputs;
  man["profile_P"] = prof.P;
  man["grad_slack"] = scfg.grad_slack;
  man["boundary_move_frac"] = scfg.boundary_move_frac;
  man["diagnostics"] = {{"steps", res.series.diag.steps},
                        {"rejects", res.series.diag.rejects},
                        {"max_abs_ur", res.series.diag.max_abs_ur},
                        {"gradient_bound", res.series.diag.gradient_bound},
                        {"min_diffusion", res.series.diag.min_diffusion}};
  const fs::path man_path = cmd.out_dir / "manifest.json";
  write_manifest(man_path, man, now_seconds() - start);
  res.files.push_back(man_path);
  return res;
}

HomogenizeRunResult run_homogenize_cmd(const HomogenizeCmd& cmd) {
  const double start = now_seconds();
  fs::create_directories(cmd.out_dir);
  if (cmd.eps_list.empty()) throw SolverError("homogenize: need at least one eps");

  std::vector<double> eps_sorted = cmd.eps_list;
  std::sort(eps_sorted.begin(), eps_sorted.end(), std::greater<>());

  SandwichConfig scfg;
  scfg.M = cmd.grid;
  scfg.cap = cmd.cap;

  const auto slowest = solve_profile(cmd.dim, cmd.k0, scfg.profile);

  HomogenizeRunResult res;
  for (double eps : eps_sorted) {
    const auto angle = cmd.ksup > cmd.k0 ? AngleFunction::sinusoidal(cmd.k0, cmd.ksup, eps)
                                         : AngleFunction::constant(cmd.k0);
    res.reports.push_back(run_sandwich(slowest, angle, cmd.t0, cmd.s0, scfg));
    auto& rep = res.reports.back();
    if (cmd.ksup <= cmd.k0) rep.eps = eps;  // degenerate period, keep the label

    CsvTable series;
    series.header = "t,xi,lower_gap,upper_gap,front_margin";
    for (std::size_t i = 0; i < rep.t.size(); ++i)
      series.rows.push_back(
          {rep.t[i], rep.xi[i], rep.lower_gap[i], rep.upper_gap[i], rep.front_margin[i]});
    const fs::path sp = cmd.out_dir / ("series_eps" + fmt_double(eps) + ".csv");
    write_csv(sp, series);
    res.files.push_back(sp);
  }

  CsvTable sweep;
  sweep.header = "eps,T_window,sup_error,end_error,lower_gap_min";
  for (const auto& r : res.reports)
    sweep.rows.push_back({r.eps, r.T_window, r.sup_error, r.end_error, r.lower_gap_min});
  const fs::path sw = cmd.out_dir / "sweep.csv";
  write_csv(sw, sweep);
  res.files.push_back(sw);

  json man;
  man["command"] = "homogenize";
  man["dim"] = cmd.dim;
  man["k0"] = cmd.k0;
  man["ksup"] = cmd.ksup;
  man["eps_list"] = eps_sorted;
  man["t0"] = cmd.t0;
  man["s0"] = cmd.s0;
  man["cap"] = cmd.cap;
  man["grid"] = cmd.grid;
  man["dt_max"] = scfg.dt_max;
  man["dt_init"] = scfg.dt_init;
  man["n_outputs"] = scfg.n_outputs;
  man["init_nodes"] = scfg.init_nodes;
  man["profile_grid_m"] = scfg.profile_grid_m;
  man["profile_P"] = slowest.P;
  try {
    const auto fit = fit_exponent(res.reports);
    res.fit = fit;
    man["fit"] = {{"slope", fit.slope},
                  {"intercept", fit.intercept},
                  {"residuals", fit.residuals},
                  {"theoretical_bound_exponent", 1.0 / 6.0}};
  } catch (const DegenerateFit&) {
    man["fit"] = nullptr;
  }
  const fs::path man_path = cmd.out_dir / "manifest.json";
  write_manifest(man_path, man, now_seconds() - start);
  res.files.push_back(man_path);
  return res;
}

BarrierRunResult run_barrier_cmd(const BarrierCmd& cmd) {
  const double start = now_seconds();
  BarrierRunResult res{barrier_solve(cmd.r_star, cmd.k0, cmd.dim), {}};
  CsvTable t;
  t.header = "r,v,v_r";
  for (std::size_t i = 0; i < res.barrier.r.size(); ++i)
    t.rows.push_back({res.barrier.r[i], res.barrier.v[i], res.barrier.v_r[i]});
  write_csv(cmd.out, t);
  res.files.push_back(cmd.out);

  json meta;
  meta["command"] = "barrier";
  meta["dim"] = cmd.dim;
  meta["k0"] = cmd.k0;
  meta["r_star"] = cmd.r_star;
  meta["K"] = 2.0 * (cmd.dim - 1) * cmd.k0 * (1 + 4 * cmd.k0 * cmd.k0);
  fs::path meta_path = cmd.out;
  meta_path.replace_extension(".meta.json");
  write_manifest(meta_path, meta, now_seconds() - start);
  res.files.push_back(meta_path);
  return res;
}

ScheduleRunResult run_schedule_cmd(const ScheduleCmd& cmd) {
  const double start = now_seconds();
  ScheduleRunResult res;
  CsvTable t;
  t.header = "n,a_num,a_den,b_num,b_den,B_num,B_den,nu,eps_n,tau,T,S,curlyT,curlyS";
  for (int n = 1; n <= cmd.n; ++n) {
    const auto s = schedule(n, cmd.eps, cmd.P);
    res.stages.push_back(s);
    t.rows.push_back({static_cast<double>(n), static_cast<double>(s.a.num),
                      static_cast<double>(s.a.den), static_cast<double>(s.b.num),
                      static_cast<double>(s.b.den), static_cast<double>(s.B.num),
                      static_cast<double>(s.B.den), s.nu, s.eps_n, s.tau, s.T, s.S, s.curlyT,
                      s.curlyS});
  }
  write_csv(cmd.out, t);
  res.files.push_back(cmd.out);

  json meta;
  meta["command"] = "schedule";
  meta["n"] = cmd.n;
  meta["eps"] = cmd.eps;
  meta["P"] = cmd.P;
  fs::path meta_path = cmd.out;
  meta_path.replace_extension(".meta.json");
  write_manifest(meta_path, meta, now_seconds() - start);
  res.files.push_back(meta_path);
  return res;
}

}  // namespace conemcf
