#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "conemcf/runs.hpp"

namespace {

using namespace conemcf;

std::string check_open_unit(const std::string& s) {
  try {
    const double v = std::stod(s);
    if (!(v > 0 && v < 1)) return "value must lie strictly inside (0,1)";
  } catch (...) {
    return "not a number";
  }
  return {};
}

std::string check_positive(const std::string& s) {
  try {
    if (!(std::stod(s) > 0)) return "value must be positive";
  } catch (...) {
    return "not a number";
  }
  return {};
}

int dispatch(CLI::App& app, const ProfileCmd& pc, const EvolveCmd& ec, const HomogenizeCmd& hc,
             const BarrierCmd& bc, const ScheduleCmd& sc) {
  if (app.got_subcommand("profile")) {
    auto r = run_profile_cmd(pc);
    std::printf("P = %.12g (N=%d, k=%g)\n", r.profile.P, r.profile.dim, r.profile.slope);
    for (const auto& f : r.files) std::printf("wrote %s\n", f.string().c_str());
  } else if (app.got_subcommand("evolve")) {
    auto r = run_evolve_cmd(ec);
    std::printf("evolved to t=%g, xi=%.10g, steps=%ld rejects=%ld\n", r.series.times.back(),
                r.series.graphs.back().xi(), r.series.diag.steps, r.series.diag.rejects);
    for (const auto& f : r.files) std::printf("wrote %s\n", f.string().c_str());
  } else if (app.got_subcommand("homogenize")) {
    auto r = run_homogenize_cmd(hc);
    for (const auto& rep : r.reports)
      std::printf("eps=%-6g window=%-8.4g sup_error=%.6g end_error=%.6g lower_gap_min=%.3g\n",
                  rep.eps, rep.T_window, rep.sup_error, rep.end_error, rep.lower_gap_min);
    if (r.fit)
      std::printf("fitted log-log slope %.4f (upper-bound exponent 1/6 = %.4f)\n",
                  r.fit->slope, 1.0 / 6.0);
    for (const auto& f : r.files) std::printf("wrote %s\n", f.string().c_str());
  } else if (app.got_subcommand("barrier")) {
    auto r = run_barrier_cmd(bc);
    std::printf("barrier: %zu samples on [%.6g, %.6g]\n", r.barrier.r.size(),
                r.barrier.r.front(), r.barrier.r.back());
    for (const auto& f : r.files) std::printf("wrote %s\n", f.string().c_str());
  } else if (app.got_subcommand("schedule")) {
    auto r = run_schedule_cmd(sc);
    for (const auto& s : r.stages)
      std::printf("n=%-3d a=%s b=%s B=%s T=%.6g\n", s.n, s.a.str().c_str(), s.b.str().c_str(),
                  s.B.str().c_str(), s.T);
    for (const auto& f : r.files) std::printf("wrote %s\n", f.string().c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cone-mcf: self-similar profiles and free-boundary evolution of a mean "
               "curvature flow in a cone"};
  app.set_version_flag("--version", conemcf::version_string());
  app.require_subcommand(1);

  ProfileCmd pc;
  auto* prof = app.add_subcommand("profile", "solve the self-similar profile for (N, k)");
  prof->add_option("--dim", pc.dim, "spatial dimension N")->required()->check(CLI::Range(1, 16));
  prof->add_option("--slope", pc.slope, "contact slope k in (0,1)")
      ->required()
      ->check(CLI::Validator(check_open_unit, "IN(0,1)"));
  prof->add_option("--eps-floor", pc.eps_floor, "smallest regularization in the eps schedule")
      ->check(CLI::Validator(check_positive, "POS"));
  prof->add_option("--grid", pc.grid_m, "profile grid intervals on [0,1]")
      ->check(CLI::Range(16, 200000));
  prof->add_option("--out", pc.out, "output CSV path");

  EvolveCmd ec;
  std::vector<double> angle_sin;
  auto* evo = app.add_subcommand("evolve", "evolve the free-boundary flow");
  evo->add_option("--dim", ec.dim, "spatial dimension N")->required()->check(CLI::Range(1, 16));
  auto* grp = evo->add_option_group("angle", "contact-slope function");
  auto* oc = grp->add_option("--angle-const", ec.angle.k, "constant slope k")
                 ->check(CLI::Validator(check_open_unit, "IN(0,1)"));
  auto* os = grp->add_option("--angle-sin", angle_sin,
                             "sinusoidal slope: k0,ksup,eps (attains both extrema)")
                 ->delimiter(',')
                 ->expected(3);
  auto* of = grp->add_option("--angle-file", ec.angle.file,
                             "CSV of one period: '# period=EPS' header plus u,k rows");
  grp->require_option(1);
  evo->add_option("--t-end", ec.t_end, "horizon in flow time")
      ->required()
      ->check(CLI::Validator(check_positive, "POS"));
  evo->add_option("--grid", ec.grid, "spatial intervals M")->required()->check(CLI::Range(16, 100000));
  evo->add_option("--t0", ec.t0, "initial data: slowest self-similar snapshot time")
      ->check(CLI::Validator(check_positive, "POS"));
  std::string scheme = "transformed";
  evo->add_option("--scheme", scheme, "transformed|direct")
      ->check(CLI::IsMember({"transformed", "direct"}));
  evo->add_option("--dt-max", ec.dt_max, "time step ceiling")
      ->check(CLI::Validator(check_positive, "POS"));
  evo->add_option("--outputs", ec.outputs, "number of output snapshots")->check(CLI::Range(1, 100000));
  evo->add_option("--out-dir", ec.out_dir, "output directory")->envname("CONE_MCF_OUT");

  HomogenizeCmd hc;
  auto* hom = app.add_subcommand("homogenize", "eps sweep against the slowest self-similar solution");
  hom->add_option("--dim", hc.dim, "spatial dimension N")->required()->check(CLI::Range(1, 16));
  hom->add_option("--k0", hc.k0, "minimal contact slope")
      ->required()
      ->check(CLI::Validator(check_open_unit, "IN(0,1)"));
  hom->add_option("--ksup", hc.ksup, "maximal contact slope")
      ->required()
      ->check(CLI::Validator(check_open_unit, "IN(0,1)"));
  hom->add_option("--eps-list", hc.eps_list, "angle periods, comma separated")
      ->required()
      ->delimiter(',');
  hom->add_option("--t0", hc.t0, "lower snapshot time")->check(CLI::Validator(check_positive, "POS"));
  hom->add_option("--s0", hc.s0, "upper snapshot time")->check(CLI::Validator(check_positive, "POS"));
  hom->add_option("--cap", hc.cap, "window cap")->check(CLI::Validator(check_positive, "POS"));
  hom->add_option("--grid", hc.grid, "spatial intervals M")->check(CLI::Range(16, 100000));
  hom->add_option("--out-dir", hc.out_dir, "output directory")->envname("CONE_MCF_OUT");

  BarrierCmd bc;
  auto* bar = app.add_subcommand("barrier", "stationary blocking barrier at r_star");
  bar->add_option("--dim", bc.dim, "spatial dimension N")->required()->check(CLI::Range(1, 16));
  bar->add_option("--k0", bc.k0, "anchor slope")
      ->required()
      ->check(CLI::Validator(check_open_unit, "IN(0,1)"));
  bar->add_option("--r-star", bc.r_star, "anchor radius")
      ->required()
      ->check(CLI::Validator(check_positive, "POS"));
  bar->add_option("--out", bc.out, "output CSV path");

  ScheduleCmd sc;
  auto* sch = app.add_subcommand("schedule", "induction schedule constants");
  sch->add_option("--n", sc.n, "number of stages")->required()->check(CLI::Range(1, 29));
  sch->add_option("--eps", sc.eps, "angle period")
      ->required()
      ->check(CLI::Validator(check_open_unit, "IN(0,1)"));
  sch->add_option("--P", sc.P, "profile eigenvalue")
      ->required()
      ->check(CLI::Validator(check_positive, "POS"));
  sch->add_option("--out", sc.out, "output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fflush(stdout);
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  }

  if (evo->parsed()) {
    if (os->count()) {
      ec.angle.kind = AngleSpec::Kind::Sinusoid;
      ec.angle.k0 = angle_sin[0];
      ec.angle.ksup = angle_sin[1];
      ec.angle.eps = angle_sin[2];
      if (!(ec.angle.k0 > 0 && ec.angle.k0 <= ec.angle.ksup && ec.angle.ksup < 1 &&
            ec.angle.eps > 0)) {
        std::fprintf(stderr, "usage error: --angle-sin needs 0 < k0 <= ksup < 1 and eps > 0\n");
        return 2;
      }
    } else if (of->count()) {
      ec.angle.kind = AngleSpec::Kind::File;
    } else if (oc->count()) {
      ec.angle.kind = AngleSpec::Kind::Constant;
    }
    ec.scheme = scheme == "direct" ? Scheme::Direct : Scheme::Transformed;
  }
  if (hom->parsed() && !(hc.k0 <= hc.ksup)) {
    std::fprintf(stderr, "usage error: --k0 must not exceed --ksup\n");
    return 2;
  }

  try {
    return dispatch(app, pc, ec, hc, bc, sc);
  } catch (const conemcf::SolverError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
