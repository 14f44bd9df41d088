#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "conemcf/homog.hpp"

namespace conemcf {

// Run orchestration shared by the CLI and the acceptance suite: execute a
// subcommand's work, write its CSV outputs and a JSON manifest, return the
// in-memory results.

struct AngleSpec {
  enum class Kind { Constant, Sinusoid, File } kind = Kind::Constant;
  double k = 0.5;                 // constant
  double k0 = 0.3, ksup = 0.6;    // sinusoid
  double eps = 0.2;
  std::string file;

  AngleFunction build() const;
};

AngleFunction load_angle_file(const std::filesystem::path& path);

struct ProfileCmd {
  int dim = 1;
  double slope = 0.5;
  double eps_floor = 1e-2 * 0x1p-10;
  int grid_m = 2000;
  std::filesystem::path out = "profile.csv";
};

struct ProfileRunResult {
  SelfSimilarProfile profile;
  std::vector<std::filesystem::path> files;
};

ProfileRunResult run_profile_cmd(const ProfileCmd& cmd);

struct EvolveCmd {
  int dim = 1;
  AngleSpec angle;
  double t0 = 1.0;     // initial data: slowest self-similar snapshot at t0
  double t_end = 1.0;  // flow time horizon (measured from the snapshot)
  int grid = 200;
  Scheme scheme = Scheme::Transformed;
  double dt_max = 1e-3;
  int outputs = 64;
  std::filesystem::path out_dir = ".";
};

struct EvolveRunResult {
  EvolveResult series;
  std::vector<std::filesystem::path> files;
};

EvolveRunResult run_evolve_cmd(const EvolveCmd& cmd);

struct HomogenizeCmd {
  int dim = 1;
  double k0 = 0.3;
  double ksup = 0.6;
  std::vector<double> eps_list = {0.4, 0.2, 0.1};
  double t0 = 1.0;
  double s0 = 1.5;
  double cap = 200.0;
  int grid = 200;
  std::filesystem::path out_dir = ".";
};

struct HomogenizeRunResult {
  std::vector<SandwichReport> reports;  // sorted by eps descending
  std::optional<ExponentFit> fit;       // present when >= 3 distinct eps
  std::vector<std::filesystem::path> files;
};

HomogenizeRunResult run_homogenize_cmd(const HomogenizeCmd& cmd);

struct BarrierCmd {
  int dim = 2;
  double k0 = 0.5;
  double r_star = 2.0;
  std::filesystem::path out = "barrier.csv";
};

struct BarrierRunResult {
  Barrier barrier;
  std::vector<std::filesystem::path> files;
};

BarrierRunResult run_barrier_cmd(const BarrierCmd& cmd);

struct ScheduleCmd {
  int n = 20;
  double eps = 0.1;
  double P = 1.0;
  std::filesystem::path out = "schedule.csv";
};

struct ScheduleRunResult {
  std::vector<Schedule> stages;
  std::vector<std::filesystem::path> files;
};

ScheduleRunResult run_schedule_cmd(const ScheduleCmd& cmd);

const char* version_string();

}  // namespace conemcf
