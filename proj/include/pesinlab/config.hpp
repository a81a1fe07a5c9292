#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "pesinlab/measures.hpp"
#include "pesinlab/systems.hpp"

namespace pesinlab {

struct MapSpec {
  std::string kind = "doubling";  // doubling | affine3 | example1 | example2 | torus
  double b0 = 0.25, k = 4.0;
  int N = 24, map_depth = 12;
  double c1 = 0.2, b1 = 0.1, k2 = 12.0;  // example2
  std::shared_ptr<MapSpec> left, right;  // torus factors
};

struct MeasureSpec {
  std::string kind = "lebesgue";  // lebesgue | dirac | mu_K | empirical | product
  std::string name;
  std::string skeleton_label = "K";
  int depth = 20;
  double point = 0.0, point_y = 0.0;  // dirac
  double x0 = 0.0;                    // empirical
  long n = 1000;
  std::shared_ptr<MeasureSpec> left, right;  // product factors
};

struct ExperimentSpec {
  // basin-scan
  long n_points = 10000;
  std::vector<long> times = {100, 1000, 10000};
  std::vector<double> epsilons = {0.01, 0.05, 0.1};
  std::vector<std::string> candidates;  // measure names; empty = all
  // decay-rate
  std::string target;  // measure name; empty = first
  double epsilon_star = 0.05;
  std::vector<long> schedule = {4, 6, 8, 10, 12, 14, 16, 18, 20};
  long decay_points = 1000000;
  long min_hits = 10;
  // distortion
  int generations = 12;
  std::vector<std::string> systems = {"affine3", "example1"};
  // validate / gap conjugacy
  int max_gen = 10;
  double tol = 1e-9;
  double gap_tol = 1e-12;
  // pesin
  int n_max = 12;
  long orbit_len = 1000000;
};

struct LabConfig {
  MapSpec map;
  std::vector<MeasureSpec> measures;
  ExperimentSpec exp;
  std::uint64_t seed = 42;
  int workers = 1;
  std::string out_dir = "out";
  std::string format = "both";  // csv | json | both
};

LabConfig parse_config_file(const std::string& path);
LabConfig parse_config_text(const std::string& text);

BuiltSystem build_system(const MapSpec& spec);
Measure build_measure(const MeasureSpec& spec, const BuiltSystem& sys);

}  // namespace pesinlab
