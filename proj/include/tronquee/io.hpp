#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tronquee/asymptotics.hpp"
#include "tronquee/borel.hpp"
#include "tronquee/equations.hpp"
#include "tronquee/integrator.hpp"
#include "tronquee/series.hpp"

namespace tronquee {

using json = nlohmann::json;

// Complex numbers are [re, im]; a bare number is accepted as real on input.
json to_json(cx z);
cx complex_from_json(const json& j);

json to_json(const EquationSpec& spec);
EquationSpec spec_from_json(const json& j);

json to_json(const FormalSeries& f);
FormalSeries series_from_json(const json& j);

json to_json(const PoleObservation& p);
PoleObservation pole_from_json(const json& j);
json to_json(const PolePrediction& p);
json to_json(const ComparisonReport& r);

struct RunConfig {
  EquationSpec spec;
  int N = 30;
  int K = 3;
  std::optional<double> phi;
  cx C{0.0, 0.0};
  Side side = Side::upper;
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
  double max_step = 0.5;
  std::vector<cx> w_grid;
  std::vector<cx> waypoints;  // first waypoint is the seed point
  int n_min = 1;
  int n_max = 10;
  int sheet = 0;
  std::string observed;  // pole list (JSON) for `compare`
  std::string out_dir;
  std::string format = "json";
  std::uint64_t seed = 20240607;
};

json to_json(const RunConfig& c);
// Keys absent from `j` keep the values already in `base`.
RunConfig config_from_json(const json& j, RunConfig base = {});
// Throws usage on non-positive tolerances, bad orders or an unknown format.
void validate(const RunConfig& c);

// Write via a temporary file in the same directory and rename.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// Deterministic JSON text (two-space indent, trailing newline).
std::string dump(const json& j);

std::string trajectory_csv(const Trajectory& t);
std::string poles_csv(const std::vector<PoleObservation>& poles);

}  // namespace tronquee
