#include "tronquee/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace tronquee {

namespace {

const json& require(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorKind::usage, std::string("missing key '") + key + "'");
  return j.at(key);
}

template <class T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

std::vector<cx> complex_list(const json& j) {
  std::vector<cx> out;
  for (const auto& e : j) out.push_back(complex_from_json(e));
  return out;
}

json complex_list(const std::vector<cx>& v) {
  json a = json::array();
  for (cx z : v) a.push_back(to_json(z));
  return a;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

json to_json(cx z) { return json::array({z.real(), z.imag()}); }

cx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw Error(ErrorKind::usage, "complex value must be [re, im] or a number, got " + j.dump());
}

json to_json(const EquationSpec& spec) {
  json j{{"case", std::string(to_string(spec.which))}, {"alpha", to_json(spec.alpha)}, {"beta", to_json(spec.beta)}};
  j["branch_A"] = spec.branch_A ? to_json(*spec.branch_A) : json(nullptr);
  return j;
}

EquationSpec spec_from_json(const json& j) {
  EquationSpec s;
  s.which = case_from_string(require(j, "case").get<std::string>());
  if (j.contains("alpha")) s.alpha = complex_from_json(j.at("alpha"));
  if (j.contains("beta")) s.beta = complex_from_json(j.at("beta"));
  if (j.contains("branch_A") && !j.at("branch_A").is_null()) s.branch_A = complex_from_json(j.at("branch_A"));
  return s;
}

json to_json(const FormalSeries& f) {
  json j{{"offset", f.offset()}, {"coeffs", complex_list(f.coeffs())}};
  j["order"] = f.is_exact() ? json("exact") : json(f.order());
  return j;
}

FormalSeries series_from_json(const json& j) {
  const json& ord = require(j, "order");
  const int order = ord.is_string() && ord.get<std::string>() == "exact" ? FormalSeries::exact : ord.get<int>();
  return FormalSeries(require(j, "offset").get<int>(), complex_list(require(j, "coeffs")), order);
}

json to_json(const PoleObservation& p) {
  return {{"location", to_json(p.location)},  {"order", p.order_estimate},
          {"laurent_coeff", to_json(p.laurent_coeff)}, {"uncertainty", p.uncertainty},
          {"converged", p.converged},          {"variable", to_string(p.variable)}};
}

PoleObservation pole_from_json(const json& j) {
  PoleObservation p;
  p.location = complex_from_json(require(j, "location"));
  read_opt(j, "order", p.order_estimate);
  if (j.contains("laurent_coeff")) p.laurent_coeff = complex_from_json(j.at("laurent_coeff"));
  read_opt(j, "uncertainty", p.uncertainty);
  p.converged = j.value("converged", true);
  p.variable = j.value("variable", std::string("reciprocal")) == "h" ? RefineVariable::h : RefineVariable::reciprocal;
  return p;
}

json to_json(const PolePrediction& p) {
  return {{"n", p.n},          {"w_pred", to_json(p.w_pred)}, {"side", to_string(p.side)},
          {"refined", p.refined}, {"xi_s", to_json(p.xi_s)},     {"array", p.array}};
}

json to_json(const ComparisonReport& r) {
  json m = json::array();
  for (const auto& x : r.matches)
    m.push_back({{"n", x.n}, {"array", x.array}, {"w_pred", to_json(x.w_pred)}, {"w_obs", to_json(x.w_obs)}, {"gap", x.gap}});
  return {{"matches", m},
          {"unmatched_observed", r.unmatched_observed},
          {"unmatched_predicted", r.unmatched_predicted},
          {"trend", {{"decreasing", r.decreasing}, {"kendall_tau", r.kendall_tau}, {"final_gap", r.final_gap}}}};
}

json to_json(const RunConfig& c) {
  json j{{"spec", to_json(c.spec)},
         {"N", c.N},
         {"K", c.K},
         {"C", to_json(c.C)},
         {"side", to_string(c.side)},
         {"rel_tol", c.rel_tol},
         {"abs_tol", c.abs_tol},
         {"max_step", c.max_step},
         {"w_grid", complex_list(c.w_grid)},
         {"waypoints", complex_list(c.waypoints)},
         {"n_min", c.n_min},
         {"n_max", c.n_max},
         {"sheet", c.sheet},
         {"observed", c.observed},
         {"out_dir", c.out_dir},
         {"format", c.format},
         {"seed", c.seed}};
  j["phi"] = c.phi ? json(*c.phi) : json(nullptr);
  return j;
}

RunConfig config_from_json(const json& j, RunConfig c) {
  if (!j.is_object()) throw Error(ErrorKind::usage, "config must be a JSON object");
  try {
    if (j.contains("spec")) c.spec = spec_from_json(j.at("spec"));
    read_opt(j, "N", c.N);
    read_opt(j, "K", c.K);
    if (j.contains("phi")) c.phi = j.at("phi").is_null() ? std::nullopt : std::optional<double>(j.at("phi").get<double>());
    if (j.contains("C")) c.C = complex_from_json(j.at("C"));
    if (j.contains("side")) c.side = side_from_string(j.at("side").get<std::string>());
    read_opt(j, "rel_tol", c.rel_tol);
    read_opt(j, "abs_tol", c.abs_tol);
    read_opt(j, "max_step", c.max_step);
    if (j.contains("w_grid")) c.w_grid = complex_list(j.at("w_grid"));
    if (j.contains("waypoints")) c.waypoints = complex_list(j.at("waypoints"));
    read_opt(j, "n_min", c.n_min);
    read_opt(j, "n_max", c.n_max);
    read_opt(j, "sheet", c.sheet);
    read_opt(j, "observed", c.observed);
    read_opt(j, "out_dir", c.out_dir);
    read_opt(j, "format", c.format);
    read_opt(j, "seed", c.seed);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::usage, std::string("bad config value: ") + e.what());
  }
  return c;
}

void validate(const RunConfig& c) {
  if (!(c.rel_tol > 0.0) || !(c.abs_tol > 0.0) || !(c.max_step > 0.0))
    throw Error(ErrorKind::usage, "tolerances and max_step must be positive");
  if (c.N < 2) throw Error(ErrorKind::usage, "N must be at least 2");
  if (c.K < 0) throw Error(ErrorKind::usage, "K must be non-negative");
  if (c.format != "json" && c.format != "csv") throw Error(ErrorKind::usage, "format must be json or csv");
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::usage, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string trajectory_csv(const Trajectory& t) {
  std::string out = "w_re,w_im,h_re,h_im,dh_re,dh_im\n";
  for (const auto& n : t.nodes)
    out += num(n.w.real()) + "," + num(n.w.imag()) + "," + num(n.h.real()) + "," + num(n.h.imag()) + "," +
           num(n.dh.real()) + "," + num(n.dh.imag()) + "\n";
  return out;
}

std::string poles_csv(const std::vector<PoleObservation>& poles) {
  std::string out = "w_re,w_im,order,uncertainty,converged,variable\n";
  for (const auto& p : poles)
    out += num(p.location.real()) + "," + num(p.location.imag()) + "," + std::to_string(p.order_estimate) + "," +
           num(p.uncertainty) + "," + (p.converged ? "1" : "0") + "," + to_string(p.variable) + "\n";
  return out;
}

}  // namespace tronquee
