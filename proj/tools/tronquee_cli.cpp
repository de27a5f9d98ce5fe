// tronquee: command-line front end over the library.
//
// Exit status: 0 ok, 1 numerical failure, 2 usage. Errors go to stderr as
// {"error": <kind>, "message": <text>}.
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tronquee/asymptotics.hpp"
#include "tronquee/borel.hpp"
#include "tronquee/integrator.hpp"
#include "tronquee/io.hpp"
#include "tronquee/series.hpp"
#include "tronquee/validation.hpp"

using namespace tronquee;

namespace {

cx parse_complex(const std::string& s) {
  const auto comma = s.find(',');
  try {
    size_t used = 0;
    if (comma == std::string::npos) {
      const double re = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return {re, 0.0};
    }
    const std::string a = s.substr(0, comma), b = s.substr(comma + 1);
    const double re = std::stod(a, &used);
    if (used != a.size()) throw std::invalid_argument(s);
    const double im = std::stod(b, &used);
    if (used != b.size()) throw std::invalid_argument(s);
    return {re, im};
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::usage, "expected a complex number 're' or 're,im', got '" + s + "'");
  }
}

// "a..b" or a single index.
void parse_range(const std::string& s, int& lo, int& hi) {
  try {
    const auto dots = s.find("..");
    if (dots == std::string::npos) {
      lo = hi = std::stoi(s);
      return;
    }
    lo = std::stoi(s.substr(0, dots));
    hi = std::stoi(s.substr(dots + 2));
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::usage, "expected an index range 'a..b', got '" + s + "'");
  }
  if (lo > hi) throw Error(ErrorKind::usage, "empty n range '" + s + "'");
}

// Raw flag values; turned into a RunConfig once CLI11 has parsed them.
struct Flags {
  std::string which = "PIII_i";
  std::string alpha = "0", beta = "0", A;
  int N = 30, K = 3;
  std::optional<double> phi;
  std::string C = "0";
  std::string side = "upper";
  double rel_tol = 1e-12, abs_tol = 1e-14, max_step = 0.5;
  std::vector<std::string> w;
  std::string w_ray;
  std::string w0;
  std::vector<std::string> to;
  std::string n = "1..10";
  int sheet = 0;
  std::string observed;
  std::string config;
  std::string out;
  std::string format = "json";
  std::uint64_t seed = 20240607;
};

RunConfig build_config(const Flags& f) {
  RunConfig c;
  c.spec.which = case_from_string(f.which);
  c.spec.alpha = parse_complex(f.alpha);
  c.spec.beta = parse_complex(f.beta);
  if (!f.A.empty()) c.spec.branch_A = parse_complex(f.A);
  c.N = f.N;
  c.K = f.K;
  c.phi = f.phi;
  c.C = parse_complex(f.C);
  c.side = side_from_string(f.side);
  c.rel_tol = f.rel_tol;
  c.abs_tol = f.abs_tol;
  c.max_step = f.max_step;
  for (const auto& s : f.w) c.w_grid.push_back(parse_complex(s));
  if (!f.w_ray.empty()) {
    // r0,r1,count,arg
    std::vector<double> v;
    std::string rest = f.w_ray;
    try {
      size_t pos;
      while ((pos = rest.find(',')) != std::string::npos) {
        v.push_back(std::stod(rest.substr(0, pos)));
        rest = rest.substr(pos + 1);
      }
      v.push_back(std::stod(rest));
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::usage, "--w-ray expects r0,r1,count,arg");
    }
    if (v.size() != 4 || !(v[0] > 0.0) || !(v[1] >= v[0]) || v[2] < 1)
      throw Error(ErrorKind::usage, "--w-ray expects r0,r1,count,arg with 0 < r0 <= r1 and count >= 1");
    for (cx z : geometric_ray(v[0], v[1], static_cast<int>(v[2]), v[3])) c.w_grid.push_back(z);
  }
  if (!f.w0.empty()) {
    c.waypoints.push_back(parse_complex(f.w0));
    for (const auto& s : f.to) c.waypoints.push_back(parse_complex(s));
  }
  parse_range(f.n, c.n_min, c.n_max);
  c.sheet = f.sheet;
  c.observed = f.observed;
  c.out_dir = f.out;
  c.format = f.format;
  c.seed = f.seed;
  if (!f.config.empty()) {
    json j;
    try {
      j = json::parse(read_file(f.config));
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::usage, f.config + ": " + e.what());
    }
    c = config_from_json(j, c);
    if (c.n_min > c.n_max) throw Error(ErrorKind::usage, "empty n range");
  }
  validate(c);
  return c;
}

void need_grid(const RunConfig& c) {
  if (c.w_grid.empty()) throw Error(ErrorKind::usage, "no evaluation points: give --w or --w-ray");
}

void need_path(const RunConfig& c) {
  if (c.waypoints.size() < 2) throw Error(ErrorKind::usage, "a path needs --w0 and at least one --to");
}

struct Output {
  std::string text;
  std::string ext;
};

Output cmd_series(const RunConfig& c) {
  validate(c.spec);
  const NormalizedForm nf(c.spec);
  const Transseries ts = compute_levels(nf, c.K, c.N);
  if (c.format == "csv") {
    std::string out = "level,power,re,im\n";
    auto rows = [&](int k, const FormalSeries& s) {
      for (int p = s.offset(); p <= s.last_power(); ++p) {
        char buf[128];
        const cx v = s.coeff(p);
        std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", k, p, v.real(), v.imag());
        out += buf;
      }
    };
    rows(0, ts.h0);
    for (int k = 1; k <= ts.K(); ++k) rows(k, ts.levels[static_cast<size_t>(k - 1)]);
    return {out, "csv"};
  }
  json levels = json::array();
  for (const auto& s : ts.levels) levels.push_back(to_json(s));
  const json j{{"spec", to_json(c.spec)}, {"N", c.N},           {"K", c.K},
               {"beta1", to_json(nf.beta1())}, {"beta2", to_json(nf.beta2())},
               {"h0", to_json(ts.h0)}, {"levels", levels}};
  return {dump(j), "json"};
}

TronqueeSum make_sum(const RunConfig& c) {
  validate(c.spec);
  const NormalizedForm nf(c.spec);
  return TronqueeSum(nf, compute_levels(nf, c.K, c.N));
}

Output cmd_sum(const RunConfig& c) {
  need_grid(c);
  const TronqueeSum sum = make_sum(c);
  json recs = json::array();
  std::string csv = "w_re,w_im,h_re,h_im,residual,est_error,phi\n";
  for (cx w : c.w_grid) {
    const SolutionJet s = sum.eval(c.C, c.side, w, c.K, c.phi);
    const double res = std::abs(eqh_residual(sum.form(), w, s.h, s.dh, s.d2h));
    recs.push_back({{"w", to_json(w)},
                    {"value", to_json(s.h)},
                    {"derivative", to_json(s.dh)},
                    {"residual", res},
                    {"est_error", s.error_estimate},
                    {"phi", s.phi},
                    {"truncation_warning", s.truncation_warning}});
    char buf[256];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.3e,%.3e,%.17g\n", w.real(), w.imag(), s.h.real(),
                  s.h.imag(), res, s.error_estimate, s.phi);
    csv += buf;
  }
  if (c.format == "csv") return {csv, "csv"};
  const json j{{"spec", to_json(c.spec)}, {"C", to_json(c.C)}, {"side", to_string(c.side)}, {"records", recs}};
  return {dump(j), "json"};
}

struct PathRun {
  SeedResult seed;
  Trajectory traj;
  NormalizedForm nf;
};

PathRun run_path(const RunConfig& c) {
  need_path(c);
  const TronqueeSum sum = make_sum(c);
  const SeedResult seed = seed_from_borel(sum, c.C, c.side, c.waypoints.front());
  if (seed.small_w_warning) std::fprintf(stderr, "warning: seed point |w0| < 30, Borel sum may be inaccurate\n");
  PathSpec ps;
  ps.waypoints = c.waypoints;
  ps.rel_tol = c.rel_tol;
  ps.abs_tol = c.abs_tol;
  ps.max_step = c.max_step;
  return {seed, integrate_path(sum.form(), seed.node, ps), sum.form()};
}

Output cmd_integrate(const RunConfig& c) {
  const PathRun r = run_path(c);
  if (c.format == "csv") return {trajectory_csv(r.traj), "csv"};
  json nodes = json::array();
  for (const auto& n : r.traj.nodes) nodes.push_back({{"w", to_json(n.w)}, {"h", to_json(n.h)}, {"dh", to_json(n.dh)}});
  json j{{"spec", to_json(c.spec)},
         {"C", to_json(c.C)},
         {"side", to_string(c.side)},
         {"seed_error", r.seed.error_estimate},
         {"blowup", r.traj.blowup},
         {"rejected_steps", r.traj.rejected_steps},
         {"nodes", nodes}};
  j["blowup_at"] = r.traj.blowup ? to_json(r.traj.blowup_at) : json(nullptr);
  return {dump(j), "json"};
}

Output cmd_poles(const RunConfig& c) {
  const PathRun r = run_path(c);
  const std::vector<PoleObservation> poles = cluster_poles(detect_poles(r.nf, r.traj));
  if (c.format == "csv") return {poles_csv(poles), "csv"};
  json arr = json::array();
  for (const auto& p : poles) arr.push_back(to_json(p));
  const json j{{"spec", to_json(c.spec)}, {"C", to_json(c.C)}, {"side", to_string(c.side)}, {"poles", arr}};
  return {dump(j), "json"};
}

PredictionSet predictions(const RunConfig& c) {
  validate(c.spec);
  return predict_poles_w(c.spec, c.C, c.side, c.n_min, c.n_max);
}

Output cmd_predict(const RunConfig& c) {
  const PredictionSet set = predictions(c);
  const bool with_x = c.spec.which != Case::PIV_3;
  json arr = json::array();
  std::string csv = "n,array,w_re,w_im,x_re,x_im\n";
  for (const auto& p : set.poles) {
    json e = to_json(p);
    cx x{};
    if (with_x) {
      x = map_w_to_x(c.spec, p.w_pred, c.sheet);
      e["x_pred"] = to_json(x);
    }
    arr.push_back(e);
    char buf[256];
    std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g,%.17g\n", p.n, p.array, p.w_pred.real(),
                  p.w_pred.imag(), x.real(), x.imag());
    csv += buf;
  }
  if (c.format == "csv") return {csv, "csv"};
  json j{{"spec", to_json(c.spec)}, {"C", to_json(c.C)}, {"side", to_string(c.side)}, {"sheet", c.sheet},
         {"predictions", arr}};
  j["reason"] = set.reason.empty() ? json(nullptr) : json(set.reason);
  return {dump(j), "json"};
}

Output cmd_compare(const RunConfig& c) {
  if (c.observed.empty()) throw Error(ErrorKind::usage, "compare needs --observed <poles.json>");
  json obs;
  try {
    obs = json::parse(read_file(c.observed));
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::usage, c.observed + ": " + e.what());
  }
  // Accept either a bare list or the output of `poles`.
  const json& list = obs.is_object() && obs.contains("poles") ? obs.at("poles") : obs;
  if (!list.is_array()) throw Error(ErrorKind::usage, "observed poles must be a JSON list");
  std::vector<PoleObservation> observed;
  for (const auto& p : list) observed.push_back(pole_from_json(p));
  const ComparisonReport rep = compare_predictions(observed, predictions(c).poles);
  if (c.format == "csv") {
    std::string csv = "n,array,w_pred_re,w_pred_im,w_obs_re,w_obs_im,gap\n";
    for (const auto& m : rep.matches) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", m.n, m.array, m.w_pred.real(),
                    m.w_pred.imag(), m.w_obs.real(), m.w_obs.imag(), m.gap);
      csv += buf;
    }
    return {csv, "csv"};
  }
  json j = to_json(rep);
  j["spec"] = to_json(c.spec);
  return {dump(j), "json"};
}

int cmd_selftest(const RunConfig& c) {
  int failures = 0;
  std::printf("%-40s %-4s %9s  %s\n", "property", "", "seconds", "detail");
  for (const auto& chk : all_checks(c.seed)) {
    const CheckResult r = chk.run();
    std::printf("%-40s %-4s %9.2f  %s\n", r.key.c_str(), r.pass ? "PASS" : "FAIL", r.seconds, r.detail.c_str());
    std::fflush(stdout);
    failures += r.pass ? 0 : 1;
  }
  std::printf("%d failed\n", failures);
  return failures == 0 ? 0 : 1;
}

void emit(const RunConfig& c, const std::string& command, const Output& o) {
  if (c.out_dir.empty()) {
    std::cout << o.text;
    return;
  }
  write_file_atomic(c.out_dir + "/" + command + "." + o.ext, o.text);
}

void report_error(const char* kind, const std::string& message) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tronquee solutions of reduced Painleve III and IV equations"};
  app.require_subcommand(1);
  Flags f;

  auto add_spec = [&](CLI::App* s) {
    s->add_option("--case", f.which, "PIII_i, PIII_ii, PIV_1, PIV_2 or PIV_3");
    s->add_option("--alpha", f.alpha, "alpha as 're' or 're,im'");
    s->add_option("--beta", f.beta, "beta as 're' or 're,im'");
    s->add_option("--A", f.A, "branch constant A (PIII cases, PIV_3)");
    s->add_option("--config", f.config, "JSON config; its keys override flags");
    s->add_option("--out", f.out, "write <out>/<command>.<format> instead of stdout");
    s->add_option("--format", f.format, "json or csv");
  };
  auto add_series = [&](CLI::App* s) {
    s->add_option("--N", f.N, "series order");
    s->add_option("--K", f.K, "number of exponential levels");
  };
  auto add_sum = [&](CLI::App* s) {
    add_series(s);
    s->add_option("--C", f.C, "transseries constant");
    s->add_option("--side", f.side, "upper or lower");
    s->add_option("--phi", f.phi, "Laplace ray angle (default: chosen per point)");
  };
  auto add_path = [&](CLI::App* s) {
    add_sum(s);
    s->add_option("--w0", f.w0, "seed point, summed by Borel-Pade-Laplace");
    s->add_option("--to", f.to, "path waypoint (repeatable)");
    s->add_option("--rel-tol", f.rel_tol);
    s->add_option("--abs-tol", f.abs_tol);
    s->add_option("--max-step", f.max_step);
  };
  auto add_predict = [&](CLI::App* s) {
    s->add_option("--C", f.C, "transseries constant");
    s->add_option("--side", f.side, "upper or lower");
    s->add_option("--n", f.n, "pole index range a..b");
  };

  CLI::App* series = app.add_subcommand("series", "formal transseries coefficients");
  add_spec(series);
  add_series(series);
  CLI::App* sum = app.add_subcommand("sum", "Borel-Pade-Laplace sum at points w");
  add_spec(sum);
  add_sum(sum);
  sum->add_option("--w", f.w, "evaluation point (repeatable)");
  sum->add_option("--w-ray", f.w_ray, "r0,r1,count,arg: geometric points on a ray");
  CLI::App* integrate = app.add_subcommand("integrate", "integrate the ODE along a path");
  add_spec(integrate);
  add_path(integrate);
  CLI::App* poles = app.add_subcommand("poles", "locate poles along a path");
  add_spec(poles);
  add_path(poles);
  CLI::App* predict = app.add_subcommand("predict", "asymptotic pole positions");
  add_spec(predict);
  add_predict(predict);
  predict->add_option("--sheet", f.sheet, "sheet of the x-plane map");
  CLI::App* compare = app.add_subcommand("compare", "match observed poles to predictions");
  add_spec(compare);
  add_predict(compare);
  compare->add_option("--observed", f.observed, "poles JSON (output of `poles`)");
  CLI::App* selftest = app.add_subcommand("selftest", "run the invariant suite");
  selftest->add_option("--seed", f.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("usage", e.what());
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  try {
    const RunConfig c = build_config(f);
    if (command == "selftest") return cmd_selftest(c);
    Output o;
    if (command == "series") o = cmd_series(c);
    else if (command == "sum") o = cmd_sum(c);
    else if (command == "integrate") o = cmd_integrate(c);
    else if (command == "poles") o = cmd_poles(c);
    else if (command == "predict") o = cmd_predict(c);
    else o = cmd_compare(c);
    emit(c, command, o);
  } catch (const Error& e) {
    report_error(to_string(e.kind()), e.what());
    return e.kind() == ErrorKind::usage ? 2 : 1;
  } catch (const std::exception& e) {
    report_error("internal", e.what());
    return 1;
  }
  return 0;
}
