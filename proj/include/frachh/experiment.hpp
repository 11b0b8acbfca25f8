#pragma once

// Campaign runner behind the CLI: parses a JSON config, executes one named
// campaign, and writes a reproducible bundle (manifest.json echoing the full
// config and seed, results.csv, and any field/path files). Outputs contain
// no timestamps, so a rerun with the same config and seed is byte-identical.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "frachh/fbm.hpp"
#include "frachh/io.hpp"
#include "frachh/ktheta.hpp"
#include "frachh/noise.hpp"
#include "frachh/solver.hpp"
#include "frachh/verify.hpp"
#include "frachh/wellposedness.hpp"

#include "json.hpp"

namespace frachh {

inline constexpr const char* kVersion = "0.1.0";

inline const std::vector<std::string>& campaign_names() {
  static const std::vector<std::string> names = {
      "check-params", "sweep",        "sample-fbm",   "simulate",
      "verify-kernel", "verify-smoothing", "verify-hardy", "mc-covariance"};
  return names;
}

namespace detail {

using nlohmann::json;

inline double json_real(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "Inf" || s == "infinity" || s == "Infinity")
      return std::numeric_limits<double>::infinity();
    throw std::invalid_argument("config: unreadable numeric value '" + s + "'");
  }
  return j.get<double>();
}

inline ModelParams parse_params(const json& cfg) {
  if (!cfg.contains("params")) throw std::invalid_argument("config: missing 'params'");
  const json& p = cfg.at("params");
  ModelParams mp;
  mp.dim = p.value("N", 1);
  mp.theta = json_real(p.at("theta"));
  mp.gamma = json_real(p.value("gamma", json(0.0)));
  mp.p = json_real(p.value("p", json(2.0)));
  mp.q = json_real(p.value("q", json(2.0)));
  mp.hurst = json_real(p.at("H"));
  mp.mu = json_real(p.value("mu", json(0.0)));
  return mp;
}

inline SpatialGrid parse_grid(const json& cfg, int dim) {
  const json g = cfg.value("grid", json::object());
  return SpatialGrid(dim, g.value("n", 256), g.value("L", SpatialGrid::kPi));
}

inline TimeGrid parse_time(const json& cfg) {
  const json t = cfg.value("time", json::object());
  return TimeGrid(t.value("T", 1.0), t.value("steps", 128));
}

inline InitialCondition parse_ic(const json& solver) {
  InitialCondition ic;
  if (!solver.contains("ic")) return ic;
  const json& j = solver.at("ic");
  if (j.contains("file")) {
    ic.kind = InitialCondition::Kind::FromFile;
    ic.path = j.at("file").get<std::string>();
    return ic;
  }
  const std::string profile = j.value("profile", "zero");
  ic.amplitude = j.value("amplitude", 0.0);
  if (profile == "zero") {
    ic.kind = InitialCondition::Kind::Zero;
  } else if (profile == "sine") {
    ic.kind = InitialCondition::Kind::Sine;
    ic.mode = j.value("mode", 1);
  } else if (profile == "bump") {
    ic.kind = InitialCondition::Kind::Bump;
    ic.width = j.value("width", 0.5);
  } else {
    throw std::invalid_argument("config: unknown initial condition profile '" + profile + "'");
  }
  return ic;
}

struct CsvWriter {
  std::string body;
  explicit CsvWriter(const std::string& header) : body(header + "\n") {}
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      body += cells[i];
      body += (i + 1 == cells.size()) ? '\n' : ',';
    }
  }
};

inline std::string fmt(double v) { return format_g17(v); }

inline void run_check_params(const json& cfg, const std::filesystem::path& out_dir) {
  const ModelParams mp = parse_params(cfg);
  const AdmissibilityResult res = check_admissible(mp);
  CsvWriter csv(
      "accepted,violations,r,sigma,a,b,a_plus_b_minus_1,a_minus_p_sigma,a_minus_sigma,"
      "a_plus_sigma,third_slack,r_exact,sigma_exact,a_exact,b_exact");
  std::string viol;
  for (std::size_t i = 0; i < res.violations.size(); ++i)
    viol += (i ? ";" : "") + res.violations[i];
  if (res.accepted) {
    const DerivedExponents& e = res.exps;
    csv.row({"1", viol, fmt(e.r), fmt(e.sigma), fmt(e.a), fmt(e.b), fmt(e.a_plus_b_minus_1),
             fmt(e.a_minus_p_sigma), fmt(e.a_minus_sigma), fmt(e.a_plus_sigma),
             fmt(e.third_slack), e.exact ? e.r_rat.str() : "", e.exact ? e.sigma_rat.str() : "",
             e.exact ? e.a_rat.str() : "", e.exact ? e.b_rat.str() : ""});
  } else {
    csv.row({"0", viol, "", "", "", "", "", "", "", "", "", "", "", "", ""});
  }
  write_text_file(out_dir / "results.csv", csv.body);
}

// Acceptance records over a parameter lattice: options.vary maps parameter
// names (theta, gamma, p, q, H, mu) to {from, to, count} ranges; the sweep is
// the cartesian product applied on top of the base tuple.
inline void run_sweep(const json& cfg, const std::filesystem::path& out_dir) {
  const ModelParams base = parse_params(cfg);
  const json opt = cfg.value("options", json::object());
  const json vary = opt.value("vary", json::object());
  if (vary.empty())
    throw std::invalid_argument("sweep: options.vary must name at least one parameter range");
  std::vector<std::pair<std::string, std::vector<double>>> axes;
  for (auto it = vary.begin(); it != vary.end(); ++it) {  // keys iterate sorted
    const json& range = it.value();
    const double from = json_real(range.at("from"));
    const double to = json_real(range.at("to"));
    const int count = range.value("count", 2);
    if (count < 1) throw std::invalid_argument("sweep: range count must be >= 1");
    std::vector<double> vals;
    for (int i = 0; i < count; ++i)
      vals.push_back(count == 1 ? from : from + (to - from) * i / (count - 1.0));
    axes.emplace_back(it.key(), std::move(vals));
  }
  auto set_param = [](ModelParams& mp, const std::string& name, double v) {
    if (name == "theta") mp.theta = v;
    else if (name == "gamma") mp.gamma = v;
    else if (name == "p") mp.p = v;
    else if (name == "q") mp.q = v;
    else if (name == "H") mp.hurst = v;
    else if (name == "mu") mp.mu = v;
    else throw std::invalid_argument("sweep: unknown parameter '" + name + "'");
  };
  CsvWriter csv(
      "N,theta,gamma,p,q,H,mu,accepted,violations,r,sigma,a,b,a_plus_b_minus_1,"
      "a_minus_p_sigma,a_minus_sigma,a_plus_sigma,third_slack");
  std::vector<std::size_t> idx(axes.size(), 0);
  while (true) {
    ModelParams mp = base;
    for (std::size_t d = 0; d < axes.size(); ++d)
      set_param(mp, axes[d].first, axes[d].second[idx[d]]);
    const AdmissibilityResult res = check_admissible(mp);
    std::string viol;
    for (std::size_t i = 0; i < res.violations.size(); ++i)
      viol += (i ? ";" : "") + res.violations[i];
    std::vector<std::string> row = {std::to_string(mp.dim), fmt(mp.theta), fmt(mp.gamma),
                                    fmt(mp.p),  fmt(mp.q),  fmt(mp.hurst), fmt(mp.mu),
                                    res.accepted ? "1" : "0", viol};
    if (res.accepted) {
      const DerivedExponents& e = res.exps;
      for (double v : {e.r, e.sigma, e.a, e.b, e.a_plus_b_minus_1, e.a_minus_p_sigma,
                       e.a_minus_sigma, e.a_plus_sigma, e.third_slack})
        row.push_back(fmt(v));
    } else {
      for (int k = 0; k < 9; ++k) row.push_back("");
    }
    csv.row(row);
    // odometer
    std::size_t d = 0;
    for (; d < axes.size(); ++d) {
      if (++idx[d] < axes[d].second.size()) break;
      idx[d] = 0;
    }
    if (d == axes.size()) break;
  }
  write_text_file(out_dir / "results.csv", csv.body);
}

inline void run_sample_fbm(const json& cfg, const std::filesystem::path& out_dir,
                           std::uint64_t seed) {
  const ModelParams mp = parse_params(cfg);
  const TimeGrid tgrid = parse_time(cfg);
  const json opt = cfg.value("options", json::object());
  const std::string method = opt.value("method", "cholesky");
  const int count = opt.value("count", 4);
  const Hurst h(mp.hurst);
  CsvWriter csv("index,seed,terminal_value,max_abs,file");
  for (int k = 0; k < count; ++k) {
    const std::uint64_t path_seed = derive_stream(seed, static_cast<std::uint64_t>(k));
    FbmPath path{tgrid, {}, mp.hurst, path_seed};
    if (method == "cholesky") {
      path = sample_fbm_cholesky(tgrid, h, path_seed);
    } else if (method == "volterra") {
      path = sample_fbm_volterra(tgrid, h, path_seed);
    } else if (method == "wiener") {
      path = sample_wiener(tgrid, path_seed);
    } else {
      throw std::invalid_argument("sample-fbm: unknown method '" + method + "'");
    }
    char name[32];
    std::snprintf(name, sizeof(name), "path_%03d.csv", k);
    write_fbm_path_csv(out_dir / name, path);
    double max_abs = 0.0;
    for (double v : path.values) max_abs = std::max(max_abs, std::fabs(v));
    csv.row({std::to_string(k), std::to_string(path_seed), fmt(path.values.back()), fmt(max_abs),
             name});
  }
  write_text_file(out_dir / "results.csv", csv.body);
}

inline json run_simulate(const json& cfg, const std::filesystem::path& out_dir,
                         std::uint64_t seed, bool override_admissibility) {
  const json solver = cfg.value("solver", json::object());
  const ModelParams mp = parse_params(cfg);
  SolverConfig sc{mp, parse_grid(cfg, mp.dim), parse_time(cfg)};
  const json noise = cfg.value("noise", json::object());
  sc.mode_cutoff = noise.value("mode_cutoff", 32);
  sc.noise_subdiv = noise.value("subdiv", 4);
  sc.seed = seed;
  sc.picard_tol = solver.value("picard_tol", 1e-10);
  sc.max_picard_iters = solver.value("max_iters", 30);
  sc.ic = parse_ic(solver);
  sc.override_admissibility = override_admissibility;
  sc.c_hardy = solver.value("c_hardy", 1.0);
  sc.kappa = solver.value("kappa", -1.0);
  sc.skip_budget = solver.value("skip_budget", false);

  const SolutionTrajectory sol = picard_solve(sc);

  CsvWriter csv("node,t,norm_q,t_sigma_norm_r");
  for (std::size_t i = 0; i < sol.fields.size(); ++i)
    csv.row({std::to_string(i), fmt(sc.tgrid.node(static_cast<int>(i))), fmt(sol.norm_q[i]),
             fmt(sol.weighted_norm_r[i])});
  write_text_file(out_dir / "results.csv", csv.body);

  std::filesystem::create_directories(out_dir / "fields");
  for (std::size_t i = 0; i < sol.fields.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "node_%04d.fhhf", static_cast<int>(i));
    write_field_binary(out_dir / "fields" / name, sol.fields[i]);
  }

  json extra;
  extra["picard_history"] = sol.picard_history;
  extra["converged"] = sol.converged;
  extra["in_ball"] = sol.in_ball;
  extra["admissibility_overridden"] = sol.admissibility_overridden;
  extra["violations"] = sol.violations;
  extra["exponents"] = {{"r", sol.exps.r}, {"sigma", sol.exps.sigma}, {"a", sol.exps.a},
                        {"b", sol.exps.b}};
  extra["budget"] = {{"kappa", sol.budget.kappa},
                     {"ball_radius", sol.budget.ball_radius},
                     {"c_hardy", sol.budget.c_hardy},
                     {"lambda", sol.budget.lambda},
                     {"t_star", sol.budget.t_star},
                     {"feasible", sol.budget.feasible}};
  return extra;
}

inline void run_verify_kernel(const json& cfg, const std::filesystem::path& out_dir) {
  const json opt = cfg.value("options", json::object());
  const double radius = opt.value("radius", 20.0);
  const double x_max = opt.value("x_max", 10.0);
  const double x_step = opt.value("x_step", 0.5);
  CsvWriter csv("record,theta,arg,value,reference,abs_diff");
  for (double theta : {2.0, 1.0}) {
    for (double x = 0.0; x <= x_max + 1e-12; x += x_step) {
      const double v = eval_Ktheta_radial(x, theta, 1);
      const double ref =
          (theta == 2.0) ? ktheta_closed_form_theta2(x) : ktheta_closed_form_theta1(x);
      csv.row({"closed_form", fmt(theta), fmt(x), fmt(v), fmt(ref), fmt(std::fabs(v - ref))});
    }
    const double cert = decay_bound_certificate(theta, 1, radius);
    const double cert2 = decay_bound_certificate(theta, 1, 2.0 * radius);
    csv.row({"decay_certificate", fmt(theta), fmt(radius), fmt(cert), fmt(cert2),
             fmt(std::fabs(cert - cert2) / cert)});
    // scaling law E(x,t) = t^(-N/theta) K(t^(-1/theta) x)
    for (double t : {0.5, 1.0, 2.0}) {
      const double x0 = 1.5;
      const double lhs = eval_heat_kernel_radial(x0, t, theta, 1);
      const double rhs = std::pow(t, -1.0 / theta) *
                         eval_Ktheta_radial(std::pow(t, -1.0 / theta) * x0, theta, 1);
      csv.row({"scaling_law", fmt(theta), fmt(t), fmt(lhs), fmt(rhs), fmt(std::fabs(lhs - rhs))});
    }
  }
  for (int m = 1; m <= 4; ++m) {
    const double v = kappa_m(m);
    csv.row({"kappa_m", "", std::to_string(m), fmt(v), fmt(v), "0"});
  }
  write_text_file(out_dir / "results.csv", csv.body);
}

inline void run_verify_smoothing(const json& cfg, const std::filesystem::path& out_dir,
                                 std::uint64_t seed) {
  const json opt = cfg.value("options", json::object());
  const SpatialGrid grid = parse_grid(cfg, 1);
  const int trials = opt.value("trials", 100);
  std::vector<double> t_list = opt.value("t_list", std::vector<double>{0.25, 0.5, 1.0});
  json pairs = opt.value("pairs", json::array({json::array({1.0, 2.0}), json::array({2.0, 4.0}),
                                               json::array({2.0, "inf"})}));
  std::vector<double> thetas = opt.value("thetas", std::vector<double>{1.0, 2.0});
  CsvWriter csv("theta,p,q,trials,max_ratio,kappa_bound,within_allowance");
  for (double theta : thetas) {
    const double kappa = smoothing_constant(theta, grid.dim());
    for (const auto& pair : pairs) {
      const double p = json_real(pair.at(0));
      const double q = json_real(pair.at(1));
      const double ratio = verify_smoothing(grid, theta, p, q, t_list, trials, seed);
      const double bound = (p == q) ? 1.0 + 1e-10 : 1.1 * kappa;
      csv.row({fmt(theta), fmt(p), std::isinf(q) ? "inf" : fmt(q), std::to_string(trials),
               fmt(ratio), fmt(bound), ratio <= bound ? "1" : "0"});
    }
  }
  write_text_file(out_dir / "results.csv", csv.body);
}

inline void run_verify_hardy(const json& cfg, const std::filesystem::path& out_dir,
                             std::uint64_t seed) {
  const json opt = cfg.value("options", json::object());
  const ModelParams mp = parse_params(cfg);
  const int trials = opt.value("trials", 60);
  const int n = cfg.value("grid", json::object()).value("n", 256);
  const double L = cfg.value("grid", json::object()).value("L", SpatialGrid::kPi);
  std::vector<double> t_list = opt.value("t_list", std::vector<double>{0.25, 0.5, 1.0});
  const double p_exp = opt.contains("p") ? json_real(opt.at("p")) : 4.0;
  const double q_exp = opt.contains("q") ? json_real(opt.at("q")) : 6.0;
  CsvWriter csv("n,trials,constant");
  const SpatialGrid coarse(mp.dim, n, L);
  const SpatialGrid fine(mp.dim, 2 * n, L);
  const double c1 = verify_hardy_estimate(coarse, mp.theta, mp.gamma, p_exp, q_exp, t_list,
                                          trials, seed);
  const double c2 = verify_hardy_estimate(fine, mp.theta, mp.gamma, p_exp, q_exp, t_list,
                                          2 * trials, seed);
  csv.row({std::to_string(n), std::to_string(trials), fmt(c1)});
  csv.row({std::to_string(2 * n), std::to_string(2 * trials), fmt(c2)});
  csv.row({"stability", "", fmt(std::fabs(c2 - c1) / c1)});
  write_text_file(out_dir / "results.csv", csv.body);
}

inline void run_mc_covariance(const json& cfg, const std::filesystem::path& out_dir,
                              std::uint64_t seed) {
  const json opt = cfg.value("options", json::object());
  std::vector<double> hursts = opt.value("hursts", std::vector<double>{0.55, 0.7, 0.9});
  const int paths = opt.value("paths", 2000);
  const int steps = opt.value("steps", 64);
  const double horizon = opt.value("T", 1.0);
  const int stride = opt.value("node_stride", 8);
  const TimeGrid tgrid(horizon, steps);
  CsvWriter csv("method,H,s,t,empirical,exact,se,abs_z,bias");
  for (double hv : hursts) {
    const Hurst h(hv);
    std::vector<int> nodes;
    for (int i = stride; i <= steps; i += stride) nodes.push_back(i);
    const std::size_t nn = nodes.size();
    static const std::string kMethods[2] = {"cholesky", "volterra"};
    for (const std::string& method : kMethods) {
      if (method == "volterra" && hv < 0.5) continue;
      FbmCholeskySampler chol(tgrid, h);
      FbmVolterraSampler volt(tgrid, h);
      std::vector<double> acc(nn * nn, 0.0);
      for (int pth = 0; pth < paths; ++pth) {
        const std::uint64_t s = derive_stream(seed, static_cast<std::uint64_t>(pth));
        const FbmPath path = (method == "cholesky") ? chol.sample(s) : volt.sample(s);
        for (std::size_t a = 0; a < nn; ++a)
          for (std::size_t b = a; b < nn; ++b)
            acc[a * nn + b] += path.values[nodes[a]] * path.values[nodes[b]];
      }
      for (std::size_t a = 0; a < nn; ++a) {
        for (std::size_t b = a; b < nn; ++b) {
          const double s = tgrid.node(nodes[a]);
          const double t = tgrid.node(nodes[b]);
          const double emp = acc[a * nn + b] / paths;
          const double exact = fbm_covariance(s, t, h);
          const double se = std::sqrt((exact * exact + fbm_covariance(s, s, h) *
                                                            fbm_covariance(t, t, h)) /
                                      paths);
          double bias = 0.0;
          if (method == "volterra")
            bias = std::fabs(volt.discrete_covariance(nodes[a], nodes[b]) - exact);
          const double z = std::fabs(emp - exact) / se;
          csv.row({method, fmt(hv), fmt(s), fmt(t), fmt(emp), fmt(exact), fmt(se), fmt(z),
                   fmt(bias)});
        }
      }
    }
  }
  write_text_file(out_dir / "results.csv", csv.body);
}

}  // namespace detail

struct ExperimentResult {
  std::filesystem::path out_dir;
  std::filesystem::path results_csv;
};

inline ExperimentResult run_experiment(const nlohmann::json& cfg,
                                       const std::filesystem::path& out_dir,
                                       std::int64_t seed_override = -1,
                                       bool override_admissibility = false) {
  if (!cfg.contains("campaign")) throw std::invalid_argument("config: missing 'campaign'");
  const std::string campaign = cfg.at("campaign").get<std::string>();
  bool known = false;
  for (const auto& name : campaign_names()) known = known || (name == campaign);
  if (!known) throw std::invalid_argument("unknown campaign '" + campaign + "'");

  std::filesystem::create_directories(out_dir);
  std::uint64_t seed = cfg.value("noise", nlohmann::json::object()).value("seed", 1u);
  if (cfg.contains("seed")) seed = cfg.at("seed").get<std::uint64_t>();
  if (seed_override >= 0) seed = static_cast<std::uint64_t>(seed_override);

  nlohmann::json manifest;
  manifest["artifact"] = "frachh";
  manifest["version"] = kVersion;
  manifest["campaign"] = campaign;
  manifest["config"] = cfg;
  manifest["seed"] = seed;
  manifest["override_admissibility"] = override_admissibility;

  using namespace detail;
  if (campaign == "check-params") {
    run_check_params(cfg, out_dir);
  } else if (campaign == "sweep") {
    run_sweep(cfg, out_dir);
  } else if (campaign == "sample-fbm") {
    run_sample_fbm(cfg, out_dir, seed);
  } else if (campaign == "simulate") {
    manifest["simulate"] = run_simulate(cfg, out_dir, seed, override_admissibility);
  } else if (campaign == "verify-kernel") {
    run_verify_kernel(cfg, out_dir);
  } else if (campaign == "verify-smoothing") {
    run_verify_smoothing(cfg, out_dir, seed);
  } else if (campaign == "verify-hardy") {
    run_verify_hardy(cfg, out_dir, seed);
  } else if (campaign == "mc-covariance") {
    run_mc_covariance(cfg, out_dir, seed);
  }
  write_text_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
  return {out_dir, out_dir / "results.csv"};
}

inline ExperimentResult run_experiment_file(const std::filesystem::path& config_path,
                                            const std::filesystem::path& out_dir,
                                            std::int64_t seed_override = -1,
                                            bool override_admissibility = false) {
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot open config file: " + config_path.string());
  nlohmann::json cfg;
  try {
    in >> cfg;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("config parse error in " + config_path.string() + ": " + e.what());
  }
  return run_experiment(cfg, out_dir, seed_override, override_admissibility);
}

}  // namespace frachh
