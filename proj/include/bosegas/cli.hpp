#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bosegas/config.hpp"
#include "bosegas/dispersion.hpp"
#include "bosegas/dynamics.hpp"
#include "bosegas/errors.hpp"
#include "bosegas/friction.hpp"
#include "bosegas/io.hpp"
#include "bosegas/soliton.hpp"

namespace bosegas::cli {

/// One pass/fail line. pass = measured <= threshold unless comparison is ">".
struct Check {
  std::string id;
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  std::string comparison = "<=";

  bool pass() const {
    if (!std::isfinite(measured)) return false;
    return comparison == ">" ? measured > threshold : measured <= threshold;
  }
  json to_json() const {
    return {{"id", id}, {"name", name}, {"measured", measured}, {"threshold", threshold},
            {"comparison", comparison}, {"pass", pass()}};
  }
};

namespace detail {

struct Context {
  std::filesystem::path out_dir;
  std::ostream& out;
};

inline json envelope(const std::string& command, const json& effective, const std::vector<Check>& checks) {
  json c = json::array();
  for (const auto& k : checks) c.push_back(k.to_json());
  return {{"tool_version", tool_version},
          {"command", command},
          {"config_hash", config_hash(effective)},
          {"effective_config", effective},
          {"checks", c}};
}

inline void emit(const Context& ctx, const std::string& command, json result) {
  const auto path = ctx.out_dir / (command + ".json");
  write_text_file(path.string(), to_text(result));
  for (const auto& c : result["checks"])
    ctx.out << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << c["id"].get<std::string>() << ' '
            << c["name"].get<std::string>() << " measured=" << format_double(c["measured"].is_null() ? NAN : c["measured"].get<double>())
            << ' ' << c["comparison"].get<std::string>() << ' ' << format_double(c["threshold"].get<double>()) << '\n';
  ctx.out << "wrote " << path.string() << '\n';
}

/// Short number for check names.
inline std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

inline std::string csv_row(std::initializer_list<std::vector<double>> parts) {
  std::string line;
  for (const auto& part : parts)
    for (double v : part) {
      if (!line.empty()) line += ',';
      line += format_double(v);
    }
  return line + '\n';
}

inline int simulate(const Context& ctx, const json& raw) {
  const SimConfig cfg = parse_simulate(raw);
  const json eff = to_json(cfg);
  const std::string hash = config_hash(eff);
  const auto csv_path = ctx.out_dir / "trajectory.csv";
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw ConfigError("output", "cannot write " + csv_path.string());
  csv << "# bosegas " << tool_version << " config_hash=" << hash << '\n';
  csv << 't';
  for (const char* name : {"X", "P", "Pdot"})
    for (int j = 1; j <= cfg.d; ++j) csv << ',' << name << '_' << j;
  csv << ",H,reBetaL2,gradImBetaL2,solitonGap\n";

  const auto rec = simulate(cfg, [&](const Sample& s) {
    csv << csv_row({{s.t}, s.X, s.P, s.Pdot, {s.H, s.re_beta_l2, s.grad_im_beta_l2, s.soliton_gap}});
    csv.flush();
  });

  double drift = 0.0;
  for (const auto& r : rec.rows) drift = std::max(drift, std::abs(r.H - rec.H0) / std::max(1.0, std::abs(rec.H0)));
  json summary{{"H0", rec.H0},
               {"max_relative_drift", drift},
               {"min_bound_slack", rec.min_bound_slack},
               {"bounds", {{"P_max", rec.bounds.P_max}, {"re_beta_max", rec.bounds.re_beta_max},
                           {"grad_im_max", rec.bounds.grad_im_max}}},
               {"rows", rec.rows.size()},
               {"final", {{"t", rec.rows.back().t}, {"X", rec.rows.back().X}, {"P", rec.rows.back().P}}}};
  if (rec.rows.size() >= 20) {
    const auto b = ballistic_diagnostics(rec);
    summary["ballistic"] = {{"degenerate", b.degenerate},
                            {"pdot_exponent", b.pdot_fit.slope},
                            {"pdot_exponent_ci", b.pdot_fit.slope_ci},
                            {"x_over_t_minus_p_first", b.x_over_t_minus_p.front()},
                            {"x_over_t_minus_p_last", b.x_over_t_minus_p.back()}};
  }
  std::vector<Check> checks{{"AC7", "energy-drift", drift, 1e-6},
                            {"AC8", "energy-bounds", -rec.min_bound_slack, 1e-8}};
  json result = envelope("simulate", eff, checks);
  result["summary"] = summary;
  result["outputs"] = {"trajectory.csv"};
  emit(ctx, "simulate", result);
  return 0;
}

inline int soliton(const Context& ctx, const json& raw) {
  const SolitonConfig cfg = parse_soliton(raw);
  const json eff = to_json(cfg);
  const SpectralGrid grid(cfg.grid.d, cfg.grid.n_per_dim, cfg.grid.L);
  const Potential pot = build_gaussian_potential(cfg.potential.n, cfg.potential.s, cfg.potential.rho0, grid);
  const Profile prof = solve_profile(cfg.P, pot, cfg.eps, cfg.coupling);
  const double c = cfg.coupling.value_or(std::sqrt(pot.rho0));

  std::vector<Check> checks{{"AC9", "profile-residual", prof.residual, 1e-12}};
  json summary{{"residual", prof.residual},
               {"abs_residual", prof.abs_residual},
               {"condition", prof.condition},
               {"regularized", prof.regularized},
               {"S1_l2", std::sqrt(grid.norm2(prof.S.h1))},
               {"S2_l2", std::sqrt(grid.norm2(prof.S.h2))}};
  if (dot(cfg.P, cfg.P) == 0.0) {
    double err = 0.0, peak = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
      if (grid.nyquist(i)) continue;
      const cplx ref = -c * pot.W_hat[i] / (1.0 + grid.xi2(i));
      err = std::max({err, std::abs(prof.S.h1[i] - ref), std::abs(prof.S.h2[i])});
      peak = std::max(peak, std::abs(ref));
    }
    const double rel = peak > 0.0 ? err / peak : err;
    summary["closed_form_error"] = rel;
    checks.push_back({"AC9", "closed-form-P0", rel, 1e-13});
  }

  // Profile along the first axis through the origin.
  const auto s1 = prof.S.physical(0), s2 = prof.S.physical(1);
  std::vector<std::pair<double, std::size_t>> axis;
  const std::size_t stride = grid.size() / static_cast<std::size_t>(grid.n_per_dim());
  for (int i = 0; i < grid.n_per_dim(); ++i) {
    const std::size_t idx = static_cast<std::size_t>(i) * stride;
    axis.push_back({grid.x(0, idx), idx});
  }
  std::sort(axis.begin(), axis.end());
  std::string csv = std::string("# bosegas ") + tool_version + " config_hash=" + config_hash(eff) + "\nx,S1,S2\n";
  for (const auto& [x, idx] : axis) csv += csv_row({{x, s1[idx], s2[idx]}});
  write_text_file((ctx.out_dir / "profile.csv").string(), csv);

  json result = envelope("soliton", eff, checks);
  result["summary"] = summary;
  result["outputs"] = {"profile.csv"};
  emit(ctx, "soliton", result);
  return 0;
}

inline int friction(const Context& ctx, const json& raw) {
  const FrictionConfig cfg = parse_friction(raw);
  const json eff = to_json(cfg);
  const RadialPotential pot = cfg.potential.radial();
  std::vector<Check> checks;
  json rows = json::array();
  for (double p : cfg.speeds) {
    const double ext = extrapolated_coupling(p, pot, cfg.eps0, cfg.quadrature);
    const double lim = friction_limit_parallel(p, pot, cfg.quadrature);
    json row{{"P", p}, {"extrapolated", ext}, {"limit", lim}};
    if (p < 1.0) {
      row["relative_to_rho0"] = std::abs(ext) / pot.rho0;
      checks.push_back({"AC2", "subsonic-vanishing P=" + label(p), std::abs(ext) / pot.rho0, 1e-8});
    } else {
      const double rel = std::abs(ext / lim - 1.0);
      row["relative_difference"] = rel;
      checks.push_back({"AC3", "dual-route P=" + label(p), rel, 1e-2});
      checks.push_back({"friction-sign", "F.P < 0 at P=" + label(p), lim, 0.0, "<="});
    }
    rows.push_back(row);
  }
  json result = envelope("friction", eff, checks);
  result["samples"] = rows;
  emit(ctx, "friction", result);
  return 0;
}

inline int lambda_fit_cmd(const Context& ctx, const json& raw) {
  const LambdaFitConfig cfg = parse_lambda_fit(raw);
  const json eff = to_json(cfg);
  const RadialPotential pot = cfg.potential.radial();
  const auto fit = lambda_fit(pot, cfg.excess_lo, cfg.excess_hi, static_cast<std::size_t>(cfg.count), cfg.quadrature);
  std::vector<double> range;
  for (int k = 0; k < cfg.lambda_count; ++k)
    range.push_back(cfg.lambda_lo + (cfg.lambda_hi - cfg.lambda_lo) * k / (cfg.lambda_count - 1));
  const auto over_range = lambda_fit(pot, range, cfg.quadrature);

  json samples = json::array();
  for (const auto& s : fit.samples) samples.push_back({{"P", s.P}, {"F", s.F}, {"Lambda", s.Lambda}});
  json range_samples = json::array();
  for (const auto& s : over_range.samples) range_samples.push_back({{"P", s.P}, {"F", s.F}, {"Lambda", s.Lambda}});

  std::vector<Check> checks{{"AC1", "friction-exponent n=" + label(pot.n), std::abs(fit.slope - fit.expected), 0.15},
                            {"lambda-positive", "min Lambda on [" + label(cfg.lambda_lo) + ", " + label(cfg.lambda_hi) + "]",
                             over_range.lambda_min, 0.0, ">"}};
  json result = envelope("lambda-fit", eff, checks);
  result["slope"] = fit.slope;
  result["slope_ci"] = fit.slope_ci;
  result["expected"] = fit.expected;
  result["lambda_min"] = fit.lambda_min;
  result["samples"] = samples;
  result["lambda_range_min"] = over_range.lambda_min;
  result["lambda_range_samples"] = range_samples;
  emit(ctx, "lambda-fit", result);
  return 0;
}

/// Running maximum from the right: the smallest non-increasing majorant.
inline std::vector<double> decreasing_envelope(std::vector<double> v) {
  for (std::size_t i = v.size(); i-- > 1;) v[i - 1] = std::max(v[i - 1], v[i]);
  return v;
}

inline int remainder(const Context& ctx, const json& raw) {
  const RemainderConfig cfg = parse_remainder(raw);
  const json eff = to_json(cfg);
  const RadialPotential pot = cfg.potential.radial();
  const auto times = logspace(cfg.t_lo, cfg.t_hi, static_cast<std::size_t>(cfg.count));
  std::vector<double> values, mags;
  for (double t : times) {
    RemainderInputs in{t, {t * cfg.P}, {0.0}, {cfg.P}, {cfg.P0}, cfg.beta0.amplitude, cfg.beta0.width, cfg.beta0.phase};
    const double v = remainder_term(cfg.parsed_kind(), in, pot, cfg.eps, cfg.quadrature)[0];
    values.push_back(v);
    mags.push_back(std::abs(v));
  }
  json result;
  std::vector<Check> checks;
  const bool positive = std::all_of(mags.begin(), mags.end(), [](double m) { return m > 0.0; });
  double slope = std::numeric_limits<double>::quiet_NaN(), ci = slope, env_slope = slope;
  if (positive) {
    const auto fit = fit_power_law(times, mags);
    slope = fit.slope;
    ci = fit.slope_ci;
    env_slope = fit_power_law(times, decreasing_envelope(mags)).slope;
  }
  const double bound = -(1.0 + 1.0 / (2.0 * pot.n + 2.0));
  if (cfg.kind == "R4") checks.push_back({"AC6", "R4-decay-exponent", env_slope, bound});
  result = envelope("remainder", eff, checks);
  result["times"] = times;
  result["values"] = values;
  result["slope"] = slope;
  result["slope_ci"] = ci;
  result["envelope_slope"] = env_slope;
  result["bound"] = bound;
  emit(ctx, "remainder", result);
  return 0;
}

inline int dispersion(const Context& ctx, const json& raw) {
  const DispersionConfig cfg = parse_dispersion(raw);
  const json eff = to_json(cfg);
  const GaussianRadial f{cfg.sigma, cfg.amplitude};
  const auto times = logspace(cfg.t_lo, cfg.t_hi, static_cast<std::size_t>(cfg.count));
  std::vector<double> sup, x_at;
  for (double t : times) {
    const auto s = free_evolution_supnorm(f, t, cfg.d);
    sup.push_back(s.sup);
    x_at.push_back(s.x_at);
  }
  const auto fit = fit_power_law(times, sup);
  const double expected = -0.5 * cfg.d;
  std::vector<Check> checks{{"AC4", "dispersive-exponent d=" + std::to_string(cfg.d), std::abs(fit.slope - expected), 0.1}};
  json result = envelope("dispersion", eff, checks);
  result["times"] = times;
  result["sup"] = sup;
  result["x_at"] = x_at;
  result["slope"] = fit.slope;
  result["slope_ci"] = fit.slope_ci;
  result["expected"] = expected;
  emit(ctx, "dispersion", result);
  return 0;
}

inline int report(const Context& ctx, const std::vector<std::string>& inputs) {
  if (inputs.empty()) throw ConfigError("missing-inputs", "report needs at least one result file");
  json rows = json::array();
  std::map<std::string, bool> criteria;
  for (const auto& path : inputs) {
    const json r = read_json_file(path);
    if (!r.is_object() || !r.contains("tool_version") || !r.contains("checks"))
      throw ConfigError("missing-inputs", path + " is not a result file");
    if (r["tool_version"] != tool_version)
      throw ConfigError("version-mismatch", path + " was written by version " + r["tool_version"].dump());
    for (const auto& c : r["checks"]) {
      json row = c;
      row["source"] = r["command"];
      row["config_hash"] = r["config_hash"];
      rows.push_back(row);
      const std::string id = c["id"];
      const bool ok = c["pass"].get<bool>();
      auto [it, fresh] = criteria.emplace(id, ok);
      if (!fresh) it->second = it->second && ok;
    }
  }
  bool all = true;
  json table = json::object();
  for (const auto& [id, ok] : criteria) {
    table[id] = ok;
    all = all && ok;
  }
  const json summary{{"tool_version", tool_version}, {"criteria", table}, {"rows", rows}, {"pass", all}};
  const auto path = ctx.out_dir / "report.json";
  write_text_file(path.string(), to_text(summary));
  for (const auto& row : rows)
    ctx.out << (row["pass"].get<bool>() ? "PASS " : "FAIL ") << row["id"].get<std::string>() << ' '
            << row["name"].get<std::string>() << '\n';
  for (const auto& [id, ok] : criteria) ctx.out << id << ": " << (ok ? "pass" : "FAIL") << '\n';
  ctx.out << "wrote " << path.string() << '\n';
  return all ? 0 : 1;
}

}  // namespace detail

/// Entry point of the command-line tool; returns the process exit status.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Particle in a Bose gas: simulation and verification tool", "bosegas"};
  app.require_subcommand(1);
  unsigned threads = 1;
  std::uint64_t seed = 0;
  app.add_option("--threads", threads, "worker threads (results do not depend on it)")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "seed for randomized checks");
  app.set_version_flag("--version", tool_version);

  std::string config, out_dir = ".";
  std::vector<std::string> inputs;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"simulate", "time evolution of particle and field"},
      {"soliton", "traveling profile and its residual"},
      {"friction", "coupling force and its eps -> 0 limit"},
      {"lambda-fit", "friction exponent near the speed of sound"},
      {"remainder", "remainder terms along a ballistic trajectory"},
      {"dispersion", "sup-norm decay of the free evolution"}};
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    auto* s = app.add_subcommand(name, help);
    s->add_option("--config", config, "JSON configuration file")->required();
    s->add_option("--out", out_dir, "output directory");
    s->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    s->add_option("--seed", seed, "seed for randomized checks");
    subs[name] = s;
  }
  auto* rep = app.add_subcommand("report", "consolidate result files into a pass/fail table");
  rep->add_option("inputs", inputs, "result JSON files");
  rep->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return 0;
    }
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorFamily::config);
  }

  try {
    set_thread_count(threads);
    std::filesystem::create_directories(out_dir);
    detail::Context ctx{out_dir, out};
    if (rep->parsed()) return detail::report(ctx, inputs);
    const json raw = read_json_file(config);
    if (subs["simulate"]->parsed()) return detail::simulate(ctx, raw);
    if (subs["soliton"]->parsed()) return detail::soliton(ctx, raw);
    if (subs["friction"]->parsed()) return detail::friction(ctx, raw);
    if (subs["lambda-fit"]->parsed()) return detail::lambda_fit_cmd(ctx, raw);
    if (subs["remainder"]->parsed()) return detail::remainder(ctx, raw);
    if (subs["dispersion"]->parsed()) return detail::dispersion(ctx, raw);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(e.family());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorFamily::config);
  }
  return static_cast<int>(ErrorFamily::config);
}

}  // namespace bosegas::cli
