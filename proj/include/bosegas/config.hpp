#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bosegas/dynamics.hpp"
#include "bosegas/errors.hpp"
#include "bosegas/friction.hpp"
#include "bosegas/io.hpp"

namespace bosegas {

/// Fermi exponent n, Gaussian width s and density rho0 of the potential.
struct PotentialSpec {
  double n = 1.0;
  double s = 1.0;
  double rho0 = 0.01;

  void validate() const {
    if (!(n > 0.0)) throw ConfigError("invalid-fermi-exponent", "n must be > 0");
    if (!(s > 0.0)) throw ConfigError("invalid-width", "s must be > 0");
    if (!(rho0 > 0.0)) throw ConfigError("invalid-rho0", "rho0 must be > 0");
    if (!(rho0 <= 0.25)) throw ConfigError("invalid-rho0", "rho0 must be <= 1/4");
  }
  RadialPotential radial() const { return {n, s, rho0}; }
};

struct GridSpec {
  int d = 1;
  int n_per_dim = 128;
  double L = 32.0;
};

struct SolitonConfig {
  GridSpec grid;
  PotentialSpec potential;
  std::vector<double> P{0.5};
  double eps = 0.0;
  std::optional<double> coupling;
};

struct FrictionConfig {
  PotentialSpec potential;
  std::vector<double> speeds{0.3, 0.6, 0.9, 1.2, 1.5, 2.0};
  double eps0 = 1e-2;
  RadialQuadrature quadrature;
};

struct LambdaFitConfig {
  PotentialSpec potential;
  double excess_lo = 1e-2;
  double excess_hi = 0.2;
  int count = 12;
  /// Range of |P| on which Lambda must stay positive.
  double lambda_lo = 1.05;
  double lambda_hi = 2.0;
  int lambda_count = 12;
  RadialQuadrature quadrature;
};

struct RemainderConfig {
  std::string kind = "R4";
  PotentialSpec potential;
  double eps = 1e-3;
  double P = 1.5;   ///< |P(t)|, ballistic motion X(t) - X(0) = t P
  double P0 = 1.5;  ///< |P(0)|
  GaussianPulse beta0{0.0, 1.0, 0.0, {}};
  double t_lo = 10.0;
  double t_hi = 100.0;
  int count = 8;
  RadialQuadrature quadrature;

  RemainderKind parsed_kind() const {
    if (kind == "R1") return RemainderKind::R1;
    if (kind == "R2") return RemainderKind::R2;
    if (kind == "R4") return RemainderKind::R4;
    throw ConfigError("invalid-kind", "remainder kind must be R1, R2 or R4");
  }
};

struct DispersionConfig {
  int d = 5;
  double sigma = 1.0;
  double amplitude = 1.0;
  double t_lo = 10.0;
  double t_hi = 100.0;
  int count = 8;
};

namespace detail {

inline PotentialSpec read_potential(ConfigReader& r, const PotentialSpec& def = {}) {
  PotentialSpec p;
  p.n = r.number("n", def.n);
  p.s = r.number("s", def.s);
  p.rho0 = r.number("rho0", def.rho0);
  p.validate();
  return p;
}

inline void put_potential(json& j, const PotentialSpec& p) {
  j["n"] = p.n;
  j["s"] = p.s;
  j["rho0"] = p.rho0;
}

inline RadialQuadrature read_quadrature(ConfigReader r) {
  RadialQuadrature q;
  q.order = r.integer("order", q.order);
  q.oscillatory_order = r.integer("oscillatory_order", q.oscillatory_order);
  q.r_max = r.number("r_max", q.r_max);
  q.r_panel = r.number("r_panel", q.r_panel);
  q.theta_panel = r.number("theta_panel", q.theta_panel);
  q.refine = r.number("refine", q.refine);
  q.phase_per_panel = r.number("phase_per_panel", q.phase_per_panel);
  q.max_nodes = r.number("max_nodes", q.max_nodes);
  r.finish();
  for (int o : {q.order, q.oscillatory_order}) quad::gauss_legendre(o);
  if (!(q.r_panel > 0.0 && q.theta_panel > 0.0 && q.refine > 0.0 && q.phase_per_panel > 0.0 && q.max_nodes > 0.0) ||
      q.r_max < 0.0)
    throw ConfigError("invalid-quadrature", "quadrature sizes must be positive");
  return q;
}

inline json quadrature_json(const RadialQuadrature& q) {
  return {{"order", q.order},         {"oscillatory_order", q.oscillatory_order},
          {"r_max", q.r_max},         {"r_panel", q.r_panel},
          {"theta_panel", q.theta_panel}, {"refine", q.refine},
          {"phase_per_panel", q.phase_per_panel}, {"max_nodes", q.max_nodes}};
}

inline int read_radial_dimension(ConfigReader& r) {
  const int d = r.integer("d", 5);
  if (d < 2) throw ConfigError("invalid-dimension", "radial quadrature needs d >= 2");
  return d;
}

inline GaussianPulse read_pulse(ConfigReader r, int d) {
  GaussianPulse p;
  p.amplitude = r.number("amplitude", 0.0);
  p.width = r.number("width", 1.0);
  p.phase = r.number("phase", 0.0);
  p.center = r.numbers("center", {});
  r.finish();
  if (!(p.width > 0.0)) throw ConfigError("invalid-pulse", "beta0.width must be > 0");
  if (!p.center.empty() && static_cast<int>(p.center.size()) != d)
    throw ConfigError("dimension-mismatch", "beta0.center must have d components");
  return p;
}

inline json pulse_json(const GaussianPulse& p) {
  return {{"amplitude", p.amplitude}, {"width", p.width}, {"phase", p.phase}, {"center", p.center}};
}

inline void check_count(int count, const char* key) {
  if (count < 3) throw ConfigError("too-few-samples", std::string(key) + " must be >= 3");
}

inline void check_range(double lo, double hi, const char* what) {
  if (!(lo > 0.0) || !(hi > lo)) throw ConfigError("invalid-range", std::string(what) + " needs 0 < lo < hi");
}

}  // namespace detail

// ---- simulate

inline SimConfig parse_simulate(const json& j) {
  ConfigReader r(j, "");
  SimConfig c;
  c.d = r.integer("d", c.d);
  c.n_per_dim = r.integer("n_per_dim", c.n_per_dim);
  c.L = r.number("L", c.L);
  c.fermi_n = r.number("n", c.fermi_n);
  c.s = r.number("s", c.s);
  c.rho0 = r.number("rho0", c.rho0);
  c.beta0 = detail::read_pulse(r.object("beta0"), c.d);
  c.P0 = r.numbers("P0", std::vector<double>(std::max(c.d, 1), 0.0));
  c.dt = r.number("dt", c.dt);
  c.T = r.number("T", c.T);
  c.sample_interval = r.number("sample_interval", c.sample_interval);
  c.monitors = r.boolean("monitors", c.monitors);
  c.monitor_tol = r.number("monitor_tol", c.monitor_tol);
  c.soliton_gap = r.boolean("soliton_gap", c.soliton_gap);
  if (r.string("splitting", "strang") != "strang") throw ConfigError("invalid-splitting", "only strang splitting is available");
  r.finish();
  c.validate();
  PotentialSpec{c.fermi_n, c.s, c.rho0}.validate();
  SpectralGrid(c.d, c.n_per_dim, c.L);
  return c;
}

inline json to_json(const SimConfig& c) {
  return {{"d", c.d},
          {"n_per_dim", c.n_per_dim},
          {"L", c.L},
          {"n", c.fermi_n},
          {"s", c.s},
          {"rho0", c.rho0},
          {"beta0", detail::pulse_json(c.beta0)},
          {"P0", c.P0},
          {"dt", c.dt},
          {"T", c.T},
          {"sample_interval", c.sample_interval},
          {"monitors", c.monitors},
          {"monitor_tol", c.monitor_tol},
          {"soliton_gap", c.soliton_gap},
          {"splitting", "strang"}};
}

// ---- soliton

inline SolitonConfig parse_soliton(const json& j) {
  ConfigReader r(j, "");
  SolitonConfig c;
  c.grid.d = r.integer("d", c.grid.d);
  c.grid.n_per_dim = r.integer("n_per_dim", c.grid.n_per_dim);
  c.grid.L = r.number("L", c.grid.L);
  c.potential = detail::read_potential(r);
  c.P = r.numbers("P", std::vector<double>(std::max(c.grid.d, 1), 0.0));
  c.eps = r.number("eps", c.eps);
  if (r.has("coupling")) c.coupling = r.number("coupling");
  r.finish();
  SpectralGrid(c.grid.d, c.grid.n_per_dim, c.grid.L);
  if (static_cast<int>(c.P.size()) != c.grid.d) throw ConfigError("dimension-mismatch", "P must have d components");
  if (c.eps < 0.0) throw ConfigError("invalid-eps", "eps must be >= 0");
  return c;
}

inline json to_json(const SolitonConfig& c) {
  json j{{"d", c.grid.d}, {"n_per_dim", c.grid.n_per_dim}, {"L", c.grid.L}, {"P", c.P}, {"eps", c.eps}};
  detail::put_potential(j, c.potential);
  if (c.coupling) j["coupling"] = *c.coupling;
  return j;
}

// ---- friction

inline FrictionConfig parse_friction(const json& j) {
  ConfigReader r(j, "");
  FrictionConfig c;
  c.quadrature.d = detail::read_radial_dimension(r);
  c.potential = detail::read_potential(r);
  c.speeds = r.numbers("speeds", c.speeds);
  c.eps0 = r.number("eps0", c.eps0);
  const int d = c.quadrature.d;
  c.quadrature = detail::read_quadrature(r.object("quadrature"));
  c.quadrature.d = d;
  r.finish();
  if (c.speeds.empty()) throw ConfigError("missing-inputs", "speeds must not be empty");
  for (double p : c.speeds)
    if (!(p >= 0.0) || std::abs(p - 1.0) < 1e-12) throw ConfigError("invalid-speed", "speeds must be >= 0 and != 1");
  if (!(c.eps0 > 0.0)) throw ConfigError("invalid-eps", "eps0 must be > 0");
  return c;
}

inline json to_json(const FrictionConfig& c) {
  json j{{"d", c.quadrature.d}, {"speeds", c.speeds}, {"eps0", c.eps0}, {"quadrature", detail::quadrature_json(c.quadrature)}};
  detail::put_potential(j, c.potential);
  return j;
}

// ---- lambda-fit

inline LambdaFitConfig parse_lambda_fit(const json& j) {
  ConfigReader r(j, "");
  LambdaFitConfig c;
  c.quadrature.d = detail::read_radial_dimension(r);
  c.potential = detail::read_potential(r);
  c.excess_lo = r.number("excess_lo", c.excess_lo);
  c.excess_hi = r.number("excess_hi", c.excess_hi);
  c.count = r.integer("count", c.count);
  c.lambda_lo = r.number("lambda_lo", c.lambda_lo);
  c.lambda_hi = r.number("lambda_hi", c.lambda_hi);
  c.lambda_count = r.integer("lambda_count", c.lambda_count);
  const int d = c.quadrature.d;
  c.quadrature = detail::read_quadrature(r.object("quadrature"));
  c.quadrature.d = d;
  r.finish();
  detail::check_range(c.excess_lo, c.excess_hi, "excess_lo/excess_hi");
  detail::check_count(c.count, "count");
  detail::check_count(c.lambda_count, "lambda_count");
  if (!(c.lambda_lo > 1.0) || !(c.lambda_hi > c.lambda_lo))
    throw ConfigError("invalid-range", "lambda_lo/lambda_hi need 1 < lo < hi");
  return c;
}

inline json to_json(const LambdaFitConfig& c) {
  json j{{"d", c.quadrature.d},          {"excess_lo", c.excess_lo},     {"excess_hi", c.excess_hi},
         {"count", c.count},             {"lambda_lo", c.lambda_lo},     {"lambda_hi", c.lambda_hi},
         {"lambda_count", c.lambda_count}, {"quadrature", detail::quadrature_json(c.quadrature)}};
  detail::put_potential(j, c.potential);
  return j;
}

// ---- remainder

inline RemainderConfig parse_remainder(const json& j) {
  ConfigReader r(j, "");
  RemainderConfig c;
  c.kind = r.string("kind", c.kind);
  c.parsed_kind();
  c.quadrature.d = detail::read_radial_dimension(r);
  c.potential = detail::read_potential(r);
  c.eps = r.number("eps", c.eps);
  c.P = r.number("P", c.P);
  c.P0 = r.number("P0", c.P);
  c.beta0 = detail::read_pulse(r.object("beta0"), 0);
  c.t_lo = r.number("t_lo", c.t_lo);
  c.t_hi = r.number("t_hi", c.t_hi);
  c.count = r.integer("count", c.count);
  const int d = c.quadrature.d;
  c.quadrature = detail::read_quadrature(r.object("quadrature"));
  c.quadrature.d = d;
  r.finish();
  if (!(c.eps > 0.0)) throw ConfigError("invalid-eps", "eps must be > 0");
  if (!(c.P > 0.0)) throw ConfigError("invalid-speed", "P must be > 0");
  if (!c.beta0.center.empty()) throw ConfigError("invalid-pulse", "beta0 must be centred for remainder terms");
  detail::check_range(c.t_lo, c.t_hi, "t_lo/t_hi");
  detail::check_count(c.count, "count");
  return c;
}

inline json to_json(const RemainderConfig& c) {
  json beta = detail::pulse_json(c.beta0);
  beta.erase("center");
  json j{{"kind", c.kind}, {"d", c.quadrature.d}, {"eps", c.eps},   {"P", c.P},         {"P0", c.P0},
         {"beta0", beta},  {"t_lo", c.t_lo},      {"t_hi", c.t_hi}, {"count", c.count},
         {"quadrature", detail::quadrature_json(c.quadrature)}};
  detail::put_potential(j, c.potential);
  return j;
}

// ---- dispersion

inline DispersionConfig parse_dispersion(const json& j) {
  ConfigReader r(j, "");
  DispersionConfig c;
  c.d = r.integer("d", c.d);
  c.sigma = r.number("sigma", c.sigma);
  c.amplitude = r.number("amplitude", c.amplitude);
  c.t_lo = r.number("t_lo", c.t_lo);
  c.t_hi = r.number("t_hi", c.t_hi);
  c.count = r.integer("count", c.count);
  r.finish();
  if (c.d < 1) throw ConfigError("invalid-dimension", "d must be >= 1");
  if (!(c.sigma > 0.0)) throw ConfigError("invalid-width", "sigma must be > 0");
  if (c.amplitude == 0.0) throw ConfigError("invalid-pulse", "amplitude must be nonzero");
  detail::check_range(c.t_lo, c.t_hi, "t_lo/t_hi");
  detail::check_count(c.count, "count");
  return c;
}

inline json to_json(const DispersionConfig& c) {
  return {{"d", c.d},       {"sigma", c.sigma}, {"amplitude", c.amplitude},
          {"t_lo", c.t_lo}, {"t_hi", c.t_hi},   {"count", c.count}};
}

}  // namespace bosegas
