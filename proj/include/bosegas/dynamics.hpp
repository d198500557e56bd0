#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "bosegas/errors.hpp"
#include "bosegas/field.hpp"
#include "bosegas/fit.hpp"
#include "bosegas/grid.hpp"
#include "bosegas/potential.hpp"
#include "bosegas/soliton.hpp"
#include "bosegas/spectral.hpp"

namespace bosegas {

struct ParticleState {
  double t = 0.0;
  std::vector<double> X;
  std::vector<double> P;
  std::vector<double> F;  ///< force at the last evaluation
};

/// F_j = 2 sqrt(rho0) <d_j W, h1>, which is -dH/dX for the Hamiltonian below.
inline std::vector<double> particle_force(const FieldState& h, const Potential& pot) {
  const auto& g = h.grid;
  const double c = 2.0 * std::sqrt(pot.rho0) / g.volume();
  std::vector<double> F(g.dim());
  for (int j = 0; j < g.dim(); ++j) {
    F[j] = c * parallel_sum<double>(g.size(), [&](std::size_t i) {
             return std::real(std::conj(cplx(0.0, g.xi(j, i)) * pot.W_hat[i]) * h.h1[i]);
           });
  }
  return F;
}

/// H = |P|^2/2 + ||grad h||^2 + ||h1||^2 + 2 sqrt(rho0) <W, h1>, particle frame.
inline double hamiltonian(const ParticleState& p, const FieldState& h, const Potential& pot) {
  const auto& g = h.grid;
  const double sr = std::sqrt(pot.rho0);
  const double field = parallel_sum<double>(g.size(), [&](std::size_t i) {
    const double k2 = g.xi2(i);
    return k2 * (std::norm(h.h1[i]) + std::norm(h.h2[i])) + std::norm(h.h1[i]) +
           2.0 * sr * std::real(std::conj(pot.W_hat[i]) * h.h1[i]);
  });
  return 0.5 * dot(p.P, p.P) + field / g.volume();
}

/// Moving-frame forcing of the second component, -sqrt(rho0) W_hat.
inline std::vector<cplx> field_forcing(const Potential& pot) {
  std::vector<cplx> g2(pot.W_hat.size());
  const double sr = std::sqrt(pot.rho0);
  for (std::size_t i = 0; i < g2.size(); ++i) g2[i] = -sr * pot.W_hat[i];
  return g2;
}

/// Kick / drift + exact field step at the mid-step momentum / kick.
inline void strang_step(ParticleState& p, FieldState& h, const Potential& pot, double dt,
                        std::span<const cplx> forcing = {}) {
  std::vector<cplx> own;
  if (forcing.empty()) {
    own = field_forcing(pot);
    forcing = own;
  }
  if (p.F.size() != p.P.size()) p.F = particle_force(h, pot);
  for (std::size_t j = 0; j < p.P.size(); ++j) p.P[j] += 0.5 * dt * p.F[j];
  for (std::size_t j = 0; j < p.X.size(); ++j) p.X[j] += dt * p.P[j];
  propagate_field(h, forcing, p.P, dt);
  p.F = particle_force(h, pot);
  for (std::size_t j = 0; j < p.P.size(); ++j) p.P[j] += 0.5 * dt * p.F[j];
  p.t += dt;
}

struct SimConfig {
  int d = 1;
  int n_per_dim = 128;
  double L = 32.0;
  double fermi_n = 1.0;
  double s = 1.0;
  double rho0 = 0.01;
  GaussianPulse beta0{};
  std::vector<double> P0{0.5};
  double dt = 1e-3;
  double T = 1.0;
  double sample_interval = 0.1;
  bool monitors = true;
  double monitor_tol = 1e-8;
  bool soliton_gap = true;

  void validate() const {
    if (d < 1 || d > 3) throw ConfigError("invalid-dimension", "time evolution runs in d = 1, 2, 3");
    if (!(dt > 0.0)) throw ConfigError("invalid-dt", "dt must be > 0");
    if (!(T >= 0.0)) throw ConfigError("invalid-T", "T must be >= 0");
    if (!(sample_interval > 0.0)) throw ConfigError("invalid-sample-interval", "sample_interval must be > 0");
    const double q = sample_interval / dt;
    if (std::abs(q - std::round(q)) > 1e-9 * std::max(1.0, q) || std::round(q) < 1)
      throw ConfigError("invalid-sample-interval", "sample_interval must be a multiple of dt");
    if (static_cast<int>(P0.size()) != d) throw ConfigError("dimension-mismatch", "P0 must have d components");
    if (!(rho0 > 0.0)) throw ConfigError("invalid-rho0", "rho0 must be > 0");
    if (!(fermi_n > 0.0)) throw ConfigError("invalid-fermi-exponent", "n must be > 0");
    if (!(s > 0.0)) throw ConfigError("invalid-width", "s must be > 0");
  }
};

struct Sample {
  double t = 0.0;
  std::vector<double> X, P, Pdot;
  double H = 0.0;
  double re_beta_l2 = 0.0;
  double grad_im_beta_l2 = 0.0;
  double soliton_gap = std::numeric_limits<double>::quiet_NaN();
};

/// Bounds that follow from the energy identity, evaluated with H(0).
struct EnergyBounds {
  double P_max = 0.0;
  double re_beta_max = 0.0;
  double grad_im_max = 0.0;
};

inline EnergyBounds energy_bounds(double H0, double rho0, double W_norm2) {
  const double sr = std::sqrt(rho0);
  EnergyBounds b;
  b.P_max = std::sqrt(std::max(0.0, 2.0 * H0 + sr * W_norm2));
  b.re_beta_max = std::sqrt(std::max(0.0, (H0 + sr * W_norm2) / (1.0 - sr)));
  b.grad_im_max = std::sqrt(std::max(0.0, H0 + sr * W_norm2));
  return b;
}

struct TrajectoryRecord {
  SimConfig config;
  std::vector<Sample> rows;
  EnergyBounds bounds;
  double H0 = 0.0;
  /// Smallest slack bound - value over all samples and all three bounds.
  double min_bound_slack = std::numeric_limits<double>::infinity();
};

/// Checks the three energy-bound inequalities at one sample.
inline double bound_slack(const Sample& s, const EnergyBounds& b) {
  const double p = std::sqrt(dot(s.P, s.P));
  return std::min({b.P_max - p, b.re_beta_max - s.re_beta_l2, b.grad_im_max - s.grad_im_beta_l2});
}

inline TrajectoryRecord simulate(const SimConfig& cfg, const std::function<void(const Sample&)>& on_sample = {}) {
  cfg.validate();
  const SpectralGrid grid(cfg.d, cfg.n_per_dim, cfg.L);
  const Potential pot = build_gaussian_potential(cfg.fermi_n, cfg.s, cfg.rho0, grid);
  FieldState h = gaussian_field(grid, cfg.beta0);
  // V and beta0 must fit in the box; for Gaussians the worst edge value is at
  // the face closest to the centre. W = (-Delta)^n V is not checked: for
  // fractional n it has algebraic tails whatever the box.
  {
    const double half = 0.5 * cfg.L;
    double edge = std::exp(-half * half / (2.0 * cfg.s * cfg.s));
    if (cfg.beta0.amplitude != 0.0) {
      double off = 0.0;
      for (double c : cfg.beta0.center) off = std::max(off, std::abs(c));
      const double gap = std::max(0.0, half - off);
      edge = std::max(edge, std::exp(-gap * gap / (2.0 * cfg.beta0.width * cfg.beta0.width)));
    }
    if (edge > 1e-10)
      throw ResolutionError("box-too-small", "V or beta0 exceeds 1e-10 of its peak at the box edge; enlarge L");
  }
  ParticleState p{0.0, std::vector<double>(cfg.d, 0.0), cfg.P0, {}};
  p.F = particle_force(h, pot);
  const auto forcing = field_forcing(pot);

  TrajectoryRecord rec;
  rec.config = cfg;
  rec.H0 = hamiltonian(p, h, pot);
  rec.bounds = energy_bounds(rec.H0, cfg.rho0, pot.W_norm2());

  auto take = [&] {
    Sample s;
    s.t = p.t;
    s.X = p.X;
    s.P = p.P;
    s.Pdot = p.F;
    s.H = hamiltonian(p, h, pot);
    const auto n = field_norms(h);
    s.re_beta_l2 = n.re_l2;
    s.grad_im_beta_l2 = n.grad_im_l2;
    if (cfg.soliton_gap && std::sqrt(dot(p.P, p.P)) < 1.0) s.soliton_gap = scattering_gap(h, solve_profile(p.P, pot).S);
    bool finite = std::isfinite(s.H);
    for (double v : s.P) finite = finite && std::isfinite(v);
    if (!finite) throw ResolutionError("non-finite-value", "state became non-finite at t = " + std::to_string(s.t));
    const double slack = bound_slack(s, rec.bounds);
    rec.min_bound_slack = std::min(rec.min_bound_slack, slack);
    if (cfg.monitors && slack < -cfg.monitor_tol)
      throw MonitorViolation("energy-bound", "energy bound violated by " + std::to_string(-slack) +
                                                 " at t = " + std::to_string(s.t));
    if (on_sample) on_sample(s);
    rec.rows.push_back(std::move(s));
  };

  const long per_sample = std::lround(cfg.sample_interval / cfg.dt);
  const long n_samples = static_cast<long>(std::floor(cfg.T / cfg.sample_interval + 1e-9));
  take();
  for (long k = 1; k <= n_samples; ++k) {
    for (long j = 0; j < per_sample; ++j) strang_step(p, h, pot, cfg.dt, forcing);
    p.t = static_cast<double>(k * per_sample) * cfg.dt;
    take();
  }
  return rec;
}

struct BallisticDiagnostics {
  std::vector<double> t;               ///< sample times with t > 0
  std::vector<double> x_over_t_minus_p;
  std::vector<double> t_mid;           ///< midpoints of the finite differences
  std::vector<double> pdot_fd;         ///< |P(t_{k+1}) - P(t_k)| / dt
  bool degenerate = false;             ///< no usable signal for the exponent fit
  LineFit pdot_fit;                    ///< log |Pdot| against log(1 + t), second half
};

inline BallisticDiagnostics ballistic_diagnostics(const TrajectoryRecord& rec) {
  const auto& rows = rec.rows;
  if (rows.size() < 20) throw ConfigError("too-few-samples", "ballistic diagnostics need at least 20 samples");
  BallisticDiagnostics out;
  for (const auto& r : rows) {
    if (r.t <= 0.0) continue;
    double e = 0.0;
    for (std::size_t j = 0; j < r.X.size(); ++j) e += std::pow(r.X[j] / r.t - r.P[j], 2);
    out.t.push_back(r.t);
    out.x_over_t_minus_p.push_back(std::sqrt(e));
  }
  for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
    const double dt = rows[k + 1].t - rows[k].t;
    double m = 0.0;
    for (std::size_t j = 0; j < rows[k].P.size(); ++j) m += std::pow((rows[k + 1].P[j] - rows[k].P[j]) / dt, 2);
    out.t_mid.push_back(0.5 * (rows[k].t + rows[k + 1].t));
    out.pdot_fd.push_back(std::sqrt(m));
  }
  std::vector<double> x, y;
  double peak = 0.0;
  for (double v : out.pdot_fd) peak = std::max(peak, v);
  for (std::size_t k = out.pdot_fd.size() / 2; k < out.pdot_fd.size(); ++k) {
    if (out.pdot_fd[k] > 1e-14 * std::max(peak, 1e-300) && out.pdot_fd[k] > 0.0) {
      x.push_back(1.0 + out.t_mid[k]);
      y.push_back(out.pdot_fd[k]);
    }
  }
  if (peak == 0.0 || x.size() < 3) {
    out.degenerate = true;
    out.pdot_fit.slope = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.pdot_fit = fit_power_law(x, y);
  return out;
}

}  // namespace bosegas
