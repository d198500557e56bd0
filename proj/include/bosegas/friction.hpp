#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "bosegas/errors.hpp"
#include "bosegas/fit.hpp"
#include "bosegas/parallel.hpp"
#include "bosegas/potential.hpp"
#include "bosegas/quadrature.hpp"
#include "bosegas/spectral.hpp"

namespace bosegas {

/// Controls for the axisymmetric (r, mu) reduction of xi-integrals in R^d.
/// The angular variable is integrated as mu = sin(theta) so the weight
/// (1 - mu^2)^{(d-3)/2} dmu becomes cos^{d-2}(theta) dtheta.
struct RadialQuadrature {
  int d = 5;
  int order = 20;              ///< Gauss-Legendre points per panel
  int oscillatory_order = 8;   ///< points per panel for panels limited by phase
  double r_max = 0.0;          ///< 0: chosen from the integrand's decay
  double r_panel = 0.25;       ///< widest radial panel
  double theta_panel = 0.2;    ///< widest angular panel
  double refine = 0.25;        ///< smallest panel relative to the resonance width
  double phase_per_panel = std::numbers::pi / 2;
  double max_nodes = 3e9;      ///< budget for (radial x angular) nodes
};

/// |S^{d-2}|, the measure of directions orthogonal to a fixed axis.
inline double transverse_sphere_area(int d) {
  const double a = 0.5 * (d - 1);
  return 2.0 * std::pow(std::numbers::pi, a) / boost::math::tgamma(a);
}

namespace detail {

struct AngularNodes {
  std::vector<double> mu;
  std::vector<double> w;  // includes cos^{d-2} theta
};

// Angular rule for one radius. mu_res: location of a resonance in mu (may lie
// outside [-1, 1]); width: its width in mu; rate: phase rate in mu.
inline AngularNodes angular_nodes(const RadialQuadrature& q, double mu_res, double width, double rate) {
  constexpr double half_pi = std::numbers::pi / 2;
  std::vector<double> anchors;
  const bool resonant = std::isfinite(mu_res) && mu_res < 2.0 && width < 0.5;
  if (resonant) {
    if (mu_res < 1.0) {
      const double th = std::asin(mu_res);
      anchors.push_back(th);
      anchors.push_back(-th);
    }
    anchors.push_back(-half_pi);
    anchors.push_back(half_pi);
  }
  double hmax = q.theta_panel;
  bool phase_limited = false;
  if (rate > 0.0 && q.phase_per_panel / rate < hmax) {
    hmax = q.phase_per_panel / rate;
    phase_limited = true;
  }
  const double hmin = resonant ? std::max(q.refine * std::min(width, std::sqrt(width)), 1e-13) : hmax;
  const auto breaks = quad::graded_breaks(-half_pi, half_pi, anchors, std::min(hmin, hmax), hmax);
  const auto rule = quad::composite(breaks, phase_limited ? q.oscillatory_order : q.order);
  AngularNodes out;
  out.mu.resize(rule.size());
  out.w.resize(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) {
    out.mu[i] = std::sin(rule.x[i]);
    out.w[i] = rule.w[i] * std::pow(std::cos(rule.x[i]), q.d - 2);
  }
  return out;
}

// Radial rule on (0, r_max]: refined to hmin towards the anchors and limited
// by a local panel width h(r) (evaluated at the panel's right end).
template <class H>
quad::Rule radial_rule(const RadialQuadrature& q, double r_max, std::vector<double> anchors, double hmin, H&& h_of_r,
                       bool& phase_limited) {
  auto coarse = quad::graded_breaks(0.0, r_max, std::move(anchors), std::min(hmin, q.r_panel), q.r_panel);
  std::vector<double> breaks{0.0};
  phase_limited = false;
  for (std::size_t i = 0; i + 1 < coarse.size(); ++i) {
    const double a = coarse[i], b = coarse[i + 1];
    const double h = h_of_r(b);
    const int m = std::max(1, static_cast<int>(std::ceil((b - a) / h - 1e-12)));
    if (m > 1) phase_limited = true;
    for (int k = 1; k <= m; ++k) breaks.push_back(a + (b - a) * k / m);
  }
  return quad::composite(breaks, phase_limited ? std::min(q.order, q.oscillatory_order) : q.order);
}

// Smallest r beyond r0 where env(r) < tol * max env, scanning outward.
template <class F>
double decay_cutoff(F&& env, double step, double tol) {
  double peak = 0.0, r = step;
  for (int k = 0; k < 4000; ++k, r += step) peak = std::max(peak, env(r));
  r = 4000 * step;
  while (r > step && env(r) < tol * peak) r -= step;
  return r + step;
}

}  // namespace detail

struct CouplingForce {
  std::vector<double> F;  ///< vector force, parallel to P
  double parallel = 0.0;  ///< signed component along P / |P|
  bool resolved = true;   ///< false if eps is below 3 x the panel size at the shell
  std::size_t nodes = 0;
};

/// rho0 Re <(grad W, 0), H_eps^{-1} (0, W)> for radial W, by (r, mu) quadrature.
inline CouplingForce coupling_force(std::span<const double> P, const RadialPotential& pot, double eps,
                                    const RadialQuadrature& q = {}) {
  if (!(eps > 0.0)) throw ConfigError("invalid-eps", "coupling_force needs eps > 0");
  if (q.d < 2) throw ConfigError("invalid-dimension", "axisymmetric reduction needs d >= 2");
  CouplingForce out;
  out.F.assign(P.size(), 0.0);
  const double p = std::sqrt(dot(P, P));
  if (p == 0.0) return out;
  const int d = q.d;
  const double r_max = q.r_max > 0.0 ? q.r_max : detail::decay_cutoff([&](double r) {
    const double w = pot.W_hat(r);
    return std::pow(r, d + 2) * w * w;
  }, 0.01, 1e-17);
  std::vector<double> anchors;
  const double rc = p > 1.0 ? std::sqrt(p * p - 1.0) : 0.0;
  if (p > 1.0) anchors.push_back(rc);
  bool unused = false;
  const auto rr = detail::radial_rule(q, r_max, anchors, q.refine * eps / p, [&](double) { return q.r_panel; }, unused);
  // Panels at the shell are refine x the resonance width (floored at 1e-13).
  out.resolved = p <= 1.0 || (3.0 * q.refine <= 1.0 && q.refine * eps / (p * r_max) > 1e-13);

  std::vector<std::size_t> counts(rr.size());
  const double total = parallel_sum<double>(rr.size(), [&](std::size_t i) {
    const double r = rr.x[i];
    const double f = phi1(r);
    const double w2 = std::pow(pot.W_hat(r), 2);
    if (w2 == 0.0) return 0.0;
    const auto ang = detail::angular_nodes(q, f / (p * r), eps / (p * r), 0.0);
    counts[i] = ang.mu.size();
    double s = 0.0;
    for (std::size_t k = 0; k < ang.mu.size(); ++k) {
      const double mu = ang.mu[k];
      const cplx det = mode_determinant(r, p * r * mu, eps);
      s += ang.w[k] * std::real(cplx(0.0, r * mu * r * r * w2) / det);
    }
    return rr.w[i] * std::pow(r, d - 1) * s;
  });
  for (auto c : counts) out.nodes += c;
  out.parallel = pot.rho0 * std::pow(2.0 * std::numbers::pi, -d) * transverse_sphere_area(d) * total;
  for (std::size_t j = 0; j < P.size(); ++j) out.F[j] = out.parallel * P[j] / p;
  return out;
}

/// Eliminates the O(h) and O(h^2) terms from values at h, h/2, h/4.
inline double richardson(double f_h, double f_h2, double f_h4) {
  const double a = 2.0 * f_h2 - f_h;
  const double b = 2.0 * f_h4 - f_h2;
  return (4.0 * b - a) / 3.0;
}

/// coupling_force at eps0, eps0/2, eps0/4 extrapolated to eps -> 0 (parallel component).
inline double extrapolated_coupling(double p, const RadialPotential& pot, double eps0, const RadialQuadrature& q = {}) {
  const double P[1] = {p};
  return richardson(coupling_force(P, pot, eps0, q).parallel, coupling_force(P, pot, eps0 / 2, q).parallel,
                    coupling_force(P, pot, eps0 / 4, q).parallel);
}

/// eps -> 0 limit of coupling_force: zero below the speed of sound, and above
/// it an integral over the resonant shell P.xi = +-phi1(xi).
inline std::vector<double> friction_limit(std::span<const double> P, const RadialPotential& pot,
                                          const RadialQuadrature& q = {}) {
  const double p = std::sqrt(dot(P, P));
  if (std::abs(p - 1.0) < 1e-12) throw ConfigError("sonic", "friction limit is undefined at |P| = 1");
  std::vector<double> F(P.size(), 0.0);
  if (p < 1.0) return F;
  const int d = q.d;
  const double rc = std::sqrt(p * p - 1.0);
  // r = rc sin(phi): r^d W^2 ((rc^2 - r^2)/p^2)^{(d-3)/2} dr, endpoint factors absorbed.
  const auto rule = quad::composite(quad::graded_breaks(0.0, std::numbers::pi / 2, {}, 0.05, 0.05), q.order);
  const double v = rule.integrate([&](double ph) {
    const double r = rc * std::sin(ph), c = std::cos(ph);
    const double w = pot.W_hat(r);
    return std::pow(r, d) * w * w * std::pow(rc, d - 2) * std::pow(c, d - 2) * std::pow(p, -(d - 3));
  });
  const double par = -pot.rho0 * std::pow(2.0 * std::numbers::pi, -d) * transverse_sphere_area(d) *
                     std::numbers::pi / (p * p) * v;
  for (std::size_t j = 0; j < P.size(); ++j) F[j] = par * P[j] / p;
  return F;
}

inline double friction_limit_parallel(double p, const RadialPotential& pot, const RadialQuadrature& q = {}) {
  const double P[1] = {p};
  return friction_limit(P, pot, q)[0];
}

struct LambdaSample {
  double P = 0.0;
  double F = 0.0;       ///< signed parallel friction
  double Lambda = 0.0;  ///< |F| / (rho0 (|P| - 1)^{3+2n})
};

struct LambdaFit {
  double slope = 0.0;
  double slope_ci = 0.0;
  double expected = 0.0;  ///< 3 + 2n
  double lambda_min = 0.0;
  std::vector<LambdaSample> samples;
};

/// Fits log|F| against log(|P| - 1) over the given supersonic speeds.
inline LambdaFit lambda_fit(const RadialPotential& pot, std::span<const double> speeds, const RadialQuadrature& q = {}) {
  LambdaFit out;
  out.expected = 3.0 + 2.0 * pot.n;
  std::vector<double> x, y;
  out.lambda_min = std::numeric_limits<double>::infinity();
  for (double p : speeds) {
    if (!(p > 1.0)) throw ConfigError("subsonic-sample", "lambda_fit needs |P| > 1");
    const double f = friction_limit_parallel(p, pot, q);
    if (!(std::abs(f) > 0.0) || !std::isfinite(f))
      throw ResolutionError("non-positive-force", "friction magnitude vanished at |P| = " + std::to_string(p));
    LambdaSample s{p, f, std::abs(f) / (pot.rho0 * std::pow(p - 1.0, out.expected))};
    out.lambda_min = std::min(out.lambda_min, s.Lambda);
    out.samples.push_back(s);
    x.push_back(p - 1.0);
    y.push_back(std::abs(f));
  }
  const auto fit = fit_power_law(x, y);
  out.slope = fit.slope;
  out.slope_ci = fit.slope_ci;
  return out;
}

inline LambdaFit lambda_fit(const RadialPotential& pot, double excess_lo, double excess_hi, std::size_t count,
                            const RadialQuadrature& q = {}) {
  auto speeds = logspace(excess_lo, excess_hi, count);
  for (auto& v : speeds) v += 1.0;
  return lambda_fit(pot, speeds, q);
}

enum class RemainderKind { R1, R2, R4 };

/// Trajectory data entering the remainder terms. All vectors must be
/// collinear; the Gaussian initial field beta0 = a e^{i theta} exp(-|x|^2/(2 w^2)).
struct RemainderInputs {
  double t = 0.0;
  std::vector<double> X_t, X_0, P_t, P_0;
  double beta_amplitude = 0.0;
  double beta_width = 1.0;
  double beta_phase = 0.0;
};

/// R1, R2 or R4 by oscillatory (r, mu) quadrature; returns a vector along the
/// common axis of X(t) - X(0), P(t), P(0).
inline std::vector<double> remainder_term(RemainderKind kind, const RemainderInputs& in, const RadialPotential& pot,
                                          double eps, const RadialQuadrature& q = {}) {
  if (!(eps > 0.0)) throw ConfigError("invalid-eps", "remainder terms need eps > 0");
  const std::size_t dim = in.P_t.size();
  if (in.X_t.size() != dim || in.X_0.size() != dim || in.P_0.size() != dim)
    throw ConfigError("dimension-mismatch", "trajectory vectors differ in length");
  std::vector<double> Y(dim);
  for (std::size_t j = 0; j < dim; ++j) Y[j] = in.X_t[j] - in.X_0[j];

  // Common axis.
  std::vector<double> axis;
  for (const std::vector<double>* v : {&std::as_const(Y), &in.P_t, &in.P_0}) {
    const double n = std::sqrt(dot(*v, *v));
    if (n > 0.0) {
      axis = *v;
      for (auto& c : axis) c /= n;
      break;
    }
  }
  std::vector<double> out(dim, 0.0);
  if (axis.empty()) return out;  // integrand odd in xi
  auto along = [&](const std::vector<double>& v) {
    const double a = dot(v, axis);
    double perp = 0.0;
    for (std::size_t j = 0; j < dim; ++j) perp += std::pow(v[j] - a * axis[j], 2);
    if (std::sqrt(perp) > 1e-12 * std::max(1.0, std::abs(a)))
      throw ConfigError("non-collinear", "X(t) - X(0), P(t), P(0) must be collinear");
    return a;
  };
  const double y = along(Y), pt = along(in.P_t), p0 = along(in.P_0);
  const double t = in.t;
  const int d = q.d;
  const double a_re = in.beta_amplitude * std::cos(in.beta_phase);
  const double a_im = in.beta_amplitude * std::sin(in.beta_phase);
  const double w = in.beta_width;
  auto beta_hat = [&](double r) { return std::pow(2.0 * std::numbers::pi * w * w, 0.5 * d) * std::exp(-0.5 * w * w * r * r); };

  if (kind != RemainderKind::R4 && in.beta_amplitude == 0.0) return out;
  if (kind == RemainderKind::R2 && pt == p0) return out;

  const double r_max = q.r_max > 0.0 ? q.r_max : detail::decay_cutoff([&](double r) {
    const double wr = pot.W_hat(r);
    const double other = kind == RemainderKind::R4 ? wr : beta_hat(r);
    return std::pow(r, d + 3) * std::abs(wr * other);
  }, 0.01, 1e-16);

  const double ap = std::abs(pt);
  std::vector<double> anchors;
  if (ap > 1.0) anchors.push_back(std::sqrt(ap * ap - 1.0));
  const double hmin = q.refine * eps / std::max(ap, 1e-300);
  bool phase_limited = false;
  const auto rr = detail::radial_rule(q, r_max, anchors, hmin, [&](double r) {
    const double rate = t * phi1_prime(r) + std::abs(y);
    return rate > 0.0 ? std::min(q.r_panel, q.phase_per_panel / rate) : q.r_panel;
  }, phase_limited);

  // Budget estimate before the expensive pass.
  {
    double est = 0.0;
    for (double r : rr.x) est += std::max(1.0, std::abs(y) * r * std::numbers::pi / q.phase_per_panel) * q.oscillatory_order + 200.0;
    if (est > q.max_nodes)
      throw ResolutionError("unresolved-oscillation",
                            "quadrature budget exceeded at t = " + std::to_string(t) + "; raise max_nodes");
  }

  const double pref_field = kind == RemainderKind::R4 ? pot.rho0 : std::sqrt(pot.rho0);
  const double total = parallel_sum<double>(rr.size(), [&](std::size_t i) {
    const double r = rr.x[i];
    const double f = phi1(r);
    const double U = r / std::sqrt(1.0 + r * r);
    const double wr = pot.W_hat(r);
    if (wr == 0.0) return 0.0;
    const cplx e_plus = std::polar(1.0, t * f), e_minus = std::conj(e_plus);
    const double mu_res = ap > 0.0 ? f / (ap * r) : std::numeric_limits<double>::infinity();
    const auto ang = detail::angular_nodes(q, mu_res, eps / std::max(ap * r, 1e-300), std::abs(y) * r);
    // (a - i U b) and (a + i U b) with a, b the transforms of the field data.
    cplx c1, c2;
    if (kind == RemainderKind::R4) {
      c1 = cplx(0.0, -U * wr);  // a = 0, b = W
      c2 = -c1;
    } else {
      const double bh = beta_hat(r);
      c1 = cplx(a_re * bh, -U * a_im * bh);
      c2 = cplx(a_re * bh, U * a_im * bh);
    }
    cplx s = 0.0;
    for (std::size_t k = 0; k < ang.mu.size(); ++k) {
      const double mu = ang.mu[k];
      const double xm = r * mu;  // xi along the axis
      const cplx shift = std::polar(1.0, y * xm);
      const cplx den1(-eps, f + pt * xm), den2(-eps, -f + pt * xm);
      cplx D1 = e_plus * shift / den1, D2 = e_minus * shift / den2;
      if (kind == RemainderKind::R1) {
        D1 *= cplx(0.0, f + p0 * xm);
        D2 *= cplx(0.0, -f + p0 * xm);
      } else if (kind == RemainderKind::R2) {
        D1 *= cplx(0.0, (pt - p0) * xm);
        D2 *= cplx(0.0, (pt - p0) * xm);
      }
      // conj(i xi_j W_hat) = -i xi_j W_hat
      s += ang.w[k] * cplx(0.0, -xm * wr) * (c1 * D1 + c2 * D2);
    }
    return rr.w[i] * std::pow(r, d - 1) * s.real();
  });
  const double par = pref_field / (2.0 * std::pow(2.0 * std::numbers::pi, d)) * transverse_sphere_area(d) * total;
  for (std::size_t j = 0; j < dim; ++j) out[j] = par * axis[j];
  return out;
}

}  // namespace bosegas
