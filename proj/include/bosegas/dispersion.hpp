#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "bosegas/errors.hpp"
#include "bosegas/fit.hpp"
#include "bosegas/parallel.hpp"
#include "bosegas/quadrature.hpp"
#include "bosegas/spectral.hpp"

namespace bosegas {

/// Area of the unit sphere S^{d-1}.
inline double sphere_area(int d) { return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / boost::math::tgamma(0.5 * d); }

namespace detail {

inline double kernel_series(int d, double r) {
  const double nu = 0.5 * d - 1.0;
  const double q = -0.25 * r * r;
  double term = 1.0 / boost::math::tgamma(nu + 1.0), s = term;
  for (int k = 1; k < 60; ++k) {
    term *= q / (k * (k + nu));
    s += term;
    if (std::abs(term) < 1e-18 * std::abs(s)) break;
  }
  return std::pow(2.0 * std::numbers::pi, 0.5 * d) * std::pow(2.0, -nu) * s;
}

// k1 such that K_d(r) ~ e^{ir} k1(r) + e^{-ir} conj(k1(r)); exact for odd d.
inline cplx kernel_envelope(int d, double r) {
  const double nu = 0.5 * d - 1.0;
  const double mu4 = 4.0 * nu * nu;
  cplx sum = 1.0, ik = 1.0;
  double a = 1.0, last = 1.0;
  for (int k = 1; k < 60; ++k) {
    a *= (mu4 - (2.0 * k - 1) * (2.0 * k - 1)) / (8.0 * k * r);
    if (a == 0.0) break;
    if (std::abs(a) > last) break;  // asymptotic series: stop at the smallest term
    ik *= cplx(0.0, 1.0);
    sum += ik * a;
    last = std::abs(a);
    if (last < 1e-17) break;
  }
  const double pre = std::pow(2.0 * std::numbers::pi, 0.5 * d) * std::pow(r, -nu) * 0.5 * std::sqrt(2.0 / (std::numbers::pi * r));
  return pre * std::polar(1.0, -(nu * std::numbers::pi / 2 + std::numbers::pi / 4)) * sum;
}

inline double kernel_asymptotic(int d, double r) { return 2.0 * std::real(std::polar(1.0, r) * kernel_envelope(d, r)); }

inline double kernel_bessel(int d, double r) {
  const double nu = 0.5 * d - 1.0;
  return std::pow(2.0 * std::numbers::pi, 0.5 * d) * std::pow(r, -nu) * std::cyl_bessel_j(nu, r);
}

inline double kernel_scale(int d, double r) {
  return std::pow(2.0 * std::numbers::pi, 0.5 * d) * std::pow(r, 1.0 - 0.5 * d) * std::sqrt(2.0 / (std::numbers::pi * r));
}

}  // namespace detail

/// Radius from which the two-term oscillatory form replaces the Bessel
/// evaluation: the first r (step 0.5, from 1) after which both agree to 1e-10
/// relative to the envelope over a window of 20. Cached per dimension.
inline double kernel_switch_point(int d) {
  static std::mutex m;
  static std::map<int, double> cache;
  std::lock_guard lock(m);
  if (auto it = cache.find(d); it != cache.end()) return it->second;
  double rs = 1.0;
  for (; rs < 400.0; rs += 0.5) {
    bool ok = true;
    for (double r = rs; r <= rs + 20.0 && ok; r += 0.37)
      ok = std::abs(detail::kernel_asymptotic(d, r) - detail::kernel_bessel(d, r)) <= 1e-10 * detail::kernel_scale(d, r);
    if (ok) break;
  }
  cache[d] = rs;
  return rs;
}

/// Fourier transform of the surface measure of S^{d-1}:
/// K_d(r) = (2 pi)^{d/2} r^{1-d/2} J_{d/2-1}(r).
inline double sphere_kernel(int d, double r) {
  if (d < 1) throw ConfigError("invalid-dimension", "sphere_kernel needs d >= 1");
  r = std::abs(r);
  if (d == 1) return 2.0 * std::cos(r);
  if (r < 1.0) return detail::kernel_series(d, r);
  if (r >= kernel_switch_point(d)) return detail::kernel_asymptotic(d, r);
  return detail::kernel_bessel(d, r);
}

/// Envelopes (k1, k2) of K_d(r) = e^{ir} k1(r) + e^{-ir} k2(r), large r.
inline std::pair<cplx, cplx> sphere_kernel_envelopes(int d, double r) {
  const cplx k1 = detail::kernel_envelope(d, r);
  return {k1, std::conj(k1)};
}

/// Radial profile with a closed-form transform: a exp(-r^2 / (2 sigma^2)).
struct GaussianRadial {
  double sigma = 1.0;
  double amplitude = 1.0;

  double operator()(double r) const { return amplitude * std::exp(-r * r / (2.0 * sigma * sigma)); }
  double hat(double rho, int d) const {
    return amplitude * std::pow(2.0 * std::numbers::pi * sigma * sigma, 0.5 * d) * std::exp(-0.5 * sigma * sigma * rho * rho);
  }
  /// Radius where the profile drops below tol of its peak.
  double extent(double tol) const { return sigma * std::sqrt(-2.0 * std::log(tol)); }
  double hat_extent(double tol) const { return std::sqrt(-2.0 * std::log(tol)) / sigma; }
};

struct OscillatoryOptions {
  int order = 8;
  double phase_per_panel = std::numbers::pi / 4;
  double max_panel = 0.25;
  double max_panels = 5e6;
};

namespace detail {

// Panel breaks on [0, b] with width <= min(max_panel, phase / rate(r)).
template <class Rate>
std::vector<double> phase_breaks(double b, Rate&& rate, const OscillatoryOptions& o) {
  std::vector<double> br{0.0};
  double x = 0.0;
  while (x < b) {
    const double rt = rate(x);
    double h = o.max_panel;
    if (rt > 0.0) h = std::min(h, o.phase_per_panel / rt);
    // rate grows with x: shrink until the right end is also resolved
    while (rt > 0.0 && rate(std::min(b, x + h)) * h > o.phase_per_panel * 1.0001) h *= 0.5;
    x = std::min(b, x + h);
    br.push_back(x);
    if (br.size() > o.max_panels)
      throw ResolutionError("unresolved-oscillation", "oscillatory quadrature needs more panels than allowed");
  }
  return br;
}

}  // namespace detail

/// f_hat(rho) = int_0^r_max f(r) K_d(r rho) r^{d-1} dr for each rho.
inline std::vector<double> radial_fourier(const std::function<double(double)>& f, int d, std::span<const double> rho,
                                          double r_max, const OscillatoryOptions& o = {}) {
  double peak = 0.0;
  for (double r = 0.0; r <= r_max; r += r_max / 200) peak = std::max(peak, std::abs(f(r)));
  if (std::abs(f(r_max)) > 1e-12 * std::max(peak, 1e-300))
    throw ResolutionError("unresolved-tail", "profile has not decayed below 1e-12 at r_max");
  std::vector<double> out(rho.size());
  for (std::size_t k = 0; k < rho.size(); ++k) {
    const double p = std::abs(rho[k]);
    const auto rule = quad::composite(detail::phase_breaks(r_max, [p](double) { return p; }, o), o.order);
    out[k] = parallel_sum<double>(rule.size(), [&](std::size_t i) {
      const double r = rule.x[i];
      return rule.w[i] * f(r) * sphere_kernel(d, r * p) * std::pow(r, d - 1);
    });
  }
  return out;
}

/// Inverse of radial_fourier: (2 pi)^{-d} int f_hat(rho) K_d(r rho) rho^{d-1} drho.
inline std::vector<double> inverse_radial_fourier(const std::function<double(double)>& fh, int d,
                                                  std::span<const double> r, double rho_max,
                                                  const OscillatoryOptions& o = {}) {
  auto v = radial_fourier(fh, d, r, rho_max, o);
  const double c = std::pow(2.0 * std::numbers::pi, -d);
  for (auto& x : v) x *= c;
  return v;
}

/// (e^{itL} f)(x) at |x| = x for a Gaussian profile.
inline cplx free_evolution(const GaussianRadial& f, double t, int d, double x, const OscillatoryOptions& o = {}) {
  const double rho_max = f.hat_extent(1e-17);
  const auto rule = quad::composite(
      detail::phase_breaks(rho_max, [&](double rho) { return std::abs(t) * phi1_prime(rho) + x; }, o), o.order);
  const cplx s = parallel_sum<cplx>(rule.size(), [&](std::size_t i) {
    const double rho = rule.x[i];
    return rule.w[i] * std::polar(f.hat(rho, d) * sphere_kernel(d, rho * x) * std::pow(rho, d - 1), t * phi1(rho));
  });
  return s * std::pow(2.0 * std::numbers::pi, -d);
}

struct SupNorm {
  double sup = 0.0;
  double x_at = 0.0;
};

/// sup_x |(e^{itL} f)(x)|, searched on |x| in [0, (1 + max phi1') t] with
/// candidates clustered on the stationary-phase radii x = t phi1'(rho),
/// then refined by golden-section search around the best candidates.
inline SupNorm free_evolution_supnorm(const GaussianRadial& f, double t, int d, const OscillatoryOptions& o = {}) {
  if (t == 0.0) return {std::abs(f.amplitude), 0.0};
  t = std::abs(t);
  const double rho_max = f.hat_extent(1e-17);
  const double x_hi = (1.0 + phi1_prime(rho_max)) * t;
  std::vector<double> xs;
  for (int k = 0; k <= 40; ++k) xs.push_back(x_hi * k / 40.0);
  const double rho_peak = f.hat_extent(1e-6);
  for (int k = 0; k <= 80; ++k) xs.push_back(t * phi1_prime(rho_peak * k / 80.0));
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  auto mag = [&](double x) { return std::abs(free_evolution(f, t, d, x, o)); };
  std::vector<double> vals(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) vals[i] = mag(xs[i]);

  SupNorm best{0.0, 0.0};
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (vals[i] > best.sup) best = {vals[i], xs[i]};

  // Refine the three largest local maxima.
  std::vector<std::size_t> peaks;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const bool left = i == 0 || vals[i] >= vals[i - 1];
    const bool right = i + 1 == xs.size() || vals[i] >= vals[i + 1];
    if (left && right) peaks.push_back(i);
  }
  std::sort(peaks.begin(), peaks.end(), [&](auto a, auto b) { return vals[a] > vals[b]; });
  if (peaks.size() > 3) peaks.resize(3);
  constexpr double g = 0.6180339887498949;
  for (auto i : peaks) {
    double a = i == 0 ? xs[0] : xs[i - 1];
    double b = i + 1 == xs.size() ? xs[i] : xs[i + 1];
    double c = b - g * (b - a), e = a + g * (b - a);
    double fc = mag(c), fe = mag(e);
    for (int it = 0; it < 40 && b - a > 1e-6 * std::max(1.0, t); ++it) {
      if (fc > fe) {
        b = e;
        e = c;
        fe = fc;
        c = b - g * (b - a);
        fc = mag(c);
      } else {
        a = c;
        c = e;
        fc = fe;
        e = a + g * (b - a);
        fe = mag(e);
      }
    }
    if (fc > best.sup) best = {fc, c};
    if (fe > best.sup) best = {fe, e};
  }
  return best;
}

struct DecayFit {
  LineFit fit;
  std::vector<double> t;
  std::vector<double> sup;
};

inline DecayFit dispersion_decay_fit(const GaussianRadial& f, int d, std::span<const double> times,
                                     const OscillatoryOptions& o = {}) {
  DecayFit out;
  out.t.assign(times.begin(), times.end());
  for (double t : times) out.sup.push_back(free_evolution_supnorm(f, t, d, o).sup);
  out.fit = fit_power_law(out.t, out.sup);
  return out;
}

}  // namespace bosegas
