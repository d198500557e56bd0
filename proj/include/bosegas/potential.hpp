#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "bosegas/errors.hpp"
#include "bosegas/grid.hpp"

namespace bosegas {

/// V(x) = amplitude * exp(-|x|^2 / (2 s^2)). The amplitude is irrelevant once
/// the profile is normalized, except that zero cannot be normalized.
struct GaussianProfile {
  double s = 1.0;
  double amplitude = 1.0;

  double operator()(double r) const { return amplitude * std::exp(-r * r / (2.0 * s * s)); }
};

/// Potential on a grid: V, its Fermi-rule descendant W = (-Delta)^n V, and rho0.
struct Potential {
  SpectralGrid grid;
  double n = 1.0;
  double rho0 = 0.0;
  std::vector<cplx> V_hat;
  std::vector<cplx> W_hat;

  /// ||W||_2^2 via Parseval.
  double W_norm2() const { return grid.norm2(W_hat); }
  /// W sampled in physical space (real part; the imaginary part is round-off).
  std::vector<double> W_physical() const {
    auto w = grid.inverse(W_hat);
    std::vector<double> out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[i].real();
    return out;
  }
};

/// Divides a spectral profile (zero mode at index 0) by |V_hat(0)|.
inline std::vector<cplx> fermi_normalize(std::span<const cplx> V_hat) {
  if (V_hat.empty()) throw ConfigError("cannot-normalize", "empty profile");
  double peak = 0.0;
  for (const auto& v : V_hat) peak = std::max(peak, std::abs(v));
  const double m = std::abs(V_hat[0]);
  if (!(m > 1e-13 * peak) || m == 0.0)
    throw ConfigError("cannot-normalize", "V_hat(0) = 0, profile has zero mean");
  std::vector<cplx> out(V_hat.begin(), V_hat.end());
  for (auto& v : out) v /= m;
  return out;
}

/// Multiplies by |xi|^{2s} at every mode (exactly 0 at xi = 0 for s > 0).
inline void apply_laplacian_power(const SpectralGrid& g, std::span<cplx> f, double s) {
  parallel_for(g.size(), [&](std::size_t i) {
    const double k2 = g.xi2(i);
    f[i] *= k2 == 0.0 ? (s == 0.0 ? 1.0 : 0.0) : std::pow(k2, s);
  });
}

/// Builds V from a radial physical profile, normalizes it and sets W = (-Delta)^n V.
inline Potential build_potential(double n, const std::function<double(double)>& V_profile, double rho0,
                                 const SpectralGrid& grid) {
  if (!(n > 0.0)) throw ConfigError("invalid-fermi-exponent", "n must be > 0");
  if (!(rho0 > 0.0)) throw ConfigError("invalid-rho0", "rho0 must be > 0");
  auto V = grid.sample([&](std::span<const double> x) {
    double r2 = 0.0;
    for (double c : x) r2 += c * c;
    return V_profile(std::sqrt(r2));
  });
  auto Vh = grid.forward(V);
  grid.zero_nyquist(Vh);
  Potential p{grid, n, rho0, fermi_normalize(Vh), {}};
  // Samples of an even real profile have a real transform; drop the round-off.
  for (auto& v : p.V_hat) v = v.real();
  p.W_hat = p.V_hat;
  apply_laplacian_power(grid, p.W_hat, n);
  return p;
}

inline Potential build_gaussian_potential(double n, double s, double rho0, const SpectralGrid& grid) {
  return build_potential(n, GaussianProfile{s, 1.0}, rho0, grid);
}

namespace detail {

// L^1 norm of the trigonometric interpolant in d = 1: integrate it exactly
// between consecutive sign changes.
inline double l1_norm_1d(const SpectralGrid& g, std::span<const cplx> spec) {
  const std::size_t N = g.size();
  const double L = g.length();
  auto value = [&](double x) {
    double s = 0.0;
    for (std::size_t k = 0; k < N; ++k)
      if (!g.nyquist(k)) s += std::real(spec[k] * std::polar(1.0, g.xi(0, k) * x));
    return s / L;
  };
  auto primitive = [&](double x) {
    double s = spec[0].real() * x;
    for (std::size_t k = 1; k < N; ++k) {
      if (g.nyquist(k)) continue;
      const double xi = g.xi(0, k);
      s += std::real(spec[k] * std::polar(1.0, xi * x) / cplx(0.0, xi));
    }
    return s / L;
  };
  // Samples on [-L/2, L/2) in increasing x.
  std::vector<double> xs(N), fs(N);
  for (std::size_t j = 0; j < N; ++j) {
    xs[j] = -0.5 * L + j * g.dx();
    fs[j] = value(xs[j]);
  }
  std::vector<double> cuts{-0.5 * L};
  for (std::size_t j = 0; j + 1 < N; ++j) {
    if (fs[j] == 0.0) {
      if (j > 0) cuts.push_back(xs[j]);
      continue;
    }
    if (!(fs[j] * fs[j + 1] < 0.0)) continue;
    double a = xs[j], b = xs[j + 1], fa = fs[j];
    for (int it = 0; it < 60; ++it) {
      const double m = 0.5 * (a + b), fm = value(m);
      if ((fm > 0.0) == (fa > 0.0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    cuts.push_back(0.5 * (a + b));
  }
  cuts.push_back(0.5 * L);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) total += std::abs(primitive(cuts[k + 1]) - primitive(cuts[k]));
  return total;
}

}  // namespace detail

struct PotentialSeminorms {
  double W_L1 = 0.0;
  double W_W41 = 0.0;   ///< sum over |alpha| <= 4 of ||d^alpha W||_{L^1}
  double W_H4 = 0.0;
  double V_weighted_H = 0.0;  ///< ||(1+|x|^4) V||_{H^{4n+4}}, grid diagnostic
  double total = 0.0;
};

/// Largest |f| on the box faces relative to max |f|.
inline double boundary_tail_ratio(const SpectralGrid& g, std::span<const double> f) {
  double peak = 0.0, edge = 0.0;
  const double half = -0.5 * g.length();
  for (std::size_t i = 0; i < g.size(); ++i) {
    peak = std::max(peak, std::abs(f[i]));
    for (int j = 0; j < g.dim(); ++j)
      if (g.x(j, i) == half) edge = std::max(edge, std::abs(f[i]));
  }
  return peak == 0.0 ? 0.0 : edge / peak;
}

inline PotentialSeminorms potential_seminorms(const Potential& p) {
  const auto& g = p.grid;
  const int d = g.dim();
  auto Vphys = g.inverse(p.V_hat);
  std::vector<double> Vre(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) Vre[i] = Vphys[i].real();
  const auto Wre = p.W_physical();
  if (boundary_tail_ratio(g, Vre) > 1e-10 || boundary_tail_ratio(g, Wre) > 1e-10)
    throw ResolutionError("unresolved-potential", "potential tail at the box edge exceeds 1e-10 of its peak");

  PotentialSeminorms r;
  auto l1 = [&](std::span<const cplx> spec) {
    if (d == 1) return detail::l1_norm_1d(g, spec);
    auto f = g.inverse(spec);
    return parallel_sum<double>(g.size(), [&](std::size_t i) { return std::abs(f[i].real()); }) * g.cell();
  };

  // All multi-indices with |alpha| <= 4.
  std::vector<std::vector<int>> alphas{{}};
  for (int j = 0; j < d; ++j) {
    std::vector<std::vector<int>> next;
    for (const auto& a : alphas) {
      int used = 0;
      for (int v : a) used += v;
      for (int k = 0; used + k <= 4; ++k) {
        auto b = a;
        b.push_back(k);
        next.push_back(std::move(b));
      }
    }
    alphas = std::move(next);
  }
  std::vector<cplx> tmp(g.size());
  for (const auto& a : alphas) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      cplx m = 1.0;
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < a[j]; ++k) m *= cplx(0.0, g.xi(j, i));
      tmp[i] = m * p.W_hat[i];
    }
    const double v = l1(tmp);
    r.W_W41 += v;
    bool zero = true;
    for (int k : a) zero = zero && k == 0;
    if (zero) r.W_L1 = v;
  }

  r.W_H4 = std::sqrt(parallel_sum<double>(g.size(), [&](std::size_t i) {
                       return std::pow(1.0 + g.xi2(i), 4) * std::norm(p.W_hat[i]);
                     }) / g.volume());

  auto weighted = g.sample([&](std::span<const double> x) {
    double r2 = 0.0;
    for (double c : x) r2 += c * c;
    return 1.0 + r2 * r2;
  });
  for (std::size_t i = 0; i < g.size(); ++i) weighted[i] *= Vre[i];
  auto wh = g.forward(weighted);
  const double sob = 4.0 * p.n + 4.0;
  // Modes at the round-off floor would dominate the high-order weight.
  double wpeak = 0.0;
  for (const auto& v : wh) wpeak = std::max(wpeak, std::abs(v));
  r.V_weighted_H = std::sqrt(parallel_sum<double>(g.size(), [&](std::size_t i) {
                               if (g.nyquist(i) || std::abs(wh[i]) <= 1e-10 * wpeak) return 0.0;
                               return std::pow(1.0 + g.xi2(i), sob) * std::norm(wh[i]);
                             }) / g.volume());
  r.total = r.W_W41 + r.W_H4 + r.V_weighted_H;
  return r;
}

/// Radially symmetric W for quadrature in general dimension:
/// W_hat(rho) = rho^{2n} exp(-s^2 rho^2 / 2), i.e. Gaussian V with V_hat(0) = 1.
struct RadialPotential {
  double n = 1.0;
  double s = 1.0;
  double rho0 = 0.01;

  double V_hat(double rho) const { return std::exp(-0.5 * s * s * rho * rho); }
  double W_hat(double rho) const { return rho == 0.0 ? 0.0 : std::pow(rho * rho, n) * V_hat(rho); }
  /// Radius beyond which W_hat < tol * max W_hat.
  double cutoff(double tol = 1e-17) const {
    // Peak at rho^2 = 2n/s^2; march outward.
    const double peak_r = std::sqrt(2.0 * n) / s;
    const double peak = W_hat(peak_r);
    double r = peak_r;
    while (W_hat(r) > tol * peak) r += 0.25 / s;
    return r;
  }
};

}  // namespace bosegas
