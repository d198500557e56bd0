#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "bosegas/errors.hpp"
#include "bosegas/grid.hpp"
#include "bosegas/parallel.hpp"
#include "bosegas/spectral.hpp"

namespace bosegas {

/// h = (Re beta, Im beta) in the particle frame, stored as transforms.
struct FieldState {
  SpectralGrid grid;
  std::vector<cplx> h1;
  std::vector<cplx> h2;

  static FieldState zero(const SpectralGrid& g) { return {g, std::vector<cplx>(g.size()), std::vector<cplx>(g.size())}; }

  /// Physical samples of component c (0 or 1).
  std::vector<double> physical(int c) const {
    auto f = grid.inverse(c == 0 ? h1 : h2);
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i].real();
    return out;
  }
};

/// Complex Gaussian beta0(x) = a e^{i theta} exp(-|x - x0|^2 / (2 w^2)).
struct GaussianPulse {
  double amplitude = 0.0;
  double width = 1.0;
  double phase = 0.0;
  std::vector<double> center;  // empty = origin
};

inline FieldState gaussian_field(const SpectralGrid& g, const GaussianPulse& p) {
  if (!(p.width > 0.0)) throw ConfigError("invalid-pulse", "pulse width must be positive");
  auto env = g.sample([&](std::span<const double> x) {
    double r2 = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double c = j < p.center.size() ? p.center[j] : 0.0;
      r2 += (x[j] - c) * (x[j] - c);
    }
    return p.amplitude * std::exp(-r2 / (2.0 * p.width * p.width));
  });
  std::vector<double> re(env.size()), im(env.size());
  for (std::size_t i = 0; i < env.size(); ++i) {
    re[i] = env[i] * std::cos(p.phase);
    im[i] = env[i] * std::sin(p.phase);
  }
  FieldState f{g, g.forward(re), g.forward(im)};
  g.zero_nyquist(f.h1);
  g.zero_nyquist(f.h2);
  return f;
}

/// max over modes of |f(-xi) - conj f(xi)|.
inline double reality_defect(const SpectralGrid& g, std::span<const cplx> f) {
  double m = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) m = std::max(m, std::abs(f[g.mirror(i)] - std::conj(f[i])));
  return m;
}

struct FieldNorms {
  double re_l2 = 0.0;        ///< ||Re beta||_2
  double grad_im_l2 = 0.0;   ///< ||grad Im beta||_2
  double energy = 0.0;       ///< ||Re beta||_{H^1} + ||Im beta||_{H^1-dot}
  double u32_re_l1 = 0.0;    ///< ||U^{3/2} Re beta||_{L^1} on the grid
  double u12_im_l1 = 0.0;
  double u52_im_l1 = 0.0;
  double triple = 0.0;       ///< energy + the three weighted L^1 pieces
};

inline FieldNorms field_norms(const FieldState& f) {
  const auto& g = f.grid;
  FieldNorms n;
  n.re_l2 = std::sqrt(g.norm2(f.h1));
  const double grad_re2 =
      parallel_sum<double>(g.size(), [&](std::size_t i) { return g.xi2(i) * std::norm(f.h1[i]); }) / g.volume();
  n.grad_im_l2 = std::sqrt(
      parallel_sum<double>(g.size(), [&](std::size_t i) { return g.xi2(i) * std::norm(f.h2[i]); }) / g.volume());
  n.energy = std::sqrt(n.re_l2 * n.re_l2 + grad_re2) + n.grad_im_l2;
  auto weighted_l1 = [&](const std::vector<cplx>& h, double s) {
    std::vector<cplx> w = h;
    w[0] = 0.0;  // U^s kills the mean for s > 0
    apply_U_power(g, w, s);
    auto x = g.inverse(w);
    return parallel_sum<double>(g.size(), [&](std::size_t i) { return std::abs(x[i].real()); }) * g.cell();
  };
  n.u32_re_l1 = weighted_l1(f.h1, 1.5);
  n.u12_im_l1 = weighted_l1(f.h2, 0.5);
  n.u52_im_l1 = weighted_l1(f.h2, 2.5);
  n.triple = n.energy + n.u32_re_l1 + n.u12_im_l1 + n.u52_im_l1;
  return n;
}

/// Amplitudes in the eigenbasis, mode by mode. The xi = 0 mode has no
/// eigenbasis representation; it is carried through unchanged.
struct DiagonalField {
  SpectralGrid grid;
  std::vector<cplx> a_plus;
  std::vector<cplx> a_minus;
  Vec2 zero_mode{};
};

inline DiagonalField to_diagonal(const FieldState& f) {
  const auto& g = f.grid;
  DiagonalField out{g, std::vector<cplx>(g.size()), std::vector<cplx>(g.size()), {f.h1[0], f.h2[0]}};
  parallel_for(g.size(), [&](std::size_t i) {
    if (i == 0) return;
    const Vec2 a = diag_basis_inverse(std::sqrt(g.xi2(i))) * Vec2{f.h1[i], f.h2[i]};
    out.a_plus[i] = a[0];
    out.a_minus[i] = a[1];
  });
  return out;
}

inline FieldState from_diagonal(const DiagonalField& a) {
  const auto& g = a.grid;
  FieldState f = FieldState::zero(g);
  f.h1[0] = a.zero_mode[0];
  f.h2[0] = a.zero_mode[1];
  parallel_for(g.size(), [&](std::size_t i) {
    if (i == 0) return;
    const Vec2 h = diag_basis(std::sqrt(g.xi2(i))) * Vec2{a.a_plus[i], a.a_minus[i]};
    f.h1[i] = h[0];
    f.h2[i] = h[1];
  });
  return f;
}

/// Exact step of h' = H_eps(P) h + (0, g2) over dt, P frozen. Nyquist modes stay 0.
inline void propagate_field(FieldState& f, std::span<const cplx> g2, std::span<const double> P, double dt,
                            double eps = 0.0) {
  const auto& g = f.grid;
  const int d = g.dim();
  parallel_for(g.size(), [&](std::size_t i) {
    if (g.nyquist(i)) {
      f.h1[i] = f.h2[i] = 0.0;
      return;
    }
    double xi[3];
    std::vector<double> xv;
    std::span<const double> xs;
    if (d <= 3) {
      for (int j = 0; j < d; ++j) xi[j] = g.xi(j, i);
      xs = std::span<const double>(xi, d);
    } else {
      xv.resize(d);
      for (int j = 0; j < d; ++j) xv[j] = g.xi(j, i);
      xs = xv;
    }
    const Vec2 h = propagate_mode({f.h1[i], f.h2[i]}, {0.0, g2.empty() ? cplx(0.0) : g2[i]}, xs, P, dt, eps);
    f.h1[i] = h[0];
    f.h2[i] = h[1];
  });
}

}  // namespace bosegas
