#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "bosegas/errors.hpp"
#include "bosegas/field.hpp"
#include "bosegas/potential.hpp"
#include "bosegas/spectral.hpp"

namespace bosegas {

struct Profile {
  FieldState S;
  bool regularized = false;  ///< produced with eps > 0
  double residual = 0.0;     ///< max per-mode backward error |H S - b| / (|H|_F |S| + |b|)
  double abs_residual = 0.0; ///< max per-mode |H S - b|
  double condition = 0.0;    ///< max per-mode |H|_F |H^{-1}|_F
};

/// Frobenius norm.
inline double frob(const Mat2& m) {
  return std::sqrt(std::norm(m.a) + std::norm(m.b) + std::norm(m.c) + std::norm(m.d));
}

/// Solves H_eps(xi, P) S = c (0, W_hat) mode by mode; the xi = 0 mode is 0.
/// The coupling c defaults to sqrt(rho0).
inline Profile solve_profile(std::span<const double> P, const Potential& pot, double eps = 0.0,
                             std::optional<double> coupling = std::nullopt) {
  const auto& g = pot.grid;
  if (static_cast<int>(P.size()) != g.dim()) throw ConfigError("dimension-mismatch", "P has the wrong dimension");
  if (eps < 0.0) throw ConfigError("invalid-eps", "eps must be >= 0");
  const double speed = std::sqrt(dot(P, P));
  if (eps == 0.0 && speed >= 1.0)
    throw ConfigError("singular-mode", "supersonic profile (|P| >= 1) needs eps > 0");
  const double c = coupling.value_or(std::sqrt(pot.rho0));
  Profile out{FieldState::zero(g), eps > 0.0};
  const int d = g.dim();
  std::vector<double> res(g.size()), ares(g.size()), cond(g.size());
  parallel_for(g.size(), [&](std::size_t i) {
    if (i == 0 || g.nyquist(i)) return;
    std::vector<double> xi(d);
    for (int j = 0; j < d; ++j) xi[j] = g.xi(j, i);
    const Mat2 H = mode_matrix(xi, P, eps);
    const Mat2 Hi = H.inverse();
    const Vec2 b{0.0, c * pot.W_hat[i]};
    const Vec2 s = Hi * b;
    out.S.h1[i] = s[0];
    out.S.h2[i] = s[1];
    const Vec2 hs = H * s;
    const double r = std::hypot(std::abs(hs[0] - b[0]), std::abs(hs[1] - b[1]));
    const double scale = frob(H) * std::hypot(std::abs(s[0]), std::abs(s[1])) + std::abs(b[1]);
    ares[i] = r;
    res[i] = scale > 0.0 ? r / scale : 0.0;
    cond[i] = frob(H) * frob(Hi);
  });
  out.residual = *std::max_element(res.begin(), res.end());
  out.abs_residual = *std::max_element(ares.begin(), ares.end());
  out.condition = *std::max_element(cond.begin(), cond.end());
  return out;
}

/// sup_x |h(x) - S(x)| over both components.
inline double scattering_gap(const FieldState& h, const FieldState& S) {
  if (!h.grid.same_as(S.grid)) throw ConfigError("grid-mismatch", "fields live on different grids");
  const auto& g = h.grid;
  double m = 0.0;
  for (int c = 0; c < 2; ++c) {
    const auto& a = c == 0 ? h.h1 : h.h2;
    const auto& b = c == 0 ? S.h1 : S.h2;
    std::vector<cplx> diff(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) diff[i] = a[i] - b[i];
    auto x = g.inverse(diff);
    for (const auto& v : x) m = std::max(m, std::abs(v.real()));
  }
  return m;
}

}  // namespace bosegas
