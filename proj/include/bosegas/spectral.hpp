#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <span>

#include "bosegas/errors.hpp"
#include "bosegas/grid.hpp"

namespace bosegas {

/// Dispersion relation of L = sqrt(-Delta (1 - Delta)).
inline double phi1(double r) { return r * std::sqrt(1.0 + r * r); }
inline double phi1_prime(double r) {
  const double q = std::sqrt(1.0 + r * r);
  return q + r * r / q;
}
inline double phi1_second(double r) {
  const double q2 = 1.0 + r * r;
  return r * (3.0 + 2.0 * r * r) / (q2 * std::sqrt(q2));
}

using Vec2 = std::array<cplx, 2>;

/// Row-major complex 2x2 matrix.
struct Mat2 {
  cplx a, b, c, d;

  cplx det() const { return a * d - b * c; }
  Vec2 operator*(const Vec2& v) const { return {a * v[0] + b * v[1], c * v[0] + d * v[1]}; }
  Mat2 operator*(const Mat2& m) const {
    return {a * m.a + b * m.c, a * m.b + b * m.d, c * m.a + d * m.c, c * m.b + d * m.d};
  }
  Mat2 inverse() const {
    const cplx D = det();
    return {d / D, -b / D, -c / D, a / D};
  }
};

inline double dot(std::span<const double> u, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

/// H_eps(xi, P) = [[i P.xi - eps, |xi|^2], [-1 - |xi|^2, i P.xi - eps]].
inline Mat2 mode_matrix(std::span<const double> xi, std::span<const double> P, double eps) {
  const double k2 = dot(xi, xi);
  const cplx diag(-eps, dot(P, xi));
  return {diag, k2, -1.0 - k2, diag};
}

/// Closed form (i P.xi - eps)^2 + phi1^2 of det H_eps.
inline cplx mode_determinant(double r, double p_dot_xi, double eps) {
  const cplx z(-eps, p_dot_xi);
  const double f = phi1(r);
  return z * z + f * f;
}

/// Eigenvalues (+i phi1 + i P.xi - eps, -i phi1 + i P.xi - eps).
inline Vec2 mode_eigenvalues(double r, double p_dot_xi, double eps) {
  const double f = phi1(r);
  return {cplx(-eps, p_dot_xi + f), cplx(-eps, p_dot_xi - f)};
}

/// Eigenbasis of H at |xi| = r > 0 and its inverse.
inline Mat2 diag_basis(double r) {
  const double q = std::sqrt(1.0 + r * r);
  return {r, r, cplx(0.0, q), cplx(0.0, -q)};
}
inline Mat2 diag_basis_inverse(double r) {
  const double q = std::sqrt(1.0 + r * r);
  const cplx iq2(0.0, 2.0 * q);
  return {1.0 / (2.0 * r), 1.0 / iq2, 1.0 / (2.0 * r), -1.0 / iq2};
}

/// e^z - 1 without cancellation for small |z|.
inline cplx expm1(cplx z) {
  const double x = z.real(), y = z.imag();
  const double s = std::sin(0.5 * y);
  return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

/// (e^z - 1) / z, entire.
inline cplx phi_tilde(cplx z) {
  if (std::abs(z) < 1e-4) {
    cplx s = 0.0, t = 1.0;
    for (int k = 1; k <= 8; ++k) {
      t /= static_cast<double>(k);  // z^{k-1} / k!
      s += t;
      t *= z;
    }
    return s;
  }
  return expm1(z) / z;
}

/// Integral of s e^{z s} over [0, 1], i.e. (1 + (z - 1) e^z) / z^2.
inline cplx phi_two(cplx z) {
  if (std::abs(z) < 0.5) {
    cplx s = 0.0, t = 1.0;  // z^k / k!
    for (int k = 0; k <= 20; ++k) {
      s += t / static_cast<double>(k + 2);
      t *= z / static_cast<double>(k + 1);
    }
    return s;
  }
  return (1.0 + (z - 1.0) * std::exp(z)) / (z * z);
}

/// Advances one mode by dt under h' = H_eps(xi, P) h + g with constant g:
/// h <- e^{dt H} h + dt phi_tilde(dt H) g, computed in the eigenbasis.
/// dt may be negative.
inline Vec2 propagate_mode(const Vec2& h, const Vec2& g, std::span<const double> xi, std::span<const double> P,
                           double dt, double eps = 0.0) {
  const double k2 = dot(xi, xi);
  if (k2 == 0.0) {
    // H(0) = -eps I + N with N = [[0,0],[-1,0]] nilpotent.
    const double decay = std::exp(-eps * dt);
    const Vec2 eh{h[0], h[1] - dt * h[0]};
    const cplx p1 = dt * phi_tilde(-eps * dt);
    const cplx p2 = dt * dt * phi_two(-eps * dt);
    return {decay * eh[0] + p1 * g[0], decay * eh[1] + p1 * g[1] - p2 * g[0]};
  }
  const double r = std::sqrt(k2);
  const Mat2 Ainv = diag_basis_inverse(r);
  const Vec2 a = Ainv * h;
  const Vec2 ga = Ainv * g;
  const Vec2 lam = mode_eigenvalues(r, dot(P, xi), eps);
  Vec2 out;
  for (int s = 0; s < 2; ++s) {
    const cplx z = dt * lam[s];
    out[s] = std::exp(z) * a[s] + dt * phi_tilde(z) * ga[s];
  }
  return diag_basis(r) * out;
}

/// Multiplies by U(xi)^s = (|xi| / sqrt(1 + |xi|^2))^s.
inline void apply_U_power(const SpectralGrid& grid, std::span<cplx> f, double s) {
  if (s < 0.0 && f[0] != cplx(0.0))
    throw ConfigError("singular-multiplier", "negative power of U on a field with a nonzero mean");
  parallel_for(grid.size(), [&](std::size_t i) {
    const double k2 = grid.xi2(i);
    if (k2 == 0.0) {
      if (s != 0.0) f[i] = 0.0;
      return;
    }
    f[i] *= std::pow(k2 / (1.0 + k2), 0.5 * s);
  });
}

}  // namespace bosegas
