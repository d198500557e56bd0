#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "bosegas/errors.hpp"

namespace bosegas::quad {

/// Nodes and weights of a (composite) quadrature rule.
struct Rule {
  std::vector<double> x;
  std::vector<double> w;

  std::size_t size() const { return x.size(); }

  template <class F>
  auto integrate(F&& f) const {
    using R = decltype(f(0.0));
    R s{};
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * f(x[i]);
    return s;
  }
};

namespace detail {
template <int N>
void legendre_fill(std::vector<double>& x, std::vector<double>& w) {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& a = G::abscissa();
  const auto& b = G::weights();
  x.clear();
  w.clear();
  // boost stores the non-negative half, zero first for odd N.
  for (std::size_t i = a.size(); i-- > 0;) {
    if (a[i] == 0.0) continue;
    x.push_back(-a[i]);
    w.push_back(b[i]);
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    x.push_back(a[i]);
    w.push_back(b[i]);
  }
}
}  // namespace detail

/// Gauss-Legendre rule on [-1, 1], ascending nodes.
inline const Rule& gauss_legendre(int order) {
  static const Rule r8 = [] { Rule r; detail::legendre_fill<8>(r.x, r.w); return r; }();
  static const Rule r16 = [] { Rule r; detail::legendre_fill<16>(r.x, r.w); return r; }();
  static const Rule r20 = [] { Rule r; detail::legendre_fill<20>(r.x, r.w); return r; }();
  static const Rule r30 = [] { Rule r; detail::legendre_fill<30>(r.x, r.w); return r; }();
  switch (order) {
    case 8: return r8;
    case 16: return r16;
    case 20: return r20;
    case 30: return r30;
    default: throw ConfigError("invalid-quadrature", "supported Gauss-Legendre orders are 8, 16, 20, 30");
  }
}

/// Appends an order-point Gauss-Legendre panel on [a, b] to rule.
inline void add_panel(Rule& rule, double a, double b, int order) {
  const Rule& g = gauss_legendre(order);
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (std::size_t i = 0; i < g.size(); ++i) {
    rule.x.push_back(c + h * g.x[i]);
    rule.w.push_back(h * g.w[i]);
  }
}

inline Rule composite(const std::vector<double>& breaks, int order) {
  Rule r;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) add_panel(r, breaks[i], breaks[i + 1], order);
  return r;
}

namespace detail {
// Breakpoints from u towards v with widths hmin, 2 hmin, ... capped at hmax.
inline std::vector<double> march(double u, double v, double hmin, double hmax) {
  std::vector<double> pts{u};
  const double dir = v > u ? 1.0 : -1.0;
  const double len = std::abs(v - u);
  double pos = 0.0, h = std::min(hmin, hmax);
  while (len - pos > 1e-15 * len) {
    double step = std::min(h, hmax);
    if (len - pos < 1.5 * step) step = len - pos;
    pos += step;
    pts.push_back(u + dir * pos);
    h *= 2.0;
  }
  pts.back() = v;
  return pts;
}
}  // namespace detail

/// Panel breakpoints on [a, b], geometrically refined (ratio 2) towards every
/// anchor down to width hmin; away from anchors panels are at most hmax wide.
/// Anchors equal to a or b refine that endpoint.
inline std::vector<double> graded_breaks(double a, double b, std::vector<double> anchors, double hmin,
                                         double hmax) {
  std::sort(anchors.begin(), anchors.end());
  std::vector<double> bounds{a};
  std::vector<bool> refine{false};
  for (double p : anchors) {
    if (p <= a) {
      refine.front() = true;
    } else if (p < b) {
      if (p > bounds.back()) {
        bounds.push_back(p);
        refine.push_back(true);
      }
    }
  }
  bounds.push_back(b);
  refine.push_back(std::any_of(anchors.begin(), anchors.end(), [b](double p) { return p >= b; }));

  std::vector<double> out{a};
  for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
    const double u = bounds[i], v = bounds[i + 1];
    std::vector<double> seg;
    if (refine[i] && refine[i + 1]) {
      const double m = 0.5 * (u + v);
      seg = detail::march(u, m, hmin, hmax);
      auto back = detail::march(v, m, hmin, hmax);
      for (auto it = back.rbegin() + 1; it != back.rend(); ++it) seg.push_back(*it);
    } else if (refine[i]) {
      seg = detail::march(u, v, hmin, hmax);
    } else if (refine[i + 1]) {
      auto back = detail::march(v, u, hmin, hmax);
      seg.assign(back.rbegin(), back.rend());
    } else {
      const int m = std::max(1, static_cast<int>(std::ceil((v - u) / hmax - 1e-12)));
      for (int k = 0; k <= m; ++k) seg.push_back(u + (v - u) * k / m);
    }
    for (std::size_t k = 1; k < seg.size(); ++k) out.push_back(seg[k]);
  }
  return out;
}

/// Gauss rule for the weight (1 - x^2)^alpha on [-1, 1], alpha > -1
/// (Golub-Welsch on the symmetric Jacobi recurrence).
inline Rule gauss_jacobi_symmetric(int order, double alpha) {
  if (order < 1 || alpha <= -1.0) throw ConfigError("invalid-quadrature", "bad Gauss-Jacobi parameters");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    double beta;
    const double den = (2.0 * k + 2.0 * alpha) * (2.0 * k + 2.0 * alpha) - 1.0;
    if (std::abs(den) < 1e-14) {
      beta = 0.5;  // Chebyshev (alpha = -1/2), k = 1
    } else {
      beta = k * (k + 2.0 * alpha) / den;
    }
    J(k, k - 1) = J(k - 1, k) = std::sqrt(beta);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  const double mu0 = std::sqrt(std::numbers::pi) * boost::math::tgamma(alpha + 1.0) /
                     boost::math::tgamma(alpha + 1.5);
  Rule r;
  for (int i = 0; i < order; ++i) {
    r.x.push_back(es.eigenvalues()(i));
    const double v0 = es.eigenvectors()(0, i);
    r.w.push_back(mu0 * v0 * v0);
  }
  return r;
}

}  // namespace bosegas::quad
