#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "bosegas/errors.hpp"

namespace bosegas {

/// Least-squares line y = intercept + slope * x with a 95% interval on the slope.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_ci = 0.0;  // half-width
  std::size_t n = 0;
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 3 || y.size() != n) throw ConfigError("too-few-samples", "line fit needs at least 3 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) throw ConfigError("degenerate-fit", "abscissae are all equal");
  LineFit f;
  f.n = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - f.intercept - f.slope * x[i];
    ss += e * e;
  }
  const double se = std::sqrt(ss / (n - 2) / sxx);
  boost::math::students_t dist(static_cast<double>(n - 2));
  f.slope_ci = boost::math::quantile(boost::math::complement(dist, 0.025)) * se;
  return f;
}

/// Power-law fit y ~ C x^slope by least squares in log-log coordinates.
/// Non-positive samples are a caller error.
inline LineFit fit_power_law(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ResolutionError("non-positive-sample", "power-law fit needs positive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return fit_line(lx, ly);
}

/// n points log-spaced on [a, b] inclusive.
inline std::vector<double> logspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = n == 1 ? a : std::exp(std::log(a) + (std::log(b) - std::log(a)) * i / (n - 1.0));
  return v;
}

}  // namespace bosegas
