#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bosegas/field.hpp"
#include "bosegas/grid.hpp"
#include "bosegas/potential.hpp"

using namespace bosegas;
using Catch::Approx;

namespace {
double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}
}  // namespace

TEST_CASE("make_grid lattice", "[core][grid]") {
  SECTION("d=1, n=8, L=2pi: integer lattice with Nyquist 4") {
    auto g = make_grid(1, 8, 2.0 * std::numbers::pi);
    REQUIRE(g.size() == 8);
    std::vector<double> k;
    for (std::size_t i = 0; i < g.size(); ++i) k.push_back(g.xi(0, i));
    std::sort(k.begin(), k.end());
    for (int i = 0; i < 8; ++i) REQUIRE(k[i] == Approx(i - 3).margin(1e-14));
    int nyq = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (g.nyquist(i)) {
        ++nyq;
        REQUIRE(g.xi(0, i) == Approx(4.0));
      }
    REQUIRE(nyq == 1);
  }
  SECTION("d=2, n=16, L=32: 256 modes with spacing pi/16") {
    auto g = make_grid(2, 16, 32.0);
    REQUIRE(g.size() == 256);
    REQUIRE(g.dk() == Approx(std::numbers::pi / 16));
    REQUIRE(g.xi(1, 1) == Approx(std::numbers::pi / 16));
    REQUIRE(g.xi(0, 16) == Approx(std::numbers::pi / 16));
  }
  SECTION("d=3, n=32, L=40: round trip on a random field") {
    auto g = make_grid(3, 32, 40.0);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    std::vector<cplx> f(g.size());
    for (auto& v : f) v = {nd(rng), nd(rng)};
    auto back = g.inverse(g.forward(f));
    double peak = 0.0;
    for (auto& v : f) peak = std::max(peak, std::abs(v));
    REQUIRE(max_abs_diff(f, back) / peak <= 1e-12);
  }
  SECTION("lattice symmetric once Nyquist is excluded") {
    auto g = make_grid(2, 8, 5.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g.nyquist(i)) continue;
      const auto m = g.mirror(i);
      REQUIRE_FALSE(g.nyquist(m));
      REQUIRE(g.xi(0, m) == -g.xi(0, i));
      REQUIRE(g.xi(1, m) == -g.xi(1, i));
    }
  }
  SECTION("invalid input") {
    REQUIRE_THROWS_AS(make_grid(0, 16, 1.0), ConfigError);
    REQUIRE_THROWS_AS(make_grid(1, 12, 1.0), ConfigError);
    REQUIRE_THROWS_AS(make_grid(1, 4, 1.0), ConfigError);
    REQUIRE_THROWS_AS(make_grid(1, 16, -1.0), ConfigError);
  }
}

TEST_CASE("transform convention", "[core][grid]") {
  // Gaussian exp(-x^2/2) has transform sqrt(2 pi) exp(-xi^2/2).
  auto g = make_grid(1, 128, 40.0);
  auto f = g.sample([](std::span<const double> x) { return std::exp(-0.5 * x[0] * x[0]); });
  auto fh = g.forward(f);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double xi = g.xi(0, i);
    REQUIRE(std::abs(fh[i] - std::sqrt(2.0 * std::numbers::pi) * std::exp(-0.5 * xi * xi)) < 1e-13);
  }
  // Parseval: ||f||^2 = sqrt(pi)
  REQUIRE(g.norm2(fh) == Approx(std::sqrt(std::numbers::pi)).epsilon(1e-13));
}

TEST_CASE("fermi_normalize", "[core][potential]") {
  SECTION("V_hat(0) = 2 halves every mode") {
    std::vector<cplx> v{2.0, 1.0, cplx(0.5, 0.5), -4.0};
    auto n = fermi_normalize(v);
    for (std::size_t i = 0; i < v.size(); ++i) REQUIRE(std::abs(n[i] - 0.5 * v[i]) == 0.0);
  }
  SECTION("unit-mass profile unchanged") {
    std::vector<cplx> v{1.0, 0.3, 0.3};
    auto n = fermi_normalize(v);
    for (std::size_t i = 0; i < v.size(); ++i) REQUIRE(n[i] == v[i]);
  }
  SECTION("zero mean rejected") {
    std::vector<cplx> v{0.0, 1.0, 1.0};
    REQUIRE_THROWS_AS(fermi_normalize(v), ConfigError);
  }
}

TEST_CASE("build_potential", "[core][potential]") {
  SECTION("n=1 Gaussian in d=1: W = -V'' by central differences") {
    auto g = make_grid(1, 256, 40.0);
    auto p = build_gaussian_potential(1.0, 1.0, 0.01, g);
    auto W = p.W_physical();
    // normalized profile V(x) = exp(-x^2/2) / sqrt(2 pi), differenced with a small step
    auto V = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); };
    const double h = 1e-3;
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = g.x(0, i);
      const double d2 = (V(x + h) - 2.0 * V(x) + V(x - h)) / (h * h);
      worst = std::max(worst, std::abs(W[i] + d2));
    }
    REQUIRE(worst <= 1e-6);
  }
  SECTION("W_hat(0) = 0 and |V_hat(0)| = 1") {
    auto g = make_grid(2, 32, 24.0);
    for (double n : {0.5, 1.0, 1.5}) {
      auto p = build_gaussian_potential(n, 1.0, 0.01, g);
      REQUIRE(p.W_hat[0] == cplx(0.0));
      REQUIRE(std::abs(p.V_hat[0]) == Approx(1.0).epsilon(1e-15));
      for (std::size_t i = 0; i < g.size(); ++i)
        REQUIRE(std::abs(p.W_hat[i] - std::pow(g.xi2(i), n) * p.V_hat[i]) <= 1e-15 * std::abs(p.V_hat[i]) + 1e-300);
    }
  }
  SECTION("W is real in physical space") {
    auto g = make_grid(2, 32, 24.0);
    auto p = build_gaussian_potential(1.0, 1.0, 0.01, g);
    auto W = g.inverse(p.W_hat);
    double re = 0.0, im = 0.0;
    for (auto& v : W) {
      re = std::max(re, std::abs(v.real()));
      im = std::max(im, std::abs(v.imag()));
    }
    REQUIRE(im <= 1e-12 * re);
  }
  SECTION("V = 0 cannot be normalized") {
    auto g = make_grid(1, 32, 20.0);
    REQUIRE_THROWS_AS(build_potential(1.0, GaussianProfile{1.0, 0.0}, 0.01, g), ConfigError);
  }
}

TEST_CASE("potential_seminorms", "[core][potential]") {
  auto g = make_grid(1, 256, 40.0);
  auto p = build_gaussian_potential(1.0, 1.0, 0.01, g);

  SECTION("W_L1 against adaptive quadrature of |V''|") {
    // V = exp(-x^2/2) / sqrt(2 pi), W = -V'' = (1 - x^2) V.
    auto f = [](double x) { return std::abs((1.0 - x * x) * std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi)); };
    double oracle = 0.0;
    for (double a : {-20.0, -1.0, 1.0}) {
      const double b = a == -20.0 ? -1.0 : (a == -1.0 ? 1.0 : 20.0);
      oracle += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
    }
    REQUIRE(potential_seminorms(p).W_L1 == Approx(oracle).epsilon(1e-6));
  }
  SECTION("homogeneity") {
    auto base = potential_seminorms(p);
    Potential q = p;
    for (auto& v : q.V_hat) v *= -3.0;
    for (auto& v : q.W_hat) v *= -3.0;
    auto s = potential_seminorms(q);
    REQUIRE(s.W_L1 == Approx(3.0 * base.W_L1).epsilon(1e-13));
    REQUIRE(s.W_W41 == Approx(3.0 * base.W_W41).epsilon(1e-13));
    REQUIRE(s.W_H4 == Approx(3.0 * base.W_H4).epsilon(1e-13));
    REQUIRE(s.V_weighted_H == Approx(3.0 * base.V_weighted_H).epsilon(1e-13));
    REQUIRE(s.total == Approx(3.0 * base.total).epsilon(1e-13));
  }
  SECTION("W = 0 gives zero seminorms") {
    Potential q = p;
    for (auto& v : q.V_hat) v = 0.0;
    for (auto& v : q.W_hat) v = 0.0;
    auto s = potential_seminorms(q);
    REQUIRE(s.W_L1 == 0.0);
    REQUIRE(s.W_W41 == 0.0);
    REQUIRE(s.W_H4 == 0.0);
    REQUIRE(s.total == 0.0);
  }
  SECTION("unresolved tail is refused") {
    auto small = make_grid(1, 64, 8.0);
    auto q = build_gaussian_potential(1.0, 1.0, 0.01, small);
    REQUIRE_THROWS_AS(potential_seminorms(q), ResolutionError);
  }
}

TEST_CASE("field_norms", "[core][field]") {
  auto g = make_grid(1, 64, 20.0);
  SECTION("zero field") {
    auto n = field_norms(FieldState::zero(g));
    REQUIRE(n.re_l2 == 0.0);
    REQUIRE(n.grad_im_l2 == 0.0);
    REQUIRE(n.triple == 0.0);
  }
  SECTION("single mode plus conjugate: ||Re beta||^2 = 2 / L") {
    auto f = FieldState::zero(g);
    f.h1[3] = 1.0;
    f.h1[g.mirror(3)] = 1.0;
    // physical field (2/L) cos(xi x); its squared L^2 norm over the box is 2/L
    REQUIRE(field_norms(f).re_l2 == Approx(std::sqrt(2.0 / 20.0)).epsilon(1e-14));
  }
  SECTION("scaling doubles every norm") {
    auto f = gaussian_field(g, {0.3, 1.5, 0.7, {}});
    auto a = field_norms(f);
    for (auto& v : f.h1) v *= 2.0;
    for (auto& v : f.h2) v *= 2.0;
    auto b = field_norms(f);
    REQUIRE(b.re_l2 == Approx(2 * a.re_l2).epsilon(1e-14));
    REQUIRE(b.grad_im_l2 == Approx(2 * a.grad_im_l2).epsilon(1e-14));
    REQUIRE(b.u32_re_l1 == Approx(2 * a.u32_re_l1).epsilon(1e-13));
    REQUIRE(b.u12_im_l1 == Approx(2 * a.u12_im_l1).epsilon(1e-13));
    REQUIRE(b.u52_im_l1 == Approx(2 * a.u52_im_l1).epsilon(1e-13));
    REQUIRE(b.triple == Approx(2 * a.triple).epsilon(1e-13));
  }
  SECTION("Gaussian pulse is real-symmetric in frequency") {
    auto f = gaussian_field(g, {0.3, 1.5, 0.7, {}});
    REQUIRE(reality_defect(g, f.h1) < 1e-14);
    REQUIRE(reality_defect(g, f.h2) < 1e-14);
  }
}

TEST_CASE("parallel reductions are thread-count independent", "[core][parallel]") {
  auto g = make_grid(2, 64, 24.0);
  auto f = gaussian_field(g, {0.3, 1.5, 0.7, {}});
  set_thread_count(1);
  const auto a = field_norms(f);
  set_thread_count(4);
  const auto b = field_norms(f);
  set_thread_count(1);
  REQUIRE(a.re_l2 == b.re_l2);
  REQUIRE(a.grad_im_l2 == b.grad_im_l2);
  REQUIRE(a.triple == b.triple);
}
