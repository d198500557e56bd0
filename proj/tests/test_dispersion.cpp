#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bosegas/dispersion.hpp"

using namespace bosegas;
using boost::math::quadrature::gauss_kronrod;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("sphere_kernel", "[dispersion]") {
  SECTION("d = 3 closed form") {
    for (double r : {0.5, 1.0, 10.0, 37.3, 250.0}) {
      const double k = 4 * pi * std::sin(r) / r;
      REQUIRE(std::abs(sphere_kernel(3, r) - k) <= 1e-10 * std::abs(k));
    }
  }
  SECTION("d = 5 closed form across the switch point") {
    // (2 pi)^{5/2} r^{-3/2} J_{3/2}(r) = 8 pi^2 (sin r - r cos r) / r^3
    for (double r = 0.05; r < 300.0; r *= 1.37) {
      const double k = 8 * pi * pi * (std::sin(r) - r * std::cos(r)) / std::pow(r, 3);
      const double scale = 8 * pi * pi / std::pow(std::max(r, 1.0), 2);
      REQUIRE(std::abs(sphere_kernel(5, r) - k) <= 1e-10 * scale);
    }
  }
  SECTION("d = 1 is 2 cos r") {
    for (double r : {0.3, 2.0, 50.0}) REQUIRE(std::abs(sphere_kernel(1, r) - 2 * std::cos(r)) <= 1e-12);
  }
  SECTION("value at the origin is the sphere area") {
    REQUIRE(sphere_kernel(5, 0.0) == Catch::Approx(8 * pi * pi / 3).epsilon(1e-15));
    for (int d = 2; d <= 7; ++d) REQUIRE(sphere_kernel(d, 0.0) == Catch::Approx(sphere_area(d)).epsilon(1e-14));
  }
  SECTION("even dimensions match the Bessel form on both sides of the switch") {
    for (int d : {2, 4, 6}) {
      const double rs = kernel_switch_point(d);
      for (double r : {rs + 0.1, rs + 3.3, 2 * rs + 1.0}) {
        const double ref = std::pow(2 * pi, 0.5 * d) * std::pow(r, 1 - 0.5 * d) * std::cyl_bessel_j(0.5 * d - 1, r);
        REQUIRE(std::abs(sphere_kernel(d, r) - ref) <= 1e-10 * std::pow(2 * pi, 0.5 * d) * std::pow(r, 0.5 - 0.5 * d));
      }
    }
  }
  SECTION("envelope decays like r^{-(d-1)/2}") {
    std::vector<double> r = logspace(10.0, 1000.0, 25), e;
    for (double x : r) e.push_back(std::abs(sphere_kernel_envelopes(5, x).first));
    REQUIRE(std::abs(fit_power_law(r, e).slope + 2.0) <= 0.05);
    const auto [k1, k2] = sphere_kernel_envelopes(5, 42.0);
    REQUIRE(std::abs(k2 - std::conj(k1)) == 0.0);
  }
}

TEST_CASE("radial_fourier", "[dispersion]") {
  GaussianRadial g{1.0, 1.0};
  auto f = [&](double r) { return g(r); };
  const double r_max = g.extent(1e-17);

  SECTION("Gaussian self-transform, d = 5") {
    std::vector<double> rho{0.0, 0.3, 1.0, 2.5, 4.0};
    auto fh = radial_fourier(f, 5, rho, r_max);
    for (std::size_t k = 0; k < rho.size(); ++k) {
      const double ref = std::pow(2 * pi, 2.5) * std::exp(-0.5 * rho[k] * rho[k]);
      REQUIRE(std::abs(fh[k] - ref) <= 1e-8 * ref);
    }
  }
  SECTION("round trip") {
    std::vector<double> rho;
    for (double x = 0.0; x <= 6.0; x += 0.5) rho.push_back(x);
    std::vector<double> r{0.0, 0.7, 1.5, 3.0};
    auto back = inverse_radial_fourier([&](double p) { return g.hat(p, 3); }, 3, r, g.hat_extent(1e-17));
    for (std::size_t k = 0; k < r.size(); ++k) REQUIRE(std::abs(back[k] - g(r[k])) <= 1e-8);
  }
  SECTION("zero frequency gives the total integral") {
    GaussianRadial h{0.7, 2.0};
    const double rho[1] = {0.0};
    const double total = h.amplitude * std::pow(2 * pi * h.sigma * h.sigma, 2.5);
    REQUIRE(std::abs(radial_fourier([&](double r) { return h(r); }, 5, rho, h.extent(1e-17))[0] - total) <=
            1e-10 * total);
  }
  SECTION("d = 1 reduces to the cosine transform") {
    auto p = [](double r) { return std::exp(-r) * (1 + r * r); };
    for (double rho : {0.0, 0.8, 3.1}) {
      const double ref = 2.0 * gauss_kronrod<double, 61>::integrate(
                                   [&](double r) { return p(r) * std::cos(r * rho); }, 0.0, 40.0, 20, 1e-15);
      const double rr[1] = {rho};
      REQUIRE(std::abs(radial_fourier(p, 1, rr, 40.0)[0] - ref) <= 1e-10 * std::abs(ref));
    }
  }
  SECTION("unresolved tail") {
    const double rho[1] = {1.0};
    REQUIRE_THROWS_AS(radial_fourier(f, 5, rho, 3.0), ResolutionError);
  }
}

TEST_CASE("free evolution", "[dispersion]") {
  GaussianRadial g{1.0, 1.0};

  SECTION("t = 0 recovers the profile") {
    REQUIRE(free_evolution_supnorm(g, 0.0, 5).sup == 1.0);
    for (double x : {0.0, 0.8, 2.0}) REQUIRE(std::abs(free_evolution(g, 0.0, 5, x) - g(x)) <= 1e-10);
  }
  SECTION("L2 norm is conserved") {
    // |S^2| int |u|^2 x^2 dx in d = 3. The symbol is conical at the origin, so
    // u has algebraic tails and the x range must reach far out.
    const double mass0 = std::pow(pi, 1.5);
    std::vector<double> br;
    for (double x = 0.0; x < 20.0; x += 0.25) br.push_back(x);
    for (double x = 20.0; x < 1000.0; x *= 1.15) br.push_back(x);
    br.push_back(1000.0);
    const auto rule = quad::composite(br, 16);
    for (double t : {0.5, 1.5}) {
      const double m = rule.integrate([&](double x) { return std::norm(free_evolution(g, t, 3, x)) * x * x; }) * 4 * pi;
      REQUIRE(std::abs(m - mass0) <= 1e-10 * mass0);
    }
  }
  SECTION("the maximum sits on a sampled radius") {
    auto s = free_evolution_supnorm(g, 5.0, 3);
    REQUIRE(s.sup >= std::abs(free_evolution(g, 5.0, 3, s.x_at)) * (1 - 1e-14));
    for (double x = 0.0; x < 60.0; x += 0.5) REQUIRE(std::abs(free_evolution(g, 5.0, 3, x)) <= s.sup * (1 + 1e-9));
  }
  SECTION("decay exponents steepen with dimension") {
    const auto times = logspace(10.0, 40.0, 4);
    double prev = 0.0;
    for (int d : {1, 3, 5}) {
      const double slope = dispersion_decay_fit(g, d, times).fit.slope;
      REQUIRE(slope < prev);
      prev = slope;
    }
  }
}
