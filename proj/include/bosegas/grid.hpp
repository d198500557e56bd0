#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <fftw3.h>

#include "bosegas/errors.hpp"
#include "bosegas/parallel.hpp"

namespace bosegas {

using cplx = std::complex<double>;

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : p(fftw_alloc_complex(n)) {
    if (!p) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(p); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  fftw_complex* p;
};

// Forward/backward plans for one shape; executed on fresh aligned buffers so
// concurrent transforms on the same grid are safe.
struct FftwPlans {
  FftwPlans(int d, int n) : size(1) {
    std::vector<int> dims(d, n);
    for (int i = 0; i < d; ++i) size *= n;
    FftwBuffer a(size), b(size);
    std::lock_guard lock(fftw_planner_mutex());
    fwd = fftw_plan_dft(d, dims.data(), a.p, b.p, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_dft(d, dims.data(), a.p, b.p, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!fwd || !bwd) throw ResolutionError("fft-plan", "FFTW could not create a plan");
  }
  ~FftwPlans() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
  FftwPlans(const FftwPlans&) = delete;
  FftwPlans& operator=(const FftwPlans&) = delete;

  void run(fftw_plan plan, std::span<const cplx> in, std::span<cplx> out) const {
    FftwBuffer a(size), b(size);
    std::copy(in.begin(), in.end(), reinterpret_cast<cplx*>(a.p));
    fftw_execute_dft(plan, a.p, b.p);
    std::copy_n(reinterpret_cast<const cplx*>(b.p), size, out.begin());
  }

  std::size_t size;
  fftw_plan fwd{};
  fftw_plan bwd{};
};

}  // namespace detail

/// Periodic tensor grid on [-L/2, L/2)^d and its frequency lattice 2 pi k / L.
/// Both physical samples and modes are stored in FFT order, so index 0 is the
/// origin (resp. xi = 0); axis index i maps to k = i for i <= n/2 and i - n
/// otherwise, and k = n/2 is the Nyquist row.
class SpectralGrid {
 public:
  SpectralGrid(int d, int n_per_dim, double L) : d_(d), n_(n_per_dim), L_(L) {
    if (d < 1) throw ConfigError("invalid-dimension", "d must be >= 1, got " + std::to_string(d));
    if (n_per_dim < 8 || (n_per_dim & (n_per_dim - 1)) != 0)
      throw ConfigError("non-power-of-two", "n_per_dim must be a power of two >= 8, got " + std::to_string(n_per_dim));
    if (!(L > 0.0) || !std::isfinite(L)) throw ConfigError("invalid-length", "box length must be positive");
    size_ = 1;
    for (int i = 0; i < d; ++i) size_ *= static_cast<std::size_t>(n_);
    xi_.assign(d, std::vector<double>(size_));
    k2_.resize(size_);
    nyquist_.resize(size_);
    mirror_.resize(size_);
    const double dk = 2.0 * std::numbers::pi / L_;
    std::vector<int> ax(d);
    for (std::size_t idx = 0; idx < size_; ++idx) {
      std::size_t rest = idx;
      for (int j = d - 1; j >= 0; --j) {
        ax[j] = static_cast<int>(rest % n_);
        rest /= n_;
      }
      double k2 = 0.0;
      bool nyq = false;
      std::size_t mir = 0;
      for (int j = 0; j < d; ++j) {
        const int k = ax[j] <= n_ / 2 ? ax[j] : ax[j] - n_;
        nyq = nyq || ax[j] == n_ / 2;
        xi_[j][idx] = dk * k;
        k2 += xi_[j][idx] * xi_[j][idx];
        mir = mir * n_ + static_cast<std::size_t>((n_ - ax[j]) % n_);
      }
      k2_[idx] = k2;
      nyquist_[idx] = nyq;
      mirror_[idx] = mir;
    }
    plans_ = std::make_shared<detail::FftwPlans>(d, n_);
  }

  int dim() const { return d_; }
  int n_per_dim() const { return n_; }
  double length() const { return L_; }
  std::size_t size() const { return size_; }
  double dx() const { return L_ / n_; }
  double dk() const { return 2.0 * std::numbers::pi / L_; }
  /// Volume of one cell, dx^d.
  double cell() const { return std::pow(dx(), d_); }
  double volume() const { return std::pow(L_, d_); }

  /// Component j of xi at every mode.
  std::span<const double> xi(int j) const { return xi_.at(j); }
  double xi(int j, std::size_t idx) const { return xi_[j][idx]; }
  double xi2(std::size_t idx) const { return k2_[idx]; }
  std::span<const double> xi2() const { return k2_; }
  bool nyquist(std::size_t idx) const { return nyquist_[idx] != 0; }
  /// Index of the mode -xi.
  std::size_t mirror(std::size_t idx) const { return mirror_[idx]; }

  /// Physical coordinate j of sample idx (same index layout as modes).
  double x(int j, std::size_t idx) const {
    std::size_t rest = idx;
    for (int a = d_ - 1; a > j; --a) rest /= n_;
    const int i = static_cast<int>(rest % n_);
    return (i < n_ / 2 ? i : i - n_) * dx();
  }

  /// Samples a function of the position vector.
  template <class F>
  std::vector<double> sample(F&& f) const {
    std::vector<double> out(size_);
    parallel_for(size_, [&](std::size_t idx) {
      std::vector<double> pos(d_);
      for (int j = 0; j < d_; ++j) pos[j] = x(j, idx);
      out[idx] = f(std::span<const double>(pos));
    });
    return out;
  }

  /// Discrete continuum transform: dx^d times the FFT (sign e^{-i x xi}).
  void forward(std::span<const cplx> phys, std::span<cplx> spec) const {
    check(phys.size(), spec.size());
    plans_->run(plans_->fwd, phys, spec);
    const double c = cell();
    for (auto& v : spec) v *= c;
  }

  /// Inverse of forward: (2 pi)^{-d} sum over the lattice, i.e. FFT^{-1} / dx^d.
  void inverse(std::span<const cplx> spec, std::span<cplx> phys) const {
    check(phys.size(), spec.size());
    plans_->run(plans_->bwd, spec, phys);
    const double c = 1.0 / volume();
    for (auto& v : phys) v *= c;
  }

  std::vector<cplx> forward(std::span<const double> phys) const {
    std::vector<cplx> in(phys.begin(), phys.end()), out(size_);
    forward(in, out);
    return out;
  }

  std::vector<cplx> forward(std::span<const cplx> phys) const {
    std::vector<cplx> out(size_);
    forward(phys, out);
    return out;
  }

  std::vector<cplx> inverse(std::span<const cplx> spec) const {
    std::vector<cplx> out(size_);
    inverse(spec, out);
    return out;
  }

  void zero_nyquist(std::span<cplx> spec) const {
    for (std::size_t i = 0; i < size_; ++i)
      if (nyquist_[i]) spec[i] = 0.0;
  }

  /// L^2 pairing Re <f, g> of two real fields given by their transforms.
  double dot(std::span<const cplx> f, std::span<const cplx> g) const {
    return parallel_sum<double>(size_, [&](std::size_t i) { return std::real(std::conj(f[i]) * g[i]); }) / volume();
  }

  double norm2(std::span<const cplx> f) const { return dot(f, f); }

  bool same_as(const SpectralGrid& o) const { return d_ == o.d_ && n_ == o.n_ && L_ == o.L_; }

 private:
  void check(std::size_t a, std::size_t b) const {
    if (a != size_ || b != size_) throw ConfigError("grid-mismatch", "array size does not match the grid");
  }

  int d_;
  int n_;
  double L_;
  std::size_t size_{};
  std::vector<std::vector<double>> xi_;
  std::vector<double> k2_;
  std::vector<unsigned char> nyquist_;
  std::vector<std::size_t> mirror_;
  std::shared_ptr<const detail::FftwPlans> plans_;
};

inline SpectralGrid make_grid(int d, int n_per_dim, double L) { return SpectralGrid(d, n_per_dim, L); }

}  // namespace bosegas
