#pragma once

// Trigonometric interpolation of a closed curve sampled at uniformly spaced
// parameter values s_j = j/N, treated as a complex function z(s) on [0, 1).

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace csf::detail {

class PeriodicInterpolant {
 public:
  using cdouble = std::complex<double>;

  explicit PeriodicInterpolant(const std::vector<cdouble>& samples) : n_(static_cast<int>(samples.size())) {
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<cdouble> roots(n_);
    for (int m = 0; m < n_; ++m) roots[m] = std::polar(1.0, -two_pi * m / n_);
    even_ = n_ % 2 == 0;
    kmax_ = even_ ? n_ / 2 - 1 : (n_ - 1) / 2;
    coef_.assign(2 * kmax_ + 1, cdouble(0.0));
    for (int k = -kmax_; k <= kmax_; ++k) {
      cdouble acc = 0.0;
      const int kk = ((k % n_) + n_) % n_;
      for (int j = 0; j < n_; ++j) acc += samples[j] * roots[(static_cast<long>(kk) * j) % n_];
      coef_[k + kmax_] = acc / static_cast<double>(n_);
    }
    if (even_) {
      cdouble acc = 0.0;
      for (int j = 0; j < n_; ++j) acc += (j % 2 == 0 ? 1.0 : -1.0) * samples[j];
      nyquist_ = acc / static_cast<double>(n_);
    }
  }

  int size() const { return n_; }

  /// Derivative of order 0, 1 or 2 with respect to s.
  cdouble eval(double s, int order = 0) const {
    const double two_pi = 2.0 * std::numbers::pi;
    const cdouble base = std::polar(1.0, two_pi * s);
    const cdouble base_inv = std::conj(base);
    cdouble sum = coef_[kmax_] * (order == 0 ? 1.0 : 0.0);
    cdouble up = 1.0, down = 1.0;
    for (int k = 1; k <= kmax_; ++k) {
      up *= base;
      down *= base_inv;
      const cdouble ik(0.0, two_pi * k);
      cdouble fp = 1.0, fm = 1.0;
      for (int o = 0; o < order; ++o) {
        fp *= ik;
        fm *= -ik;
      }
      sum += fp * coef_[kmax_ + k] * up + fm * coef_[kmax_ - k] * down;
    }
    if (even_) {
      const double w = std::numbers::pi * n_;
      double f;
      switch (order) {
        case 0: f = std::cos(w * s); break;
        case 1: f = -w * std::sin(w * s); break;
        default: f = -w * w * std::cos(w * s); break;
      }
      sum += nyquist_ * f;
    }
    return sum;
  }

  std::vector<cdouble> sample(int m, double phase = 0.0) const {
    std::vector<cdouble> out(m);
    for (int j = 0; j < m; ++j) out[j] = eval((j + phase) / m);
    return out;
  }

 private:
  int n_;
  int kmax_ = 0;
  bool even_ = false;
  std::vector<cdouble> coef_;
  cdouble nyquist_ = 0.0;
};

}  // namespace csf::detail
