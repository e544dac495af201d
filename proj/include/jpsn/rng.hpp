#ifndef JPSN_RNG_HPP
#define JPSN_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "jpsn/special.hpp"

namespace jpsn {

/// Seeded random source with all variate generators implemented on top of
/// raw engine output, so that a seed pins the entire draw sequence.
/// One Rng per chain; never shared across threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  /// Uniform on (0, 1), never returning an endpoint.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    // Rejection to kill modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  double normal() {
    const double u = uniform();
    const double v = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(two_pi_ * v);
  }

  double exponential() { return -std::log(uniform()); }

  double cauchy() { return std::tan(std::numbers::pi * (uniform() - 0.5)); }

  /// Gamma(shape, 1) via Marsaglia-Tsang; shape == 0 returns exactly 0.
  double gamma(double shape) {
    if (shape < 0.0) throw std::invalid_argument("gamma: negative shape");
    if (shape == 0.0) return 0.0;
    if (shape < 1.0) {
      const double g = gamma(shape + 1.0);
      return g * std::pow(uniform(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double gamma(double shape, double scale) { return gamma(shape) * scale; }

  double chi_squared(double dof) { return 2.0 * gamma(0.5 * dof); }

  double beta(double a, double b) {
    const double x = gamma(a);
    const double y = gamma(b);
    if (x + y == 0.0) return a / (a + b);  // both shapes underflowed
    return x / (x + y);
  }

  /// Dirichlet draw; zero concentrations yield exact zeros. If every
  /// component underflows, falls back to the normalized concentrations.
  std::vector<double> dirichlet(const std::vector<double>& conc) {
    std::vector<double> w(conc.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < conc.size(); ++i) {
      w[i] = gamma(conc[i]);
      sum += w[i];
    }
    if (sum <= 0.0) {
      double csum = 0.0;
      for (double c : conc) csum += c;
      if (csum <= 0.0)
        throw std::invalid_argument("dirichlet: all concentrations zero");
      for (std::size_t i = 0; i < conc.size(); ++i) w[i] = conc[i] / csum;
      return w;
    }
    for (double& x : w) x /= sum;
    return w;
  }

  int bernoulli(double p) { return uniform() < p ? 1 : 0; }

  int binomial(int n, double p) {
    int s = 0;
    for (int i = 0; i < n; ++i) s += bernoulli(p);
    return s;
  }

  /// Index draw from unnormalized nonnegative weights.
  int categorical(const std::vector<double>& w) {
    double total = 0.0;
    for (double x : w) total += x;
    double u = uniform() * total;
    for (std::size_t i = 0; i < w.size(); ++i) {
      u -= w[i];
      if (u <= 0.0) return static_cast<int>(i);
    }
    return static_cast<int>(w.size()) - 1;
  }

  double weibull(double shape, double rate) {
    return std::pow(exponential(), 1.0 / shape) / rate;
  }

  /// von Mises on [0, 2*pi) via the Best-Fisher wrapped-Cauchy envelope.
  double von_mises(double location, double concentration) {
    if (concentration < 1e-8) return uniform(0.0, two_pi_);
    const double tau = 1.0 + std::sqrt(1.0 + 4.0 * concentration * concentration);
    const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * concentration);
    const double r = (1.0 + rho * rho) / (2.0 * rho);
    for (;;) {
      const double z = std::cos(std::numbers::pi * uniform());
      const double f = (1.0 + r * z) / (r + z);
      const double c = concentration * (r - f);
      const double u2 = uniform();
      if (c * (2.0 - c) - u2 > 0.0 || std::log(c / u2) + 1.0 - c >= 0.0) {
        const double sign = uniform() < 0.5 ? -1.0 : 1.0;
        double theta = location + sign * std::acos(f);
        theta = std::fmod(theta, two_pi_);
        return theta < 0.0 ? theta + two_pi_ : theta;
      }
    }
  }

  /// Wrapped Cauchy on [0, 2*pi); rho_wc in [0, 1) is the mean resultant
  /// length.
  double wrapped_cauchy(double location, double rho_wc) {
    if (rho_wc <= 0.0) return uniform(0.0, two_pi_);
    const double scale = -std::log(rho_wc);
    double theta = std::fmod(location + scale * cauchy(), two_pi_);
    return theta < 0.0 ? theta + two_pi_ : theta;
  }

  /// N(mean, sd^2) truncated to [lower, inf).
  double truncated_normal_lower(double mean, double sd, double lower) {
    const double a = (lower - mean) / sd;
    if (a < 5.0) {
      // Inverse-CDF on the upper tail, well conditioned for moderate a.
      const double tail = norm_cdf(-a);
      const double u = uniform();
      return mean - sd * norm_quantile(std::max(u * tail, 1e-310));
    }
    // Robert's translated-exponential rejection for the deep tail.
    const double alpha = 0.5 * (a + std::sqrt(a * a + 4.0));
    for (;;) {
      const double x = a + exponential() / alpha;
      const double diff = x - alpha;
      if (std::log(uniform()) <= -0.5 * diff * diff) return mean + sd * x;
    }
  }

 private:
  static constexpr double two_pi_ = 2.0 * std::numbers::pi;
  std::mt19937_64 engine_;
};

/// Derive a per-chain seed from a master seed (splitmix64 step).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace jpsn

#endif  // JPSN_RNG_HPP
