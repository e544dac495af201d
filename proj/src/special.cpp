#include "jpsn/special.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace jpsn {

namespace {
constexpr double sqrt2 = std::numbers::sqrt2;
constexpr double log_2pi = 1.8378770664093454836;
}  // namespace

double norm_pdf(double x) { return std::exp(-0.5 * (x * x + log_2pi)); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / sqrt2); }

double log_norm_cdf(double x) {
  // erfc stays in range down to about -37; beyond that use the Mills-ratio
  // expansion, which is at machine precision once |x| > 34.
  if (x > -34.0) return std::log(norm_cdf(x));
  double x2 = x * x;
  double series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2) +
                  105.0 / (x2 * x2 * x2 * x2);
  return -0.5 * (x2 + log_2pi) - std::log(-x) + std::log(series);
}

// AS 241 algorithm PPND16 (Wichura 1988).
double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("norm_quantile: p must lie in (0,1)");
  const double q = p - 0.5;
  double r;
  if (std::fabs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
              4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
              2.05319162663775882187e+0) * r + 1.0);
  } else {
    r -= 5.0;
    value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
              5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -value : value;
}

double log_bessel_i0(double x) {
  x = std::fabs(x);
  if (x < 700.0) return std::log(std::cyl_bessel_i(0.0, x));
  // e^x / sqrt(2 pi x) * (1 + 1/(8x) + 9/(128 x^2) + ...), overflow-safe.
  double ix = 1.0 / x;
  double series = 1.0 + ix * (0.125 + ix * (0.0703125 + ix * 0.0732421875));
  return x - 0.5 * std::log(2.0 * std::numbers::pi * x) + std::log(series);
}

namespace {
// 20-point Gauss-Legendre nodes/weights on [-1, 1] (positive half; the rule
// is symmetric).
constexpr int gl_half = 10;
constexpr double gl_x[gl_half] = {
    0.0765265211334973, 0.2277858511416451, 0.3737060887154195,
    0.5108670019508271, 0.6360536807265150, 0.7463319064601508,
    0.8391169718222188, 0.9122344282513259, 0.9639719272779138,
    0.9931285991850949};
constexpr double gl_w[gl_half] = {
    0.1527533871307258, 0.1491729864726037, 0.1420961093183820,
    0.1316886384491766, 0.1181945319615184, 0.1019301198172404,
    0.0832767415767048, 0.0626720483341091, 0.0406014298003869,
    0.0176140071391521};
}  // namespace

double gauss_legendre(const std::function<double(double)>& f, double a,
                      double b, int panels) {
  if (!(b > a)) return 0.0;
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    const double half = 0.5 * h;
    double acc = 0.0;
    for (int i = 0; i < gl_half; ++i) {
      acc += gl_w[i] * (f(mid + half * gl_x[i]) + f(mid - half * gl_x[i]));
    }
    total += acc * half;
  }
  return total;
}

}  // namespace jpsn
