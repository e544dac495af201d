#include "jpsn/identification.hpp"

#include <cmath>
#include <stdexcept>

namespace jpsn {

void ScalingRecord::validate() const {
  for (Eigen::Index i = 0; i < c.size(); ++i)
    if (!(c[i] > 0.0))
      throw std::invalid_argument("ScalingRecord: scales must be positive");
}

VectorXd ScalingRecord::expand(int n, int q) const {
  if (c.size() != n) throw std::invalid_argument("ScalingRecord: wrong length");
  VectorXd d = VectorXd::Ones(2 * n + q);
  for (int i = 0; i < n; ++i) {
    d[2 * i] = c[i];
    d[2 * i + 1] = c[i];
  }
  return d;
}

IdentifiedJpsnParams identify(const JpsnParams& params) {
  params.validate();
  IdentifiedJpsnParams out;
  out.n = params.n;
  out.q = params.q;
  out.lambda = params.lambda;
  out.scaling.c.resize(params.n);
  for (int i = 0; i < params.n; ++i)
    out.scaling.c[i] = 1.0 / std::sqrt(params.sigma(2 * i + 1, 2 * i + 1));
  VectorXd d = out.scaling.expand(params.n, params.q);
  out.mu_tilde = d.cwiseProduct(params.mu);
  out.sigma_tilde = d.asDiagonal() * params.sigma * d.asDiagonal();
  return out;
}

JpsnParams unidentify(const IdentifiedJpsnParams& ip,
                      const ScalingRecord& scaling) {
  scaling.validate();
  // The record holds the multipliers identify applied, so undoing it means
  // dividing by them.
  VectorXd d = scaling.expand(ip.n, ip.q).cwiseInverse();
  JpsnParams out;
  out.n = ip.n;
  out.q = ip.q;
  out.lambda = ip.lambda;
  out.mu = d.cwiseProduct(ip.mu_tilde);
  out.sigma = d.asDiagonal() * ip.sigma_tilde * d.asDiagonal();
  return out;
}

MatrixXd correlation_matrix(const IdentifiedJpsnParams& ip) {
  const VectorXd sd = ip.sigma_tilde.diagonal().cwiseSqrt();
  MatrixXd omega = ip.sigma_tilde;
  for (Eigen::Index i = 0; i < omega.rows(); ++i)
    for (Eigen::Index j = 0; j < omega.cols(); ++j)
      omega(i, j) /= sd[i] * sd[j];
  return omega;
}

}  // namespace jpsn
