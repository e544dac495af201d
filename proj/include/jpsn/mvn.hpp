#ifndef JPSN_MVN_HPP
#define JPSN_MVN_HPP

#include <Eigen/Dense>
#include <vector>

#include "jpsn/rng.hpp"

namespace jpsn {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Cholesky factor of a covariance matrix; throws if not positive definite.
Eigen::LLT<MatrixXd> cholesky_pd(const MatrixXd& cov, const char* what);

VectorXd mvn_sample(const VectorXd& mean, const MatrixXd& cov, Rng& rng);

/// Draw using a precomputed Cholesky factor of the covariance.
VectorXd mvn_sample_chol(const VectorXd& mean, const Eigen::LLT<MatrixXd>& llt,
                         Rng& rng);

double mvn_logpdf(const VectorXd& x, const VectorXd& mean, const MatrixXd& cov);

double mvn_logpdf_chol(const VectorXd& x, const VectorXd& mean,
                       const Eigen::LLT<MatrixXd>& llt);

/// Mean and covariance of x[target] | x[given] = value under N(mean, cov).
struct GaussianConditional {
  VectorXd mean;
  MatrixXd cov;
};

GaussianConditional condition_mvn(const VectorXd& mean, const MatrixXd& cov,
                                  const std::vector<int>& target,
                                  const std::vector<int>& given,
                                  const VectorXd& given_value);

}  // namespace jpsn

#endif  // JPSN_MVN_HPP
