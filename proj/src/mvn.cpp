#include "jpsn/mvn.hpp"

#include <cmath>
#include <stdexcept>

namespace jpsn {

namespace {
constexpr double log_2pi = 1.8378770664093454836;
}

Eigen::LLT<MatrixXd> cholesky_pd(const MatrixXd& cov, const char* what) {
  Eigen::LLT<MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error(std::string(what) +
                             ": covariance is not positive definite");
  return llt;
}

VectorXd mvn_sample(const VectorXd& mean, const MatrixXd& cov, Rng& rng) {
  return mvn_sample_chol(mean, cholesky_pd(cov, "mvn_sample"), rng);
}

VectorXd mvn_sample_chol(const VectorXd& mean, const Eigen::LLT<MatrixXd>& llt,
                         Rng& rng) {
  VectorXd z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  return mean + llt.matrixL() * z;
}

double mvn_logpdf(const VectorXd& x, const VectorXd& mean, const MatrixXd& cov) {
  return mvn_logpdf_chol(x, mean, cholesky_pd(cov, "mvn_logpdf"));
}

double mvn_logpdf_chol(const VectorXd& x, const VectorXd& mean,
                       const Eigen::LLT<MatrixXd>& llt) {
  const Eigen::Index p = x.size();
  VectorXd r = llt.matrixL().solve(x - mean);
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < p; ++i)
    log_det += std::log(llt.matrixL()(i, i));
  return -0.5 * (p * log_2pi + r.squaredNorm()) - log_det;
}

GaussianConditional condition_mvn(const VectorXd& mean, const MatrixXd& cov,
                                  const std::vector<int>& target,
                                  const std::vector<int>& given,
                                  const VectorXd& given_value) {
  const int nt = static_cast<int>(target.size());
  const int ng = static_cast<int>(given.size());
  GaussianConditional out;
  if (nt == 0) return out;
  if (ng == 0) {
    out.mean.resize(nt);
    out.cov.resize(nt, nt);
    for (int i = 0; i < nt; ++i) {
      out.mean[i] = mean[target[i]];
      for (int j = 0; j < nt; ++j) out.cov(i, j) = cov(target[i], target[j]);
    }
    return out;
  }
  MatrixXd s_tt(nt, nt), s_tg(nt, ng), s_gg(ng, ng);
  VectorXd m_t(nt), m_g(ng);
  for (int i = 0; i < nt; ++i) {
    m_t[i] = mean[target[i]];
    for (int j = 0; j < nt; ++j) s_tt(i, j) = cov(target[i], target[j]);
    for (int j = 0; j < ng; ++j) s_tg(i, j) = cov(target[i], given[j]);
  }
  for (int i = 0; i < ng; ++i) {
    m_g[i] = mean[given[i]];
    for (int j = 0; j < ng; ++j) s_gg(i, j) = cov(given[i], given[j]);
  }
  auto llt = cholesky_pd(s_gg, "condition_mvn");
  MatrixXd gain = llt.solve(s_tg.transpose()).transpose();  // S_tg S_gg^-1
  out.mean = m_t + gain * (given_value - m_g);
  out.cov = s_tt - gain * s_tg.transpose();
  // Symmetrize away round-off so downstream Cholesky stays happy.
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  return out;
}

}  // namespace jpsn
