#ifndef JPSN_IDENTIFICATION_HPP
#define JPSN_IDENTIFICATION_HPP

#include "jpsn/distributions.hpp"

namespace jpsn {

// The projection theta_i = angle(W_i) is scale-free, so each circular
// block's scale must be pinned to identify (mu, sigma). The constrained
// entry is the SECOND diagonal element of each 2x2 circular block; block i
// occupies rows {2i, 2i+1} (0-based), and this file is the only place that
// encodes that layout.

/// Per-circular-component scales c_i > 0, realized as the diagonal matrix
/// C = diag(c_1, c_1, ..., c_n, c_n, 1, ..., 1) of size 2n+q.
struct ScalingRecord {
  VectorXd c;  // length n

  void validate() const;
  VectorXd expand(int n, int q) const;  // the 2n+q diagonal of C
};

/// JPSN parameters on the identified scale: every circular block's second
/// diagonal variance equals 1. `scaling` records the C that produced them.
struct IdentifiedJpsnParams {
  int n = 0;
  int q = 0;
  VectorXd mu_tilde;
  MatrixXd sigma_tilde;
  VectorXd lambda;
  ScalingRecord scaling;

  int dim() const { return 2 * n + q; }
};

/// Map unidentified parameters to the identified scale:
/// c_i = 1 / sqrt(sigma_{w_i}[2,2]), output (C mu, C sigma C, lambda).
IdentifiedJpsnParams identify(const JpsnParams& params);

/// Inverse map for a given positive scaling; identify(unidentify(ip, s))
/// recovers ip for any positive s.
JpsnParams unidentify(const IdentifiedJpsnParams& ip,
                      const ScalingRecord& scaling);

/// Correlation matrix of (W, Y) on the identified scale; equals the
/// correlation matrix of (cos/sin of the angles, Y).
MatrixXd correlation_matrix(const IdentifiedJpsnParams& ip);

}  // namespace jpsn

#endif  // JPSN_IDENTIFICATION_HPP
