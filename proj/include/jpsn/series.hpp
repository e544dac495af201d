#ifndef JPSN_SERIES_HPP
#define JPSN_SERIES_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace jpsn {

/// T time points of n angles in [0, 2 pi) and q reals, with per-cell
/// missingness. Missing cells hold NaN in theta/y and true in the masks.
struct CircLinSeries {
  Eigen::MatrixXd theta;  // T x n, wrapped
  Eigen::MatrixXd y;      // T x q
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> theta_missing;  // T x n
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> y_missing;      // T x q

  int T() const { return static_cast<int>(theta.rows()); }
  int n() const { return static_cast<int>(theta.cols()); }
  int q() const { return static_cast<int>(y.cols()); }

  static CircLinSeries empty(int T, int n, int q);
  void validate() const;
  int missing_count() const;
};

/// Read a tab-delimited dataset with header theta_1..theta_n y_1..y_q.
/// Empty cells are missing; angles are wrapped into [0, 2 pi) (from degrees
/// first when `degrees` is set).
CircLinSeries read_dataset(const std::string& path, bool degrees = false);

void write_dataset(const CircLinSeries& s, const std::string& path);

}  // namespace jpsn

#endif  // JPSN_SERIES_HPP
