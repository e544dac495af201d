#include "jpsn/series.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "jpsn/angle.hpp"

namespace jpsn {

namespace {
constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::string::size_type start = 0;
  for (;;) {
    auto pos = line.find('\t', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_cell(const std::string& cell, const std::string& path, int row) {
  std::size_t used = 0;
  double v;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(path + ": row " + std::to_string(row) +
                                ": cannot parse value '" + cell + "'");
  }
  if (used != cell.size())
    throw std::invalid_argument(path + ": row " + std::to_string(row) +
                                ": trailing characters in '" + cell + "'");
  return v;
}
}  // namespace

CircLinSeries CircLinSeries::empty(int T, int n, int q) {
  CircLinSeries s;
  s.theta = Eigen::MatrixXd::Constant(T, n, nan_v);
  s.y = Eigen::MatrixXd::Constant(T, q, nan_v);
  s.theta_missing.setConstant(T, n, true);
  s.y_missing.setConstant(T, q, true);
  return s;
}

void CircLinSeries::validate() const {
  if (T() < 2) throw std::invalid_argument("CircLinSeries: need at least 2 time points");
  if (n() + q() == 0) throw std::invalid_argument("CircLinSeries: no variables");
  if (theta_missing.rows() != T() || theta_missing.cols() != n() ||
      y_missing.rows() != T() || y_missing.cols() != q())
    throw std::invalid_argument("CircLinSeries: mask shape mismatch");
  for (int t = 0; t < T(); ++t) {
    for (int i = 0; i < n(); ++i)
      if (!theta_missing(t, i) &&
          !(theta(t, i) >= 0.0 && theta(t, i) < two_pi))
        throw std::invalid_argument("CircLinSeries: unwrapped angle");
    for (int j = 0; j < q(); ++j)
      if (!y_missing(t, j) && !std::isfinite(y(t, j)))
        throw std::invalid_argument("CircLinSeries: non-finite linear value");
  }
}

int CircLinSeries::missing_count() const {
  return static_cast<int>(theta_missing.count() + y_missing.count());
}

CircLinSeries read_dataset(const std::string& path, bool degrees) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open dataset: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_tabs(line);
  int n = 0, q = 0;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string expect_theta = "theta_" + std::to_string(i + 1);
    const std::string expect_y = "y_" + std::to_string(i - n + 1);
    if (static_cast<int>(i) < static_cast<int>(header.size()) &&
        header[i] == expect_theta && q == 0) {
      ++n;
    } else if (header[i] == expect_y) {
      ++q;
    } else {
      throw std::invalid_argument(path + ": unexpected column '" + header[i] +
                                  "' (want theta_1..theta_n then y_1..y_q)");
    }
  }
  std::vector<std::vector<std::string>> rows;
  int row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_tabs(line);
    if (cells.size() != header.size())
      throw std::invalid_argument(path + ": row " + std::to_string(row_no) +
                                  ": expected " + std::to_string(header.size()) +
                                  " columns, got " + std::to_string(cells.size()));
    rows.push_back(std::move(cells));
  }
  const int T = static_cast<int>(rows.size());
  if (T < 2) throw std::invalid_argument(path + ": need at least 2 data rows");
  CircLinSeries s = CircLinSeries::empty(T, n, q);
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < n; ++i) {
      const std::string& cell = rows[t][i];
      if (cell.empty()) continue;
      double v = parse_cell(cell, path, t + 2);
      if (degrees) v *= two_pi / 360.0;
      s.theta(t, i) = wrap_angle(v);
      s.theta_missing(t, i) = false;
    }
    for (int j = 0; j < q; ++j) {
      const std::string& cell = rows[t][n + j];
      if (cell.empty()) continue;
      s.y(t, j) = parse_cell(cell, path, t + 2);
      s.y_missing(t, j) = false;
    }
  }
  s.validate();
  return s;
}

void write_dataset(const CircLinSeries& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write dataset: " + path);
  out.precision(17);
  for (int i = 0; i < s.n(); ++i) out << (i ? "\t" : "") << "theta_" << i + 1;
  for (int j = 0; j < s.q(); ++j)
    out << (s.n() + j ? "\t" : "") << "y_" << j + 1;
  out << "\n";
  for (int t = 0; t < s.T(); ++t) {
    for (int i = 0; i < s.n(); ++i) {
      if (i) out << "\t";
      if (!s.theta_missing(t, i)) out << s.theta(t, i);
    }
    for (int j = 0; j < s.q(); ++j) {
      if (s.n() + j) out << "\t";
      if (!s.y_missing(t, j)) out << s.y(t, j);
    }
    out << "\n";
  }
}

}  // namespace jpsn
