#pragma once

#include <Eigen/Core>

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bdlle/errors.hpp"

namespace bdlle {

using Index = std::size_t;
/// Row-major so that each point is a contiguous row.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// n points in R^p stored as the rows of an n x p matrix.
class PointCloud {
 public:
  PointCloud() = default;

  explicit PointCloud(RowMatrix points) : points_(std::move(points)) {
    if (points_.rows() < 1) throw InvalidArgument("point cloud must contain at least one point");
    if (points_.cols() < 1) throw InvalidArgument("point cloud must have ambient dimension >= 1");
    if (!points_.allFinite()) throw InvalidArgument("point cloud contains non-finite coordinates");
  }

  Index size() const noexcept { return static_cast<Index>(points_.rows()); }
  Index dim() const noexcept { return static_cast<Index>(points_.cols()); }
  bool empty() const noexcept { return points_.rows() == 0; }

  auto point(Index i) const { return points_.row(static_cast<Eigen::Index>(i)); }
  const RowMatrix& points() const noexcept { return points_; }

  /// Rows [0, m) as a new cloud. The samplers draw i.i.d. points, so a prefix
  /// is itself a random subsample.
  PointCloud prefix(Index m) const {
    if (m < 1 || m > size()) throw InvalidArgument("prefix length out of range");
    return PointCloud(points_.topRows(static_cast<Eigen::Index>(m)));
  }

 private:
  RowMatrix points_;
};

/// Squared Euclidean distance, summed in coordinate order. Every neighbor
/// query in the library goes through this function so that indexed and
/// brute-force scans see bit-identical values.
template <class A, class B>
inline double squared_distance(const A& a, const B& b) {
  double s = 0.0;
  const Eigen::Index p = a.size();
  for (Eigen::Index j = 0; j < p; ++j) {
    const double t = a[j] - b[j];
    s += t * t;
  }
  return s;
}

namespace csv {

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_double(std::string_view field, std::size_t line) {
  field = trim(field);
  double v = 0.0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw InvalidArgument("csv line " + std::to_string(line) + ": cannot parse '" + std::string(field) + "'");
  }
  return v;
}

}  // namespace detail

/// Parses rows of comma-separated reals. Blank lines and lines starting with
/// '#' are skipped; a `# n=<n> p=<p>` header, when present, is checked.
inline RowMatrix read_matrix(std::istream& in) {
  std::vector<double> values;
  Index cols = 0;
  Index rows = 0;
  long declared_n = -1;
  long declared_p = -1;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto view = detail::trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      std::istringstream hs{std::string(view.substr(1))};
      std::string tok;
      while (hs >> tok) {
        if (tok.rfind("n=", 0) == 0) declared_n = std::stol(tok.substr(2));
        if (tok.rfind("p=", 0) == 0) declared_p = std::stol(tok.substr(2));
      }
      continue;
    }
    Index c = 0;
    std::size_t start = 0;
    while (true) {
      const auto comma = view.find(',', start);
      const auto field = view.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      values.push_back(detail::parse_double(field, line_no));
      ++c;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (rows == 0) cols = c;
    if (c != cols) {
      throw InvalidArgument("csv line " + std::to_string(line_no) + ": expected " + std::to_string(cols) +
                            " columns, found " + std::to_string(c));
    }
    ++rows;
  }
  if (declared_n >= 0 && static_cast<Index>(declared_n) != rows) throw InvalidArgument("csv header n does not match row count");
  if (declared_p >= 0 && rows > 0 && static_cast<Index>(declared_p) != cols) {
    throw InvalidArgument("csv header p does not match column count");
  }
  RowMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  std::copy(values.begin(), values.end(), m.data());
  return m;
}

inline void write_matrix(std::ostream& out, const RowMatrix& m, bool header = true) {
  if (header) out << "# n=" << m.rows() << " p=" << m.cols() << '\n';
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
}

inline PointCloud read_cloud(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  return PointCloud(read_matrix(in));
}

inline void write_cloud(const std::string& path, const PointCloud& cloud) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  write_matrix(out, cloud.points());
}

}  // namespace csv
}  // namespace bdlle
