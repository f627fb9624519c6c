#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "carnot/group.hpp"

namespace carnot {

namespace detail {

inline void check_times(const std::vector<double>& times) {
  require(!times.empty(), "path: empty time grid");
  require(times.front() == 0.0, "path: time grid must start at 0");
  for (std::size_t i = 1; i < times.size(); ++i)
    require(times[i] > times[i - 1], "path: time grid must be strictly increasing");
}

/// Index of the last grid time <= t (clamped into the grid).
inline std::size_t locate(const std::vector<double>& times, double t) {
  if (t <= times.front()) return 0;
  if (t >= times.back()) return times.size() - 1;
  auto it = std::upper_bound(times.begin(), times.end(), t);
  return static_cast<std::size_t>(it - times.begin()) - 1;
}

inline constexpr double kTimeTol = 1e-12;

/// Sorted union of two grids, merging times closer than kTimeTol.
inline std::vector<double> merge_grids(const std::vector<double>& a,
                                       const std::vector<double>& b) {
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    double t;
    if (j >= b.size() || (i < a.size() && a[i] <= b[j]))
      t = a[i++];
    else
      t = b[j++];
    if (out.empty() || t - out.back() > kTimeTol) out.push_back(t);
  }
  return out;
}

}  // namespace detail

/// Piecewise-linear path in R^d on a strictly increasing time grid starting
/// at 0.  Evaluation beyond the final time returns the final value.
class LinearPath {
 public:
  LinearPath(std::vector<double> times, std::vector<Eigen::VectorXd> values)
      : times_(std::move(times)), values_(std::move(values)) {
    detail::check_times(times_);
    require(times_.size() == values_.size(), "LinearPath: times/values size mismatch");
    for (const auto& v : values_)
      require_dims(v.size() == values_.front().size(), "LinearPath: inconsistent value dims");
  }

  static LinearPath constant(const Eigen::VectorXd& v, double T) {
    return LinearPath({0.0, T}, {v, v});
  }

  static LinearPath zero(int d, double T) {
    return constant(Eigen::VectorXd::Zero(d), T);
  }

  int dim() const { return static_cast<int>(values_.front().size()); }
  double duration() const { return times_.back(); }
  std::size_t size() const { return times_.size(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<Eigen::VectorXd>& values() const { return values_; }
  const Eigen::VectorXd& value(std::size_t i) const { return values_[i]; }

  Eigen::VectorXd at(double t) const {
    if (t <= 0.0) return values_.front();
    if (t >= times_.back()) return values_.back();
    const std::size_t i = detail::locate(times_, t);
    if (times_[i] == t) return values_[i];
    const double w = (t - times_[i]) / (times_[i + 1] - times_[i]);
    return values_[i] * (1.0 - w) + values_[i + 1] * w;
  }

  /// Pointwise negation (the reverse translator -h).
  LinearPath negated() const {
    std::vector<Eigen::VectorXd> vals;
    vals.reserve(values_.size());
    for (const auto& v : values_) vals.push_back(-v);
    return LinearPath(times_, std::move(vals));
  }

  /// Same path resampled on a superset grid.
  LinearPath resampled(const std::vector<double>& grid) const {
    std::vector<Eigen::VectorXd> vals;
    vals.reserve(grid.size());
    for (double t : grid) vals.push_back(at(t));
    return LinearPath(grid, std::move(vals));
  }

 private:
  std::vector<double> times_;
  std::vector<Eigen::VectorXd> values_;
};

/// Group-valued path on a time grid.  Increments between grid points are
/// interpreted as single geodesic exp segments.
class GroupPath {
 public:
  GroupPath(std::vector<double> times, std::vector<GroupElement> values)
      : times_(std::move(times)), values_(std::move(values)) {
    detail::check_times(times_);
    require(times_.size() == values_.size(), "GroupPath: times/values size mismatch");
    for (const auto& g : values_)
      require_dims(g.dim() == values_.front().dim() && g.depth() == values_.front().depth(),
                   "GroupPath: inconsistent element shapes");
  }

  static GroupPath constant(const GroupElement& g, double T) {
    return GroupPath({0.0, T}, {g, g});
  }

  int dim() const { return values_.front().dim(); }
  int depth() const { return values_.front().depth(); }
  double duration() const { return times_.back(); }
  std::size_t size() const { return times_.size(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<GroupElement>& values() const { return values_; }
  const GroupElement& value(std::size_t i) const { return values_[i]; }

  /// Increment value(i)^-1 * value(j).
  GroupElement increment(std::size_t i, std::size_t j) const {
    return group_inverse(values_[i]) * values_[j];
  }

  /// Geodesic evaluation between grid points: x_i * exp(theta * log increment).
  GroupElement at(double t) const {
    if (t <= 0.0) return values_.front();
    if (t >= times_.back()) return values_.back();
    const std::size_t i = detail::locate(times_, t);
    if (std::abs(times_[i] - t) <= detail::kTimeTol) return values_[i];
    const double theta = (t - times_[i]) / (times_[i + 1] - times_[i]);
    TensorSeries l = log_series(increment(i, i + 1).series());
    l *= theta;
    return values_[i] * GroupElement(exp_series(l));
  }

  GroupPath resampled(const std::vector<double>& grid) const {
    std::vector<GroupElement> vals;
    vals.reserve(grid.size());
    for (double t : grid) vals.push_back(at(t));
    return GroupPath(grid, std::move(vals));
  }

  /// Inverses of all values; increments of pairs then cost two products each.
  std::vector<GroupElement> value_inverses() const {
    std::vector<GroupElement> inv;
    inv.reserve(values_.size());
    for (const auto& g : values_) inv.push_back(group_inverse(g));
    return inv;
  }

 private:
  std::vector<double> times_;
  std::vector<GroupElement> values_;
};

/// Level-N signature lift of a piecewise-linear path: the value at t_k is the
/// ordered product of segment exponentials, starting from the identity.
inline GroupPath signature_lift(const LinearPath& h, int N) {
  const int d = h.dim();
  std::vector<GroupElement> vals;
  vals.reserve(h.size());
  GroupElement cur = GroupElement::identity(d, N);
  vals.push_back(cur);
  for (std::size_t i = 1; i < h.size(); ++i) {
    Eigen::VectorXd dv = h.value(i) - h.value(i - 1);
    std::vector<double> inc(dv.data(), dv.data() + dv.size());
    cur *= exp_level1(inc, N);
    vals.push_back(cur);
  }
  return GroupPath(h.times(), std::move(vals));
}

// ---------------------------------------------------------------------------
// CSV format for linear paths: header "t,v1,...,vd", one row per grid time.

inline void write_linear_path_csv(const LinearPath& path, std::ostream& os) {
  os << "t";
  for (int j = 1; j <= path.dim(); ++j) os << ",v" << j;
  os << "\n";
  char buf[64];
  for (std::size_t i = 0; i < path.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", path.times()[i]);
    os << buf;
    for (int j = 0; j < path.dim(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", path.value(i)[j]);
      os << "," << buf;
    }
    os << "\n";
  }
}

inline LinearPath read_linear_path_csv(std::istream& is) {
  std::string line;
  require(static_cast<bool>(std::getline(is, line)), "path csv: missing header");
  std::vector<double> times;
  std::vector<Eigen::VectorXd> values;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> nums;
    while (std::getline(ss, cell, ',')) {
      try {
        nums.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::invalid_argument("path csv: row " + std::to_string(row) +
                                    ": cannot parse '" + cell + "'");
      }
    }
    require(nums.size() >= 2, "path csv: row " + std::to_string(row) + ": too few columns");
    if (!times.empty()) {
      require_dims(nums.size() - 1 == static_cast<std::size_t>(values.front().size()),
                   "path csv: row " + std::to_string(row) + ": inconsistent column count");
      if (nums[0] <= times.back())
        throw std::invalid_argument("path csv: row " + std::to_string(row) +
                                    ": time column not strictly increasing (" +
                                    std::to_string(nums[0]) + " after " +
                                    std::to_string(times.back()) + ")");
    }
    times.push_back(nums[0]);
    Eigen::VectorXd v(nums.size() - 1);
    for (std::size_t j = 1; j < nums.size(); ++j) v[static_cast<Eigen::Index>(j - 1)] = nums[j];
    values.push_back(std::move(v));
  }
  require(!times.empty(), "path csv: no data rows");
  return LinearPath(std::move(times), std::move(values));
}

inline LinearPath read_linear_path_csv_file(const std::string& filename) {
  std::ifstream f(filename);
  require(f.good(), "path csv: cannot open " + filename);
  return read_linear_path_csv(f);
}

}  // namespace carnot
