#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace rsqmc {

/// [b^j l, b^j (l+1)).
struct BadicCell {
  int j = 0;
  std::int64_t l = 0;

  bool operator==(const BadicCell&) const = default;
};

/// One interval J_d of a 1-D partition with b^{points_exponent} points.
/// `cell` is set when the interval is b-adic.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  int points_exponent = 0;
  std::optional<BadicCell> cell;

  double length() const { return hi - lo; }
};

Interval badic_interval(unsigned b, BadicCell cell, int points_exponent);

/// Ordered intervals of a coordinate (scheme order d = 0, 1, ...) with the
/// labeled points z_0 .. z_{b^m - 1}. Labels are handed out in blocks,
/// largest point count first, equal counts in scheme order; within a block
/// the points are equally spaced from the left endpoint.
class Partition1D {
 public:
  /// Validates disjointness, 0 <= m_d <= m and sum b^{m_d} = b^m.
  Partition1D(unsigned b, int m, std::vector<Interval> intervals);

  unsigned base() const { return base_; }
  int m() const { return m_; }
  std::size_t size() const { return intervals_.size(); }
  const Interval& interval(std::size_t d) const { return intervals_.at(d); }
  const std::vector<Interval>& intervals() const { return intervals_; }

  /// First label of interval d.
  std::uint64_t block_start(std::size_t d) const { return block_start_.at(d); }
  /// Interval indices in label order.
  const std::vector<std::size_t>& label_order() const { return order_; }

  /// Distance between neighbouring points of interval d.
  double spacing(std::size_t d) const { return step_.at(d); }

  /// Interval holding label eta.
  std::size_t interval_of_label(std::uint64_t eta) const;

  /// z_eta.
  double point(std::uint64_t eta) const;

  /// The full label list z_0 .. z_{b^m-1}.
  Eigen::VectorXd labels() const;

  bool all_badic() const;

 private:
  unsigned base_;
  int m_;
  std::vector<Interval> intervals_;
  std::vector<std::size_t> order_;
  std::vector<std::uint64_t> block_start_;
  std::vector<std::uint64_t> sorted_starts_;  // block starts in label order
  std::vector<double> step_;                  // spacing per interval
};

/// Free-function spelling of Partition1D::labels().
Eigen::VectorXd label_points(const Partition1D& p);

/// m_l = m-1-ceil(l/2) for l <= 2(m-2), then two 1s. Requires m >= 3.
std::vector<int> geometric_schedule(int m);

/// Inverse of erf on (-1,1), absolute accuracy about 1e-12.
double erfinv(double y);

/// Breakpoints a_l = erfinv(1 - 2^{-l}) X, intervals [a_{l-1}, a_l) and
/// [-a_l, -a_{l-1}) for l = 1..m-1, base 2, geometric counts.
Partition1D erfinv_partition(int m, double X);

/// Cells of the ambient dyadic partition of R, d = 1, 2, 3, ...:
/// [0,1), [-1,0), [1,2), [-2,-1), [2,4), [-4,-2), ...
BadicCell dyadic_cell(int d);
/// Unit cells of R, d = 1, 2, 3, ...: [0,1), [-1,0), [1,2), [-2,-1), ...
BadicCell unit_cell(int d);

/// First 2m-2 dyadic cells with geometric counts, base 2.
Partition1D dyadic_partition(int m);
/// First 2m-2 unit cells with geometric counts, base 2.
Partition1D unit_partition(int m);
/// The single interval [0,1) holding all b^m points.
Partition1D trivial_partition(unsigned b, int m);

enum class SchemeKind { trivial, erfinv, dyadic, unit, custom };

std::string to_string(SchemeKind kind);
SchemeKind parse_scheme_kind(const std::string& name);

/// Per-coordinate partitions plus, when known, the ambient partition of R
/// each was drawn from (as a generator d -> cell, d = 1, 2, ...). Without an
/// ambient generator the selected intervals are the whole ambient partition.
struct PartitionScheme {
  SchemeKind kind = SchemeKind::trivial;
  std::vector<Partition1D> coordinates;
  std::function<BadicCell(int)> ambient;

  int dimension() const { return static_cast<int>(coordinates.size()); }
};

/// Same 1-D partition in every coordinate. X is only used by the erfinv
/// scheme; custom schemes go through make_custom_scheme.
PartitionScheme make_scheme(SchemeKind kind, int s, int m, unsigned b = 2, double X = 6.0);

/// Custom b-adic intervals with explicit point exponents, the same for every
/// coordinate.
PartitionScheme make_custom_scheme(int s, int m, unsigned b, const std::vector<std::pair<BadicCell, int>>& cells);

}  // namespace rsqmc
