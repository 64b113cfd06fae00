#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rsqmc/digital_net.hpp"
#include "rsqmc/partition.hpp"

namespace rsqmc {

/// Label of coordinate i of point n, read most significant digit first.
inline std::uint64_t eta(std::uint64_t n, int i, const DigitalNet& net) { return net.label(n, i); }

/// m_d = m - sum_i (m - m_{i,d_i}); may be negative.
int subcube_exponent(const PartitionScheme& scheme, std::span<const std::size_t> d);

/// One occupied subcube J_d = prod_i J_{i,d_i}.
struct Subcube {
  std::vector<std::size_t> d;
  int m_d = 0;
  std::uint64_t count = 0;
  double volume = 0.0;
};

class MappedPointSet {
 public:
  using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using LabelMatrix = Eigen::Matrix<std::uint32_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using CellMatrix = Eigen::Matrix<std::uint16_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }
  int dimension() const { return static_cast<int>(points_.cols()); }

  /// Row n is x_n.
  const PointMatrix& points() const { return points_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  /// eta_{n,i}.
  const LabelMatrix& labels() const { return labels_; }
  /// Interval index d_i (scheme order, 0-based) holding x_{n,i}.
  const CellMatrix& cells() const { return cells_; }
  /// Position of x_{n,i} inside its interval: eta minus the block start.
  std::uint64_t step(std::size_t n, int i) const;

  /// Occupied subcubes, ordered by their mixed-radix key.
  const std::vector<Subcube>& subcubes() const { return subcubes_; }
  std::span<const std::uint32_t> members(std::size_t subcube) const;
  std::size_t subcube_of(std::size_t n) const { return point_subcube_[n]; }
  std::optional<std::size_t> find(std::span<const std::size_t> d) const;

  const DigitalNet& net() const { return net_; }
  const PartitionScheme& scheme() const { return scheme_; }

  /// Sum of volumes of occupied subcubes, which is also the weight total.
  double covered_volume() const;

 private:
  friend MappedPointSet map_net(const DigitalNet& net, const PartitionScheme& scheme);
  MappedPointSet(DigitalNet net, PartitionScheme scheme) : net_(std::move(net)), scheme_(std::move(scheme)) {}

  std::uint64_t key_of(std::span<const std::size_t> d) const;

  DigitalNet net_;
  PartitionScheme scheme_;
  PointMatrix points_;
  Eigen::VectorXd weights_;
  LabelMatrix labels_;
  CellMatrix cells_;
  std::vector<std::uint64_t> strides_;
  std::vector<Subcube> subcubes_;
  std::vector<std::uint64_t> subcube_keys_;
  std::vector<std::uint64_t> member_offsets_;
  std::vector<std::uint32_t> members_;
  std::vector<std::uint32_t> point_subcube_;
};

/// x_{n,i} = z_{eta_{n,i}} with weights Vol(J) / |N_J|.
MappedPointSet map_net(const DigitalNet& net, const PartitionScheme& scheme);

/// Largest subcube checked by literal point counting.
inline constexpr int kCountingMaxExponent = 14;

enum class SubcubeStatus {
  passed,      // count and every elementary box checked
  count_only,  // count checked, too large for box counting
  failed,
  unverified,  // m_d < t: nothing is claimed
};

std::string to_string(SubcubeStatus status);

struct SubcubeCheck {
  std::vector<std::size_t> d;
  int m_d = 0;
  std::uint64_t count = 0;
  SubcubeStatus status = SubcubeStatus::unverified;
  /// 0 < count < b^t: weight Vol/|N| is kept but flagged.
  bool sparse = false;
  std::string detail;
};

struct SubcubeReport {
  std::vector<SubcubeCheck> entries;
  std::size_t passed = 0;
  std::size_t count_only = 0;
  std::size_t failed = 0;
  std::size_t unverified = 0;
  std::size_t sparse = 0;

  bool ok() const { return failed == 0; }
};

/// For every subcube with m_d >= t: |N_d| = b^{m_d}, and after rescaling to
/// [0,1)^s every elementary box of volume b^{t - m_d} holds b^t points.
SubcubeReport verify_subcube_nets(const MappedPointSet& ps);

/// One line per point: s coordinates then the weight, round-trip precision.
void write_points(std::ostream& out, const MappedPointSet& ps);

}  // namespace rsqmc
