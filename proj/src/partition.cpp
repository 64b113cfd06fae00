#include "rsqmc/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace rsqmc {

namespace {

double power(unsigned b, int e) { return std::pow(static_cast<double>(b), e); }

}  // namespace

Interval badic_interval(unsigned b, BadicCell cell, int points_exponent) {
  const double width = power(b, cell.j);
  return Interval{width * static_cast<double>(cell.l), width * static_cast<double>(cell.l + 1),
                  points_exponent, cell};
}

Partition1D::Partition1D(unsigned b, int m, std::vector<Interval> intervals)
    : base_(b), m_(m), intervals_(std::move(intervals)) {
  if (b < 2) throw std::invalid_argument("Partition1D: base must be at least 2");
  if (m < 0 || power(b, m) > 0x1p62) throw std::invalid_argument("Partition1D: b^m out of range");
  if (intervals_.empty()) throw std::invalid_argument("Partition1D: no intervals");

  __int128 total = 0;
  __int128 expected = 1;
  for (int i = 0; i < m; ++i) expected *= b;
  for (const auto& iv : intervals_) {
    if (!(std::isfinite(iv.lo) && std::isfinite(iv.hi) && iv.lo < iv.hi)) {
      throw std::invalid_argument("Partition1D: interval must satisfy lo < hi");
    }
    if (iv.points_exponent < 0 || iv.points_exponent > m) {
      throw std::invalid_argument("Partition1D: point exponent outside [0, m]");
    }
    if (iv.cell) {
      const auto expect = badic_interval(b, *iv.cell, iv.points_exponent);
      if (expect.lo != iv.lo || expect.hi != iv.hi) {
        throw std::invalid_argument("Partition1D: interval endpoints disagree with its b-adic cell");
      }
    }
    __int128 count = 1;
    for (int i = 0; i < iv.points_exponent; ++i) count *= b;
    total += count;
  }
  if (total != expected) throw std::invalid_argument("Partition1D: point counts do not sum to b^m");

  std::vector<std::size_t> by_position(intervals_.size());
  std::iota(by_position.begin(), by_position.end(), std::size_t{0});
  std::sort(by_position.begin(), by_position.end(),
            [&](std::size_t a, std::size_t c) { return intervals_[a].lo < intervals_[c].lo; });
  for (std::size_t i = 1; i < by_position.size(); ++i) {
    if (intervals_[by_position[i - 1]].hi > intervals_[by_position[i]].lo) {
      throw std::invalid_argument("Partition1D: intervals overlap");
    }
  }

  order_.resize(intervals_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t c) {
    return intervals_[a].points_exponent > intervals_[c].points_exponent;
  });
  block_start_.assign(intervals_.size(), 0);
  step_.assign(intervals_.size(), 0.0);
  std::uint64_t start = 0;
  for (std::size_t d : order_) {
    block_start_[d] = start;
    sorted_starts_.push_back(start);
    const auto& iv = intervals_[d];
    start += static_cast<std::uint64_t>(std::llround(power(b, iv.points_exponent)));
    step_[d] = iv.cell ? power(b, iv.cell->j - iv.points_exponent) : iv.length() / power(b, iv.points_exponent);
  }
}

std::size_t Partition1D::interval_of_label(std::uint64_t eta) const {
  auto it = std::upper_bound(sorted_starts_.begin(), sorted_starts_.end(), eta);
  const auto pos = static_cast<std::size_t>(it - sorted_starts_.begin()) - 1;
  const std::size_t d = order_[pos];
  if (eta - block_start_[d] >= static_cast<std::uint64_t>(std::llround(power(base_, intervals_[d].points_exponent)))) {
    throw std::out_of_range("Partition1D: label out of range");
  }
  return d;
}

double Partition1D::point(std::uint64_t eta) const {
  const std::size_t d = interval_of_label(eta);
  return intervals_[d].lo + static_cast<double>(eta - block_start_[d]) * step_[d];
}

Eigen::VectorXd Partition1D::labels() const {
  const auto n = static_cast<Eigen::Index>(std::llround(power(base_, m_)));
  Eigen::VectorXd z(n);
  for (std::size_t d : order_) {
    const auto start = static_cast<Eigen::Index>(block_start_[d]);
    const auto count = static_cast<Eigen::Index>(std::llround(power(base_, intervals_[d].points_exponent)));
    const double lo = intervals_[d].lo;
    for (Eigen::Index k = 0; k < count; ++k) z[start + k] = lo + static_cast<double>(k) * step_[d];
  }
  return z;
}

bool Partition1D::all_badic() const {
  return std::all_of(intervals_.begin(), intervals_.end(), [](const Interval& iv) { return iv.cell.has_value(); });
}

Eigen::VectorXd label_points(const Partition1D& p) { return p.labels(); }

std::vector<int> geometric_schedule(int m) {
  if (m < 3) throw std::invalid_argument("geometric_schedule: m must be at least 3");
  std::vector<int> out;
  for (int l = 1; l <= 2 * (m - 2); ++l) out.push_back(m - 1 - (l + 1) / 2);
  out.push_back(1);
  out.push_back(1);
  return out;
}

double erfinv(double y) {
  if (!(std::abs(y) < 1.0)) throw std::invalid_argument("erfinv: argument must lie in (-1, 1)");
  if (y == 0.0) return 0.0;
  const double a = std::abs(y);
  // Giles' single precision approximation as the starting point.
  double w = -std::log((1.0 - a) * (1.0 + a));
  double p;
  if (w < 5.0) {
    w -= 2.5;
    p = 2.81022636e-08;
    p = 3.43273939e-07 + p * w;
    p = -3.5233877e-06 + p * w;
    p = -4.39150654e-06 + p * w;
    p = 0.00021858087 + p * w;
    p = -0.00125372503 + p * w;
    p = -0.00417768164 + p * w;
    p = 0.246640727 + p * w;
    p = 1.50140941 + p * w;
  } else {
    w = std::sqrt(w) - 3.0;
    p = -0.000200214257;
    p = 0.000100950558 + p * w;
    p = 0.00134934322 + p * w;
    p = -0.00367342844 + p * w;
    p = 0.00573950773 + p * w;
    p = -0.0076224613 + p * w;
    p = 0.00943887047 + p * w;
    p = 1.00167406 + p * w;
    p = 2.83297682 + p * w;
  }
  double x = p * a;
  // Newton on erf, switching to erfc in the tail where 1 - a carries the
  // information.
  const double tail = 1.0 - a;
  for (int it = 0; it < 8; ++it) {
    const double r = a <= 0.5 ? std::erf(x) - a : tail - std::erfc(x);
    const double dx = r / (2.0 / std::sqrt(std::numbers::pi) * std::exp(-x * x));
    x -= dx;
    if (std::abs(dx) <= 1e-15 * std::max(1.0, std::abs(x))) break;
  }
  return y < 0 ? -x : x;
}

Partition1D erfinv_partition(int m, double X) {
  if (!(X > 0.0) || !std::isfinite(X)) throw std::invalid_argument("erfinv_partition: X must be positive");
  const auto counts = geometric_schedule(m);
  std::vector<double> a(static_cast<std::size_t>(m));
  a[0] = 0.0;
  for (int l = 1; l < m; ++l) a[static_cast<std::size_t>(l)] = erfinv(1.0 - std::ldexp(1.0, -l)) * X;
  std::vector<Interval> intervals;
  for (int l = 1; l <= m - 1; ++l) {
    const double lo = a[static_cast<std::size_t>(l - 1)];
    const double hi = a[static_cast<std::size_t>(l)];
    intervals.push_back(Interval{lo, hi, counts[static_cast<std::size_t>(2 * l - 2)], std::nullopt});
    intervals.push_back(Interval{-hi, -lo, counts[static_cast<std::size_t>(2 * l - 1)], std::nullopt});
  }
  return Partition1D(2, m, std::move(intervals));
}

BadicCell dyadic_cell(int d) {
  if (d < 1) throw std::invalid_argument("dyadic_cell: d starts at 1");
  if (d == 1) return {0, 0};
  if (d == 2) return {0, -1};
  if (d % 2 == 1) return {(d - 3) / 2, 1};
  return {(d - 4) / 2, -2};
}

BadicCell unit_cell(int d) {
  if (d < 1) throw std::invalid_argument("unit_cell: d starts at 1");
  if (d % 2 == 1) return {0, (d - 1) / 2};
  return {0, -d / 2};
}

namespace {

Partition1D from_generator(int m, BadicCell (*cell)(int)) {
  const auto counts = geometric_schedule(m);
  std::vector<Interval> intervals;
  for (std::size_t d = 1; d <= counts.size(); ++d) {
    intervals.push_back(badic_interval(2, cell(static_cast<int>(d)), counts[d - 1]));
  }
  return Partition1D(2, m, std::move(intervals));
}

}  // namespace

Partition1D dyadic_partition(int m) { return from_generator(m, dyadic_cell); }

Partition1D unit_partition(int m) { return from_generator(m, unit_cell); }

Partition1D trivial_partition(unsigned b, int m) {
  return Partition1D(b, m, {badic_interval(b, BadicCell{0, 0}, m)});
}

std::string to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::trivial: return "trivial";
    case SchemeKind::erfinv: return "erfinv";
    case SchemeKind::dyadic: return "dyadic";
    case SchemeKind::unit: return "unit";
    case SchemeKind::custom: return "custom";
  }
  return "unknown";
}

SchemeKind parse_scheme_kind(const std::string& name) {
  for (auto k : {SchemeKind::trivial, SchemeKind::erfinv, SchemeKind::dyadic, SchemeKind::unit, SchemeKind::custom}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

PartitionScheme make_scheme(SchemeKind kind, int s, int m, unsigned b, double X) {
  if (s < 1) throw std::invalid_argument("make_scheme: dimension must be positive");
  PartitionScheme scheme;
  scheme.kind = kind;
  switch (kind) {
    case SchemeKind::trivial:
      scheme.coordinates.assign(static_cast<std::size_t>(s), trivial_partition(b, m));
      return scheme;
    case SchemeKind::custom:
      throw std::invalid_argument("make_scheme: custom schemes need explicit intervals");
    default:
      break;
  }
  if (b != 2) throw std::invalid_argument("make_scheme: the " + to_string(kind) + " scheme is defined for base 2");
  if (kind == SchemeKind::erfinv) {
    scheme.coordinates.assign(static_cast<std::size_t>(s), erfinv_partition(m, X));
  } else if (kind == SchemeKind::dyadic) {
    scheme.coordinates.assign(static_cast<std::size_t>(s), dyadic_partition(m));
    scheme.ambient = dyadic_cell;
  } else {
    scheme.coordinates.assign(static_cast<std::size_t>(s), unit_partition(m));
    scheme.ambient = unit_cell;
  }
  return scheme;
}

PartitionScheme make_custom_scheme(int s, int m, unsigned b, const std::vector<std::pair<BadicCell, int>>& cells) {
  if (s < 1) throw std::invalid_argument("make_custom_scheme: dimension must be positive");
  std::vector<Interval> intervals;
  for (const auto& [cell, points] : cells) intervals.push_back(badic_interval(b, cell, points));
  PartitionScheme scheme;
  scheme.kind = SchemeKind::custom;
  scheme.coordinates.assign(static_cast<std::size_t>(s), Partition1D(b, m, std::move(intervals)));
  return scheme;
}

}  // namespace rsqmc
