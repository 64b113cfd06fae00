#pragma once

#include <algorithm>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rsqmc/gf_matrix.hpp"

namespace rsqmc {

/// Sobol initialization data, one entry per dimension >= 2, in the usual
/// `d s a m_1 ... m_s` text layout. Dimension 1 (van der Corput) is implicit.
struct DirectionNumbers {
  struct Entry {
    int dimension;
    int degree;
    std::uint32_t coefficients;  // inner coefficients a of the primitive polynomial
    std::vector<std::uint32_t> initial;  // m_1 .. m_degree
  };
  std::vector<Entry> entries;

  static DirectionNumbers parse(std::istream& in);
  static DirectionNumbers load(const std::string& path);
  /// Joe–Kuo new-joe-kuo-6.21201, dimensions 2–10.
  static const DirectionNumbers& embedded();

  int max_dimension() const { return static_cast<int>(entries.size()) + 1; }
};

inline constexpr int kMaxSobolExponent = 32;

/// m x m generating matrices over Z_2 for the first s Sobol coordinates.
std::vector<GFMatrix> sobol_matrices(int s, int m,
                                     const DirectionNumbers& numbers = DirectionNumbers::embedded());

/// Upper bound on the t-value of the first s Sobol coordinates as a sequence:
/// sum over coordinates of (degree - 1).
int sobol_sequence_t(int s, const DirectionNumbers& numbers = DirectionNumbers::embedded());

/// Exponent up to which a declared quality parameter is checked on construction.
inline constexpr int kCertifyMaxExponent = 14;

class DigitalNet {
 public:
  /// Takes s square generating matrices over a common Z_b. For m <= 14 the
  /// declared t is certified and construction throws if it does not hold.
  DigitalNet(std::vector<GFMatrix> matrices, int declared_t);

  /// Computes the exact t-value instead of taking one.
  static DigitalNet with_exact_t(std::vector<GFMatrix> matrices);

  /// Sobol net, t certified exactly for m <= 14 and taken from the sequence
  /// bound above that.
  static DigitalNet sobol(int s, int m, const DirectionNumbers& numbers = DirectionNumbers::embedded());

  unsigned base() const { return base_; }
  int m() const { return m_; }
  int dimension() const { return static_cast<int>(matrices_.size()); }
  int t() const { return t_; }
  bool t_certified() const { return certified_; }
  std::uint64_t size() const { return size_; }
  const GFMatrix& matrix(int i) const { return matrices_.at(static_cast<std::size_t>(i)); }
  const std::vector<GFMatrix>& matrices() const { return matrices_; }

  /// Integer label of coordinate i of point n: the digits C_i n read most
  /// significant first, so the classical point coordinate is label / b^m.
  std::uint64_t label(std::uint64_t n, int i) const;

  /// Point n in [0,1)^s.
  Eigen::VectorXd point(std::uint64_t n) const;

 private:
  struct Unchecked {};
  DigitalNet(std::vector<GFMatrix> matrices, int t, bool certified, Unchecked);

  unsigned base_ = 2;
  int m_ = 0;
  int t_ = 0;
  bool certified_ = false;
  std::uint64_t size_ = 1;
  std::vector<GFMatrix> matrices_;
};

Eigen::VectorXd net_point(std::uint64_t n, const DigitalNet& net);

/// Algebraic (t,m,s)-net test: for every d with |d|_1 = m - t the stacked
/// leading d_i rows of C_i have full rank.
bool verify_tms_net(const DigitalNet& net, int t_candidate);

/// Same property by literally counting points in every elementary interval
/// of volume b^(t - m). Exhaustive, meant for b^m <= 2^14.
bool verify_tms_net_by_counting(const DigitalNet& net, int t_candidate);

/// Smallest t for which verify_tms_net holds.
int t_value(const DigitalNet& net);

/// Calls visit(d) for every d in N_0^s with |d|_1 = total and d_i <= cap,
/// stopping early once visit returns false.
template <typename Visit>
void for_each_composition(int s, int total, int cap, Visit&& visit) {
  std::vector<int> d(static_cast<std::size_t>(s), 0);
  auto rec = [&](auto&& self, int i, int remaining) -> bool {
    if (i == s - 1) {
      if (remaining > cap) return true;
      d[static_cast<std::size_t>(i)] = remaining;
      return visit(static_cast<const std::vector<int>&>(d));
    }
    for (int v = 0; v <= std::min(remaining, cap); ++v) {
      d[static_cast<std::size_t>(i)] = v;
      if (!self(self, i + 1, remaining - v)) return false;
    }
    return true;
  };
  if (s > 0) rec(rec, 0, total);
}

}  // namespace rsqmc
