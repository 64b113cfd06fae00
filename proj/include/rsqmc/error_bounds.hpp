#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rsqmc/mapping.hpp"
#include "rsqmc/partition.hpp"

namespace rsqmc {

/// Exact binomial coefficient (0 when k < 0 or k > n), returned as double.
double binomial(int n, int k);

/// Location (j, l) and digit box r of a delta query.
struct DeltaQuery {
  std::vector<int> j;
  std::vector<int> r;
  std::vector<std::int64_t> l;
};

/// Largest frequency box b^{|r|_1} the brute force accepts.
inline constexpr std::uint64_t kDeltaMaxFrequencies = std::uint64_t{1} << 12;

/// delta_{j,r,l} for the subcube d of a b-adic scheme:
/// (sum over the r-box of |sum_n lambda_n w(x_n) - int w|^2)^{1/2}, with the
/// Walsh factors taken from the exact in-cell steps.
double delta_bruteforce(const MappedPointSet& ps, std::span<const std::size_t> d, std::span<const int> r);

/// Same for an arbitrary b-adic box (j, l); points are assigned by
/// floating-point containment.
double delta_bruteforce(const MappedPointSet& ps, const DeltaQuery& q);

/// 0 when |r|_1 <= m - t, else (1-1/b)^{|u_r|/2} b^{|j|_1/2} b^{(|r|_1-m+t)/2}.
double delta_net_bound(std::span<const int> j, std::span<const int> r, int m, int t, unsigned b);

/// 0 when |r|_1 <= m - t, else b^{|j|_1/2} (b^{|r|_1-m+t} - 1)^{1/2}: the r-box
/// holds at most b^{|r|_1-m+t} - 1 nonzero dual-net vectors, each adding
/// b^{|j|_1} to delta^2. Unlike delta_net_bound this holds for every r.
double delta_dual_bound(std::span<const int> j, std::span<const int> r, int m, int t, unsigned b);

enum class WeightFlavor { unit_cube, rational, exponential, custom };

std::string to_string(WeightFlavor flavor);

/// Local smoothness alpha (constant) and local weights gamma_u(J). Subsets u
/// are bit masks over coordinates, J is a box given by per-coordinate
/// intervals. gamma_empty must factor over coordinates through
/// empty_factor so the truncation sum can be taken exactly.
struct WeightModel {
  double alpha = 1.0;
  WeightFlavor flavor = WeightFlavor::custom;
  std::function<double(std::uint32_t u, std::span<const Interval> J)> gamma;
  std::function<double(int i, const Interval& J_i)> empty_factor;

  double gamma_u(std::uint32_t u, std::span<const Interval> J) const;
  double gamma_empty(std::span<const Interval> J) const;
  /// Throws unless 1/2 < alpha <= 1 and gamma is set.
  void validate() const;

  /// gamma = 1 on [0,1)^s and 0 elsewhere.
  static WeightModel unit_cube(double alpha);
  /// gamma_i = (1 + min(|a_i|,|b_i|)^{2 alpha + 1/2})^{-1}, gamma_u = prod_i gamma_i,
  /// gamma_empty = prod_i (1 + min(|a_i|,|b_i|)^{alpha + 1/2})^{-1}.
  static WeightModel rational(double alpha);
  /// gamma_u = prod_i 2^{-min(|a_i|,|b_i|)} for every u.
  static WeightModel exponential(double alpha);
};

/// C_{alpha,|u|,J} b^{-alpha (m_d - t)} binom(m_d - t + |u|, |u| - 1), with
/// C = (b-1)^{(alpha-1/2)|u|} b^{|u|/2} b^{1/2-alpha} b^{(alpha+1/2) sum_{i in u} j_i}.
double net_error_term(double alpha, int u_size, int j_sum_u, int excess, unsigned b);

struct WceBound {
  double truncation = 0.0;  // sum over D \ F of b^{|j|/2} gamma_empty(J)
  double net = 0.0;         // sum over u != {} and F of gamma_u(J) * net_error_term
  std::size_t f_size = 0;

  double total() const { return truncation + net; }
};

/// The two-part worst-case error bound for a b-adic scheme built on a net
/// with quality t. The truncation sum is prod_i G_i - sum_F prod_i g_i, with
/// G_i summed over the ambient partition (or the selected intervals when no
/// ambient partition is attached).
WceBound wce_bound_construction(const PartitionScheme& scheme, int t, const WeightModel& model);
WceBound wce_bound_construction(const PartitionScheme& scheme, const DigitalNet& net, const WeightModel& model);

/// b^{-alpha(m-t)} sum_{u != {}} C_{alpha,|u|} binom(m-t+|u|, |u|-1).
double bound_unit_cube(int m, int t, int s, double alpha, unsigned b = 2);

/// 2^{-alpha(m-t)} binom(m-t-2s, s)^2 2^{s(3 alpha + 2)} (2^{-alpha} + 2 (1 + 2^{c})^s)
/// with c = 3/2 (as stated) or c = 1/2 (the constant the derivation ends on).
/// Requires m > t + 3s and s >= 2.
double bound_rational(int m, int t, int s, double alpha, bool derivation_constant = false);

/// 2^{3s-1} 2^{-(m-t)} binom(m-t, s-1) + 2^{s(2 alpha + 1)} 2^{-alpha(m-t)} binom(m-t-s, s)^2.
/// Requires m > t + 2s and s >= 2.
double bound_exponential(int m, int t, int s, double alpha);

/// min of (b-1)^{(alpha-1/2)|u|} b^{-alpha|r|} b^{alpha sum_u j} b^{-sum_{not u} j/2} gamma_u(J)
/// and b^{|u|} 2^{|u|} gamma_empty(J); only the second applies for r = 0.
double sigma_bound(std::span<const int> j, std::span<const int> r, const WeightModel& model,
                   std::span<const Interval> J, unsigned b);

}  // namespace rsqmc
