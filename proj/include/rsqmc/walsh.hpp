#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace rsqmc {

using Complex = std::complex<double>;
using ScalarField = std::function<double(const Eigen::Ref<const Eigen::VectorXd>&)>;

/// omega_b^e with omega_b = exp(2 pi i / b). Exact for b = 2 and e = 0 mod b.
Complex unit_root(unsigned b, std::int64_t e);

/// Number of base-b digits of k (0 for k = 0).
int digit_count(std::uint64_t k, unsigned b);

/// wal_k(x) for x in [0,1), 0 outside.
Complex wal(std::uint64_t k, double x, unsigned b);

/// wal_k(numerator / b^digits) evaluated from the exact digits of the
/// argument. Requires 0 <= numerator < b^digits.
Complex wal_exact(std::uint64_t k, std::uint64_t numerator, int digits, unsigned b);

/// (j, k, l) for w_{j,k,l}(x) = b^{-j/2} wal_k(b^{-j} x - l). The same triple
/// names the tile [b^j l, b^j (l+1)) x [b^{-j} k, b^{-j} (k+1)).
struct WalshIndex {
  int j = 0;
  std::uint64_t k = 0;
  std::int64_t l = 0;

  bool operator==(const WalshIndex&) const = default;
};

Complex w_eval(const WalshIndex& idx, double x, unsigned b);
/// Tensor product over coordinates.
Complex w_eval(std::span<const WalshIndex> idx, const Eigen::VectorXd& x, unsigned b);

/// Exact rectangle intersection test in the time-frequency plane.
bool tiles_disjoint(const WalshIndex& a, const WalshIndex& c, unsigned b);
/// Product tiles are disjoint iff some coordinate pair is.
bool tiles_disjoint(std::span<const WalshIndex> a, std::span<const WalshIndex> c, unsigned b);

/// <w_a, w_c> in L2(R) from the closed form.
Complex inner_product(const WalshIndex& a, const WalshIndex& c, unsigned b);
Complex inner_product(std::span<const WalshIndex> a, std::span<const WalshIndex> c, unsigned b);

/// Same inner product by midpoint integration over the common support on
/// cells fine enough that both functions are constant on each.
Complex inner_product_numeric(const WalshIndex& a, const WalshIndex& c, unsigned b);

/// U(r, s) = b^{-1/2} wal_r(s / b). Row r gives w_{j+1, kb+r, l/b} as a
/// combination of w_{j,k,l+s}, s = 0..b-1, for any j, k and l divisible by b.
Eigen::MatrixXcd change_of_basis(unsigned b);

/// Walsh coefficients <f, w_{j,k,l}> for every k in the box
/// k_lo[i] <= k_i < k_hi[i], on one location (j, l). Values are stored with
/// k_0 varying fastest.
struct WalshCoefficientBox {
  std::vector<std::uint64_t> k_lo;
  std::vector<std::uint64_t> k_hi;
  Eigen::VectorXcd values;

  Complex at(std::span<const std::uint64_t> k) const;
};

/// Midpoint rule on resolution^s cells of the support box, aligned with the
/// b-adic grid. resolution must be a power of b with at least as many digits
/// as the largest k, so the Walsh factor is exact on every cell.
WalshCoefficientBox walsh_coefficients(const ScalarField& f, std::span<const int> j,
                                       std::span<const std::int64_t> l,
                                       std::span<const std::uint64_t> k_lo,
                                       std::span<const std::uint64_t> k_hi,
                                       std::uint64_t resolution, unsigned b);

Complex walsh_coefficient(const ScalarField& f, std::span<const WalshIndex> idx,
                          std::uint64_t resolution, unsigned b);

/// The frequency range floor(b^{r-1}) <= k < b^r.
inline std::uint64_t frequency_box_lo(int r, unsigned b) {
  std::uint64_t v = 1;
  for (int i = 1; i < r; ++i) v *= b;
  return r == 0 ? 0 : v;
}
inline std::uint64_t frequency_box_hi(int r, unsigned b) {
  std::uint64_t v = 1;
  for (int i = 0; i < r; ++i) v *= b;
  return v;
}

/// l2 norm of the coefficients over the frequency box r at location (j, l).
double sigma(const ScalarField& f, std::span<const int> j, std::span<const int> r,
             std::span<const std::int64_t> l, std::uint64_t resolution, unsigned b);

/// A location (j, l): the box prod_i [b^{j_i} l_i, b^{j_i} (l_i + 1)).
struct Location {
  std::vector<int> j;
  std::vector<std::int64_t> l;

  bool contains(const Eigen::VectorXd& x, unsigned b) const;
};

/// Sum over the locations of D that contain x and over k_i < b^{r_max_i} of
/// f_hat * w(x).
double partial_sum(const ScalarField& f, std::span<const Location> D, std::span<const int> r_max,
                   const Eigen::VectorXd& x, std::uint64_t resolution, unsigned b);

}  // namespace rsqmc
