#include "rsqmc/walsh.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rsqmc {

namespace {

using i128 = __int128;

i128 checked_power(unsigned b, int e) {
  i128 v = 1;
  for (int i = 0; i < e; ++i) {
    if (v > (i128{1} << 100) / b) throw std::overflow_error("tile endpoint scale too large");
    v *= b;
  }
  return v;
}

double power(unsigned b, double e) { return std::pow(static_cast<double>(b), e); }

int exact_log(std::uint64_t n, unsigned b) {
  int e = 0;
  while (n > 1) {
    if (n % b != 0) return -1;
    n /= b;
    ++e;
  }
  return n == 1 ? e : -1;
}

void check_base(unsigned b) {
  if (b < 2) throw std::invalid_argument("Walsh functions need a base of at least 2");
}

}  // namespace

Complex unit_root(unsigned b, std::int64_t e) {
  const std::int64_t r = ((e % static_cast<std::int64_t>(b)) + b) % b;
  if (r == 0) return {1.0, 0.0};
  if (b == 2) return {-1.0, 0.0};
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(r) / b);
}

int digit_count(std::uint64_t k, unsigned b) {
  int n = 0;
  while (k > 0) {
    k /= b;
    ++n;
  }
  return n;
}

Complex wal(std::uint64_t k, double x, unsigned b) {
  check_base(b);
  if (!(x >= 0.0 && x < 1.0)) return {0.0, 0.0};
  std::int64_t e = 0;
  while (k > 0) {
    x *= b;
    const double d = std::floor(x);
    x -= d;
    e += static_cast<std::int64_t>(k % b) * static_cast<std::int64_t>(d);
    k /= b;
  }
  return unit_root(b, e);
}

Complex wal_exact(std::uint64_t k, std::uint64_t numerator, int digits, unsigned b) {
  check_base(b);
  std::vector<unsigned> x(static_cast<std::size_t>(digits));
  for (int i = digits - 1; i >= 0; --i) {
    x[static_cast<std::size_t>(i)] = static_cast<unsigned>(numerator % b);
    numerator /= b;
  }
  if (numerator != 0) throw std::invalid_argument("wal_exact: numerator exceeds b^digits");
  std::int64_t e = 0;
  for (int i = 0; k > 0 && i < digits; ++i) {
    e += static_cast<std::int64_t>(k % b) * x[static_cast<std::size_t>(i)];
    k /= b;
  }
  return unit_root(b, e);
}

Complex w_eval(const WalshIndex& idx, double x, unsigned b) {
  const double y = x * power(b, -idx.j) - static_cast<double>(idx.l);
  if (!(y >= 0.0 && y < 1.0)) return {0.0, 0.0};
  return power(b, -0.5 * idx.j) * wal(idx.k, y, b);
}

Complex w_eval(std::span<const WalshIndex> idx, const Eigen::VectorXd& x, unsigned b) {
  if (static_cast<Eigen::Index>(idx.size()) != x.size()) {
    throw std::invalid_argument("w_eval: index and point dimensions differ");
  }
  Complex v{1.0, 0.0};
  for (std::size_t i = 0; i < idx.size(); ++i) {
    v *= w_eval(idx[i], x[static_cast<Eigen::Index>(i)], b);
    if (v == Complex{}) break;
  }
  return v;
}

bool tiles_disjoint(const WalshIndex& a, const WalshIndex& c, unsigned b) {
  check_base(b);
  // Time axis in units of b^{min j}, frequency axis in units of b^{-max j}.
  const int lo_j = std::min(a.j, c.j);
  const int hi_j = std::max(a.j, c.j);
  const i128 ta = checked_power(b, a.j - lo_j);
  const i128 tc = checked_power(b, c.j - lo_j);
  const bool time_overlap = i128{a.l} * ta < (i128{c.l} + 1) * tc && i128{c.l} * tc < (i128{a.l} + 1) * ta;
  if (!time_overlap) return true;
  const i128 fa = checked_power(b, hi_j - a.j);
  const i128 fc = checked_power(b, hi_j - c.j);
  const bool freq_overlap =
      i128{a.k} * fa < (i128{c.k} + 1) * fc && i128{c.k} * fc < (i128{a.k} + 1) * fa;
  return !freq_overlap;
}

bool tiles_disjoint(std::span<const WalshIndex> a, std::span<const WalshIndex> c, unsigned b) {
  if (a.size() != c.size()) throw std::invalid_argument("tiles_disjoint: dimension mismatch");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (tiles_disjoint(a[i], c[i], b)) return true;
  }
  return false;
}

Complex inner_product(const WalshIndex& a, const WalshIndex& c, unsigned b) {
  if (a.j > c.j) return std::conj(inner_product(c, a, b));
  if (tiles_disjoint(a, c, b)) return {0.0, 0.0};
  // a is the finer function; on its support c reads the leading d digits
  // from l - l' b^d.
  const int d = c.j - a.j;
  const i128 scale = checked_power(b, d);
  const i128 numerator = i128{a.l} - i128{c.l} * scale;
  return power(b, -0.5 * d) *
         std::conj(wal_exact(c.k, static_cast<std::uint64_t>(numerator), d, b));
}

Complex inner_product(std::span<const WalshIndex> a, std::span<const WalshIndex> c, unsigned b) {
  if (a.size() != c.size()) throw std::invalid_argument("inner_product: dimension mismatch");
  Complex v{1.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) v *= inner_product(a[i], c[i], b);
  return v;
}

Complex inner_product_numeric(const WalshIndex& a, const WalshIndex& c, unsigned b) {
  const double lo = std::max(power(b, a.j) * a.l, power(b, c.j) * c.l);
  const double hi = std::min(power(b, a.j) * (a.l + 1), power(b, c.j) * (c.l + 1));
  if (!(lo < hi)) return {0.0, 0.0};
  const int cell_exp = std::min(a.j - digit_count(a.k, b), c.j - digit_count(c.k, b));
  const double h = power(b, cell_exp);
  const auto cells = static_cast<std::int64_t>(std::llround((hi - lo) / h));
  if (cells > (std::int64_t{1} << 26)) throw std::invalid_argument("inner_product_numeric: grid too fine");
  Complex sum{0.0, 0.0};
  for (std::int64_t i = 0; i < cells; ++i) {
    const double x = lo + (static_cast<double>(i) + 0.5) * h;
    sum += w_eval(a, x, b) * std::conj(w_eval(c, x, b));
  }
  return sum * h;
}

Eigen::MatrixXcd change_of_basis(unsigned b) {
  check_base(b);
  Eigen::MatrixXcd u(b, b);
  const double scale = 1.0 / std::sqrt(static_cast<double>(b));
  for (unsigned r = 0; r < b; ++r) {
    for (unsigned s = 0; s < b; ++s) u(r, s) = scale * unit_root(b, static_cast<std::int64_t>(r * s));
  }
  return u;
}

Complex WalshCoefficientBox::at(std::span<const std::uint64_t> k) const {
  if (k.size() != k_lo.size()) throw std::invalid_argument("WalshCoefficientBox::at: dimension mismatch");
  Eigen::Index index = 0;
  Eigen::Index stride = 1;
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (k[i] < k_lo[i] || k[i] >= k_hi[i]) throw std::out_of_range("WalshCoefficientBox::at: k outside box");
    index += static_cast<Eigen::Index>(k[i] - k_lo[i]) * stride;
    stride *= static_cast<Eigen::Index>(k_hi[i] - k_lo[i]);
  }
  return values[index];
}

WalshCoefficientBox walsh_coefficients(const ScalarField& f, std::span<const int> j,
                                       std::span<const std::int64_t> l,
                                       std::span<const std::uint64_t> k_lo,
                                       std::span<const std::uint64_t> k_hi,
                                       std::uint64_t resolution, unsigned b) {
  check_base(b);
  const std::size_t s = j.size();
  if (s == 0 || l.size() != s || k_lo.size() != s || k_hi.size() != s) {
    throw std::invalid_argument("walsh_coefficients: inconsistent dimensions");
  }
  const int digits = exact_log(resolution, b);
  if (digits < 0) {
    throw std::invalid_argument("walsh_coefficients: resolution " + std::to_string(resolution) +
                                " is not a power of " + std::to_string(b));
  }
  for (std::size_t i = 0; i < s; ++i) {
    if (k_lo[i] >= k_hi[i]) throw std::invalid_argument("walsh_coefficients: empty frequency range");
    if (digit_count(k_hi[i] - 1, b) > digits) {
      throw std::invalid_argument("walsh_coefficients: resolution too coarse for the frequency box");
    }
  }
  const auto R = static_cast<Eigen::Index>(resolution);
  double total = 1.0;
  for (std::size_t i = 0; i < s; ++i) total *= static_cast<double>(R);
  if (total > static_cast<double>(std::int64_t{1} << 27)) {
    throw std::invalid_argument("walsh_coefficients: too many sample cells");
  }

  // Samples of f at cell midpoints, c_0 fastest.
  const auto n_samples = static_cast<Eigen::Index>(total);
  Eigen::VectorXcd tensor(n_samples);
  std::vector<Eigen::VectorXd> axis(s);
  for (std::size_t i = 0; i < s; ++i) {
    axis[i].resize(R);
    const double width = power(b, j[i]);
    for (Eigen::Index c = 0; c < R; ++c) {
      axis[i][c] = width * (static_cast<double>(l[i]) + (static_cast<double>(c) + 0.5) / static_cast<double>(R));
    }
  }
  std::vector<Eigen::Index> cell(s, 0);
  Eigen::VectorXd x(static_cast<Eigen::Index>(s));
  for (Eigen::Index n = 0; n < n_samples; ++n) {
    for (std::size_t i = 0; i < s; ++i) x[static_cast<Eigen::Index>(i)] = axis[i][cell[i]];
    tensor[n] = f(x);
    for (std::size_t i = 0; i < s && ++cell[i] == R; ++i) cell[i] = 0;
  }

  // Contract the slowest axis each time; the new frequency axis becomes the
  // fastest, so after s steps the layout is k_0 fastest again.
  for (std::size_t step = 0; step < s; ++step) {
    const std::size_t i = s - 1 - step;
    const auto K = static_cast<Eigen::Index>(k_hi[i] - k_lo[i]);
    Eigen::MatrixXcd m(K, R);
    const double factor = power(b, 0.5 * j[i]) / static_cast<double>(R);
    for (Eigen::Index kk = 0; kk < K; ++kk) {
      for (Eigen::Index c = 0; c < R; ++c) {
        m(kk, c) = factor * std::conj(wal_exact(k_lo[i] + static_cast<std::uint64_t>(kk),
                                                static_cast<std::uint64_t>(c), digits, b));
      }
    }
    const Eigen::Index inner = tensor.size() / R;
    Eigen::Map<const Eigen::MatrixXcd> a(tensor.data(), inner, R);
    Eigen::MatrixXcd next = m * a.transpose();
    tensor = Eigen::Map<const Eigen::VectorXcd>(next.data(), next.size());
  }

  WalshCoefficientBox box;
  box.k_lo.assign(k_lo.begin(), k_lo.end());
  box.k_hi.assign(k_hi.begin(), k_hi.end());
  box.values = std::move(tensor);
  return box;
}

Complex walsh_coefficient(const ScalarField& f, std::span<const WalshIndex> idx,
                          std::uint64_t resolution, unsigned b) {
  std::vector<int> j;
  std::vector<std::int64_t> l;
  std::vector<std::uint64_t> lo;
  std::vector<std::uint64_t> hi;
  for (const auto& w : idx) {
    j.push_back(w.j);
    l.push_back(w.l);
    lo.push_back(w.k);
    hi.push_back(w.k + 1);
  }
  return walsh_coefficients(f, j, l, lo, hi, resolution, b).values[0];
}

double sigma(const ScalarField& f, std::span<const int> j, std::span<const int> r,
             std::span<const std::int64_t> l, std::uint64_t resolution, unsigned b) {
  if (r.size() != j.size()) throw std::invalid_argument("sigma: inconsistent dimensions");
  std::vector<std::uint64_t> lo;
  std::vector<std::uint64_t> hi;
  for (int ri : r) {
    if (ri < 0) throw std::invalid_argument("sigma: negative frequency exponent");
    lo.push_back(frequency_box_lo(ri, b));
    hi.push_back(frequency_box_hi(ri, b));
  }
  return walsh_coefficients(f, j, l, lo, hi, resolution, b).values.norm();
}

bool Location::contains(const Eigen::VectorXd& x, unsigned b) const {
  for (std::size_t i = 0; i < j.size(); ++i) {
    const double y = x[static_cast<Eigen::Index>(i)] * power(b, -j[i]) - static_cast<double>(l[i]);
    if (!(y >= 0.0 && y < 1.0)) return false;
  }
  return true;
}

double partial_sum(const ScalarField& f, std::span<const Location> D, std::span<const int> r_max,
                   const Eigen::VectorXd& x, std::uint64_t resolution, unsigned b) {
  const std::size_t s = r_max.size();
  if (static_cast<Eigen::Index>(s) != x.size()) throw std::invalid_argument("partial_sum: dimension mismatch");
  std::vector<std::uint64_t> lo(s, 0);
  std::vector<std::uint64_t> hi(s);
  for (std::size_t i = 0; i < s; ++i) hi[i] = frequency_box_hi(r_max[i], b);
  Complex total{0.0, 0.0};
  for (const auto& loc : D) {
    if (loc.j.size() != s || loc.l.size() != s) throw std::invalid_argument("partial_sum: location dimension");
    if (!loc.contains(x, b)) continue;
    const auto box = walsh_coefficients(f, loc.j, loc.l, lo, hi, resolution, b);
    std::vector<std::vector<Complex>> w(s);
    for (std::size_t i = 0; i < s; ++i) {
      for (std::uint64_t k = 0; k < hi[i]; ++k) {
        w[i].push_back(w_eval(WalshIndex{loc.j[i], k, loc.l[i]}, x[static_cast<Eigen::Index>(i)], b));
      }
    }
    std::vector<std::uint64_t> k(s, 0);
    for (Eigen::Index n = 0; n < box.values.size(); ++n) {
      Complex term = box.values[n];
      for (std::size_t i = 0; i < s; ++i) term *= w[i][k[i]];
      total += term;
      for (std::size_t i = 0; i < s && ++k[i] == hi[i]; ++i) k[i] = 0;
    }
  }
  return total.real();
}

}  // namespace rsqmc
