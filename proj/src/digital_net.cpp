#include "rsqmc/digital_net.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace rsqmc {

namespace {

std::uint64_t checked_power(unsigned b, int e) {
  std::uint64_t v = 1;
  for (int i = 0; i < e; ++i) {
    if (v > (std::uint64_t{1} << 62) / b) throw std::invalid_argument("b^m exceeds 2^62");
    v *= b;
  }
  return v;
}

// Row r of a binary matrix as a bit mask over columns.
std::vector<std::uint64_t> row_masks(const GFMatrix& c) {
  std::vector<std::uint64_t> rows(c.rows(), 0);
  for (std::size_t r = 0; r < c.rows(); ++r) {
    for (std::size_t k = 0; k < c.cols(); ++k) {
      if (c(r, k)) rows[r] |= std::uint64_t{1} << k;
    }
  }
  return rows;
}

}  // namespace

std::vector<GFMatrix> sobol_matrices(int s, int m, const DirectionNumbers& numbers) {
  if (s < 1 || s > numbers.max_dimension()) {
    throw std::invalid_argument("sobol_matrices: dimension " + std::to_string(s) +
                                " outside 1.." + std::to_string(numbers.max_dimension()));
  }
  if (m < 1 || m > kMaxSobolExponent) {
    throw std::invalid_argument("sobol_matrices: exponent " + std::to_string(m) + " outside 1..32");
  }
  std::vector<GFMatrix> out;
  out.reserve(static_cast<std::size_t>(s));
  out.push_back(GFMatrix::identity(2, static_cast<std::size_t>(m)));
  for (int dim = 2; dim <= s; ++dim) {
    const auto& e = numbers.entries[static_cast<std::size_t>(dim - 2)];
    const int deg = e.degree;
    // v[k] = m_k << (32 - k), k = 1..m
    std::vector<std::uint32_t> v(static_cast<std::size_t>(m) + 1, 0);
    for (int k = 1; k <= m; ++k) {
      if (k <= deg) {
        v[k] = e.initial[static_cast<std::size_t>(k - 1)] << (32 - k);
      } else {
        std::uint32_t x = v[k - deg] ^ (v[k - deg] >> deg);
        for (int q = 1; q < deg; ++q) {
          if ((e.coefficients >> (deg - 1 - q)) & 1u) x ^= v[k - q];
        }
        v[k] = x;
      }
    }
    std::vector<Residue> entries(static_cast<std::size_t>(m * m), 0);
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < m; ++c) {
        entries[static_cast<std::size_t>(r * m + c)] = static_cast<Residue>((v[c + 1] >> (31 - r)) & 1u);
      }
    }
    out.emplace_back(2, m, m, std::move(entries));
  }
  return out;
}

int sobol_sequence_t(int s, const DirectionNumbers& numbers) {
  if (s < 1 || s > numbers.max_dimension()) throw std::invalid_argument("sobol_sequence_t: bad dimension");
  int t = 0;
  for (int dim = 2; dim <= s; ++dim) t += numbers.entries[static_cast<std::size_t>(dim - 2)].degree - 1;
  return t;
}

DigitalNet::DigitalNet(std::vector<GFMatrix> matrices, int t, bool certified, Unchecked)
    : t_(t), certified_(certified), matrices_(std::move(matrices)) {
  if (matrices_.empty()) throw std::invalid_argument("DigitalNet: need at least one matrix");
  base_ = matrices_.front().base();
  m_ = static_cast<int>(matrices_.front().rows());
  if (m_ < 1) throw std::invalid_argument("DigitalNet: m must be positive");
  for (const auto& c : matrices_) {
    if (c.base() != base_ || c.rows() != static_cast<std::size_t>(m_) || c.cols() != c.rows()) {
      throw std::invalid_argument("DigitalNet: generating matrices must all be m x m over one Z_b");
    }
  }
  size_ = checked_power(base_, m_);
  if (t_ < 0 || t_ > m_) throw std::invalid_argument("DigitalNet: t must lie in [0, m]");
}

DigitalNet::DigitalNet(std::vector<GFMatrix> matrices, int declared_t)
    : DigitalNet(std::move(matrices), declared_t, false, Unchecked{}) {
  if (m_ <= kCertifyMaxExponent) {
    if (!verify_tms_net(*this, t_)) {
      throw std::invalid_argument("DigitalNet: declared t = " + std::to_string(t_) +
                                  " does not hold for these matrices");
    }
    certified_ = true;
  }
}

DigitalNet DigitalNet::with_exact_t(std::vector<GFMatrix> matrices) {
  DigitalNet net(std::move(matrices), 0, false, Unchecked{});
  net.t_ = t_value(net);
  net.certified_ = true;
  return net;
}

DigitalNet DigitalNet::sobol(int s, int m, const DirectionNumbers& numbers) {
  auto matrices = sobol_matrices(s, m, numbers);
  if (m <= kCertifyMaxExponent) return with_exact_t(std::move(matrices));
  return DigitalNet(std::move(matrices), std::min(m, sobol_sequence_t(s, numbers)), false, Unchecked{});
}

std::uint64_t DigitalNet::label(std::uint64_t n, int i) const {
  if (n >= size_) throw std::out_of_range("DigitalNet::label: index out of range");
  const GFMatrix& c = matrices_[static_cast<std::size_t>(i)];
  if (c.has_packed_columns()) {
    const auto cols = c.packed_columns();
    std::uint64_t acc = 0;
    while (n != 0) {
      acc ^= cols[static_cast<std::size_t>(std::countr_zero(n))];
      n &= n - 1;
    }
    return acc;
  }
  ResidueVector digits(static_cast<std::size_t>(m_), 0);
  for (int k = 0; k < m_; ++k) {
    digits[static_cast<std::size_t>(k)] = static_cast<Residue>(n % base_);
    n /= base_;
  }
  const auto eta = matvec(c, digits);
  std::uint64_t acc = 0;
  for (Residue d : eta) acc = acc * base_ + d;
  return acc;
}

Eigen::VectorXd DigitalNet::point(std::uint64_t n) const {
  Eigen::VectorXd x(dimension());
  const double scale = 1.0 / static_cast<double>(size_);
  for (int i = 0; i < dimension(); ++i) x[i] = static_cast<double>(label(n, i)) * scale;
  return x;
}

Eigen::VectorXd net_point(std::uint64_t n, const DigitalNet& net) { return net.point(n); }

bool verify_tms_net(const DigitalNet& net, int t_candidate) {
  const int m = net.m();
  const int s = net.dimension();
  if (t_candidate < 0) return false;
  if (t_candidate >= m) return true;
  const int target = m - t_candidate;
  bool ok = true;
  if (net.base() == 2) {
    std::vector<std::vector<std::uint64_t>> rows;
    for (const auto& c : net.matrices()) rows.push_back(row_masks(c));
    std::vector<std::uint64_t> stacked;
    for_each_composition(s, target, m, [&](const std::vector<int>& d) {
      stacked.clear();
      for (int i = 0; i < s; ++i) {
        const auto& r = rows[static_cast<std::size_t>(i)];
        stacked.insert(stacked.end(), r.begin(), r.begin() + d[static_cast<std::size_t>(i)]);
      }
      ok = rank_gf2(stacked) == static_cast<std::size_t>(target);
      return ok;
    });
    return ok;
  }
  for_each_composition(s, target, m, [&](const std::vector<int>& d) {
    std::vector<GFMatrix> blocks;
    for (int i = 0; i < s; ++i) {
      if (d[static_cast<std::size_t>(i)] > 0) {
        blocks.push_back(net.matrix(i).top_rows(static_cast<std::size_t>(d[static_cast<std::size_t>(i)])));
      }
    }
    ok = rank(vstack(blocks)) == static_cast<std::size_t>(target);
    return ok;
  });
  return ok;
}

bool verify_tms_net_by_counting(const DigitalNet& net, int t_candidate) {
  const int m = net.m();
  const int s = net.dimension();
  const unsigned b = net.base();
  if (t_candidate < 0) return false;
  if (t_candidate >= m) return true;
  const std::uint64_t n_points = net.size();
  std::vector<std::uint64_t> labels(n_points * static_cast<std::uint64_t>(s));
  for (std::uint64_t n = 0; n < n_points; ++n) {
    for (int i = 0; i < s; ++i) labels[n * s + i] = net.label(n, i);
  }
  std::vector<std::uint64_t> pow(static_cast<std::size_t>(m) + 1, 1);
  for (int k = 1; k <= m; ++k) pow[k] = pow[k - 1] * b;
  const int target = m - t_candidate;
  const std::uint64_t expected = pow[static_cast<std::size_t>(t_candidate)];
  std::vector<std::uint64_t> counts(pow[static_cast<std::size_t>(target)]);
  bool ok = true;
  for_each_composition(s, target, m, [&](const std::vector<int>& d) {
    std::fill(counts.begin(), counts.end(), 0);
    for (std::uint64_t n = 0; n < n_points; ++n) {
      std::uint64_t key = 0;
      for (int i = 0; i < s; ++i) {
        const int di = d[static_cast<std::size_t>(i)];
        key = key * pow[di] + labels[n * s + i] / pow[m - di];
      }
      ++counts[key];
    }
    for (auto c : counts) {
      if (c != expected) {
        ok = false;
        break;
      }
    }
    return ok;
  });
  return ok;
}

int t_value(const DigitalNet& net) {
  // verify_tms_net is monotone in t.
  int lo = 0;
  int hi = net.m();
  while (lo < hi) {
    const int mid = (lo + hi) / 2;
    if (verify_tms_net(net, mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

}  // namespace rsqmc
