#include "rsqmc/gf_matrix.hpp"

#include <bit>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace rsqmc {

namespace {

unsigned mod_inverse(unsigned a, unsigned b) {
  // b is prime and small, Fermat is plenty.
  unsigned result = 1;
  unsigned base = a % b;
  unsigned e = b - 2;
  while (e > 0) {
    if (e & 1u) result = result * base % b;
    base = base * base % b;
    e >>= 1;
  }
  return result;
}

// Reduced row echelon form in place; returns pivot columns.
std::vector<std::size_t> rref(std::vector<unsigned>& a, std::size_t rows, std::size_t cols,
                              std::size_t pivot_cols, unsigned b) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < pivot_cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && a[p * cols + c] == 0) ++p;
    if (p == rows) continue;
    if (p != r) {
      for (std::size_t k = 0; k < cols; ++k) std::swap(a[p * cols + k], a[r * cols + k]);
    }
    const unsigned inv = mod_inverse(a[r * cols + c], b);
    for (std::size_t k = 0; k < cols; ++k) a[r * cols + k] = a[r * cols + k] * inv % b;
    for (std::size_t q = 0; q < rows; ++q) {
      if (q == r) continue;
      const unsigned f = a[q * cols + c];
      if (f == 0) continue;
      for (std::size_t k = 0; k < cols; ++k) {
        a[q * cols + k] = (a[q * cols + k] + (b - f) * a[r * cols + k]) % b;
      }
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace

bool is_prime(unsigned n) {
  if (n < 2) return false;
  for (unsigned d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

GFMatrix::GFMatrix(unsigned base, std::size_t rows, std::size_t cols)
    : GFMatrix(base, rows, cols, std::vector<Residue>(rows * cols, 0)) {}

GFMatrix::GFMatrix(unsigned base, std::size_t rows, std::size_t cols, std::vector<Residue> entries)
    : base_(base), rows_(rows), cols_(cols), entries_(std::move(entries)) {
  validate_and_pack();
}

void GFMatrix::validate_and_pack() {
  if (!is_prime(base_) || base_ > 255) {
    throw std::invalid_argument("GFMatrix: base must be a prime below 256, got " +
                                std::to_string(base_));
  }
  if (entries_.size() != rows_ * cols_) {
    throw std::invalid_argument("GFMatrix: entry count does not match shape");
  }
  for (Residue e : entries_) {
    if (e >= base_) throw std::invalid_argument("GFMatrix: entry out of range");
  }
  if (base_ == 2 && rows_ <= 64) {
    packed_columns_.assign(cols_, 0);
    for (std::size_t c = 0; c < cols_; ++c) {
      std::uint64_t word = 0;
      for (std::size_t r = 0; r < rows_; ++r) {
        if (entries_[r * cols_ + c]) word |= std::uint64_t{1} << (rows_ - 1 - r);
      }
      packed_columns_[c] = word;
    }
  }
}

GFMatrix GFMatrix::identity(unsigned base, std::size_t n) {
  std::vector<Residue> e(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) e[i * n + i] = 1;
  return GFMatrix(base, n, n, std::move(e));
}

GFMatrix GFMatrix::from_rows(unsigned base, const std::vector<std::vector<unsigned>>& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.front().size();
  std::vector<Residue> e;
  e.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw std::invalid_argument("GFMatrix::from_rows: ragged rows");
    for (unsigned v : row) {
      if (v >= base) throw std::invalid_argument("GFMatrix::from_rows: entry out of range");
      e.push_back(static_cast<Residue>(v));
    }
  }
  return GFMatrix(base, r, c, std::move(e));
}

GFMatrix GFMatrix::top_rows(std::size_t count) const {
  if (count > rows_) throw std::out_of_range("GFMatrix::top_rows: too many rows");
  return GFMatrix(base_, count, cols_,
                  std::vector<Residue>(entries_.begin(), entries_.begin() + count * cols_));
}

GFMatrix vstack(std::span<const GFMatrix> blocks) {
  if (blocks.empty()) throw std::invalid_argument("vstack: no blocks");
  const unsigned b = blocks.front().base();
  const std::size_t cols = blocks.front().cols();
  std::size_t rows = 0;
  std::vector<Residue> e;
  for (const auto& m : blocks) {
    if (m.base() != b || m.cols() != cols) throw std::invalid_argument("vstack: shape mismatch");
    rows += m.rows();
    e.insert(e.end(), m.entries().begin(), m.entries().end());
  }
  return GFMatrix(b, rows, cols, std::move(e));
}

ResidueVector matvec(const GFMatrix& m, std::span<const Residue> v) {
  if (v.size() != m.cols()) throw std::invalid_argument("matvec: dimension mismatch");
  const unsigned b = m.base();
  ResidueVector out(m.rows(), 0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    unsigned acc = 0;
    const auto row = m.row(r);
    for (std::size_t c = 0; c < m.cols(); ++c) acc = (acc + unsigned{row[c]} * v[c]) % b;
    out[r] = static_cast<Residue>(acc);
  }
  return out;
}

std::size_t rank_gf2(std::span<const std::uint64_t> rows) {
  // XOR basis indexed by leading bit.
  std::uint64_t basis[64] = {};
  std::size_t r = 0;
  for (std::uint64_t v : rows) {
    while (v != 0) {
      const int top = 63 - std::countl_zero(v);
      if (basis[top] == 0) {
        basis[top] = v;
        ++r;
        break;
      }
      v ^= basis[top];
    }
  }
  return r;
}

std::size_t rank(const GFMatrix& m) {
  if (m.base() == 2 && m.cols() <= 64) {
    std::vector<std::uint64_t> rows(m.rows(), 0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (std::size_t c = 0; c < m.cols(); ++c) {
        if (m(r, c)) rows[r] |= std::uint64_t{1} << c;
      }
    }
    return rank_gf2(rows);
  }
  std::vector<unsigned> a(m.entries().begin(), m.entries().end());
  return rref(a, m.rows(), m.cols(), m.cols(), m.base()).size();
}

std::uint64_t AffineSolutionSet::count() const {
  if (!consistent_) return 0;
  std::uint64_t n = 1;
  for (std::size_t i = 0; i < kernel_.size(); ++i) {
    if (n > std::numeric_limits<std::uint64_t>::max() / base_) {
      throw std::overflow_error("AffineSolutionSet::count: solution count exceeds 64 bits");
    }
    n *= base_;
  }
  return n;
}

void AffineSolutionSet::for_each(const std::function<void(std::span<const Residue>)>& visit) const {
  if (!consistent_) return;
  const std::size_t dim = kernel_.size();
  std::vector<unsigned> coeff(dim, 0);
  ResidueVector x(particular_.size());
  while (true) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      unsigned acc = particular_[i];
      for (std::size_t k = 0; k < dim; ++k) acc += coeff[k] * kernel_[k][i];
      x[i] = static_cast<Residue>(acc % base_);
    }
    visit(x);
    std::size_t k = 0;
    while (k < dim && ++coeff[k] == base_) coeff[k++] = 0;
    if (k == dim) break;
  }
}

AffineSolutionSet solve_affine(const GFMatrix& rows, std::span<const Residue> rhs) {
  if (rhs.size() != rows.rows()) throw std::invalid_argument("solve_affine: rhs length mismatch");
  const unsigned b = rows.base();
  const std::size_t n = rows.rows();
  const std::size_t unknowns = rows.cols();
  const std::size_t cols = unknowns + 1;
  std::vector<unsigned> a(n * cols, 0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < unknowns; ++c) a[r * cols + c] = rows(r, c);
    a[r * cols + unknowns] = rhs[r] % b;
  }
  const auto pivots = rref(a, n, cols, unknowns, b);

  AffineSolutionSet out;
  out.base_ = b;
  for (std::size_t r = pivots.size(); r < n; ++r) {
    if (a[r * cols + unknowns] != 0) return out;  // 0 = nonzero row
  }
  out.consistent_ = true;
  out.particular_.assign(unknowns, 0);
  std::vector<bool> is_pivot(unknowns, false);
  for (std::size_t r = 0; r < pivots.size(); ++r) {
    out.particular_[pivots[r]] = static_cast<Residue>(a[r * cols + unknowns]);
    is_pivot[pivots[r]] = true;
  }
  for (std::size_t f = 0; f < unknowns; ++f) {
    if (is_pivot[f]) continue;
    ResidueVector v(unknowns, 0);
    v[f] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) {
      v[pivots[r]] = static_cast<Residue>((b - a[r * cols + f]) % b);
    }
    out.kernel_.push_back(std::move(v));
  }
  return out;
}

}  // namespace rsqmc
