#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace rsqmc {

using Residue = std::uint8_t;
using ResidueVector = std::vector<Residue>;

bool is_prime(unsigned n);

/// Dense matrix over the prime field Z_b, row-major, entries in {0,...,b-1}.
///
/// Immutable once built. For b = 2 and at most 64 rows the columns are also
/// kept packed into machine words (bit rows-1-r holds entry (r, c)), which is
/// what the net generators use to form digit vectors with a handful of XORs.
class GFMatrix {
 public:
  GFMatrix(unsigned base, std::size_t rows, std::size_t cols);
  GFMatrix(unsigned base, std::size_t rows, std::size_t cols, std::vector<Residue> entries);

  static GFMatrix identity(unsigned base, std::size_t n);
  static GFMatrix from_rows(unsigned base, const std::vector<std::vector<unsigned>>& rows);

  unsigned base() const { return base_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Residue operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
  std::span<const Residue> row(std::size_t r) const {
    return {entries_.data() + r * cols_, cols_};
  }
  std::span<const Residue> entries() const { return entries_; }

  /// The leading `count` rows as a new matrix.
  GFMatrix top_rows(std::size_t count) const;

  bool has_packed_columns() const { return base_ == 2 && rows_ <= 64; }
  std::span<const std::uint64_t> packed_columns() const { return packed_columns_; }

  bool operator==(const GFMatrix& other) const = default;

 private:
  void validate_and_pack();

  unsigned base_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Residue> entries_;
  std::vector<std::uint64_t> packed_columns_;
};

GFMatrix vstack(std::span<const GFMatrix> blocks);

/// M v mod b. Throws std::invalid_argument on a length mismatch.
ResidueVector matvec(const GFMatrix& m, std::span<const Residue> v);

/// Rank over Z_b by Gaussian elimination with first-nonzero pivoting.
std::size_t rank(const GFMatrix& m);

/// Rank over Z_2 of rows given as bit masks (at most 64 columns).
std::size_t rank_gf2(std::span<const std::uint64_t> rows);

/// Solution set of A x = rhs over Z_b, kept as particular solution plus a
/// kernel basis so callers can count without enumerating.
class AffineSolutionSet {
 public:
  bool consistent() const { return consistent_; }
  std::size_t dimension() const { return kernel_.size(); }
  /// 0 when inconsistent, b^(unknowns - rank) otherwise. Throws
  /// std::overflow_error when that does not fit in 64 bits.
  std::uint64_t count() const;

  const ResidueVector& particular() const { return particular_; }
  const std::vector<ResidueVector>& kernel() const { return kernel_; }

  /// Calls visit once per solution. Caller is responsible for keeping
  /// count() small.
  void for_each(const std::function<void(std::span<const Residue>)>& visit) const;

 private:
  friend AffineSolutionSet solve_affine(const GFMatrix&, std::span<const Residue>);
  unsigned base_ = 2;
  bool consistent_ = false;
  ResidueVector particular_;
  std::vector<ResidueVector> kernel_;
};

AffineSolutionSet solve_affine(const GFMatrix& rows, std::span<const Residue> rhs);

}  // namespace rsqmc
