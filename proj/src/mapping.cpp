#include "rsqmc/mapping.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace rsqmc {

namespace {

constexpr std::uint64_t kDenseKeyLimit = std::uint64_t{1} << 24;
constexpr std::uint64_t kBucketCount = 4096;

std::uint64_t ipow(unsigned b, int e) {
  std::uint64_t v = 1;
  for (int i = 0; i < e; ++i) v *= b;
  return v;
}

}  // namespace

int subcube_exponent(const PartitionScheme& scheme, std::span<const std::size_t> d) {
  if (d.size() != scheme.coordinates.size()) throw std::invalid_argument("subcube_exponent: dimension mismatch");
  const int m = scheme.coordinates.front().m();
  int m_d = m;
  for (std::size_t i = 0; i < d.size(); ++i) m_d -= m - scheme.coordinates[i].interval(d[i]).points_exponent;
  return m_d;
}

std::uint64_t MappedPointSet::step(std::size_t n, int i) const {
  const auto& p = scheme_.coordinates[static_cast<std::size_t>(i)];
  const auto row = static_cast<Eigen::Index>(n);
  return labels_(row, i) - p.block_start(cells_(row, i));
}

std::span<const std::uint32_t> MappedPointSet::members(std::size_t subcube) const {
  const auto begin = member_offsets_.at(subcube);
  const auto end = member_offsets_.at(subcube + 1);
  return {members_.data() + begin, static_cast<std::size_t>(end - begin)};
}

std::uint64_t MappedPointSet::key_of(std::span<const std::size_t> d) const {
  std::uint64_t key = 0;
  for (std::size_t i = 0; i < d.size(); ++i) key += d[i] * strides_[i];
  return key;
}

std::optional<std::size_t> MappedPointSet::find(std::span<const std::size_t> d) const {
  if (d.size() != strides_.size()) throw std::invalid_argument("MappedPointSet::find: dimension mismatch");
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] >= scheme_.coordinates[i].size()) return std::nullopt;
  }
  const auto key = key_of(d);
  auto it = std::lower_bound(subcube_keys_.begin(), subcube_keys_.end(), key);
  if (it == subcube_keys_.end() || *it != key) return std::nullopt;
  return static_cast<std::size_t>(it - subcube_keys_.begin());
}

double MappedPointSet::covered_volume() const {
  double v = 0.0;
  for (const auto& c : subcubes_) v += c.volume;
  return v;
}

MappedPointSet map_net(const DigitalNet& net, const PartitionScheme& scheme) {
  const int s = net.dimension();
  if (scheme.dimension() != s) throw std::invalid_argument("map_net: scheme and net dimensions differ");
  for (const auto& p : scheme.coordinates) {
    if (p.base() != net.base() || p.m() != net.m()) {
      throw std::invalid_argument("map_net: partition base/exponent differ from the net");
    }
    if (p.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw std::invalid_argument("map_net: too many intervals in one coordinate");
    }
  }
  if (net.size() > (std::uint64_t{1} << 32)) throw std::invalid_argument("map_net: more than 2^32 points");

  MappedPointSet ps(net, scheme);
  const auto N = static_cast<Eigen::Index>(net.size());
  ps.points_.resize(N, s);
  ps.labels_.resize(N, s);
  ps.cells_.resize(N, s);
  ps.weights_.resize(N);

  ps.strides_.assign(static_cast<std::size_t>(s), 1);
  std::uint64_t total_keys = 1;
  for (int i = 0; i < s; ++i) {
    ps.strides_[static_cast<std::size_t>(i)] = total_keys;
    const auto delta = scheme.coordinates[static_cast<std::size_t>(i)].size();
    if (total_keys > (std::uint64_t{1} << 62) / delta) throw std::invalid_argument("map_net: too many subcubes");
    total_keys *= delta;
  }

  std::vector<std::uint64_t> keys(static_cast<std::size_t>(N), 0);
  for (int i = 0; i < s; ++i) {
    const auto& p = scheme.coordinates[static_cast<std::size_t>(i)];
    const auto stride = ps.strides_[static_cast<std::size_t>(i)];
    const GFMatrix& c = net.matrix(i);

    // Label blocks in label order: first label, interval, left end, spacing.
    struct Block {
      std::uint64_t start;
      std::size_t d;
      double lo;
      double step;
    };
    std::vector<std::uint64_t> starts;
    std::vector<Block> blocks;
    for (std::size_t d : p.label_order()) {
      starts.push_back(p.block_start(d));
      blocks.push_back({p.block_start(d), d, p.interval(d).lo, p.spacing(d)});
    }

    // Blocks have power-of-b sizes in decreasing order, so each starts at a
    // multiple of its size and most buckets of leading digits sit inside
    // one block. kMixed marks buckets that need a search.
    constexpr std::uint32_t kMixed = std::numeric_limits<std::uint32_t>::max();
    std::uint64_t bucket = 1;
    while (net.size() / bucket > kBucketCount) bucket *= net.base();
    std::vector<std::uint32_t> bucket_block(static_cast<std::size_t>(net.size() / bucket));
    for (std::size_t q = 0; q < bucket_block.size(); ++q) {
      auto locate = [&](std::uint64_t label) {
        return static_cast<std::size_t>(std::upper_bound(starts.begin(), starts.end(), label) - starts.begin()) - 1;
      };
      const auto first = locate(q * bucket);
      bucket_block[q] = first == locate((q + 1) * bucket - 1) ? static_cast<std::uint32_t>(first) : kMixed;
    }

    for (Eigen::Index n = 0; n < N; ++n) {
      std::uint64_t label;
      if (c.has_packed_columns()) {
        // n and n & (n-1) differ in one digit only.
        const auto un = static_cast<std::uint64_t>(n);
        label = n == 0 ? 0
                       : ps.labels_(static_cast<Eigen::Index>(un & (un - 1)), i) ^
                             c.packed_columns()[static_cast<std::size_t>(std::countr_zero(un))];
      } else {
        label = net.label(static_cast<std::uint64_t>(n), i);
      }
      std::size_t pos = bucket_block[static_cast<std::size_t>(label / bucket)];
      if (pos == kMixed) {
        pos = static_cast<std::size_t>(std::upper_bound(starts.begin(), starts.end(), label) - starts.begin()) - 1;
      }
      const Block& blk = blocks[pos];
      ps.labels_(n, i) = static_cast<std::uint32_t>(label);
      ps.cells_(n, i) = static_cast<std::uint16_t>(blk.d);
      ps.points_(n, i) = blk.lo + static_cast<double>(label - blk.start) * blk.step;
      keys[static_cast<std::size_t>(n)] += blk.d * stride;
    }
  }

  // Group points by subcube key, members kept in index order.
  std::vector<std::uint32_t> order(static_cast<std::size_t>(N));
  std::vector<std::uint64_t> run_keys;
  ps.member_offsets_.push_back(0);
  const bool dense = total_keys <= kDenseKeyLimit;
  if (dense) {
    std::vector<std::uint64_t> count(total_keys + 1, 0);
    for (auto k : keys) ++count[k + 1];
    for (std::uint64_t k = 0; k < total_keys; ++k) {
      if (count[k + 1] != 0) {
        run_keys.push_back(k);
        ps.member_offsets_.push_back(count[k] + count[k + 1]);
      }
      count[k + 1] += count[k];
    }
    std::vector<std::uint64_t> fill(count.begin(), count.end() - 1);
    for (std::size_t n = 0; n < keys.size(); ++n) order[fill[keys[n]]++] = static_cast<std::uint32_t>(n);
  } else {
    for (std::size_t n = 0; n < order.size(); ++n) order[n] = static_cast<std::uint32_t>(n);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t c) { return keys[a] < keys[c]; });
    for (std::size_t pos = 0; pos < order.size();) {
      const auto key = keys[order[pos]];
      std::size_t end = pos;
      while (end < order.size() && keys[order[end]] == key) ++end;
      run_keys.push_back(key);
      ps.member_offsets_.push_back(end);
      pos = end;
    }
  }
  ps.members_ = std::move(order);

  std::vector<double> lambda;
  lambda.reserve(run_keys.size());
  for (std::size_t r = 0; r < run_keys.size(); ++r) {
    const auto key = run_keys[r];
    Subcube c;
    c.d.resize(static_cast<std::size_t>(s));
    c.volume = 1.0;
    for (int i = 0; i < s; ++i) {
      const auto& p = scheme.coordinates[static_cast<std::size_t>(i)];
      const auto di = static_cast<std::size_t>((key / ps.strides_[static_cast<std::size_t>(i)]) % p.size());
      c.d[static_cast<std::size_t>(i)] = di;
      c.volume *= p.interval(di).length();
    }
    c.m_d = subcube_exponent(scheme, c.d);
    c.count = ps.member_offsets_[r + 1] - ps.member_offsets_[r];
    lambda.push_back(c.volume / static_cast<double>(c.count));
    ps.subcubes_.push_back(std::move(c));
  }
  ps.subcube_keys_ = std::move(run_keys);

  ps.point_subcube_.resize(static_cast<std::size_t>(N));
  if (dense) {
    std::vector<std::uint32_t> index_of_key(total_keys);
    for (std::size_t r = 0; r < ps.subcube_keys_.size(); ++r) {
      index_of_key[ps.subcube_keys_[r]] = static_cast<std::uint32_t>(r);
    }
    for (std::size_t n = 0; n < keys.size(); ++n) ps.point_subcube_[n] = index_of_key[keys[n]];
  } else {
    for (std::size_t r = 0; r < ps.subcube_keys_.size(); ++r) {
      for (auto q = ps.member_offsets_[r]; q < ps.member_offsets_[r + 1]; ++q) {
        ps.point_subcube_[ps.members_[q]] = static_cast<std::uint32_t>(r);
      }
    }
  }
  for (Eigen::Index n = 0; n < N; ++n) ps.weights_[n] = lambda[ps.point_subcube_[static_cast<std::size_t>(n)]];
  return ps;
}

std::string to_string(SubcubeStatus status) {
  switch (status) {
    case SubcubeStatus::passed: return "passed";
    case SubcubeStatus::count_only: return "count_only";
    case SubcubeStatus::failed: return "failed";
    case SubcubeStatus::unverified: return "unverified";
  }
  return "unknown";
}

namespace {

// Elementary-box counting on the rescaled steps of one subcube.
bool shifted_net_holds(const MappedPointSet& ps, std::span<const std::uint32_t> members,
                       std::span<const int> point_exponents, int m_d, int t, std::string& detail) {
  const unsigned b = ps.net().base();
  const int s = ps.dimension();
  const int target = m_d - t;
  const std::uint64_t expected = ipow(b, t);
  std::vector<std::uint64_t> counts(ipow(b, target));
  bool ok = true;
  for_each_composition(s, target, m_d, [&](const std::vector<int>& e) {
    std::fill(counts.begin(), counts.end(), 0);
    for (auto n : members) {
      std::uint64_t key = 0;
      for (int i = 0; i < s; ++i) {
        const int ei = e[static_cast<std::size_t>(i)];
        const int mi = point_exponents[static_cast<std::size_t>(i)];
        key = key * ipow(b, ei) + ps.step(n, i) / ipow(b, mi - ei);
      }
      ++counts[key];
    }
    for (std::size_t box = 0; box < counts.size(); ++box) {
      if (counts[box] != expected) {
        ok = false;
        detail = "box " + std::to_string(box) + " holds " + std::to_string(counts[box]) + " points, expected " +
                 std::to_string(expected);
        break;
      }
    }
    return ok;
  });
  return ok;
}

}  // namespace

SubcubeReport verify_subcube_nets(const MappedPointSet& ps) {
  SubcubeReport report;
  const auto& scheme = ps.scheme();
  const int s = ps.dimension();
  const int m = ps.net().m();
  const int t = ps.net().t();
  const unsigned b = ps.net().base();

  std::vector<std::size_t> d(static_cast<std::size_t>(s), 0);
  auto check = [&]() {
    SubcubeCheck entry;
    entry.d = d;
    entry.m_d = subcube_exponent(scheme, d);
    const auto found = ps.find(d);
    entry.count = found ? ps.subcubes()[*found].count : 0;
    const std::uint64_t expected = ipow(b, entry.m_d);
    if (entry.count != expected) {
      entry.status = SubcubeStatus::failed;
      entry.detail = "holds " + std::to_string(entry.count) + " points, expected " + std::to_string(expected);
    } else if (entry.m_d > kCountingMaxExponent) {
      entry.status = SubcubeStatus::count_only;
    } else {
      std::vector<int> exponents(static_cast<std::size_t>(s));
      for (int i = 0; i < s; ++i) {
        exponents[static_cast<std::size_t>(i)] =
            scheme.coordinates[static_cast<std::size_t>(i)].interval(d[static_cast<std::size_t>(i)]).points_exponent;
      }
      entry.status = shifted_net_holds(ps, ps.members(*found), exponents, entry.m_d, t, entry.detail)
                         ? SubcubeStatus::passed
                         : SubcubeStatus::failed;
    }
    report.entries.push_back(std::move(entry));
  };
  // Depth-first over d with sum_i (m - m_{i,d_i}) <= m - t.
  auto rec = [&](auto&& self, int i, int budget) -> void {
    if (i == s) {
      check();
      return;
    }
    const auto& p = scheme.coordinates[static_cast<std::size_t>(i)];
    for (std::size_t di = 0; di < p.size(); ++di) {
      const int cost = m - p.interval(di).points_exponent;
      if (cost > budget) continue;
      d[static_cast<std::size_t>(i)] = di;
      self(self, i + 1, budget - cost);
    }
  };
  rec(rec, 0, m - t);

  const std::uint64_t sparse_limit = ipow(b, t);
  for (const auto& c : ps.subcubes()) {
    if (c.m_d >= t) continue;
    SubcubeCheck entry;
    entry.d = c.d;
    entry.m_d = c.m_d;
    entry.count = c.count;
    entry.status = SubcubeStatus::unverified;
    entry.sparse = c.count < sparse_limit;
    report.entries.push_back(std::move(entry));
  }

  for (const auto& e : report.entries) {
    switch (e.status) {
      case SubcubeStatus::passed: ++report.passed; break;
      case SubcubeStatus::count_only: ++report.count_only; break;
      case SubcubeStatus::failed: ++report.failed; break;
      case SubcubeStatus::unverified: ++report.unverified; break;
    }
    if (e.sparse) ++report.sparse;
  }
  return report;
}

void write_points(std::ostream& out, const MappedPointSet& ps) {
  char buf[32];
  const auto& x = ps.points();
  for (Eigen::Index n = 0; n < x.rows(); ++n) {
    for (Eigen::Index i = 0; i < x.cols(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", x(n, i));
      out << buf << ' ';
    }
    std::snprintf(buf, sizeof buf, "%.17g", ps.weights()[n]);
    out << buf << '\n';
  }
}

}  // namespace rsqmc
