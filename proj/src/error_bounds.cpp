#include "rsqmc/error_bounds.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "rsqmc/walsh.hpp"

namespace rsqmc {

namespace {

double power(double b, double e) { return std::pow(b, e); }

int l1(std::span<const int> v) {
  int s = 0;
  for (int x : v) s += x;
  return s;
}

std::uint64_t frequency_count(std::span<const int> r, unsigned b) {
  double total = 1.0;
  for (int ri : r) {
    if (ri < 0) throw std::invalid_argument("delta: negative digit-box exponent");
    total *= power(b, ri);
  }
  if (total > static_cast<double>(kDeltaMaxFrequencies)) {
    throw std::invalid_argument("delta: frequency box b^{|r|_1} exceeds " + std::to_string(kDeltaMaxFrequencies));
  }
  return static_cast<std::uint64_t>(total);
}

// sum over the k-box of |sum_n scaled_n prod_i W_i(k_i, n) - [k = 0] zero_integral|^2.
// W_i holds one row per frequency of coordinate i, starting at k_lo[i].
double delta_from_tables(const std::vector<Eigen::MatrixXcd>& W, const std::vector<std::uint64_t>& k_lo,
                         const Eigen::ArrayXd& scaled, double zero_integral) {
  const std::size_t s = W.size();
  double acc = 0.0;
  auto rec = [&](auto&& self, std::size_t i, const Eigen::ArrayXcd& partial, bool zero) -> void {
    if (i == s) {
      Complex sum = partial.sum();
      if (zero) sum -= zero_integral;
      acc += std::norm(sum);
      return;
    }
    for (Eigen::Index kk = 0; kk < W[i].rows(); ++kk) {
      const Eigen::ArrayXcd next = partial * W[i].row(kk).transpose().array();
      self(self, i + 1, next, zero && k_lo[i] + static_cast<std::uint64_t>(kk) == 0);
    }
  };
  rec(rec, 0, scaled.cast<Complex>(), true);
  return std::sqrt(acc);
}

}  // namespace

double binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0.0;
  if (n > 120) throw std::overflow_error("binomial: n too large for exact evaluation");
  k = std::min(k, n - k);
  __int128 r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return static_cast<double>(r);
}

double delta_bruteforce(const MappedPointSet& ps, std::span<const std::size_t> d, std::span<const int> r) {
  const int s = ps.dimension();
  const unsigned b = ps.net().base();
  if (static_cast<int>(d.size()) != s || static_cast<int>(r.size()) != s) {
    throw std::invalid_argument("delta_bruteforce: dimension mismatch");
  }
  frequency_count(r, b);
  std::vector<int> j(static_cast<std::size_t>(s));
  std::vector<int> m_i(static_cast<std::size_t>(s));
  for (int i = 0; i < s; ++i) {
    const auto& iv = ps.scheme().coordinates[static_cast<std::size_t>(i)].interval(d[static_cast<std::size_t>(i)]);
    if (!iv.cell) throw std::invalid_argument("delta_bruteforce: subcube is not b-adic");
    j[static_cast<std::size_t>(i)] = iv.cell->j;
    m_i[static_cast<std::size_t>(i)] = iv.points_exponent;
  }
  const auto found = ps.find(d);
  const auto members = found ? ps.members(*found) : std::span<const std::uint32_t>{};
  const auto N = static_cast<Eigen::Index>(members.size());

  const double jsum = l1(j);
  Eigen::ArrayXd scaled(N);
  for (Eigen::Index q = 0; q < N; ++q) scaled[q] = ps.weights()[members[static_cast<std::size_t>(q)]] * power(b, -0.5 * jsum);

  std::vector<Eigen::MatrixXcd> W(static_cast<std::size_t>(s));
  std::vector<std::uint64_t> k_lo(static_cast<std::size_t>(s));
  for (int i = 0; i < s; ++i) {
    const auto ri = r[static_cast<std::size_t>(i)];
    const auto lo = frequency_box_lo(ri, b);
    const auto hi = frequency_box_hi(ri, b);
    const int mi = m_i[static_cast<std::size_t>(i)];
    k_lo[static_cast<std::size_t>(i)] = lo;
    auto& w = W[static_cast<std::size_t>(i)];
    w.resize(static_cast<Eigen::Index>(hi - lo), N);
    for (std::uint64_t k = lo; k < hi; ++k) {
      for (Eigen::Index q = 0; q < N; ++q) {
        w(static_cast<Eigen::Index>(k - lo), q) = wal_exact(k, ps.step(members[static_cast<std::size_t>(q)], i), mi, b);
      }
    }
  }
  return delta_from_tables(W, k_lo, scaled, power(b, 0.5 * jsum));
}

double delta_bruteforce(const MappedPointSet& ps, const DeltaQuery& q) {
  const int s = ps.dimension();
  const unsigned b = ps.net().base();
  if (static_cast<int>(q.j.size()) != s || static_cast<int>(q.r.size()) != s || static_cast<int>(q.l.size()) != s) {
    throw std::invalid_argument("delta_bruteforce: dimension mismatch");
  }
  frequency_count(q.r, b);
  const Location loc{q.j, q.l};
  std::vector<Eigen::Index> inside;
  Eigen::VectorXd x(s);
  for (Eigen::Index n = 0; n < ps.points().rows(); ++n) {
    x = ps.points().row(n).transpose();
    if (loc.contains(x, b)) inside.push_back(n);
  }
  const auto N = static_cast<Eigen::Index>(inside.size());
  const double jsum = l1(q.j);
  Eigen::ArrayXd scaled(N);
  for (Eigen::Index p = 0; p < N; ++p) scaled[p] = ps.weights()[inside[static_cast<std::size_t>(p)]] * power(b, -0.5 * jsum);

  std::vector<Eigen::MatrixXcd> W(static_cast<std::size_t>(s));
  std::vector<std::uint64_t> k_lo(static_cast<std::size_t>(s));
  for (int i = 0; i < s; ++i) {
    const auto lo = frequency_box_lo(q.r[static_cast<std::size_t>(i)], b);
    const auto hi = frequency_box_hi(q.r[static_cast<std::size_t>(i)], b);
    k_lo[static_cast<std::size_t>(i)] = lo;
    auto& w = W[static_cast<std::size_t>(i)];
    w.resize(static_cast<Eigen::Index>(hi - lo), N);
    const double scale = power(b, -q.j[static_cast<std::size_t>(i)]);
    for (Eigen::Index p = 0; p < N; ++p) {
      const double y = ps.points()(inside[static_cast<std::size_t>(p)], i) * scale -
                       static_cast<double>(q.l[static_cast<std::size_t>(i)]);
      for (std::uint64_t k = lo; k < hi; ++k) w(static_cast<Eigen::Index>(k - lo), p) = wal(k, y, b);
    }
  }
  return delta_from_tables(W, k_lo, scaled, power(b, 0.5 * jsum));
}

double delta_net_bound(std::span<const int> j, std::span<const int> r, int m, int t, unsigned b) {
  if (j.size() != r.size()) throw std::invalid_argument("delta_net_bound: dimension mismatch");
  const int r1 = l1(r);
  if (r1 <= m - t) return 0.0;
  int u = 0;
  for (int ri : r) u += ri != 0;
  return power(1.0 - 1.0 / b, 0.5 * u) * power(b, 0.5 * l1(j)) * power(b, 0.5 * (r1 - m + t));
}

double delta_dual_bound(std::span<const int> j, std::span<const int> r, int m, int t, unsigned b) {
  if (j.size() != r.size()) throw std::invalid_argument("delta_dual_bound: dimension mismatch");
  const int excess = l1(r) - (m - t);
  if (excess <= 0) return 0.0;
  return power(b, 0.5 * l1(j)) * std::sqrt(power(b, excess) - 1.0);
}

std::string to_string(WeightFlavor flavor) {
  switch (flavor) {
    case WeightFlavor::unit_cube: return "unit_cube";
    case WeightFlavor::rational: return "rational";
    case WeightFlavor::exponential: return "exponential";
    case WeightFlavor::custom: return "custom";
  }
  return "unknown";
}

double WeightModel::gamma_u(std::uint32_t u, std::span<const Interval> J) const {
  if (u == 0) return gamma_empty(J);
  return gamma(u, J);
}

double WeightModel::gamma_empty(std::span<const Interval> J) const {
  if (!empty_factor) return gamma(0, J);
  double g = 1.0;
  for (std::size_t i = 0; i < J.size(); ++i) g *= empty_factor(static_cast<int>(i), J[i]);
  return g;
}

void WeightModel::validate() const {
  if (!(alpha > 0.5 && alpha <= 1.0)) throw std::invalid_argument("WeightModel: alpha must lie in (1/2, 1]");
  if (!gamma) throw std::invalid_argument("WeightModel: gamma is not set");
}

namespace {

double nearest_to_origin(const Interval& iv) { return std::min(std::abs(iv.lo), std::abs(iv.hi)); }

bool is_unit(const Interval& iv) { return iv.lo == 0.0 && iv.hi == 1.0; }

}  // namespace

WeightModel WeightModel::unit_cube(double alpha) {
  WeightModel w;
  w.alpha = alpha;
  w.flavor = WeightFlavor::unit_cube;
  w.empty_factor = [](int, const Interval& iv) { return is_unit(iv) ? 1.0 : 0.0; };
  w.gamma = [](std::uint32_t, std::span<const Interval> J) {
    for (const auto& iv : J) {
      if (!is_unit(iv)) return 0.0;
    }
    return 1.0;
  };
  w.validate();
  return w;
}

WeightModel WeightModel::rational(double alpha) {
  WeightModel w;
  w.alpha = alpha;
  w.flavor = WeightFlavor::rational;
  w.empty_factor = [alpha](int, const Interval& iv) { return 1.0 / (1.0 + std::pow(nearest_to_origin(iv), alpha + 0.5)); };
  w.gamma = [alpha](std::uint32_t, std::span<const Interval> J) {
    double g = 1.0;
    for (const auto& iv : J) g /= 1.0 + std::pow(nearest_to_origin(iv), 2.0 * alpha + 0.5);
    return g;
  };
  w.validate();
  return w;
}

WeightModel WeightModel::exponential(double alpha) {
  WeightModel w;
  w.alpha = alpha;
  w.flavor = WeightFlavor::exponential;
  w.empty_factor = [](int, const Interval& iv) { return std::exp2(-nearest_to_origin(iv)); };
  w.gamma = [](std::uint32_t, std::span<const Interval> J) {
    double g = 1.0;
    for (const auto& iv : J) g *= std::exp2(-nearest_to_origin(iv));
    return g;
  };
  w.validate();
  return w;
}

double net_error_term(double alpha, int u_size, int j_sum_u, int excess, unsigned b) {
  const double c = power(b - 1.0, (alpha - 0.5) * u_size) * power(b, 0.5 * u_size) * power(b, 0.5 - alpha) *
                   power(b, (alpha + 0.5) * j_sum_u);
  return c * power(b, -alpha * excess) * binomial(excess + u_size, u_size - 1);
}

namespace {

constexpr int kMaxSeriesTerms = 1 << 16;

// sum over the ambient partition of coordinate i of b^{j/2} empty_factor.
double ambient_series(const PartitionScheme& scheme, int i, const WeightModel& model, unsigned b) {
  const auto& p = scheme.coordinates[static_cast<std::size_t>(i)];
  auto term = [&](const Interval& iv) { return power(b, 0.5 * iv.cell->j) * model.empty_factor(i, iv); };
  if (!scheme.ambient) {
    double sum = 0.0;
    for (const auto& iv : p.intervals()) sum += term(iv);
    return sum;
  }
  // Terms come in +/- pairs; stop once a pair is negligible and bound the
  // rest by the geometric continuation of the last pair ratio.
  double sum = 0.0;
  double prev_pair = -1.0;
  double pair = 0.0;
  for (int d = 1; d <= kMaxSeriesTerms; ++d) {
    const double v = term(badic_interval(b, scheme.ambient(d), 0));
    if (!std::isfinite(v)) throw std::domain_error("truncation series has a non-finite term");
    sum += v;
    pair += v;
    if (d % 2 == 0) {
      if (d > static_cast<int>(p.size()) && prev_pair > 0.0 && pair <= 1e-17 * sum) {
        const double ratio = pair / prev_pair;
        if (ratio >= 1.0) break;
        return sum + pair * ratio / (1.0 - ratio);
      }
      if (d > static_cast<int>(p.size()) && pair == 0.0) return sum;
      prev_pair = pair;
      pair = 0.0;
    }
  }
  throw std::domain_error("truncation sum over the ambient partition does not converge under this weight model");
}

}  // namespace

WceBound wce_bound_construction(const PartitionScheme& scheme, int t, const WeightModel& model) {
  model.validate();
  if (!model.empty_factor) {
    throw std::invalid_argument("wce_bound_construction: weight model needs a per-coordinate empty-set factor");
  }
  const int s = scheme.dimension();
  if (s < 1 || s > 31) throw std::invalid_argument("wce_bound_construction: unsupported dimension");
  for (const auto& p : scheme.coordinates) {
    if (!p.all_badic()) throw std::invalid_argument("wce_bound_construction: scheme intervals must be b-adic");
  }
  const unsigned b = scheme.coordinates.front().base();
  const int m = scheme.coordinates.front().m();
  if (t < 0 || t > m) throw std::invalid_argument("wce_bound_construction: t outside [0, m]");
  const double alpha = model.alpha;

  WceBound out;
  double f_product_sum = 0.0;
  std::vector<Interval> J(static_cast<std::size_t>(s));
  std::vector<int> j(static_cast<std::size_t>(s));
  const std::uint32_t full = (std::uint32_t{1} << s) - 1;
  std::vector<double> u_sums(full + 1, 0.0);

  auto visit = [&](int m_d) {
    ++out.f_size;
    double g = 1.0;
    for (int i = 0; i < s; ++i) {
      g *= power(b, 0.5 * j[static_cast<std::size_t>(i)]) * model.empty_factor(i, J[static_cast<std::size_t>(i)]);
    }
    f_product_sum += g;
    for (std::uint32_t u = 1; u <= full; ++u) {
      int j_sum_u = 0;
      for (int i = 0; i < s; ++i) {
        if (u >> i & 1u) j_sum_u += j[static_cast<std::size_t>(i)];
      }
      u_sums[u] += model.gamma_u(u, J) *
                   net_error_term(alpha, std::popcount(u), j_sum_u, m_d - t, b);
    }
  };
  auto rec = [&](auto&& self, int i, int budget) -> void {
    if (i == s) {
      visit(t + budget);
      return;
    }
    const auto& p = scheme.coordinates[static_cast<std::size_t>(i)];
    for (std::size_t d = 0; d < p.size(); ++d) {
      const auto& iv = p.interval(d);
      const int cost = m - iv.points_exponent;
      if (cost > budget) continue;
      J[static_cast<std::size_t>(i)] = iv;
      j[static_cast<std::size_t>(i)] = iv.cell->j;
      self(self, i + 1, budget - cost);
    }
  };
  rec(rec, 0, m - t);
  for (std::uint32_t u = 1; u <= full; ++u) out.net += u_sums[u];

  double all = 1.0;
  for (int i = 0; i < s; ++i) all *= ambient_series(scheme, i, model, b);
  out.truncation = std::max(0.0, all - f_product_sum);
  return out;
}

WceBound wce_bound_construction(const PartitionScheme& scheme, const DigitalNet& net, const WeightModel& model) {
  if (scheme.dimension() != net.dimension() || scheme.coordinates.front().m() != net.m() ||
      scheme.coordinates.front().base() != net.base()) {
    throw std::invalid_argument("wce_bound_construction: scheme does not match the net");
  }
  return wce_bound_construction(scheme, net.t(), model);
}

double bound_unit_cube(int m, int t, int s, double alpha, unsigned b) {
  if (s < 1 || s > 31 || t < 0 || t > m) throw std::invalid_argument("bound_unit_cube: bad arguments");
  const std::uint32_t full = (std::uint32_t{1} << s) - 1;
  double sum = 0.0;
  for (std::uint32_t u = 1; u <= full; ++u) sum += net_error_term(alpha, std::popcount(u), 0, m - t, b);
  return sum;
}

double bound_rational(int m, int t, int s, double alpha, bool derivation_constant) {
  if (s < 2 || m <= t + 3 * s) {
    throw std::invalid_argument("bound_rational: requires s >= 2 and m > t + 3s (got m=" + std::to_string(m) +
                                ", t=" + std::to_string(t) + ", s=" + std::to_string(s) + ")");
  }
  const double c = derivation_constant ? 0.5 : 1.5;
  const double binom = binomial(m - t - 2 * s, s);
  return std::exp2(-alpha * (m - t)) * binom * binom * std::exp2(s * (3.0 * alpha + 2.0)) *
         (std::exp2(-alpha) + 2.0 * std::pow(1.0 + std::exp2(c), s));
}

double bound_exponential(int m, int t, int s, double alpha) {
  if (s < 2 || m <= t + 2 * s) {
    throw std::invalid_argument("bound_exponential: requires s >= 2 and m > t + 2s (got m=" + std::to_string(m) +
                                ", t=" + std::to_string(t) + ", s=" + std::to_string(s) + ")");
  }
  const double binom = binomial(m - t - s, s);
  return std::exp2(3.0 * s - 1.0) * std::exp2(-(m - t)) * binomial(m - t, s - 1) +
         std::exp2(s * (2.0 * alpha + 1.0)) * std::exp2(-alpha * (m - t)) * binom * binom;
}

double sigma_bound(std::span<const int> j, std::span<const int> r, const WeightModel& model,
                   std::span<const Interval> J, unsigned b) {
  if (j.size() != r.size() || J.size() != j.size()) throw std::invalid_argument("sigma_bound: dimension mismatch");
  std::uint32_t u = 0;
  int u_size = 0;
  int j_in = 0;
  int j_out = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] != 0) {
      u |= std::uint32_t{1} << i;
      ++u_size;
      j_in += j[i];
    } else {
      j_out += j[i];
    }
  }
  const double second = power(b, u_size) * power(2.0, u_size) * model.gamma_empty(J);
  if (u == 0) return second;
  const double alpha = model.alpha;
  const double first = power(b - 1.0, (alpha - 0.5) * u_size) * power(b, -alpha * l1(r)) * power(b, alpha * j_in) *
                       power(b, -0.5 * j_out) * model.gamma_u(u, J);
  return std::min(first, second);
}

}  // namespace rsqmc
