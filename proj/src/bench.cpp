#include "rsqmc/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "rsqmc/error_bounds.hpp"
#include "rsqmc/integrand.hpp"
#include "rsqmc/mapping.hpp"

namespace rsqmc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format_x(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void validate_size(const RunConfig& cfg, int m) {
  require(m >= 1 && m <= kMaxSobolExponent, "m must lie in 1..32, got " + std::to_string(m));
  const bool needs_schedule =
      cfg.scheme == SchemeKind::erfinv || cfg.scheme == SchemeKind::dyadic || cfg.scheme == SchemeKind::unit;
  require(!needs_schedule || m >= 3, "the " + to_string(cfg.scheme) + " scheme needs m >= 3");
}

}  // namespace

std::vector<std::pair<BadicCell, int>> parse_custom_intervals(const std::string& text) {
  std::vector<std::pair<BadicCell, int>> out;
  std::stringstream items(text);
  std::string item;
  while (std::getline(items, item, ',')) {
    if (item.empty()) continue;
    BadicCell cell;
    long long l = 0;
    int m_d = 0;
    char tail = 0;
    if (std::sscanf(item.c_str(), " %d : %lld : %d %c", &cell.j, &l, &m_d, &tail) != 3) {
      throw ConfigError("custom interval '" + item + "' is not of the form j:l:m_d");
    }
    cell.l = l;
    out.emplace_back(cell, m_d);
  }
  if (out.empty()) throw ConfigError("custom scheme needs at least one interval");
  return out;
}

DirectionNumbers load_direction_numbers(const RunConfig& cfg) {
  if (cfg.direction_numbers_path.empty()) return DirectionNumbers::embedded();
  try {
    return DirectionNumbers::load(cfg.direction_numbers_path);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("direction numbers: ") + e.what());
  }
}

void validate(const RunConfig& cfg) {
  require(is_prime(cfg.base), "base must be prime");
  require(cfg.base == 2, "only base-2 (Sobol) nets are bundled");
  const auto numbers = load_direction_numbers(cfg);
  require(cfg.s >= 1 && cfg.s <= numbers.max_dimension(),
          "s must lie in 1.." + std::to_string(numbers.max_dimension()));
  require(!cfg.X.empty(), "X needs at least one value");
  for (double x : cfg.X) require(std::isfinite(x) && x > 0.0, "X values must be positive");
  const auto names = integrand_names();
  require(std::find(names.begin(), names.end(), cfg.integrand) != names.end(),
          "unknown integrand '" + cfg.integrand + "'");
  require(cfg.alpha > 0.5 && cfg.alpha <= 1.0, "alpha must lie in (1/2, 1]");
  require(cfg.scheme != SchemeKind::custom || !cfg.custom_intervals.empty(),
          "custom scheme needs custom_intervals");
  validate_size(cfg, cfg.m);
  if (cfg.t) require(*cfg.t >= 0 && *cfg.t <= cfg.m, "t must lie in 0..m");
}

void validate_bench(const RunConfig& cfg) {
  RunConfig probe = cfg;
  probe.m = cfg.m_min;
  validate(probe);
  require(cfg.m_min <= cfg.m_max, "m_min must not exceed m_max");
  require(cfg.m_max <= 24, "m_max above 24 is not supported by bench");
  validate_size(cfg, cfg.m_max);
  require(make_integrand(cfg.integrand, cfg.s).exact.has_value(),
          "bench needs an integrand with a known exact value");
}

PartitionScheme build_scheme(const RunConfig& cfg, int m, double X) {
  try {
    if (cfg.scheme == SchemeKind::custom) return make_custom_scheme(cfg.s, m, cfg.base, cfg.custom_intervals);
    return make_scheme(cfg.scheme, cfg.s, m, cfg.base, X);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

const BenchRow& BenchTable::find(int m_value, const std::string& method, double X_value) const {
  for (const auto& r : rows) {
    if (r.m == m_value && r.method == method && (method != "rs" || r.X == X_value)) return r;
  }
  throw std::out_of_range("BenchTable::find: no such row");
}

BenchTable bench(const RunConfig& cfg) {
  validate_bench(cfg);
  const auto numbers = load_direction_numbers(cfg);
  const auto f = make_integrand(cfg.integrand, cfg.s);
  const double exact = *f.exact;
  BenchTable table;
  table.X = cfg.X;
  for (int m = cfg.m_min; m <= cfg.m_max; ++m) {
    table.m.push_back(m);
    const auto net = DigitalNet::sobol(cfg.s, m, numbers);
    for (double X : cfg.X) {
      const auto start = Clock::now();
      const auto scheme = build_scheme(cfg, m, X);
      const auto ps = map_net(net, scheme);
      const double q = integrate(f, ps);
      table.rows.push_back(BenchRow{m, X, "rs", std::abs(q - exact), seconds_since(start)});
    }
    const auto start = Clock::now();
    const double q = baseline_invcdf(f, net);
    table.rows.push_back(BenchRow{m, std::numeric_limits<double>::quiet_NaN(), "invcom", std::abs(q - exact),
                                  seconds_since(start)});
  }
  return table;
}

void write_csv(std::ostream& out, const BenchTable& table) {
  out << "m";
  for (double x : table.X) out << ",e_rs_X" << format_x(x);
  out << ",e_invcom";
  for (double x : table.X) out << ",t_rs_X" << format_x(x);
  out << ",t_invcom\n";
  char buf[64];
  for (int m : table.m) {
    out << m;
    for (double x : table.X) {
      std::snprintf(buf, sizeof buf, ",%.6f", table.find(m, "rs", x).error);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, ",%.6f", table.find(m, "invcom").error);
    out << buf;
    for (double x : table.X) {
      std::snprintf(buf, sizeof buf, ",%.3f", table.find(m, "rs", x).seconds);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, ",%.3f\n", table.find(m, "invcom").seconds);
    out << buf;
  }
}

VerifyReport verify(const RunConfig& cfg) {
  validate(cfg);
  if (cfg.m > 20) throw ConfigError("verify supports m up to 20");
  const auto numbers = load_direction_numbers(cfg);
  const auto net = DigitalNet::sobol(cfg.s, cfg.m, numbers);
  const auto scheme = build_scheme(cfg, cfg.m, cfg.X.front());
  const auto ps = map_net(net, scheme);
  nlohmann::json j;
  bool pass = true;

  j["config"] = {{"base", cfg.base}, {"m", cfg.m}, {"s", cfg.s}, {"scheme", to_string(cfg.scheme)},
                 {"X", cfg.X.front()}};

  const bool net_ok = net.m() > kCertifyMaxExponent || verify_tms_net(net, net.t());
  j["net"] = {{"t", net.t()}, {"t_certified", net.t_certified()}, {"tms_check", net_ok}};
  pass = pass && net_ok;

  const auto report = verify_subcube_nets(ps);
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& e : report.entries) {
    if (e.status == SubcubeStatus::failed) failures.push_back({{"d", e.d}, {"m_d", e.m_d}, {"detail", e.detail}});
  }
  j["subcubes"] = {{"passed", report.passed},         {"count_only", report.count_only},
                   {"failed", report.failed},         {"unverified", report.unverified},
                   {"sparse_flagged", report.sparse}, {"failures", failures}};
  pass = pass && report.ok();

  // Each coordinate must reproduce the full label list when C_i is nonsingular.
  bool projections_ok = true;
  for (int i = 0; i < cfg.s; ++i) {
    if (rank(net.matrix(i)) != static_cast<std::size_t>(net.m())) continue;
    std::vector<std::uint32_t> labels(ps.labels().col(i).begin(), ps.labels().col(i).end());
    std::sort(labels.begin(), labels.end());
    for (std::size_t n = 0; n < labels.size(); ++n) projections_ok = projections_ok && labels[n] == n;
  }
  j["projections"] = projections_ok;
  pass = pass && projections_ok;

  const double weight_total = ps.weights().sum();
  const double covered = ps.covered_volume();
  const bool weights_ok = std::abs(weight_total - covered) <= 1e-12 * std::max(1.0, covered);
  j["weights"] = {{"sum", weight_total}, {"covered_volume", covered}, {"ok", weights_ok}};
  pass = pass && weights_ok;

  const bool badic = std::all_of(scheme.coordinates.begin(), scheme.coordinates.end(),
                                 [](const Partition1D& p) { return p.all_badic(); });
  if (badic) {
    double worst = 0.0;
    std::size_t checked = 0;
    for (const auto& c : ps.subcubes()) {
      if (c.count > (1u << 12)) continue;
      const std::vector<int> zero(static_cast<std::size_t>(cfg.s), 0);
      worst = std::max(worst, delta_bruteforce(ps, c.d, zero));
      ++checked;
      if (c.m_d - net.t() >= 1) {
        for (int i = 0; i < cfg.s; ++i) {
          std::vector<int> r(static_cast<std::size_t>(cfg.s), 0);
          r[static_cast<std::size_t>(i)] = 1;
          worst = std::max(worst, delta_bruteforce(ps, c.d, r));
          ++checked;
        }
      }
    }
    const bool delta_ok = worst <= 1e-12;
    j["delta"] = {{"checked", checked}, {"max_abs", worst}, {"ok", delta_ok}};
    pass = pass && delta_ok;
  } else {
    j["delta"] = {{"checked", 0}, {"skipped", "scheme is not b-adic"}};
  }

  j["pass"] = pass;
  return VerifyReport{pass, j.dump(2)};
}

std::string bound_report(const RunConfig& cfg) {
  validate(cfg);
  const auto numbers = load_direction_numbers(cfg);
  int t = 0;
  if (cfg.t) {
    t = *cfg.t;
  } else {
    t = DigitalNet::sobol(cfg.s, cfg.m, numbers).t();
  }
  std::ostringstream out;
  char buf[128];
  auto line = [&](const std::string& name, double value) {
    std::snprintf(buf, sizeof buf, "%.10g", value);
    out << name << ' ' << buf << '\n';
  };
  auto unavailable = [&](const std::string& name, const std::string& why) { out << name << " n/a (" << why << ")\n"; };

  out << "m " << cfg.m << "\ns " << cfg.s << "\nt " << t << "\nalpha " << cfg.alpha << '\n';
  line("unit_cube", bound_unit_cube(cfg.m, t, cfg.s, cfg.alpha, 2));
  try {
    line("rational", bound_rational(cfg.m, t, cfg.s, cfg.alpha));
    line("rational_derivation_constant", bound_rational(cfg.m, t, cfg.s, cfg.alpha, true));
  } catch (const std::invalid_argument& e) {
    unavailable("rational", e.what());
  }
  try {
    line("exponential", bound_exponential(cfg.m, t, cfg.s, cfg.alpha));
  } catch (const std::invalid_argument& e) {
    unavailable("exponential", e.what());
  }
  if (cfg.m >= 3) {
    const auto dyadic = wce_bound_construction(make_scheme(SchemeKind::dyadic, cfg.s, cfg.m), t,
                                               WeightModel::rational(cfg.alpha));
    line("construction_rational_truncation", dyadic.truncation);
    line("construction_rational_net", dyadic.net);
    line("construction_rational", dyadic.total());
    const auto unit = wce_bound_construction(make_scheme(SchemeKind::unit, cfg.s, cfg.m), t,
                                             WeightModel::exponential(cfg.alpha));
    line("construction_exponential_truncation", unit.truncation);
    line("construction_exponential_net", unit.net);
    line("construction_exponential", unit.total());
  }
  return out.str();
}

}  // namespace rsqmc
