#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <map>
#include <sstream>
#include <stdexcept>

#include "rsqmc/mapping.hpp"

using namespace rsqmc;

namespace {

// Counts points of one subcube in every elementary box of volume
// b^{t - m_d} after rescaling the subcube to [0,1)^s, using only the point
// coordinates and interval endpoints.
bool subcube_is_net(const MappedPointSet& ps, const Subcube& c, int t) {
  const int s = ps.dimension();
  const int k = c.m_d - t;
  bool ok = true;
  for_each_composition(s, k, k, [&](const std::vector<int>& e) {
    std::map<std::vector<std::int64_t>, int> boxes;
    for (auto n : ps.members(ps.find(c.d).value())) {
      std::vector<std::int64_t> key(static_cast<std::size_t>(s));
      for (int i = 0; i < s; ++i) {
        const auto& iv = ps.scheme().coordinates[static_cast<std::size_t>(i)].interval(c.d[static_cast<std::size_t>(i)]);
        const double y = (ps.points()(n, i) - iv.lo) / iv.length();
        key[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::floor(std::ldexp(y, e[static_cast<std::size_t>(i)])));
      }
      ++boxes[key];
    }
    const auto expected_boxes = std::uint64_t{1} << k;
    if (boxes.size() != expected_boxes) ok = false;
    for (const auto& [key, count] : boxes) ok = ok && count == (1 << t);
    return ok;
  });
  return ok;
}

}  // namespace

TEST_CASE("trivial scheme gives the classical net") {
  const auto net = DigitalNet::sobol(3, 8);
  const auto ps = map_net(net, make_scheme(SchemeKind::trivial, 3, 8));
  REQUIRE(ps.size() == 256);
  REQUIRE(ps.subcubes().size() == 1);
  for (std::size_t n = 0; n < ps.size(); ++n) {
    CHECK(ps.points().row(static_cast<Eigen::Index>(n)).transpose() == net.point(n));
    CHECK(ps.weights()[static_cast<Eigen::Index>(n)] == 1.0 / 256.0);
  }
}

TEST_CASE("coordinate projections reproduce the label points") {
  for (auto kind : {SchemeKind::erfinv, SchemeKind::dyadic, SchemeKind::unit}) {
    const auto scheme = make_scheme(kind, 3, 9);
    const auto ps = map_net(DigitalNet::sobol(3, 9), scheme);
    for (int i = 0; i < 3; ++i) {
      std::vector<double> got(ps.points().col(i).begin(), ps.points().col(i).end());
      const auto z = scheme.coordinates[static_cast<std::size_t>(i)].labels();
      std::vector<double> expected(z.begin(), z.end());
      std::sort(got.begin(), got.end());
      std::sort(expected.begin(), expected.end());
      CHECK(got == expected);
    }
  }
}

TEST_CASE("points sit in their subcube and weights are local equal weights") {
  const auto scheme = make_scheme(SchemeKind::erfinv, 2, 10, 2, 6.0);
  const auto ps = map_net(DigitalNet::sobol(2, 10), scheme);
  double volume = 0.0;
  std::size_t members = 0;
  for (std::size_t q = 0; q < ps.subcubes().size(); ++q) {
    const auto& c = ps.subcubes()[q];
    volume += c.volume;
    CHECK(c.count == ps.members(q).size());
    CHECK(c.m_d == subcube_exponent(scheme, c.d));
    CHECK(ps.find(c.d) == q);
    for (auto n : ps.members(q)) {
      ++members;
      CHECK(ps.subcube_of(n) == q);
      CHECK(ps.weights()[n] == c.volume / static_cast<double>(c.count));
      for (int i = 0; i < 2; ++i) {
        const auto& iv = scheme.coordinates[static_cast<std::size_t>(i)].interval(c.d[static_cast<std::size_t>(i)]);
        CHECK(ps.points()(n, i) >= iv.lo);
        CHECK(ps.points()(n, i) < iv.hi);
      }
    }
  }
  CHECK(members == ps.size());
  CHECK(ps.covered_volume() == doctest::Approx(volume).epsilon(1e-14));
  CHECK(ps.weights().sum() == doctest::Approx(volume).epsilon(1e-12));
}

TEST_CASE("subcubes with enough points hold shifted nets") {
  for (auto kind : {SchemeKind::dyadic, SchemeKind::unit}) {
    for (int s : {2, 3}) {
      const int m = 10;
      const auto ps = map_net(DigitalNet::sobol(s, m), make_scheme(kind, s, m));
      const int t = ps.net().t();
      const auto report = verify_subcube_nets(ps);
      CHECK(report.ok());
      CHECK(report.passed > 0);
      for (const auto& c : ps.subcubes()) {
        if (c.m_d < t) continue;
        CHECK(c.count == (std::uint64_t{1} << c.m_d));
        CHECK(subcube_is_net(ps, c, t));
      }
      for (const auto& e : report.entries) {
        if (e.m_d < t) CHECK(e.status == SubcubeStatus::unverified);
        if (e.sparse) CHECK(e.count < (std::uint64_t{1} << t));
      }
    }
  }
}

TEST_CASE("base 3 custom scheme") {
  const auto pascal = GFMatrix::from_rows(3, {{1, 1, 1}, {0, 1, 2}, {0, 0, 1}});
  const DigitalNet net({GFMatrix::identity(3, 3), pascal}, 0);
  const auto scheme = make_custom_scheme(2, 3, 3, {{{0, 0}, 2}, {{0, 1}, 2}, {{0, -1}, 2}});
  const auto ps = map_net(net, scheme);
  CHECK(ps.subcubes().size() == 9);
  for (const auto& c : ps.subcubes()) CHECK(c.count == 3);
  const auto report = verify_subcube_nets(ps);
  CHECK(report.ok());
  CHECK(report.passed == 9);
}

TEST_CASE("point export round-trips") {
  const auto ps = map_net(DigitalNet::sobol(2, 6), make_scheme(SchemeKind::erfinv, 2, 6, 2, 12.0));
  std::ostringstream out;
  write_points(out, ps);
  std::istringstream in(out.str());
  std::string line;
  Eigen::Index n = 0;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string a, b, w;
    fields >> a >> b >> w;
    CHECK(std::strtod(a.c_str(), nullptr) == ps.points()(n, 0));
    CHECK(std::strtod(b.c_str(), nullptr) == ps.points()(n, 1));
    CHECK(std::strtod(w.c_str(), nullptr) == ps.weights()[n]);
    ++n;
  }
  CHECK(n == 64);
}

TEST_CASE("mapping preconditions") {
  const auto net = DigitalNet::sobol(2, 6);
  CHECK_THROWS_AS(map_net(net, make_scheme(SchemeKind::dyadic, 3, 6)), std::invalid_argument);
  CHECK_THROWS_AS(map_net(net, make_scheme(SchemeKind::dyadic, 2, 7)), std::invalid_argument);
}
