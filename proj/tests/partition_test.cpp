#include <doctest.h>

#include <algorithm>
#include <stdexcept>

#include <cmath>

#include "rsqmc/partition.hpp"

using namespace rsqmc;

namespace {

// erf^{-1} by bisection on std::erf, used as an independent reference.
double erfinv_bisect(double y) {
  double lo = -7.0;
  double hi = 7.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (std::erf(mid) < y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("erfinv against bisection") {
  for (int q = -999; q <= 999; ++q) {
    const double y = q / 1000.0;
    CHECK(std::abs(erfinv(y) - erfinv_bisect(y)) < 1e-12);
  }
  for (int l = 1; l <= 40; ++l) {
    const double y = 1.0 - std::ldexp(1.0, -l);
    const double x = erfinv(y);
    // Relative check through erfc, which resolves the tail.
    CHECK(std::abs(std::erfc(x) - std::ldexp(1.0, -l)) <= 1e-12 * std::ldexp(1.0, -l));
    CHECK(erfinv(-y) == -x);
  }
  CHECK(erfinv(0.0) == 0.0);
  CHECK_THROWS_AS(erfinv(1.0), std::invalid_argument);
  CHECK_THROWS_AS(erfinv(-1.5), std::invalid_argument);
  CHECK_THROWS_AS(erfinv(std::nan("")), std::invalid_argument);
}

TEST_CASE("geometric schedule") {
  CHECK(geometric_schedule(3) == std::vector<int>{1, 1, 1, 1});
  CHECK(geometric_schedule(5) == std::vector<int>{3, 3, 2, 2, 1, 1, 1, 1});
  for (int m = 3; m <= 30; ++m) {
    std::uint64_t total = 0;
    for (int e : geometric_schedule(m)) total += std::uint64_t{1} << e;
    CHECK(total == std::uint64_t{1} << m);
  }
  CHECK_THROWS_AS(geometric_schedule(2), std::invalid_argument);
}

TEST_CASE("ambient cell enumerations") {
  CHECK(dyadic_cell(1) == BadicCell{0, 0});
  CHECK(dyadic_cell(2) == BadicCell{0, -1});
  CHECK(dyadic_cell(3) == BadicCell{0, 1});
  CHECK(dyadic_cell(4) == BadicCell{0, -2});
  CHECK(dyadic_cell(5) == BadicCell{1, 1});
  CHECK(dyadic_cell(6) == BadicCell{1, -2});
  CHECK(dyadic_cell(7) == BadicCell{2, 1});
  CHECK(unit_cell(1) == BadicCell{0, 0});
  CHECK(unit_cell(2) == BadicCell{0, -1});
  CHECK(unit_cell(5) == BadicCell{0, 2});
  // The dyadic cells tile [-2^k, 2^k) without gaps.
  double covered = 0.0;
  for (int d = 1; d <= 2 * 6 + 2; ++d) covered += badic_interval(2, dyadic_cell(d), 0).length();
  CHECK(covered == 2.0 * 64.0);
}

TEST_CASE("labels fill blocks largest first") {
  const Partition1D p(2, 3,
                      {badic_interval(2, {0, -1}, 1), badic_interval(2, {0, 0}, 2), badic_interval(2, {1, 1}, 1)});
  CHECK(p.label_order() == std::vector<std::size_t>{1, 0, 2});
  CHECK(p.block_start(1) == 0);
  CHECK(p.block_start(0) == 4);
  CHECK(p.block_start(2) == 6);
  const auto z = p.labels();
  const double expected[] = {0.0, 0.25, 0.5, 0.75, -1.0, -0.5, 2.0, 3.0};
  for (int e = 0; e < 8; ++e) CHECK(z[e] == expected[e]);
  CHECK(p.interval_of_label(5) == 0);
  CHECK(p.point(7) == 3.0);
  CHECK(p.all_badic());
}

TEST_CASE("partition validation") {
  CHECK_THROWS_AS(Partition1D(2, 2, {badic_interval(2, {0, 0}, 1)}), std::invalid_argument);
  CHECK_THROWS_AS(Partition1D(2, 1, {badic_interval(2, {1, 0}, 0), badic_interval(2, {0, 1}, 0)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(Partition1D(2, 1, {Interval{0.0, 0.0, 1, std::nullopt}}), std::invalid_argument);
  Interval wrong = badic_interval(2, {0, 0}, 1);
  wrong.hi = 2.0;
  CHECK_THROWS_AS(Partition1D(2, 1, {wrong}), std::invalid_argument);
  CHECK_NOTHROW(Partition1D(3, 1, {badic_interval(3, {0, 0}, 0), badic_interval(3, {0, 1}, 0),
                                   badic_interval(3, {0, 2}, 0)}));
}

TEST_CASE("erfinv partition is symmetric and nested") {
  const int m = 10;
  const auto p = erfinv_partition(m, 6.0);
  REQUIRE(p.size() == 2 * (m - 1));
  CHECK_FALSE(p.all_badic());
  for (std::size_t l = 0; l + 1 < p.size(); l += 2) {
    CHECK(p.interval(l).lo == -p.interval(l + 1).hi);
    CHECK(p.interval(l).hi == -p.interval(l + 1).lo);
  }
  CHECK(p.interval(0).lo == 0.0);
  CHECK(p.interval(0).hi == doctest::Approx(erfinv_bisect(0.5) * 6.0).epsilon(1e-12));
  // Points never leave their interval.
  const auto z = p.labels();
  for (std::uint64_t e = 0; e < p.size(); ++e) {
    const auto& iv = p.interval(p.interval_of_label(e));
    CHECK(z[static_cast<Eigen::Index>(e)] >= iv.lo);
    CHECK(z[static_cast<Eigen::Index>(e)] < iv.hi);
  }
  CHECK_THROWS_AS(erfinv_partition(m, 0.0), std::invalid_argument);
}

TEST_CASE("schemes") {
  const auto dy = make_scheme(SchemeKind::dyadic, 2, 6);
  CHECK(dy.dimension() == 2);
  CHECK(dy.coordinates[0].size() == 10);
  CHECK(dy.coordinates[0].all_badic());
  CHECK(dy.ambient(5) == BadicCell{1, 1});
  CHECK(make_scheme(SchemeKind::unit, 3, 6).coordinates[2].interval(9).lo == -5.0);
  CHECK(make_scheme(SchemeKind::trivial, 2, 4, 3).coordinates[0].size() == 1);
  CHECK_THROWS_AS(make_scheme(SchemeKind::dyadic, 2, 6, 3), std::invalid_argument);
  CHECK_THROWS_AS(make_scheme(SchemeKind::custom, 2, 6), std::invalid_argument);
  CHECK(parse_scheme_kind(to_string(SchemeKind::erfinv)) == SchemeKind::erfinv);
  CHECK_THROWS(parse_scheme_kind("gaussian"));

  const auto custom = make_custom_scheme(2, 2, 2, {{{0, 0}, 1}, {{-1, 2}, 0}, {{-1, 3}, 0}});
  CHECK(custom.coordinates[1].interval(2).lo == 1.5);
  CHECK_THROWS_AS(make_custom_scheme(2, 2, 2, {{{0, 0}, 1}, {{0, 0}, 1}}), std::invalid_argument);
}
