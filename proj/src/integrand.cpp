#include "rsqmc/integrand.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rsqmc/partition.hpp"

namespace rsqmc {

namespace {

const double kSqrtPi = std::sqrt(std::numbers::pi);

void check_dimension(int s) {
  if (s < 1) throw std::invalid_argument("integrand dimension must be positive");
}

}  // namespace

Integrand gaussian_exponential(int s) {
  check_dimension(s);
  Integrand f;
  f.name = "gaussian_exponential";
  f.dimension = s;
  f.eval = [](const Eigen::Ref<const Eigen::VectorXd>& x) {
    return std::exp(2.0 * kSqrtPi * x.sum() - std::numbers::pi * x.squaredNorm());
  };
  f.over_gaussian_density = [](const Eigen::Ref<const Eigen::VectorXd>& x) { return std::exp(2.0 * kSqrtPi * x.sum()); };
  f.exact = std::exp(static_cast<double>(s));
  return f;
}

Integrand constant_one(int s) {
  check_dimension(s);
  Integrand f;
  f.name = "constant_one";
  f.dimension = s;
  f.eval = [](const Eigen::Ref<const Eigen::VectorXd>&) { return 1.0; };
  return f;
}

Integrand product_gaussian(int s) {
  check_dimension(s);
  Integrand f;
  f.name = "product_gaussian";
  f.dimension = s;
  f.eval = [](const Eigen::Ref<const Eigen::VectorXd>& x) { return std::exp(-std::numbers::pi * x.squaredNorm()); };
  f.over_gaussian_density = [](const Eigen::Ref<const Eigen::VectorXd>&) { return 1.0; };
  f.exact = 1.0;
  return f;
}

Integrand unit_cube_smooth(int s) {
  check_dimension(s);
  Integrand f;
  f.name = "unit_cube_smooth";
  f.dimension = s;
  f.domain = IntegrandDomain::unit_cube;
  f.eval = [](const Eigen::Ref<const Eigen::VectorXd>& x) {
    double v = 1.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (x[i] < 0.0 || x[i] > 1.0) return 0.0;
      v *= 0.5 * std::numbers::pi * std::sin(std::numbers::pi * x[i]);
    }
    return v;
  };
  f.exact = 1.0;
  return f;
}

std::vector<std::string> integrand_names() {
  return {"gaussian_exponential", "constant_one", "product_gaussian", "unit_cube_smooth"};
}

Integrand make_integrand(const std::string& name, int s) {
  if (name == "gaussian_exponential") return gaussian_exponential(s);
  if (name == "constant_one") return constant_one(s);
  if (name == "product_gaussian") return product_gaussian(s);
  if (name == "unit_cube_smooth") return unit_cube_smooth(s);
  throw std::invalid_argument("unknown integrand '" + name + "'");
}

double integrate(const Integrand& f, const MappedPointSet& ps) {
  if (ps.dimension() != f.dimension) throw std::invalid_argument("integrate: dimension mismatch");
  CompensatedSum sum;
  const auto& x = ps.points();
  const auto& w = ps.weights();
  for (Eigen::Index n = 0; n < x.rows(); ++n) sum.add(w[n] * f.eval(x.row(n).transpose()));
  return sum.value();
}

double baseline_invcdf(const Integrand& f, const DigitalNet& net) {
  if (net.dimension() != f.dimension) throw std::invalid_argument("baseline_invcdf: dimension mismatch");
  const int s = net.dimension();
  const double scale = 1.0 / static_cast<double>(net.size());
  Eigen::VectorXd x(s);
  CompensatedSum sum;
  for (std::uint64_t n = 0; n < net.size(); ++n) {
    bool at_infinity = false;
    for (int i = 0; i < s; ++i) {
      const std::uint64_t label = net.label(n, i);
      if (label == 0) {
        at_infinity = true;
        break;
      }
      x[i] = erfinv(2.0 * static_cast<double>(label) * scale - 1.0) / kSqrtPi;
    }
    if (at_infinity) continue;
    const double g = f.over_gaussian_density ? f.over_gaussian_density(x)
                                             : f.eval(x) * std::exp(std::numbers::pi * x.squaredNorm());
    if (std::isfinite(g)) sum.add(g);
  }
  return sum.value() * scale;
}

}  // namespace rsqmc
