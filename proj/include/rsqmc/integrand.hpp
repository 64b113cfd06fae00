#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "rsqmc/digital_net.hpp"
#include "rsqmc/mapping.hpp"
#include "rsqmc/walsh.hpp"

namespace rsqmc {

enum class IntegrandDomain { real_space, unit_cube };

struct Integrand {
  std::string name;
  int dimension = 1;
  ScalarField eval;
  std::optional<double> exact;
  IntegrandDomain domain = IntegrandDomain::real_space;
  /// f(x) / prod_i exp(-pi x_i^2), used by the inverse-CDF baseline. When
  /// unset the baseline divides by the density itself.
  ScalarField over_gaussian_density;
};

/// exp(2 sqrt(pi) sum x_i) exp(-pi sum x_i^2) on R^s, integral e^s.
Integrand gaussian_exponential(int s);
Integrand constant_one(int s);
/// prod_i exp(-pi x_i^2), integral 1.
Integrand product_gaussian(int s);
/// prod_i (pi/2) sin(pi x_i) on [0,1]^s, integral 1.
Integrand unit_cube_smooth(int s);

std::vector<std::string> integrand_names();
Integrand make_integrand(const std::string& name, int s);

/// sum_n lambda_n f(x_n) in index order with compensated summation.
double integrate(const Integrand& f, const MappedPointSet& ps);

/// (1/N) sum_n g(x_n) with x_{n,i} = erfinv(2 u_{n,i} - 1) / sqrt(pi) and g
/// = f / Gaussian density, u_n the classical net points. Points with a zero
/// coordinate map to -infinity and contribute 0.
double baseline_invcdf(const Integrand& f, const DigitalNet& net);

/// Neumaier's compensated running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      carry_ += (sum_ - t) + v;
    } else {
      carry_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace rsqmc
