#pragma once

#include <iosfwd>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rsqmc/digital_net.hpp"
#include "rsqmc/partition.hpp"

namespace rsqmc {

/// Bad user input (exit code 2 in the CLI).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  unsigned base = 2;
  int m_min = 13;
  int m_max = 22;
  int m = 10;  // single-size commands
  int s = 3;
  std::vector<double> X{6.0, 12.0};
  SchemeKind scheme = SchemeKind::erfinv;
  std::string direction_numbers_path;
  std::string integrand = "gaussian_exponential";
  std::string output;
  std::vector<std::pair<BadicCell, int>> custom_intervals;
  double alpha = 1.0;
  std::optional<int> t;
};

/// "j:l:m_d,j:l:m_d,..."
std::vector<std::pair<BadicCell, int>> parse_custom_intervals(const std::string& text);

/// Checks shared by every command; bench additionally needs a valid m range.
void validate(const RunConfig& cfg);
void validate_bench(const RunConfig& cfg);

DirectionNumbers load_direction_numbers(const RunConfig& cfg);
PartitionScheme build_scheme(const RunConfig& cfg, int m, double X);

struct BenchRow {
  int m = 0;
  double X = std::numeric_limits<double>::quiet_NaN();  // NaN for the baseline
  std::string method;                                   // "rs" or "invcom"
  double error = 0.0;
  double seconds = 0.0;
};

struct BenchTable {
  std::vector<double> X;
  std::vector<int> m;
  std::vector<BenchRow> rows;

  const BenchRow& find(int m_value, const std::string& method, double X_value = 0.0) const;
};

/// Proposed method for each m and X against the inverse-CDF baseline on the
/// same Sobol net. Timings cover point construction and evaluation.
BenchTable bench(const RunConfig& cfg);

/// m, e_rs_X..., e_invcom, t_rs_X..., t_invcom; errors %.6f, times %.3f.
void write_csv(std::ostream& out, const BenchTable& table);

struct VerifyReport {
  bool pass = false;
  std::string json;
};

/// Structural checks at size cfg.m: net quality, nets in subcubes,
/// projections, weight totals and the vanishing delta identities.
VerifyReport verify(const RunConfig& cfg);

/// Closed-form bounds at size cfg.m, one "name value" line each.
std::string bound_report(const RunConfig& cfg);

}  // namespace rsqmc
