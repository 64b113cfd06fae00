#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rsqmc/digital_net.hpp"

namespace rsqmc {

namespace {

// Same content as data/new-joe-kuo-10.txt.
constexpr const char* kEmbedded =
    "d       s       a       m_i\n"
    "2       1       0       1\n"
    "3       2       1       1 3\n"
    "4       3       1       1 3 1\n"
    "5       3       2       1 1 1\n"
    "6       4       1       1 1 3 3\n"
    "7       4       4       1 3 5 13\n"
    "8       5       2       1 1 5 5 17\n"
    "9       5       4       1 1 5 5 5\n"
    "10      5       7       1 1 7 11 19\n";

}  // namespace

DirectionNumbers DirectionNumbers::parse(std::istream& in) {
  DirectionNumbers out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    Entry e{};
    if (!(fields >> e.dimension)) continue;  // header or blank line
    if (!(fields >> e.degree >> e.coefficients) || e.degree < 1 || e.degree > 31) {
      throw std::invalid_argument("direction numbers: malformed line " + std::to_string(line_no));
    }
    for (int k = 1; k <= e.degree; ++k) {
      std::uint32_t v = 0;
      if (!(fields >> v)) {
        throw std::invalid_argument("direction numbers: too few m_i on line " + std::to_string(line_no));
      }
      // m_k must be odd and below 2^k.
      if ((v & 1u) == 0 || v >= (std::uint32_t{1} << k)) {
        throw std::invalid_argument("direction numbers: invalid m_i on line " + std::to_string(line_no));
      }
      e.initial.push_back(v);
    }
    if (e.dimension != out.max_dimension() + 1) {
      throw std::invalid_argument("direction numbers: dimensions must start at 2 and be consecutive");
    }
    out.entries.push_back(std::move(e));
  }
  return out;
}

DirectionNumbers DirectionNumbers::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("direction numbers: cannot open " + path);
  return parse(in);
}

const DirectionNumbers& DirectionNumbers::embedded() {
  static const DirectionNumbers numbers = [] {
    std::istringstream in(kEmbedded);
    return parse(in);
  }();
  return numbers;
}

}  // namespace rsqmc
