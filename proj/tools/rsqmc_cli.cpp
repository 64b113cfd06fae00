// rsqmc: point sets, integration, benchmark, bounds and structural checks.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "rsqmc/bench.hpp"
#include "rsqmc/integrand.hpp"
#include "rsqmc/mapping.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitVerification = 3;

struct Args {
  rsqmc::RunConfig cfg;
  std::string scheme = "erfinv";
  std::string custom_intervals;
  int t = -1;
};

rsqmc::RunConfig finish(const Args& args) {
  rsqmc::RunConfig cfg = args.cfg;
  try {
    cfg.scheme = rsqmc::parse_scheme_kind(args.scheme);
  } catch (const std::invalid_argument& e) {
    throw rsqmc::ConfigError(e.what());
  }
  if (!args.custom_intervals.empty()) cfg.custom_intervals = rsqmc::parse_custom_intervals(args.custom_intervals);
  if (args.t >= 0) cfg.t = args.t;
  return cfg;
}

// Writes to cfg.output when set, else stdout.
template <class Writer>
void emit(const rsqmc::RunConfig& cfg, Writer&& write) {
  if (cfg.output.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream file(cfg.output);
  if (!file) throw rsqmc::ConfigError("cannot open output file " + cfg.output);
  write(file);
}

rsqmc::MappedPointSet build_points(const rsqmc::RunConfig& cfg) {
  const auto numbers = rsqmc::load_direction_numbers(cfg);
  const auto net = rsqmc::DigitalNet::sobol(cfg.s, cfg.m, numbers);
  return rsqmc::map_net(net, rsqmc::build_scheme(cfg, cfg.m, cfg.X.front()));
}

int run_generate(const rsqmc::RunConfig& cfg) {
  rsqmc::validate(cfg);
  if (cfg.m > 24) throw rsqmc::ConfigError("generate supports m up to 24");
  const auto ps = build_points(cfg);
  emit(cfg, [&](std::ostream& out) { rsqmc::write_points(out, ps); });
  return 0;
}

int run_integrate(const rsqmc::RunConfig& cfg) {
  rsqmc::validate(cfg);
  if (cfg.m > 24) throw rsqmc::ConfigError("integrate supports m up to 24");
  const auto f = rsqmc::make_integrand(cfg.integrand, cfg.s);
  const auto start = std::chrono::steady_clock::now();
  const double q = rsqmc::integrate(f, build_points(cfg));
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  emit(cfg, [&](std::ostream& out) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "value %.17g\n", q);
    out << buf;
    if (f.exact) {
      std::snprintf(buf, sizeof buf, "exact %.17g\nerror %.6g\n", *f.exact, std::abs(q - *f.exact));
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "seconds %.3f\n", seconds);
    out << buf;
  });
  return 0;
}

int run_bench(const rsqmc::RunConfig& cfg) {
  const auto table = rsqmc::bench(cfg);
  emit(cfg, [&](std::ostream& out) { rsqmc::write_csv(out, table); });
  for (int m : table.m) {
    const double base = table.find(m, "invcom").seconds;
    for (double x : table.X) {
      const double rs = table.find(m, "rs", x).seconds;
      std::fprintf(stderr, "m=%d X=%g t(invcom)/t(Rs)=%.2f\n", m, x, rs > 0.0 ? base / rs : 0.0);
    }
  }
  return 0;
}

int run_bound(const rsqmc::RunConfig& cfg) {
  const auto text = rsqmc::bound_report(cfg);
  emit(cfg, [&](std::ostream& out) { out << text; });
  return 0;
}

int run_verify(const rsqmc::RunConfig& cfg) {
  const auto report = rsqmc::verify(cfg);
  emit(cfg, [&](std::ostream& out) { out << report.json << '\n'; });
  return report.pass ? 0 : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasi-Monte Carlo on R^s with net-mapped point sets"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Config file (TOML/INI keys mirror the long flags)");

  Args args;
  auto& cfg = args.cfg;
  app.add_option("--base", cfg.base, "Prime base of the digital net")->capture_default_str();
  app.add_option("--m_min,--m-min", cfg.m_min, "Smallest exponent for bench")->capture_default_str();
  app.add_option("--m_max,--m-max", cfg.m_max, "Largest exponent for bench")->capture_default_str();
  app.add_option("--m", cfg.m, "Exponent for generate/integrate/bound/verify")->capture_default_str();
  app.add_option("--s", cfg.s, "Dimension")->capture_default_str();
  app.add_option("--X", cfg.X, "Truncation radius list")->capture_default_str()->delimiter(',');
  app.add_option("--scheme", args.scheme, "erfinv|dyadic|unit|trivial|custom")->capture_default_str();
  app.add_option("--direction_numbers_path,--direction-numbers-path", cfg.direction_numbers_path,
                 "Joe-Kuo format file; bundled table when empty");
  app.add_option("--integrand", cfg.integrand, "Registered integrand name")->capture_default_str();
  app.add_option("--output", cfg.output, "Write results here instead of stdout");
  app.add_option("--custom_intervals,--custom-intervals", args.custom_intervals,
                 "Custom scheme cells as j:l:m_d,... (same list in every coordinate)");
  app.add_option("--alpha", cfg.alpha, "Smoothness for the bounds")->capture_default_str();
  app.add_option("--t", args.t, "Net quality parameter for bound (default: computed)");

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const rsqmc::RunConfig&);
  };
  const Command commands[] = {
      {"generate", "Write the mapped point set: s coordinates then the weight per line", run_generate},
      {"integrate", "Integrate the chosen integrand with the mapped point set", run_integrate},
      {"bench", "Proposed method against the inverse-CDF baseline, CSV output", run_bench},
      {"bound", "Print closed-form worst-case error bounds", run_bound},
      {"verify", "Structural checks as a JSON report; exit 3 on failure", run_verify},
  };
  for (const auto& c : commands) app.add_subcommand(c.name, c.help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    const auto run_cfg = finish(args);
    for (const auto& c : commands) {
      if (app.got_subcommand(c.name)) return c.run(run_cfg);
    }
  } catch (const rsqmc::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
