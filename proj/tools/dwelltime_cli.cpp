// dwelltime: CSV datasets for dwell-time spectra and the absorption estimator.
//
//   dwelltime eigen  [--config f] [--out f] [--convention c]
//   dwelltime fig1   ...
//   dwelltime fig2   ...
//   dwelltime verify
//
// Exit status: 0 ok, 1 configuration error, 2 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif

#include "dwelltime/config.hpp"
#include "dwelltime/errors.hpp"
#include "dwelltime/sweep.hpp"
#include "dwelltime/verify.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

struct Options {
  std::string config;
  std::string out;
  std::string convention;
  double hbar_perturbation = 0.0;
};

dwelltime::SweepConfig resolve(const Options& o) {
  dwelltime::SweepConfig cfg = o.config.empty() ? dwelltime::SweepConfig{}
                                                : dwelltime::load_config(o.config);
  if (!o.convention.empty()) cfg.convention = dwelltime::parse_convention(o.convention);
  return cfg;
}

// The file only appears once the whole dataset exists.
void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw dwelltime::ConfigError("cannot write '" + path + "'");
    f << text;
    if (!f.flush()) {
      std::remove(tmp.c_str());
      throw dwelltime::ConfigError("cannot write '" + path + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::remove(tmp.c_str());
    throw dwelltime::ConfigError("cannot write '" + path + "': " + ec.message());
  }
}

std::string run(const std::string& command, const Options& o, int& status) {
  using namespace dwelltime;
  if (command == "verify") {
    std::string report;
    for (const PropertyCheck& c : run_verification({o.hbar_perturbation})) {
      char line[160];
      std::snprintf(line, sizeof line, "%s %s worst=%.3e tol=%.1e\n", c.passed ? "PASS" : "FAIL",
                    c.name.c_str(), c.worst, c.tolerance);
      report += line;
      if (!c.passed) status = kExitNumerical;
    }
    return report;
  }
  const SweepConfig cfg = resolve(o);
  if (command == "eigen") return to_csv(eigen_table(cfg));
  if (command == "fig1") return to_csv(fig1_table(cfg, fig1_sweep(cfg)));
  const DwellPeak peak = locate_dwell_peak(cfg);
  return to_csv(fig2_table(cfg, peak, fig2_sweep(cfg, peak)));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dwell-time spectra and absorption-based dwell estimates"};
  app.require_subcommand(1);
  Options opts;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config, "key = value configuration file");
    sub->add_option("--out", opts.out, "output path (stdout if omitted)");
    sub->add_option("--convention", opts.convention, "light-shift convention")
        ->check(CLI::IsMember({"barrier-is-lightshift", "barrier-plus-lightshift"}));
  };
  for (const char* name : {"eigen", "fig1", "fig2"}) {
    add_common(app.add_subcommand(name, std::string(name) + " dataset as CSV"));
  }
  CLI::App* verify = app.add_subcommand("verify", "run the oracle-equivalence checks");
  add_common(verify);
  verify->add_option("--perturb-hbar", opts.hbar_perturbation,
                     "relative hbar change on the closed-form side (test hook)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  int status = 0;
  try {
    const std::string command = app.get_subcommands().front()->get_name();
    const std::string text = run(command, opts, status);
    emit(text, opts.out);
  } catch (const dwelltime::ConfigError& e) {
    std::cerr << "dwelltime: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "dwelltime: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return status;
}
