#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "polent/error.hpp"
#include "polent/io.hpp"
#include "polent_cli/commands.hpp"
#include "polent_cli/config.hpp"

namespace {

using polent::ErrorKind;
using polent::cli::KeyValues;

struct Flags {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> delays;
  std::optional<std::string> degrade;
  std::optional<double> background;
  std::optional<std::string> counts;
  std::optional<std::string> rho;
  std::optional<std::string> reference;
  std::optional<std::string> observations;
};

void add_flags(CLI::App& app, Flags& f) {
  app.add_option("--config", f.config, "key = value configuration file");
  app.add_option("--seed", f.seed, "random seed for count simulation");
  app.add_option("--out", f.out, "output directory");
  app.add_option("--delay-fs", f.delays, "comma-separated delays in fs");
  app.add_option("--degrade", f.degrade, "SCALE,OFFSET_FS degradation model");
  app.add_option("--background", f.background, "uniform background b in [0, 1/4]");
  app.add_option("--counts", f.counts, "count table (overrides counts_file)");
  app.add_option("--rho", f.rho, "density matrix (overrides rho_file)");
  app.add_option("--reference", f.reference, "reference density matrix");
  app.add_option("--observations", f.observations, "tau_fs re_D im_D rows");
}

KeyValues overrides(const Flags& f) {
  KeyValues kv;
  if (f.seed) kv["seed"] = std::to_string(*f.seed);
  if (f.out) kv["out_dir"] = *f.out;
  if (f.delays) kv["delays_fs"] = *f.delays;
  if (f.background) kv["background"] = polent::io::format_double(*f.background);
  if (f.counts) kv["counts_file"] = *f.counts;
  if (f.rho) kv["rho_file"] = *f.rho;
  if (f.reference) kv["reference_rho_file"] = *f.reference;
  if (f.observations) kv["observations_file"] = *f.observations;
  if (f.degrade) {
    const auto comma = f.degrade->find(',');
    if (comma == std::string::npos) {
      polent::fail(ErrorKind::Usage, "--degrade expects SCALE,OFFSET_FS");
    }
    kv["degrade_scale"] = f.degrade->substr(0, comma);
    kv["degrade_offset_fs"] = f.degrade->substr(comma + 1);
  }
  return kv;
}

int report_error(std::string_view kind, const std::string& message, int code) {
  std::string line = message;
  for (auto& c : line) {
    if (c == '\n') c = ' ';
  }
  std::cerr << "error:" << kind << ": " << line << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Broadband polarization-entanglement simulator and tomography toolkit", "polent"};
  app.require_subcommand(1);
  Flags flags;

  auto* jsa = app.add_subcommand("jsa", "build the joint spectral amplitude");
  auto* sweep = app.add_subcommand("sweep", "D-parameter delay sweep");
  auto* tomo = app.add_subcommand("tomo", "tomography simulation and reconstruction");
  tomo->require_subcommand(1);
  auto* simulate = tomo->add_subcommand("simulate", "simulate a 36-projection count table");
  auto* reconstruct = tomo->add_subcommand("reconstruct", "MLE reconstruction from a count table");
  auto* metrics = app.add_subcommand("metrics", "metrics of a density matrix");
  auto* fit = app.add_subcommand("fit", "fit the degradation model to measured D values");
  for (auto* sub : {jsa, sweep, simulate, reconstruct, metrics, fit}) add_flags(*sub, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", e.what(), 2);
  }

  try {
    const auto config = polent::cli::load_config(flags.config, overrides(flags));
    if (jsa->parsed()) polent::cli::run_jsa(config, std::cout);
    if (sweep->parsed()) polent::cli::run_sweep(config, std::cout);
    if (simulate->parsed()) polent::cli::run_tomo_simulate(config, std::cout);
    if (reconstruct->parsed()) polent::cli::run_tomo_reconstruct(config, std::cout);
    if (metrics->parsed()) polent::cli::run_metrics(config, std::cout);
    if (fit->parsed()) polent::cli::run_fit(config, std::cout);
  } catch (const polent::Error& e) {
    return report_error(polent::to_string(e.kind()), e.what(), polent::exit_code(e.kind()));
  } catch (const std::exception& e) {
    return report_error("internal", e.what(), 3);
  }
  return 0;
}
