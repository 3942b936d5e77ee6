// Command-line front end: loads an experiment config, applies flag
// overrides, and writes the requested CSV artifacts.
//
//   sweep <config>     mean-response curves (curves CSV)
//   tails <config>     response-time tail curves (tails CSV)
//   bounds <config>    closed-form constants and bounds table
//   validate <config>  structural-law checks; nonzero exit on failure
//   run <config>       sweep, plus tails/validate when the config asks

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cardsim/experiment.hpp"

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config_path;
  std::string out_dir = ".";
  int threads = 1;
  bool csv_to_stdout = false;
  long long seed = -1;
  int trials = 0;
  long long arrivals = 0;
};

void apply_overrides(cardsim::ExperimentConfig& cfg, const Options& opt) {
  if (opt.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opt.seed);
  if (opt.trials > 0) cfg.trials = opt.trials;
  if (opt.arrivals > 1) cfg.arrivals = static_cast<std::uint64_t>(opt.arrivals);
}

fs::path resolve_out(const Options& opt, const std::string& name) {
  fs::path p(name);
  if (p.is_absolute()) return p;
  return fs::path(opt.out_dir) / p;
}

std::ofstream open_out(const fs::path& path) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path.string());
  return out;
}

void do_sweep(const cardsim::ExperimentConfig& cfg, const Options& opt) {
  auto rows = cardsim::run_sweep(cfg, opt.threads);
  std::string name = cfg.outputs.curves.empty() ? "curves.csv" : cfg.outputs.curves;
  fs::path path = resolve_out(opt, name);
  auto out = open_out(path);
  cardsim::write_curves_csv(rows, out);
  std::cout << "wrote " << path.string() << " (" << rows.size() << " rows)\n";
}

void do_tails(const cardsim::ExperimentConfig& cfg, const Options& opt) {
  auto rows = cardsim::run_tails(cfg, opt.threads);
  std::string name = cfg.outputs.tails.empty() ? "tails.csv" : cfg.outputs.tails;
  fs::path path = resolve_out(opt, name);
  auto out = open_out(path);
  cardsim::write_tails_csv(rows, out);
  std::cout << "wrote " << path.string() << " (" << rows.size() << " rows)\n";
}

void do_bounds(const cardsim::ExperimentConfig& cfg, const Options& opt) {
  auto rows = cardsim::bounds_table(cfg);
  if (!cfg.outputs.bounds.empty()) {
    fs::path path = resolve_out(opt, cfg.outputs.bounds);
    auto out = open_out(path);
    cardsim::write_bounds_csv(rows, out);
    std::cout << "wrote " << path.string() << " (" << rows.size() << " rows)\n";
  } else if (opt.csv_to_stdout) {
    cardsim::write_bounds_csv(rows, std::cout);
  } else {
    cardsim::write_bounds_text(rows, std::cout);
  }
}

// Returns false when any check fails.
bool do_validate(const cardsim::ExperimentConfig& cfg, const Options& opt) {
  auto report = cardsim::run_validate(cfg, opt.threads);
  cardsim::write_validate_report(report, std::cout);
  if (!cfg.outputs.report.empty()) {
    fs::path path = resolve_out(opt, cfg.outputs.report);
    auto out = open_out(path);
    cardsim::write_validate_report(report, out);
    std::cout << "wrote " << path.string() << "\n";
  }
  return report.all_pass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dispatching-policy simulator and bounds toolkit"};
  app.require_subcommand(1);

  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", opt.config_path, "experiment config file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "override the config seed");
    sub->add_option("--trials", opt.trials, "override the trial count");
    sub->add_option("--arrivals", opt.arrivals, "override arrivals per trial");
    sub->add_option("--out-dir", opt.out_dir, "directory for output files");
    sub->add_option("--threads", opt.threads, "worker threads for trial cells")
        ->check(CLI::PositiveNumber);
  };

  CLI::App* sweep = app.add_subcommand("sweep", "run the mean-response sweep");
  CLI::App* tails = app.add_subcommand("tails", "run the tail-curve sweep");
  CLI::App* bounds = app.add_subcommand("bounds", "print the analytic bounds table");
  CLI::App* validate = app.add_subcommand("validate", "check the structural laws");
  CLI::App* run = app.add_subcommand("run", "run everything the config requests");
  for (CLI::App* sub : {sweep, tails, bounds, validate, run}) add_common(sub);
  bounds->add_flag("--csv", opt.csv_to_stdout, "emit CSV instead of an aligned table");

  CLI11_PARSE(app, argc, argv);

  try {
    cardsim::ExperimentConfig cfg = cardsim::load_experiment_file(opt.config_path);
    apply_overrides(cfg, opt);
    bool ok = true;
    if (sweep->parsed()) {
      do_sweep(cfg, opt);
    } else if (tails->parsed()) {
      do_tails(cfg, opt);
    } else if (bounds->parsed()) {
      do_bounds(cfg, opt);
    } else if (validate->parsed()) {
      ok = do_validate(cfg, opt);
    } else if (run->parsed()) {
      do_sweep(cfg, opt);
      if (!cfg.outputs.tails.empty()) do_tails(cfg, opt);
      if (!cfg.outputs.report.empty()) ok = do_validate(cfg, opt);
    }
    return ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
