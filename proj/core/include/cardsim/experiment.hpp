#pragma once

// Experiment orchestration: load a config, expand policy x load sweeps into
// seeded trials, aggregate across trials, and emit CSV. All entry points are
// deterministic for a fixed config: cell results land in preassigned slots,
// so the thread count never changes any output byte.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cardsim/distribution.hpp"
#include "cardsim/policy.hpp"
#include "json.hpp"

namespace cardsim {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DistEntry {
  JobSizeModel model;
  std::string tag;  // CSV identity, e.g. "exp", "weibull-cv100", "uniform-0-2"
};

// One [[policy]] config entry. params carries either explicit thresholds or
// a recipe name plus its knobs; resolution happens per load.
struct PolicyEntry {
  std::string name;   // policy kind key, e.g. "card-flexible"
  std::string label;  // CSV identity; defaults to name
  nlohmann::json params = nlohmann::json::object();
};

struct TailSettings {
  std::string reference = "card-flexible";  // policy whose quantile sets t_max
  int points = 200;
  double quantile = 0.99;
};

// Output file names; empty means not requested. Relative names are resolved
// against the CLI --out-dir.
struct OutputPaths {
  std::string curves;
  std::string tails;
  std::string report;
  std::string bounds;
};

struct ExperimentConfig {
  int n = 2;
  std::vector<DistEntry> dists;      // sweeps use exactly one; bounds allow more
  std::vector<PolicyEntry> policies;
  std::vector<double> rho;           // each strictly inside (0, 1)
  int trials = 10;
  std::uint64_t arrivals = 1000000;
  std::uint64_t seed = 12345;
  double warmup = 0.2;
  bool normalize = false;  // divide mean_T by the pooled mean workload
  TailSettings tails;
  OutputPaths outputs;
};

// Build a size model plus its CSV tag from a {kind = ..., ...} table.
DistEntry make_dist_entry(const nlohmann::json& spec);

ExperimentConfig load_experiment_config(const nlohmann::json& doc);
ExperimentConfig load_experiment_file(const std::string& path);

// Turn one policy entry into a dispatchable config at a given load.
// Recipes: "drift" (alpha/beta/delta), "practical" (alpha_prime/beta_prime/
// gamma), "heavy-traffic" (load-driven schedule), "multiband-sqrt-eps",
// "dice-tuned" (cv-keyed gaps, optional eta). Throws ConfigError for shape
// problems and std::invalid_argument when a recipe is infeasible at rho.
PolicyConfig resolve_policy(const PolicyEntry& entry, int n, double rho,
                            const JobSizeModel& model);

// One (policy, load) aggregate. Skipped cells (infeasible recipe) keep the
// identifying fields and carry the reason; every numeric field stays unset.
struct CurveRow {
  std::string policy;
  int n = 0;
  std::string dist;
  double rho = 0.0;
  bool ok = false;
  double mean_T = 0.0;
  double ci_half = 0.0;  // half-width of the 95% interval across trials
  double se = 0.0;
  bool normalized = false;
  double normalized_mean_T = 0.0;
  double normalized_ci = 0.0;
  double lower_bound = 0.0;  // universal mean-response floor at this load
  double k_card = 0.0;
  std::string reason;
};

std::vector<CurveRow> run_sweep(const ExperimentConfig& cfg, int threads = 1);
void write_curves_csv(const std::vector<CurveRow>& rows, std::ostream& out);

// Empirical P{T > t} on a shared grid of `points` values spanning
// [0, t_max], with t_max the across-trial mean of the reference policy's
// per-trial response quantile. ccdf/ccdf_se aggregate the per-trial curves.
struct TailRow {
  std::string policy;
  int n = 0;
  std::string dist;
  double rho = 0.0;
  double t = 0.0;
  double ccdf = 0.0;
  double ccdf_se = 0.0;
};

std::vector<TailRow> run_tails(const ExperimentConfig& cfg, int threads = 1);
void write_tails_csv(const std::vector<TailRow>& rows, std::ostream& out);

// Closed-form reference table per (distribution, load). Two-server-only
// quantities stay empty for other n; the explicit upper bound also needs a
// card policy with drift parameters in the config and fills `note` when it
// cannot be evaluated.
struct BoundsRow {
  std::string dist;
  int n = 0;
  double rho = 0.0;
  double k_card = 0.0;
  double k_lwl = 1.0;
  std::optional<double> k_sita_e;
  std::optional<double> k_sita_o;
  double lower_bound = 0.0;
  std::optional<double> sita_e_exact;
  std::optional<double> card_upper;
  std::string note;
};

std::vector<BoundsRow> bounds_table(const ExperimentConfig& cfg);
void write_bounds_csv(const std::vector<BoundsRow>& rows, std::ostream& out);
void write_bounds_text(const std::vector<BoundsRow>& rows, std::ostream& out);

// Structural checks against simulation:
//   short-idle       short-server idle fraction vs the delta target
//   cycle-below      mean below-cap period vs m_plus / beta
//   cycle-above      mean above-cap period vs m_plus / alpha
//   work-identity    pooled-work decomposition residual vs 5%
//   response-floor   every policy's mean_T vs the universal floor
// The cycle and idle rows need a "card-rigid" policy with recipe "drift".
struct ValidateRow {
  std::string check;
  std::string policy;
  std::string dist;
  double rho = 0.0;
  double measured = 0.0;
  double target = 0.0;
  double se = 0.0;
  bool pass = false;
};

struct ValidateReport {
  std::vector<ValidateRow> rows;
  bool all_pass = true;
};

ValidateReport run_validate(const ExperimentConfig& cfg, int threads = 1);
void write_validate_report(const ValidateReport& report, std::ostream& out);

}  // namespace cardsim
