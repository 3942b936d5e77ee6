#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "cardsim/distribution.hpp"
#include "cardsim/policy.hpp"
#include "cardsim/rng.hpp"

namespace cardsim {

// Alternating periods of one server's work level around a fixed threshold:
// a below period has work <= level, an above period has work > level.
// Upward crossings happen at arrival jumps, downward crossings where the
// linear drain meets the level, both at exact instants. Only periods that
// start and end inside the measurement window are recorded, so the period
// in progress when measurement begins or ends never biases the means.
class CycleTracker {
 public:
  explicit CycleTracker(double level) : level_(level) {}

  // Forget everything; the current work decides the side we start on.
  void reset(double work);

  // Start recording from scratch: counts reset, the period in progress is
  // discarded, and the next crossing opens the first counted period.
  void begin_measurement();

  // The tracked server drains from work_start for dt time units at rate 1/n.
  void on_drain(double work_start, double t_start, double dt, int n);

  // The tracked server's work jumps at an arrival.
  void on_jump(double work_before, double work_after, double now);

  std::uint64_t below_count() const { return below_count_; }
  std::uint64_t above_count() const { return above_count_; }
  double below_total() const { return below_total_; }
  double above_total() const { return above_total_; }

 private:
  void cross(double now);

  double level_;
  bool above_ = false;
  bool open_ = false;
  double period_start_ = 0.0;
  std::uint64_t below_count_ = 0;
  std::uint64_t above_count_ = 0;
  double below_total_ = 0.0;
  double above_total_ = 0.0;
};

struct CycleTrackConfig {
  int server = 0;
  double level = 0.0;
};

struct SimConfig {
  PolicyConfig policy = LwlConfig::create(1);
  JobSizeModel model = JobSizeModel::exponential(1.0);
  double lambda = 0.0;            // arrival rate; utilization is lambda E[S]
  std::uint64_t arrivals = 0;
  double warmup_fraction = 0.2;   // arrivals discarded before measuring
  bool record_responses = false;  // keep every measured response time
  std::optional<CycleTrackConfig> cycle;
};

// One trial's measurements. Arrival averages and time averages share the
// window [t_w, t_last]: t_w is the warmup arrival's instant, t_last the
// final arrival's. Responses are n (w + s): each server completes work at
// rate 1/n, so a job of size s behind work w leaves after n (w + s).
struct TrialResult {
  int n = 0;
  std::uint64_t arrivals_total = 0;
  std::uint64_t measured = 0;
  double horizon = 0.0;

  double mean_response = 0.0;  // arrival average of n (w + s)
  double mean_wait = 0.0;      // arrival average of n w at the chosen server
  std::array<std::uint64_t, 4> class_count{};  // indexed by JobClass
  std::array<double, 4> class_mean_response{};

  std::vector<double> server_busy_fraction;  // time fraction with work > 0
  std::vector<double> server_mean_work;      // time average of w_i
  double mean_total_work = 0.0;              // time average of sum_i w_i
  // Time average of (idle count / n) * total work, the cross term in the
  // workload identity  E[W] = lambda E[S^2] / (2 eps) + E[(I/n) W] / eps.
  double mean_idle_work_product = 0.0;
  double arrival_mean_total_work = 0.0;  // same workload sampled at arrivals

  std::uint64_t below_periods = 0;
  std::uint64_t above_periods = 0;
  double mean_below_period = 0.0;
  double mean_above_period = 0.0;

  // Whole-run conservation diagnostics: work in minus work drained minus
  // work left must vanish up to rounding.
  double total_size_in = 0.0;
  double total_drained = 0.0;
  double final_total_work = 0.0;

  std::vector<double> responses;  // filled only when record_responses
};

TrialResult run_trial(const SimConfig& cfg, TrialStreams& streams);

}  // namespace cardsim
