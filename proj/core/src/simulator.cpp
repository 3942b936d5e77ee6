#include "cardsim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cardsim {

void CycleTracker::reset(double work) {
  above_ = work > level_;
  open_ = false;
  below_count_ = above_count_ = 0;
  below_total_ = above_total_ = 0.0;
}

void CycleTracker::begin_measurement() {
  open_ = false;
  below_count_ = above_count_ = 0;
  below_total_ = above_total_ = 0.0;
}

void CycleTracker::cross(double now) {
  if (open_) {
    if (above_) {
      ++above_count_;
      above_total_ += now - period_start_;
    } else {
      ++below_count_;
      below_total_ += now - period_start_;
    }
  }
  above_ = !above_;
  open_ = true;
  period_start_ = now;
}

void CycleTracker::on_drain(double work_start, double t_start, double dt, int n) {
  if (!above_) return;  // draining work can only cross downward
  double tau = n * (work_start - level_);
  if (tau < 0.0) tau = 0.0;
  if (tau <= dt) cross(t_start + tau);
}

void CycleTracker::on_jump(double work_before, double work_after, double now) {
  if (!above_ && work_before <= level_ && work_after > level_) cross(now);
}

TrialResult run_trial(const SimConfig& cfg, TrialStreams& streams) {
  const int n = policy_n(cfg.policy);
  if (cfg.lambda <= 0.0) throw std::invalid_argument("arrival rate must be positive");
  if (cfg.arrivals < 2) throw std::invalid_argument("need at least two arrivals");
  if (cfg.warmup_fraction < 0.0 || cfg.warmup_fraction >= 1.0)
    throw std::invalid_argument("warmup fraction must lie in [0, 1)");
  if (cfg.cycle && (cfg.cycle->server < 0 || cfg.cycle->server >= n))
    throw std::invalid_argument("tracked server out of range");

  WorkVector w(n, 0.0);
  PolicyState pstate;
  CycleTracker tracker(cfg.cycle ? cfg.cycle->level : 0.0);
  tracker.reset(0.0);
  const int tracked = cfg.cycle ? cfg.cycle->server : -1;

  TrialResult res;
  res.n = n;
  res.arrivals_total = cfg.arrivals;
  res.server_busy_fraction.assign(n, 0.0);
  res.server_mean_work.assign(n, 0.0);

  const std::uint64_t warm_index =
      static_cast<std::uint64_t>(cfg.warmup_fraction * double(cfg.arrivals));
  bool measuring = false;
  double t = 0.0, t0 = 0.0;

  // Accumulators over the measurement window.
  double sum_response = 0.0, sum_wait = 0.0;
  std::array<double, 4> class_sum{};
  std::vector<double> busy_time(n, 0.0), work_integral(n, 0.0);
  double iw_integral = 0.0;  // integral of (idle count / n) * total work
  double arrival_work_sum = 0.0;
  std::uint64_t measured = 0;

  // Scratch for the idle-work walk: times at which servers empty.
  std::vector<double> hits;
  hits.reserve(n);

  if (cfg.record_responses)
    res.responses.reserve(cfg.arrivals - warm_index);

  for (std::uint64_t j = 0; j < cfg.arrivals; ++j) {
    double dt = streams.interarrival.next_exponential(cfg.lambda);

    // Drain the segment [t, t + dt). Per-server pieces have closed forms;
    // only the idle-work cross term needs the walk over emptying instants,
    // because the idle count changes inside the segment.
    if (measuring) {
      hits.clear();
      double total = 0.0;
      int idle = 0;
      for (int i = 0; i < n; ++i) {
        total += w[i];
        if (w[i] <= 0.0) {
          ++idle;
          continue;
        }
        double empty_at = n * w[i];
        if (empty_at < dt) hits.push_back(empty_at);
        double busy = std::min(empty_at, dt);
        busy_time[i] += busy;
        work_integral[i] += empty_at >= dt ? w[i] * dt - dt * dt / (2.0 * n)
                                           : n * w[i] * w[i] / 2.0;
      }
      std::sort(hits.begin(), hits.end());
      double a = 0.0, level = total;
      for (std::size_t h = 0; h <= hits.size(); ++h) {
        double b = h < hits.size() ? hits[h] : dt;
        double len = b - a;
        double slope = double(n - idle) / n;
        iw_integral += (double(idle) / n) * (level * len - slope * len * len / 2.0);
        level -= slope * len;
        ++idle;
        a = b;
      }
    }
    if (tracked >= 0) tracker.on_drain(w[tracked], t, dt, n);
    for (int i = 0; i < n; ++i) {
      double drained = std::min(w[i], dt / n);
      res.total_drained += drained;
      w[i] -= drained;
    }
    t += dt;

    if (j == warm_index) {
      measuring = true;
      t0 = t;
      tracker.begin_measurement();
    }

    double s = cfg.model.sample(streams.size);
    int k = dispatch(cfg.policy, pstate, s, w, streams.policy);

    if (measuring) {
      double seen = 0.0;
      for (int i = 0; i < n; ++i) seen += w[i];
      arrival_work_sum += seen;
      double response = n * (w[k] + s);
      sum_response += response;
      sum_wait += n * w[k];
      auto cls = std::size_t(classify(cfg.policy, s));
      ++res.class_count[cls];
      class_sum[cls] += response;
      ++measured;
      if (cfg.record_responses) res.responses.push_back(response);
    }
    if (k == tracked) tracker.on_jump(w[k], w[k] + s, t);
    w[k] += s;
    res.total_size_in += s;
  }

  double horizon = t - t0;
  res.measured = measured;
  res.horizon = horizon;
  res.mean_response = sum_response / double(measured);
  res.mean_wait = sum_wait / double(measured);
  res.arrival_mean_total_work = arrival_work_sum / double(measured);
  for (std::size_t cls = 0; cls < 4; ++cls)
    res.class_mean_response[cls] =
        res.class_count[cls] ? class_sum[cls] / double(res.class_count[cls]) : 0.0;
  if (horizon > 0.0) {
    double total_work_integral = 0.0;
    for (int i = 0; i < n; ++i) {
      res.server_busy_fraction[i] = busy_time[i] / horizon;
      res.server_mean_work[i] = work_integral[i] / horizon;
      total_work_integral += work_integral[i];
    }
    res.mean_total_work = total_work_integral / horizon;
    res.mean_idle_work_product = iw_integral / horizon;
  }
  res.below_periods = tracker.below_count();
  res.above_periods = tracker.above_count();
  res.mean_below_period =
      res.below_periods ? tracker.below_total() / double(res.below_periods) : 0.0;
  res.mean_above_period =
      res.above_periods ? tracker.above_total() / double(res.above_periods) : 0.0;
  for (int i = 0; i < n; ++i) res.final_total_work += w[i];
  return res;
}

}  // namespace cardsim
