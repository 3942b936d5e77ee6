#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "cardsim/analytics.hpp"
#include "cardsim/experiment.hpp"
#include "cardsim/policy_params.hpp"
#include "cardsim/rng.hpp"
#include "cardsim/simulator.hpp"
#include "cardsim/stats.hpp"

namespace cardsim {
namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

// Commas and newlines would break the one-row-per-line contract.
std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',') c = ';';
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

struct Agg {
  double mean = 0.0;
  double se = 0.0;
  double ci_half = 0.0;
};

Agg aggregate(const std::vector<double>& values) {
  if (values.size() == 1) return {values[0], 0.0, 0.0};
  Summary s = summarize(values);
  return {s.mean, s.se, s.ci_half};
}

// Deterministic work distribution: every index is processed exactly once
// and results land in caller-owned slots, so the thread count cannot
// reorder any output.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& body) {
  if (threads < 2 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_lock;
  std::exception_ptr err;
  auto worker = [&] {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> hold(err_lock);
        if (!err) err = std::current_exception();
      }
    }
  };
  std::size_t pool_size = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < pool_size; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

const DistEntry& single_dist(const ExperimentConfig& cfg, const char* op) {
  if (cfg.dists.size() != 1)
    throw ConfigError(std::string(op) + " requires exactly one dist entry");
  return cfg.dists.front();
}

void require_policies(const ExperimentConfig& cfg) {
  if (cfg.policies.empty()) throw ConfigError("config has no [[policy]] entries");
}

// One (policy, rho) pair with its per-load resolution outcome.
struct Combo {
  std::size_t policy_index = 0;
  std::size_t rho_index = 0;
  bool ok = false;
  PolicyConfig policy = LwlConfig::create(1);
  std::string reason;
};

// Feasibility failures (std::invalid_argument) become skip reasons; config
// shape problems (ConfigError) stay fatal.
std::vector<Combo> resolve_combos(const ExperimentConfig& cfg, const JobSizeModel& model) {
  std::vector<Combo> combos;
  for (std::size_t pi = 0; pi < cfg.policies.size(); ++pi) {
    for (std::size_t ri = 0; ri < cfg.rho.size(); ++ri) {
      Combo combo;
      combo.policy_index = pi;
      combo.rho_index = ri;
      try {
        combo.policy = resolve_policy(cfg.policies[pi], cfg.n, cfg.rho[ri], model);
        combo.ok = true;
      } catch (const ConfigError&) {
        throw;
      } catch (const std::invalid_argument& e) {
        combo.reason = e.what();
      }
      combos.push_back(std::move(combo));
    }
  }
  return combos;
}

SimConfig make_sim_config(const ExperimentConfig& cfg, const JobSizeModel& model,
                          const PolicyConfig& policy, double rho) {
  SimConfig sc;
  sc.policy = policy;
  sc.model = model;
  sc.lambda = rho / model.mean();
  sc.arrivals = cfg.arrivals;
  sc.warmup_fraction = cfg.warmup;
  return sc;
}

double empirical_quantile(const std::vector<double>& sorted, double q) {
  std::size_t m = sorted.size();
  double pos = std::ceil(q * static_cast<double>(m));
  std::size_t idx = pos < 1.0 ? 0 : static_cast<std::size_t>(pos) - 1;
  return sorted[std::min(idx, m - 1)];
}

double ccdf_at(const std::vector<double>& sorted, double t) {
  auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), t);
  return static_cast<double>(above) / static_cast<double>(sorted.size());
}

}  // namespace

std::vector<CurveRow> run_sweep(const ExperimentConfig& cfg, int threads) {
  const DistEntry& dist = single_dist(cfg, "sweep");
  require_policies(cfg);
  const JobSizeModel& model = dist.model;

  std::vector<Combo> combos = resolve_combos(cfg, model);
  const std::size_t trials = static_cast<std::size_t>(cfg.trials);

  std::vector<std::size_t> live;
  for (std::size_t i = 0; i < combos.size(); ++i)
    if (combos[i].ok) live.push_back(i);

  std::vector<std::vector<double>> mean_T(combos.size(),
                                          std::vector<double>(trials, 0.0));
  parallel_for(live.size() * trials, threads, [&](std::size_t flat) {
    const Combo& combo = combos[live[flat / trials]];
    std::size_t trial = flat % trials;
    double rho = cfg.rho[combo.rho_index];
    TrialStreams streams = make_trial_streams(cfg.seed, rho, trial);
    SimConfig sc = make_sim_config(cfg, model, combo.policy, rho);
    mean_T[live[flat / trials]][trial] = run_trial(sc, streams).mean_response;
  });

  std::vector<CurveRow> rows;
  for (const Combo& combo : combos) {
    CurveRow row;
    row.policy = cfg.policies[combo.policy_index].label;
    row.n = cfg.n;
    row.dist = dist.tag;
    row.rho = cfg.rho[combo.rho_index];
    if (!combo.ok) {
      row.reason = combo.reason;
      rows.push_back(std::move(row));
      continue;
    }
    double lambda = row.rho / model.mean();
    Agg agg = aggregate(mean_T[combo.policy_index * cfg.rho.size() + combo.rho_index]);
    row.ok = true;
    row.mean_T = agg.mean;
    row.se = agg.se;
    row.ci_half = agg.ci_half;
    row.lower_bound = lower_bound_mean_response(cfg.n, lambda, model);
    row.k_card = k_card(cfg.n, model);
    if (cfg.normalize) {
      double w = mg1_mean_work(lambda, model);
      row.normalized = true;
      row.normalized_mean_T = agg.mean / w;
      row.normalized_ci = agg.ci_half / w;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_curves_csv(const std::vector<CurveRow>& rows, std::ostream& out) {
  out << "policy,n,dist,rho,mean_T,ci_half,normalized_mean_T,normalized_ci,"
         "lower_bound,k_card,reason\n";
  for (const CurveRow& r : rows) {
    out << sanitize(r.policy) << ',' << r.n << ',' << sanitize(r.dist) << ',' << fmt(r.rho)
        << ',';
    if (r.ok) {
      out << fmt(r.mean_T) << ',' << fmt(r.ci_half) << ',';
      if (r.normalized)
        out << fmt(r.normalized_mean_T) << ',' << fmt(r.normalized_ci) << ',';
      else
        out << ",,";
      out << fmt(r.lower_bound) << ',' << fmt(r.k_card) << ',';
    } else {
      out << ",,,,,,";
    }
    out << sanitize(r.reason) << '\n';
  }
}

std::vector<TailRow> run_tails(const ExperimentConfig& cfg, int threads) {
  const DistEntry& dist = single_dist(cfg, "tails");
  require_policies(cfg);
  const JobSizeModel& model = dist.model;
  const std::size_t trials = static_cast<std::size_t>(cfg.trials);
  const std::size_t points = static_cast<std::size_t>(cfg.tails.points);

  std::size_t ref_index = cfg.policies.size();
  for (std::size_t i = 0; i < cfg.policies.size(); ++i)
    if (cfg.policies[i].label == cfg.tails.reference) {
      ref_index = i;
      break;
    }
  if (ref_index == cfg.policies.size())
    throw ConfigError("tail reference policy '" + cfg.tails.reference +
                      "' is not in the policy list");

  std::vector<Combo> combos = resolve_combos(cfg, model);
  auto combo_at = [&](std::size_t pi, std::size_t ri) -> const Combo& {
    return combos[pi * cfg.rho.size() + ri];
  };
  for (std::size_t ri = 0; ri < cfg.rho.size(); ++ri) {
    const Combo& ref = combo_at(ref_index, ri);
    if (!ref.ok)
      throw ConfigError("tail reference policy '" + cfg.tails.reference +
                        "' is infeasible at rho " + fmt(cfg.rho[ri]) + ": " + ref.reason);
  }

  // Pass 1: the reference policy's per-trial quantiles fix the grid span.
  std::vector<std::vector<double>> ref_quantile(cfg.rho.size(),
                                                std::vector<double>(trials, 0.0));
  parallel_for(cfg.rho.size() * trials, threads, [&](std::size_t flat) {
    std::size_t ri = flat / trials;
    std::size_t trial = flat % trials;
    double rho = cfg.rho[ri];
    TrialStreams streams = make_trial_streams(cfg.seed, rho, trial);
    SimConfig sc = make_sim_config(cfg, model, combo_at(ref_index, ri).policy, rho);
    sc.record_responses = true;
    TrialResult r = run_trial(sc, streams);
    std::sort(r.responses.begin(), r.responses.end());
    ref_quantile[ri][trial] = empirical_quantile(r.responses, cfg.tails.quantile);
  });

  std::vector<std::vector<double>> grid(cfg.rho.size(), std::vector<double>(points, 0.0));
  for (std::size_t ri = 0; ri < cfg.rho.size(); ++ri) {
    double t_max = 0.0;
    for (double q : ref_quantile[ri]) t_max += q;
    t_max /= static_cast<double>(trials);
    for (std::size_t i = 0; i < points; ++i)
      grid[ri][i] = t_max * static_cast<double>(i) / static_cast<double>(points - 1);
  }

  // Pass 2: every policy's per-trial tail curve on the shared grid. The
  // reference runs again from the same streams, reproducing pass 1 exactly.
  std::vector<std::size_t> live;
  for (std::size_t i = 0; i < combos.size(); ++i)
    if (combos[i].ok) live.push_back(i);
  std::vector<std::vector<double>> curves(combos.size() * trials);
  parallel_for(live.size() * trials, threads, [&](std::size_t flat) {
    std::size_t ci = live[flat / trials];
    const Combo& combo = combos[ci];
    std::size_t trial = flat % trials;
    double rho = cfg.rho[combo.rho_index];
    TrialStreams streams = make_trial_streams(cfg.seed, rho, trial);
    SimConfig sc = make_sim_config(cfg, model, combo.policy, rho);
    sc.record_responses = true;
    TrialResult r = run_trial(sc, streams);
    std::sort(r.responses.begin(), r.responses.end());
    std::vector<double> curve(points, 0.0);
    for (std::size_t i = 0; i < points; ++i)
      curve[i] = ccdf_at(r.responses, grid[combo.rho_index][i]);
    curves[ci * trials + trial] = std::move(curve);
  });

  std::vector<TailRow> rows;
  std::vector<double> sample(trials, 0.0);
  for (const Combo& combo : combos) {
    if (!combo.ok) continue;
    std::size_t ci = combo.policy_index * cfg.rho.size() + combo.rho_index;
    for (std::size_t i = 0; i < points; ++i) {
      for (std::size_t trial = 0; trial < trials; ++trial)
        sample[trial] = curves[ci * trials + trial][i];
      Agg agg = aggregate(sample);
      TailRow row;
      row.policy = cfg.policies[combo.policy_index].label;
      row.n = cfg.n;
      row.dist = dist.tag;
      row.rho = cfg.rho[combo.rho_index];
      row.t = grid[combo.rho_index][i];
      row.ccdf = agg.mean;
      row.ccdf_se = agg.se;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_tails_csv(const std::vector<TailRow>& rows, std::ostream& out) {
  out << "policy,n,dist,rho,t,ccdf,ccdf_se\n";
  for (const TailRow& r : rows)
    out << sanitize(r.policy) << ',' << r.n << ',' << sanitize(r.dist) << ',' << fmt(r.rho)
        << ',' << fmt(r.t) << ',' << fmt(r.ccdf) << ',' << fmt(r.ccdf_se) << '\n';
}

std::vector<BoundsRow> bounds_table(const ExperimentConfig& cfg) {
  if (cfg.dists.empty()) throw ConfigError("bounds require at least one dist entry");

  // Cap-schedule parameters for the explicit upper bound, if any policy
  // carries them.
  const nlohmann::json* drift = nullptr;
  for (const PolicyEntry& e : cfg.policies) {
    if ((e.name == "card-rigid" || e.name == "card-flexible") &&
        e.params.value("recipe", "") == "drift") {
      drift = &e.params;
      break;
    }
  }

  std::vector<BoundsRow> rows;
  for (const DistEntry& dist : cfg.dists) {
    const JobSizeModel& model = dist.model;
    for (double rho : cfg.rho) {
      double lambda = rho / model.mean();
      BoundsRow row;
      row.dist = dist.tag;
      row.n = cfg.n;
      row.rho = rho;
      row.k_card = k_card(cfg.n, model);
      row.k_lwl = k_lwl();
      row.lower_bound = lower_bound_mean_response(cfg.n, lambda, model);
      if (cfg.n == 2) {
        row.k_sita_e = k_sita_e(model);
        row.k_sita_o = k_sita_o(model);
        row.sita_e_exact = sita_e_mean_response(lambda, model);
        if (drift) {
          try {
            double alpha = drift->at("alpha").get<double>();
            double beta = drift->at("beta").get<double>();
            double delta = drift->at("delta").get<double>();
            CardThresholds th = card_params_from_alpha_beta(2, lambda, model, alpha, beta);
            row.card_upper = card_upper_bound_explicit(alpha, beta, delta, 1.0 - rho,
                                                       th.m_plus, model, lambda);
          } catch (const std::invalid_argument& e) {
            row.note = e.what();
          }
        }
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

namespace {

std::vector<std::vector<std::string>> bounds_cells(const std::vector<BoundsRow>& rows,
                                                   const std::string& blank) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"dist", "n", "rho", "k_card", "k_lwl", "k_sita_e", "k_sita_o",
                   "lower_bound", "sita_e_exact", "card_upper_bound", "note"});
  for (const BoundsRow& r : rows) {
    auto opt = [&](const std::optional<double>& v) { return v ? fmt(*v) : blank; };
    cells.push_back({sanitize(r.dist), std::to_string(r.n), fmt(r.rho), fmt(r.k_card),
                     fmt(r.k_lwl), opt(r.k_sita_e), opt(r.k_sita_o), fmt(r.lower_bound),
                     opt(r.sita_e_exact), opt(r.card_upper),
                     r.note.empty() ? blank : sanitize(r.note)});
  }
  return cells;
}

}  // namespace

void write_bounds_csv(const std::vector<BoundsRow>& rows, std::ostream& out) {
  for (const auto& line : bounds_cells(rows, "")) {
    for (std::size_t i = 0; i < line.size(); ++i) out << (i ? "," : "") << line[i];
    out << '\n';
  }
}

void write_bounds_text(const std::vector<BoundsRow>& rows, std::ostream& out) {
  auto cells = bounds_cells(rows, "-");
  std::vector<std::size_t> width(cells[0].size(), 0);
  for (const auto& line : cells)
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i) out << "  ";
      out << line[i];
      if (i + 1 < line.size()) out << std::string(width[i] - line[i].size(), ' ');
    }
    out << '\n';
  }
}

ValidateReport run_validate(const ExperimentConfig& cfg, int threads) {
  const DistEntry& dist = single_dist(cfg, "validate");
  require_policies(cfg);
  const JobSizeModel& model = dist.model;
  const std::size_t trials = static_cast<std::size_t>(cfg.trials);

  std::size_t card_index = cfg.policies.size();
  for (std::size_t i = 0; i < cfg.policies.size(); ++i)
    if (cfg.policies[i].name == "card-rigid" &&
        cfg.policies[i].params.value("recipe", "") == "drift") {
      card_index = i;
      break;
    }
  if (card_index == cfg.policies.size())
    throw ConfigError("validation needs a card-rigid policy with recipe \"drift\"");
  double alpha = cfg.policies[card_index].params.at("alpha").get<double>();
  double beta = cfg.policies[card_index].params.at("beta").get<double>();
  double delta = cfg.policies[card_index].params.at("delta").get<double>();

  // All combos must resolve; validation configs are expected feasible.
  std::vector<Combo> combos = resolve_combos(cfg, model);
  for (const Combo& combo : combos)
    if (!combo.ok)
      throw ConfigError("policy '" + cfg.policies[combo.policy_index].label +
                        "' is infeasible at rho " + fmt(cfg.rho[combo.rho_index]) + ": " +
                        combo.reason);

  struct CellStats {
    double mean_T = 0.0;
    double total_work = 0.0;
    double idle_work = 0.0;
    double short_idle = 0.0;
    double mean_below = 0.0;
    double mean_above = 0.0;
  };
  std::vector<CellStats> stats(combos.size() * trials);
  parallel_for(combos.size() * trials, threads, [&](std::size_t flat) {
    const Combo& combo = combos[flat / trials];
    std::size_t trial = flat % trials;
    double rho = cfg.rho[combo.rho_index];
    TrialStreams streams = make_trial_streams(cfg.seed, rho, trial);
    SimConfig sc = make_sim_config(cfg, model, combo.policy, rho);
    if (combo.policy_index == card_index)
      sc.cycle = CycleTrackConfig{0, std::get<CardConfig>(combo.policy).c};
    TrialResult r = run_trial(sc, streams);
    CellStats& cell = stats[flat];
    cell.mean_T = r.mean_response;
    cell.total_work = r.mean_total_work;
    cell.idle_work = r.mean_idle_work_product;
    double idle = 0.0;
    for (int s = 0; s + 1 < cfg.n; ++s) idle += 1.0 - r.server_busy_fraction[s];
    cell.short_idle = idle / std::max(1, cfg.n - 1);
    cell.mean_below = r.mean_below_period;
    cell.mean_above = r.mean_above_period;
  });

  auto collect = [&](std::size_t ci, double CellStats::* field) {
    std::vector<double> v(trials, 0.0);
    for (std::size_t t = 0; t < trials; ++t) v[t] = stats[ci * trials + t].*field;
    return v;
  };

  ValidateReport report;
  auto add_row = [&](ValidateRow row) {
    report.all_pass = report.all_pass && row.pass;
    report.rows.push_back(std::move(row));
  };

  const std::string card_label = cfg.policies[card_index].label;
  for (std::size_t ri = 0; ri < cfg.rho.size(); ++ri) {
    std::size_t ci = card_index * cfg.rho.size() + ri;
    Agg idle = aggregate(collect(ci, &CellStats::short_idle));
    add_row({"short-idle", card_label, dist.tag, cfg.rho[ri], idle.mean, delta, idle.se,
             idle.mean <= delta + 3.0 * idle.se});
  }
  for (std::size_t ri = 0; ri < cfg.rho.size(); ++ri) {
    std::size_t ci = card_index * cfg.rho.size() + ri;
    double m_plus = std::get<CardConfig>(combos[ci].policy).m_plus;
    Agg below = aggregate(collect(ci, &CellStats::mean_below));
    add_row({"cycle-below", card_label, dist.tag, cfg.rho[ri], below.mean, m_plus / beta,
             below.se, below.mean <= m_plus / beta + 3.0 * below.se});
  }
  for (std::size_t ri = 0; ri < cfg.rho.size(); ++ri) {
    std::size_t ci = card_index * cfg.rho.size() + ri;
    double m_plus = std::get<CardConfig>(combos[ci].policy).m_plus;
    Agg above = aggregate(collect(ci, &CellStats::mean_above));
    add_row({"cycle-above", card_label, dist.tag, cfg.rho[ri], above.mean, m_plus / alpha,
             above.se, above.mean <= m_plus / alpha + 3.0 * above.se});
  }
  for (std::size_t pi = 0; pi < cfg.policies.size(); ++pi) {
    for (std::size_t ri = 0; ri < cfg.rho.size(); ++ri) {
      std::size_t ci = pi * cfg.rho.size() + ri;
      double rho = cfg.rho[ri];
      double lambda = rho / model.mean();
      Agg work = aggregate(collect(ci, &CellStats::total_work));
      Agg cross = aggregate(collect(ci, &CellStats::idle_work));
      double pooled = mg1_mean_work(lambda, model);
      double residual = std::abs(work.mean - pooled - cross.mean / (1.0 - rho));
      add_row({"work-identity", cfg.policies[pi].label, dist.tag, rho, residual / work.mean,
               0.05, work.se / work.mean, residual / work.mean <= 0.05});
    }
  }
  for (std::size_t pi = 0; pi < cfg.policies.size(); ++pi) {
    for (std::size_t ri = 0; ri < cfg.rho.size(); ++ri) {
      std::size_t ci = pi * cfg.rho.size() + ri;
      double rho = cfg.rho[ri];
      Agg mean_T = aggregate(collect(ci, &CellStats::mean_T));
      double floor = lower_bound_mean_response(cfg.n, rho / model.mean(), model);
      add_row({"response-floor", cfg.policies[pi].label, dist.tag, rho, mean_T.mean, floor,
               mean_T.se, mean_T.mean + 3.0 * mean_T.se >= floor});
    }
  }
  return report;
}

void write_validate_report(const ValidateReport& report, std::ostream& out) {
  out << "check,policy,dist,rho,measured,target,se,status\n";
  for (const ValidateRow& r : report.rows)
    out << sanitize(r.check) << ',' << sanitize(r.policy) << ',' << sanitize(r.dist) << ','
        << fmt(r.rho) << ',' << fmt(r.measured) << ',' << fmt(r.target) << ',' << fmt(r.se)
        << ',' << (r.pass ? "PASS" : "FAIL") << '\n';
  out << "RESULT: " << (report.all_pass ? "PASS" : "FAIL") << '\n';
}

}  // namespace cardsim
