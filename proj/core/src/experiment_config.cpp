#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "cardsim/analytics.hpp"
#include "cardsim/experiment.hpp"
#include "cardsim/policy_params.hpp"
#include "cardsim/toml_lite.hpp"

namespace cardsim {
namespace {

using nlohmann::json;

[[noreturn]] void bail(const std::string& ctx, const std::string& msg) {
  throw ConfigError(ctx + ": " + msg);
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void require_table(const json& v, const std::string& ctx) {
  if (!v.is_object()) bail(ctx, "expected a table");
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& ctx) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known) bail(ctx, "unknown key '" + it.key() + "'");
  }
}

double get_num(const json& obj, const char* key, const std::string& ctx) {
  auto it = obj.find(key);
  if (it == obj.end()) bail(ctx, std::string("missing required key '") + key + "'");
  if (!it->is_number()) bail(ctx, std::string("key '") + key + "' must be a number");
  return it->get<double>();
}

double get_num_or(const json& obj, const char* key, double fallback, const std::string& ctx) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) bail(ctx, std::string("key '") + key + "' must be a number");
  return it->get<double>();
}

long long get_int_or(const json& obj, const char* key, long long fallback,
                     const std::string& ctx) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer()) bail(ctx, std::string("key '") + key + "' must be an integer");
  return it->get<long long>();
}

bool get_bool_or(const json& obj, const char* key, bool fallback, const std::string& ctx) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) bail(ctx, std::string("key '") + key + "' must be true or false");
  return it->get<bool>();
}

std::string get_str(const json& obj, const char* key, const std::string& ctx) {
  auto it = obj.find(key);
  if (it == obj.end()) bail(ctx, std::string("missing required key '") + key + "'");
  if (!it->is_string()) bail(ctx, std::string("key '") + key + "' must be a string");
  return it->get<std::string>();
}

std::string get_str_or(const json& obj, const char* key, const std::string& fallback,
                       const std::string& ctx) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_string()) bail(ctx, std::string("key '") + key + "' must be a string");
  return it->get<std::string>();
}

std::vector<double> get_num_vec(const json& obj, const char* key, const std::string& ctx) {
  auto it = obj.find(key);
  if (it == obj.end()) bail(ctx, std::string("missing required key '") + key + "'");
  if (!it->is_array()) bail(ctx, std::string("key '") + key + "' must be an array");
  std::vector<double> out;
  for (const auto& v : *it) {
    if (!v.is_number()) bail(ctx, std::string("key '") + key + "' must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

ShortSelection parse_short_selection(const json& params, const std::string& ctx) {
  std::string s = get_str_or(params, "short_selection", "uniform-random", ctx);
  if (s == "uniform-random") return ShortSelection::uniform_random;
  if (s == "least-work") return ShortSelection::least_work;
  bail(ctx, "unknown short_selection '" + s + "'");
}

}  // namespace

DistEntry make_dist_entry(const json& spec) {
  const std::string ctx = "dist";
  require_table(spec, ctx);
  std::string kind = get_str(spec, "kind", ctx);

  if (kind == "exp" || kind == "exponential") {
    reject_unknown(spec, {"kind", "mean"}, ctx);
    double mean = get_num_or(spec, "mean", 1.0, ctx);
    if (!(mean > 0.0)) bail(ctx, "mean must be positive");
    std::string tag = mean == 1.0 ? "exp" : "exp-m" + short_num(mean);
    return {JobSizeModel::exponential(1.0 / mean), tag};
  }
  if (kind == "weibull") {
    reject_unknown(spec, {"kind", "mean", "cv", "shape", "scale"}, ctx);
    if (spec.contains("shape") || spec.contains("scale")) {
      double shape = get_num(spec, "shape", ctx);
      double scale = get_num(spec, "scale", ctx);
      auto model = JobSizeModel::weibull(shape, scale);
      std::string tag = "weibull-cv" + short_num(model.cv());
      if (model.mean() != 1.0) tag += "-m" + short_num(model.mean());
      return {model, tag};
    }
    double mean = get_num(spec, "mean", ctx);
    double cv = get_num(spec, "cv", ctx);
    std::string tag = "weibull-cv" + short_num(cv);
    if (mean != 1.0) tag += "-m" + short_num(mean);
    return {JobSizeModel::weibull_from_mean_cv(mean, cv), tag};
  }
  if (kind == "uniform") {
    reject_unknown(spec, {"kind", "lo", "hi"}, ctx);
    double lo = get_num(spec, "lo", ctx);
    double hi = get_num(spec, "hi", ctx);
    return {JobSizeModel::uniform(lo, hi),
            "uniform-" + short_num(lo) + "-" + short_num(hi)};
  }
  if (kind == "deterministic") {
    reject_unknown(spec, {"kind", "value"}, ctx);
    double value = get_num(spec, "value", ctx);
    return {JobSizeModel::deterministic(value), "det-" + short_num(value)};
  }
  bail(ctx, "unknown kind '" + kind + "'");
}

ExperimentConfig load_experiment_config(const json& doc) {
  const std::string ctx = "config";
  require_table(doc, ctx);
  reject_unknown(doc,
                 {"n", "seed", "trials", "arrivals", "warmup", "normalize", "rho", "dist",
                  "outputs", "tails", "policy"},
                 ctx);

  ExperimentConfig cfg;
  cfg.n = static_cast<int>(get_int_or(doc, "n", 2, ctx));
  if (cfg.n < 1) bail(ctx, "n must be >= 1");
  cfg.seed = static_cast<std::uint64_t>(get_int_or(doc, "seed", 12345, ctx));
  cfg.trials = static_cast<int>(get_int_or(doc, "trials", 10, ctx));
  if (cfg.trials < 1) bail(ctx, "trials must be >= 1");
  long long arrivals = get_int_or(doc, "arrivals", 1000000, ctx);
  if (arrivals < 2) bail(ctx, "arrivals must be >= 2");
  cfg.arrivals = static_cast<std::uint64_t>(arrivals);
  cfg.warmup = get_num_or(doc, "warmup", 0.2, ctx);
  if (!(cfg.warmup >= 0.0 && cfg.warmup < 1.0)) bail(ctx, "warmup must lie in [0, 1)");
  cfg.normalize = get_bool_or(doc, "normalize", false, ctx);

  cfg.rho = get_num_vec(doc, "rho", ctx);
  if (cfg.rho.empty()) bail(ctx, "rho grid must not be empty");
  for (double r : cfg.rho)
    if (!(r > 0.0 && r < 1.0)) bail(ctx, "rho values must lie strictly inside (0, 1)");

  auto dist_it = doc.find("dist");
  if (dist_it == doc.end()) bail(ctx, "missing required key 'dist'");
  if (dist_it->is_array()) {
    for (const auto& d : *dist_it) cfg.dists.push_back(make_dist_entry(d));
    if (cfg.dists.empty()) bail(ctx, "dist list must not be empty");
  } else {
    cfg.dists.push_back(make_dist_entry(*dist_it));
  }

  if (auto it = doc.find("outputs"); it != doc.end()) {
    require_table(*it, "outputs");
    reject_unknown(*it, {"curves", "tails", "report", "bounds"}, "outputs");
    cfg.outputs.curves = get_str_or(*it, "curves", "", "outputs");
    cfg.outputs.tails = get_str_or(*it, "tails", "", "outputs");
    cfg.outputs.report = get_str_or(*it, "report", "", "outputs");
    cfg.outputs.bounds = get_str_or(*it, "bounds", "", "outputs");
  }

  if (auto it = doc.find("tails"); it != doc.end()) {
    require_table(*it, "tails");
    reject_unknown(*it, {"reference", "points", "quantile"}, "tails");
    cfg.tails.reference = get_str_or(*it, "reference", cfg.tails.reference, "tails");
    cfg.tails.points = static_cast<int>(get_int_or(*it, "points", cfg.tails.points, "tails"));
    if (cfg.tails.points < 2) bail("tails", "points must be >= 2");
    cfg.tails.quantile = get_num_or(*it, "quantile", cfg.tails.quantile, "tails");
    if (!(cfg.tails.quantile > 0.0 && cfg.tails.quantile < 1.0))
      bail("tails", "quantile must lie strictly inside (0, 1)");
  }

  if (auto it = doc.find("policy"); it != doc.end()) {
    if (!it->is_array()) bail(ctx, "policy entries must use [[policy]] tables");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& e = (*it)[i];
      std::string pctx = "policy[" + std::to_string(i) + "]";
      require_table(e, pctx);
      reject_unknown(e, {"policy", "label", "params"}, pctx);
      PolicyEntry entry;
      entry.name = get_str(e, "policy", pctx);
      entry.label = get_str_or(e, "label", entry.name, pctx);
      if (auto p = e.find("params"); p != e.end()) {
        require_table(*p, pctx + ".params");
        entry.params = *p;
      }
      cfg.policies.push_back(std::move(entry));
    }
  }
  return cfg;
}

ExperimentConfig load_experiment_file(const std::string& path) {
  return load_experiment_config(toml::parse_file(path));
}

PolicyConfig resolve_policy(const PolicyEntry& entry, int n, double rho,
                            const JobSizeModel& model) {
  const std::string ctx = "policy '" + entry.label + "'";
  const json& params = entry.params;
  const double lambda = rho / model.mean();
  const double epsilon = 1.0 - rho;

  if (entry.name == "lwl") {
    reject_unknown(params, {}, ctx);
    return LwlConfig::create(n);
  }
  if (entry.name == "random") {
    reject_unknown(params, {}, ctx);
    return RandomConfig::create(n);
  }
  if (entry.name == "round-robin") {
    reject_unknown(params, {}, ctx);
    return RoundRobinConfig::create(n);
  }
  if (entry.name == "sita-e") {
    reject_unknown(params, {"cutoffs"}, ctx);
    if (params.contains("cutoffs"))
      return SitaConfig::create(n, get_num_vec(params, "cutoffs", ctx));
    return sita_equal_load(n, model);
  }
  if (entry.name == "dice") {
    reject_unknown(params, {"tau", "recipe", "eta"}, ctx);
    if (params.contains("tau")) return DiceConfig::create(n, get_num_vec(params, "tau", ctx));
    std::string recipe = get_str(params, "recipe", ctx);
    if (recipe != "dice-tuned") bail(ctx, "unknown recipe '" + recipe + "'");
    std::optional<double> eta;
    if (params.contains("eta")) eta = get_num(params, "eta", ctx);
    return dice_thresholds(n, epsilon, model, eta);
  }
  if (entry.name == "card-rigid" || entry.name == "card-flexible") {
    const bool flexible = entry.name == "card-flexible";
    if (params.contains("recipe")) {
      std::string recipe = get_str(params, "recipe", ctx);
      if (recipe == "drift") {
        reject_unknown(params, {"recipe", "alpha", "beta", "delta", "short_selection"}, ctx);
        double alpha = get_num(params, "alpha", ctx);
        double beta = get_num(params, "beta", ctx);
        double delta = get_num(params, "delta", ctx);
        auto th = card_params_from_alpha_beta(n, lambda, model, alpha, beta);
        double c = card_threshold_c(n, th.m_plus, beta, delta);
        return CardConfig::create(n, th.m_minus, th.m_plus, c, flexible,
                                  parse_short_selection(params, ctx));
      }
      if (recipe == "practical") {
        reject_unknown(params,
                       {"recipe", "alpha_prime", "beta_prime", "gamma", "short_selection"}, ctx);
        std::optional<double> gamma;
        if (params.contains("gamma")) gamma = get_num(params, "gamma", ctx);
        return card_params_practical(rho, epsilon, model,
                                     get_num_or(params, "alpha_prime", 0.15, ctx),
                                     get_num_or(params, "beta_prime", 0.15, ctx),
                                     gamma, flexible,
                                     parse_short_selection(params, ctx));
      }
      if (recipe == "heavy-traffic") {
        reject_unknown(params, {"recipe", "short_selection"}, ctx);
        auto p = heavy_traffic_recipe(epsilon, n, model);
        return CardConfig::create(n, p.m_minus, p.m_plus, p.c, flexible,
                                  parse_short_selection(params, ctx));
      }
      bail(ctx, "unknown recipe '" + recipe + "'");
    }
    reject_unknown(params, {"m_minus", "m_plus", "c", "short_selection", "relax"}, ctx);
    return CardConfig::create(n, get_num(params, "m_minus", ctx), get_num(params, "m_plus", ctx),
                              get_num(params, "c", ctx), flexible,
                              parse_short_selection(params, ctx),
                              get_bool_or(params, "relax", false, ctx));
  }
  if (entry.name == "card-multiband") {
    reject_unknown(params, {"recipe", "cutoffs", "thresholds", "flexible"}, ctx);
    bool flexible = get_bool_or(params, "flexible", true, ctx);
    if (params.contains("recipe")) {
      std::string recipe = get_str(params, "recipe", ctx);
      if (recipe != "multiband-sqrt-eps") bail(ctx, "unknown recipe '" + recipe + "'");
      return multiband_config(n, rho, epsilon, model, flexible);
    }
    return MultiBandConfig::create(n, get_num_vec(params, "cutoffs", ctx),
                                   get_num_vec(params, "thresholds", ctx), flexible);
  }
  bail(ctx, "unknown policy '" + entry.name + "'");
}

}  // namespace cardsim
