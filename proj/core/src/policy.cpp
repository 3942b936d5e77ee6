#include "cardsim/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cardsim {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

// Strictly increasing, positive, +infinity at most once and only last.
void check_cutoffs(const std::vector<double>& cuts, std::size_t expected,
                   const char* what) {
  require(cuts.size() == expected, what);
  double prev = 0.0;
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    require(!std::isnan(cuts[i]) && cuts[i] > prev, what);
    require(std::isfinite(cuts[i]) || i + 1 == cuts.size(), what);
    prev = cuts[i];
  }
}

int least_index(const WorkVector& w) {
  return static_cast<int>(std::min_element(w.begin(), w.end()) - w.begin());
}

// Server indices ascending by work, ties toward the lower physical index.
void sort_by_work(const WorkVector& w, std::vector<int>& order) {
  order.resize(w.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&w](int a, int b) {
    return w[a] < w[b] || (w[a] == w[b] && a < b);
  });
}

int dispatch_sita(const SitaConfig& p, double s) {
  auto it = std::upper_bound(p.cutoffs.begin(), p.cutoffs.end(), s);
  return static_cast<int>(it - p.cutoffs.begin());
}

int dispatch_card(const CardConfig& p, PolicyState& st, double s,
                  const WorkVector& w, RandomStream& rng) {
  int long_server = p.n - 1;
  const int shorts = p.n - 1;
  // after_rank(i): physical index of the i-th least-loaded short server.
  // Rigid keeps the identity layout, flexible uses the sorted order.
  const int* rank = nullptr;
  if (p.flexible) {
    sort_by_work(w, st.order);
    long_server = st.order.back();
    rank = st.order.data();
  }
  auto short_at = [&](int i) { return p.flexible ? rank[i] : i; };

  if (s >= p.m_plus) return long_server;

  int probe;
  if (p.short_selection == ShortSelection::least_work) {
    if (p.flexible) {
      probe = rank[0];  // sorted order already puts the least work first
    } else {
      probe = 0;
      for (int i = 1; i < shorts; ++i)
        if (w[i] < w[probe]) probe = i;
    }
  } else {
    probe = short_at(rng.next_index(shorts));
  }
  if (s < p.m_minus) return probe;
  return w[probe] <= p.c ? probe : long_server;
}

int dispatch_multiband(const MultiBandConfig& p, PolicyState& st, double s,
                       const WorkVector& w, RandomStream& rng) {
  (void)rng;
  const std::vector<int>* order = nullptr;
  if (p.flexible) {
    sort_by_work(w, st.order);
    order = &st.order;
  }
  auto at = [&](int pos) { return p.flexible ? (*order)[pos] : pos; };

  auto it = std::upper_bound(p.cutoffs.begin(), p.cutoffs.end(), s);
  int band = static_cast<int>(it - p.cutoffs.begin());
  if (band == 0) return at(0);
  if (band == p.n) return at(p.n - 1);
  int pos = band - 1;
  return w[at(pos)] <= p.thresholds[pos] ? at(pos) : at(pos + 1);
}

int dispatch_dice(const DiceConfig& p, PolicyState& st, double s,
                  const WorkVector& w) {
  sort_by_work(w, st.order);
  for (int i = 0; i + 1 < p.n; ++i)
    if (p.tau[i] - w[st.order[i]] > s) return st.order[i];
  return st.order[p.n - 1];
}

}  // namespace

LwlConfig LwlConfig::create(int n) {
  require(n >= 1, "least-work policy needs n >= 1");
  return {n};
}

RandomConfig RandomConfig::create(int n) {
  require(n >= 1, "random policy needs n >= 1");
  return {n};
}

RoundRobinConfig RoundRobinConfig::create(int n) {
  require(n >= 1, "round-robin policy needs n >= 1");
  return {n};
}

SitaConfig SitaConfig::create(int n, std::vector<double> cutoffs) {
  require(n >= 2, "size-interval policy needs n >= 2");
  check_cutoffs(cutoffs, static_cast<std::size_t>(n) - 1,
                "size cutoffs must be n-1 strictly increasing positive values");
  return {n, std::move(cutoffs)};
}

CardConfig CardConfig::create(int n, double m_minus, double m_plus, double c,
                              bool flexible, ShortSelection short_selection,
                              bool relax) {
  require(n >= 2, "card policy needs n >= 2");
  require(std::isfinite(m_minus) && m_minus >= 0.0, "m_minus must be finite and >= 0");
  require(std::isfinite(m_plus) && m_plus >= m_minus, "need m_minus <= m_plus");
  require(std::isfinite(c) && c >= 0.0, "work cap must be finite and >= 0");
  if (!relax) require(c >= m_plus, "need m_plus <= c (pass relax to lift)");
  // c = 0 would bounce every medium job off an empty short server.
  require(c > 0.0 || m_plus == 0.0, "work cap 0 with a nonempty medium band");
  return {n, m_minus, m_plus, c, flexible, short_selection};
}

MultiBandConfig MultiBandConfig::create(int n, std::vector<double> cutoffs,
                                        std::vector<double> thresholds,
                                        bool flexible) {
  require(n >= 2, "multiband policy needs n >= 2");
  check_cutoffs(cutoffs, static_cast<std::size_t>(n),
                "band cutoffs must be n strictly increasing positive values");
  require(thresholds.size() == static_cast<std::size_t>(n) - 1,
          "multiband needs n-1 work thresholds");
  for (double t : thresholds)
    require(!std::isnan(t) && t > 0.0, "work thresholds must be positive");
  return {n, std::move(cutoffs), std::move(thresholds), flexible};
}

DiceConfig DiceConfig::create(int n, std::vector<double> tau) {
  require(n >= 2, "gap policy needs n >= 2");
  require(tau.size() == static_cast<std::size_t>(n) - 1,
          "gap policy needs n-1 work levels");
  double prev = 0.0;
  for (double t : tau) {
    require(!std::isnan(t) && t > 0.0 && t >= prev,
            "work levels must be positive and nondecreasing");
    prev = t;
  }
  return {n, std::move(tau)};
}

int policy_n(const PolicyConfig& policy) {
  return std::visit([](const auto& p) { return p.n; }, policy);
}

int dispatch(const PolicyConfig& policy, PolicyState& state, double size,
             const WorkVector& work, RandomStream& rng) {
  return std::visit(
      [&](const auto& p) -> int {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, LwlConfig>) {
          return least_index(work);
        } else if constexpr (std::is_same_v<P, RandomConfig>) {
          return rng.next_index(p.n);
        } else if constexpr (std::is_same_v<P, RoundRobinConfig>) {
          int idx = state.rr_cursor;
          state.rr_cursor = (state.rr_cursor + 1) % p.n;
          return idx;
        } else if constexpr (std::is_same_v<P, SitaConfig>) {
          return dispatch_sita(p, size);
        } else if constexpr (std::is_same_v<P, CardConfig>) {
          return dispatch_card(p, state, size, work, rng);
        } else if constexpr (std::is_same_v<P, MultiBandConfig>) {
          return dispatch_multiband(p, state, size, work, rng);
        } else {
          static_assert(std::is_same_v<P, DiceConfig>);
          return dispatch_dice(p, state, size, work);
        }
      },
      policy);
}

JobClass classify(const PolicyConfig& policy, double size) {
  if (const auto* card = std::get_if<CardConfig>(&policy)) {
    if (size < card->m_minus) return JobClass::small;
    if (size < card->m_plus) return JobClass::medium;
    return JobClass::large;
  }
  if (const auto* mb = std::get_if<MultiBandConfig>(&policy)) {
    if (size < mb->cutoffs.front()) return JobClass::small;
    if (size >= mb->cutoffs.back()) return JobClass::large;
    return JobClass::medium;
  }
  return JobClass::none;
}

}  // namespace cardsim
