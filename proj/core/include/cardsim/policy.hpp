#pragma once

#include <variant>
#include <vector>

#include "cardsim/rng.hpp"

namespace cardsim {

// Per-server unfinished work, in job-size units. Entries stay nonnegative.
using WorkVector = std::vector<double>;

// How a dispatcher picks among the servers currently in the short role.
enum class ShortSelection { uniform_random, least_work };

enum class JobClass { small = 0, medium = 1, large = 2, none = 3 };

struct LwlConfig {
  int n;
  static LwlConfig create(int n);
};

struct RandomConfig {
  int n;
  static RandomConfig create(int n);
};

struct RoundRobinConfig {
  int n;
  static RoundRobinConfig create(int n);
};

// Size-interval assignment: server i serves sizes in [cutoffs[i-1], cutoffs[i]),
// with implicit outer cutoffs 0 and +infinity. cutoffs has n-1 entries,
// strictly increasing; +infinity is allowed only in the last slot (that
// server then receives nothing).
struct SitaConfig {
  int n;
  std::vector<double> cutoffs;
  static SitaConfig create(int n, std::vector<double> cutoffs);
};

// Three-band dispatcher with one long server and n-1 short servers.
// Sizes below m_minus are small and always go short; sizes in
// [m_minus, m_plus) are medium and go to an inspected short server exactly
// when its work is at most c; sizes at or above m_plus are large and always
// go long. Rigid keeps server n-1 long forever; flexible re-ranks by current
// work on every arrival so the most loaded server plays the long role.
struct CardConfig {
  int n;
  double m_minus;
  double m_plus;
  double c;
  bool flexible;
  ShortSelection short_selection;
  // relax=false enforces m_minus <= m_plus <= c, the regime the analytic
  // guarantees assume. relax=true drops c >= m_plus (load-tuned recipes pick
  // smaller c on purpose) but still rejects c == 0 when m_plus > 0.
  static CardConfig create(int n, double m_minus, double m_plus, double c,
                           bool flexible = false,
                           ShortSelection short_selection = ShortSelection::uniform_random,
                           bool relax = false);
};

// n size bands mapped onto n servers. cutoffs has n entries (strictly
// increasing); thresholds has n-1. A size below cutoffs[0] goes to position
// 0, at or above cutoffs[n-1] to position n-1, and one in
// [cutoffs[j], cutoffs[j+1]) to position j when its work is at most
// thresholds[j], else position j+1. Rigid: positions are physical servers.
// Flexible: positions are servers re-sorted ascending by work per arrival;
// the returned index is always physical.
struct MultiBandConfig {
  int n;
  std::vector<double> cutoffs;
  std::vector<double> thresholds;
  bool flexible;
  static MultiBandConfig create(int n, std::vector<double> cutoffs,
                                std::vector<double> thresholds, bool flexible);
};

// Work-gap dispatcher: servers sorted ascending by work; the job goes to the
// first of the n-1 least-loaded positions whose gap tau[i] - work exceeds
// the job size, else to the most loaded server. tau has n-1 entries,
// positive and nondecreasing (+infinity allowed, which degenerates to
// least-work dispatch).
struct DiceConfig {
  int n;
  std::vector<double> tau;
  static DiceConfig create(int n, std::vector<double> tau);
};

using PolicyConfig = std::variant<LwlConfig, RandomConfig, RoundRobinConfig,
                                  SitaConfig, CardConfig, MultiBandConfig,
                                  DiceConfig>;

int policy_n(const PolicyConfig& policy);

// Scratch state owned by one simulation trial. order is reused by the
// policies that sort servers; rr_cursor is the round-robin position.
struct PolicyState {
  int rr_cursor = 0;
  std::vector<int> order;
};

// Chooses the server for a job of the given size. Ties on work always break
// toward the lowest physical index, so a (policy, state, size, work, rng)
// tuple fully determines the result. Randomized choices consume draws only
// from the supplied stream.
int dispatch(const PolicyConfig& policy, PolicyState& state, double size,
             const WorkVector& work, RandomStream& rng);

// Size class under the policy's own bands. Policies without size bands
// (and SITA, whose bands play a different role) report none.
JobClass classify(const PolicyConfig& policy, double size);

}  // namespace cardsim
