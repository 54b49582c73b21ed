#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "afi/afi.hpp"

namespace afi::test {

/// Random plants satisfying A1-A3 by construction:
///  - states are split into a normal region and one region per fault type;
///  - unobservable edges (faults included) only go to higher state indices;
///  - fault edges leave the normal region, other edges stay in their region;
///  - every state gets an outgoing edge.
struct RandomPlantOptions {
  int max_states = 10;
  int max_fault_types = 3;
};

class PlantGenerator {
 public:
  explicit PlantGenerator(std::uint64_t seed, RandomPlantOptions options = {}) : rng_(seed), options_(options) {}

  Automaton next() {
    const int k = uniform(1, options_.max_fault_types);
    const int n = uniform(k + 2, std::max(k + 2, options_.max_states));
    auto table = std::make_shared<EventTable>();

    const int n_obs = uniform(2, 3);
    const int n_uo = uniform(0, 2);
    int controllable = 0;
    std::vector<EventId> observable, unobservable, faults;
    for (int i = 1; i <= n_obs; ++i) {
      const bool ctrl = controllable < 3 && chance(0.4);
      controllable += ctrl;
      observable.push_back(table->add({"o" + std::to_string(i), true, ctrl, chance(0.45), std::nullopt}));
    }
    for (int i = 1; i <= n_uo; ++i) {
      const bool ctrl = controllable < 3 && chance(0.3);
      controllable += ctrl;
      unobservable.push_back(table->add({"u" + std::to_string(i), false, ctrl, chance(0.4), std::nullopt}));
    }
    for (int i = 1; i <= k; ++i) faults.push_back(table->add({"f" + std::to_string(i), false, false, false, i}));

    // region[q]: 0 normal, i fault type i. Normal states come first.
    const int normal = uniform(1, n - k);
    std::vector<int> region(n, 0);
    for (int q = normal; q < n; ++q) region[q] = 1 + (q - normal) % k;
    std::sort(region.begin() + normal, region.end());

    std::vector<std::vector<Edge>> out(n);
    auto used = [&](int q, EventId e) {
      return std::any_of(out[q].begin(), out[q].end(), [&](const Edge& x) { return x.event == e; });
    };
    auto pick = [&](const std::vector<int>& candidates) { return candidates[uniform(0, int(candidates.size()) - 1)]; };
    auto in_region = [&](int r, int above) {
      std::vector<int> c;
      for (int q = 0; q < n; ++q)
        if (region[q] == r && q > above) c.push_back(q);
      return c;
    };
    for (int q = 0; q < n; ++q) {
      for (auto e : observable)
        if (chance(0.45)) out[q].push_back({e, static_cast<StateId>(pick(in_region(region[q], -1)))});
      for (auto e : unobservable)
        if (chance(0.3)) {
          auto c = in_region(region[q], q);
          if (!c.empty()) out[q].push_back({e, static_cast<StateId>(pick(c))});
        }
      if (region[q] == 0)
        for (std::size_t i = 0; i < faults.size(); ++i)
          if (chance(0.3)) out[q].push_back({faults[i], static_cast<StateId>(pick(in_region(int(i) + 1, q)))});
    }
    // A fault from the initial region guarantees something to diagnose.
    if (!std::any_of(out[0].begin(), out[0].end(), [&](const Edge& e) { return table->info(e.event).is_fault(); })) {
      const int type = uniform(1, k);
      out[0].push_back({faults[type - 1], static_cast<StateId>(pick(in_region(type, 0)))});
    }
    for (int q = 0; q < n; ++q) {
      if (!out[q].empty()) continue;
      auto e = observable[uniform(0, n_obs - 1)];
      if (!used(q, e)) out[q].push_back({e, static_cast<StateId>(pick(in_region(region[q], -1)))});
    }
    std::vector<std::string> names;
    for (int q = 0; q < n; ++q) names.push_back(std::to_string(q));
    return Automaton(table, std::move(names), std::move(out), StateId{0});
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

  std::mt19937_64 rng_;
  RandomPlantOptions options_;
};

}  // namespace afi::test
