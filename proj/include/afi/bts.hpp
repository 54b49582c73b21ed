#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "afi/decision.hpp"
#include "afi/diagnosis.hpp"

namespace afi {

/// X_{F,0}: estimates where fault certainty is first reached.
inline std::vector<StateEstimate> fault_frontier(const LabeledAutomaton& la, const Diagnoser& d) {
  if (!check_diagnosability(la).diagnosable)
    fail(ErrorKind::precondition, "fault frontier requires a diagnosable system");
  std::vector<StateEstimate> out;
  for (auto x : fault_frontier_states(la, d)) out.push_back(d.estimate(x));
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<StateEstimate> fault_frontier(const LabeledAutomaton& la) {
  return fault_frontier(la, build_diagnoser(la));
}

inline constexpr std::size_t max_controllable_events = 16;

/// FCD(est) in canonical form and listing order. Observable enforcement
/// carries an empty disable set.
inline std::vector<ControlDecision> feasible_decisions(const LabeledAutomaton& la, const StateEstimate& est) {
  if (est.empty()) fail(ErrorKind::input, "feasible_decisions: empty estimate");
  const auto& aut = la.automaton;
  const auto& table = aut.events();
  const auto controllable = table.controllable_events();
  if (controllable.size() > max_controllable_events)
    fail(ErrorKind::resource, "too many controllable events (" + std::to_string(controllable.size()) + ")");
  std::vector<EventSet> subsets;
  for (std::uint32_t mask = 0; mask < (1u << controllable.size()); ++mask) {
    EventSet s;
    for (std::size_t i = 0; i < controllable.size(); ++i)
      if (mask & (1u << i)) s.push_back(controllable[i]);
    subsets.push_back(std::move(s));
  }

  std::vector<ControlDecision> out;
  for (auto e : table.forcible_events()) {
    const bool everywhere = std::all_of(est.members.begin(), est.members.end(),
                                        [&](StateId q) { return aut.next(q, e).has_value(); });
    if (!everywhere) continue;
    if (table.observable(e)) {
      out.push_back({e, {}});
    } else {
      for (const auto& s : subsets) out.push_back({e, s});
    }
  }
  for (const auto& s : subsets) out.push_back({std::nullopt, s});
  std::sort(out.begin(), out.end(), listing_order);
  return out;
}

inline bool is_feasible(const LabeledAutomaton& la, const StateEstimate& est, const ControlDecision& d) {
  const auto& aut = la.automaton;
  const auto& table = aut.events();
  for (auto e : d.disable)
    if (index_of(e) >= table.size() || !table.controllable(e)) return false;
  if (!std::is_sorted(d.disable.begin(), d.disable.end())) return false;
  if (!d.enforce) return true;
  if (index_of(*d.enforce) >= table.size() || !table.forcible(*d.enforce)) return false;
  if (table.observable(*d.enforce) && !d.disable.empty()) return false;
  return std::all_of(est.members.begin(), est.members.end(),
                     [&](StateId q) { return aut.next(q, *d.enforce).has_value(); });
}

/// Estimate after issuing `d` at `est` and then observing `obs`. Empty when
/// the observation cannot follow.
inline StateEstimate observable_reach(const LabeledAutomaton& la, const StateEstimate& est, const ControlDecision& d,
                                      EventId obs) {
  const auto& aut = la.automaton;
  const auto& table = aut.events();
  if (!is_feasible(la, est, d))
    fail(ErrorKind::input, "decision " + format_decision(table, d) + " is not feasible at " + format_estimate(la, est));
  if (index_of(obs) >= table.size() || !table.observable(obs))
    fail(ErrorKind::input, "observable_reach expects an observable event");
  if (contains(d.disable, obs))
    fail(ErrorKind::input, "event '" + table.name(obs) + "' is disabled by the decision");

  if (d.enforce && table.observable(*d.enforce)) {
    if (obs != *d.enforce) return {};
    std::vector<StateId> next;
    for (auto q : est.members) next.push_back(*aut.next(q, obs));
    return StateEstimate(std::move(next));
  }
  if (d.enforce) {
    std::vector<StateId> after;
    for (auto q : est.members) after.push_back(*aut.next(q, *d.enforce));
    const StateEstimate enforced(std::move(after));
    return observe_step(aut, enforced.members, obs, d.disable);
  }
  return observe_step(aut, est.members, obs, d.disable);
}

// --- bipartite transition system ----------------------------------------------------

struct ZState {
  std::uint32_t y;  // index of the owning Y-state
  ControlDecision decision;
};

struct ZYEdge {
  EventId event;
  std::uint32_t y;
};

/// Accessible BTS from the fault frontier. Y-states are indexed in discovery
/// order; Z-states of a Y-state follow the listing order of decisions.
struct BTSGraph {
  std::vector<StateEstimate> y_states;
  std::vector<ZState> z_states;
  std::vector<std::vector<std::uint32_t>> yz;  // per Y-state: its Z-states
  std::vector<std::vector<ZYEdge>> zy;         // per Z-state: sorted by event
  std::vector<std::uint32_t> initial;          // frontier, sorted by estimate
  std::vector<char> marked;                    // per Y-state: isolated

  std::optional<std::uint32_t> find_y(const StateEstimate& est) const {
    auto it = std::find(y_states.begin(), y_states.end(), est);
    if (it == y_states.end()) return std::nullopt;
    return static_cast<std::uint32_t>(it - y_states.begin());
  }

  std::optional<std::uint32_t> find_z(const StateEstimate& est, const ControlDecision& d) const {
    auto y = find_y(est);
    if (!y) return std::nullopt;
    for (auto z : yz[*y])
      if (z_states[z].decision == d) return z;
    return std::nullopt;
  }

  const StateEstimate& z_estimate(std::uint32_t z) const { return y_states[z_states[z].y]; }
  bool is_marked(std::uint32_t y) const { return marked[y] != 0; }
  std::size_t size() const { return y_states.size() + z_states.size(); }
};

inline bool is_isolated(const LabeledAutomaton& la, const StateEstimate& est) {
  return classify(la, est).isolated != 0;
}

inline constexpr std::size_t default_bts_cap = 1'000'000;

inline BTSGraph build_bts(const LabeledAutomaton& la, const std::vector<StateEstimate>& frontier,
                          std::size_t max_states = default_bts_cap) {
  const auto observable = la.events().observable_events();
  BTSGraph g;
  std::unordered_map<StateEstimate, std::uint32_t, StateEstimateHash> index;
  auto intern = [&](const StateEstimate& est) {
    auto [it, inserted] = index.emplace(est, static_cast<std::uint32_t>(g.y_states.size()));
    if (inserted) {
      g.y_states.push_back(est);
      g.yz.emplace_back();
      g.marked.push_back(is_isolated(la, est) ? 1 : 0);
    }
    return it->second;
  };
  for (const auto& est : frontier) g.initial.push_back(intern(est));
  for (std::uint32_t y = 0; y < g.y_states.size(); ++y) {
    for (auto& d : feasible_decisions(la, g.y_states[y])) {
      const auto z = static_cast<std::uint32_t>(g.z_states.size());
      g.yz[y].push_back(z);
      std::vector<ZYEdge> edges;
      for (auto obs : observable) {
        if (contains(d.disable, obs)) continue;
        auto next = observable_reach(la, g.y_states[y], d, obs);
        if (next.empty()) continue;
        edges.push_back({obs, intern(next)});
      }
      g.z_states.push_back({y, std::move(d)});
      g.zy.push_back(std::move(edges));
      if (g.size() > max_states)
        fail(ErrorKind::resource, "BTS exceeded " + std::to_string(max_states) + " states (Y=" +
                                      std::to_string(g.y_states.size()) + ", Z=" + std::to_string(g.z_states.size()) +
                                      ")");
    }
  }
  return g;
}

inline BTSGraph build_bts(const LabeledAutomaton& la, std::size_t max_states = default_bts_cap) {
  return build_bts(la, fault_frontier(la), max_states);
}

// --- deadlocks ------------------------------------------------------------------------

/// True when every state in the controlled unobservable reach of `from`
/// admits some event outside the disable set.
inline bool controlled_reach_continues(const Automaton& aut, std::span<const StateId> from, const EventSet& disable) {
  for (auto q : unobservable_reach(aut, from, disable)) {
    const auto edges = aut.out(q);
    const bool has_move =
        std::any_of(edges.begin(), edges.end(), [&](const Edge& e) { return !contains(disable, e.event); });
    if (!has_move) return false;
  }
  return true;
}

/// Deadlock test for a single (estimate, decision) pair.
inline bool is_deadlock(const LabeledAutomaton& la, const StateEstimate& est, const ControlDecision& d) {
  const auto& aut = la.automaton;
  if (d.enforce) {
    std::vector<StateId> after;
    for (auto q : est.members) {
      auto t = aut.next(q, *d.enforce);
      if (!t) return true;
      after.push_back(*t);
    }
    if (aut.events().observable(*d.enforce)) return false;
    return !controlled_reach_continues(aut, after, d.disable);
  }
  return !controlled_reach_continues(aut, est.members, d.disable);
}

/// Z_DL, as sorted Z-state indices.
inline std::vector<std::uint32_t> find_deadlocks(const LabeledAutomaton& la, const BTSGraph& g) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t z = 0; z < g.z_states.size(); ++z)
    if (is_deadlock(la, g.z_estimate(z), g.z_states[z].decision)) out.push_back(z);
  return out;
}

/// Live BTS: deadlock Z-states removed, accessible part from the frontier, re-indexed
/// in breadth-first order.
inline BTSGraph prune_live(const BTSGraph& g, const std::vector<std::uint32_t>& deadlocks) {
  std::vector<char> dead(g.z_states.size(), 0);
  for (auto z : deadlocks) dead.at(z) = 1;

  constexpr auto unset = static_cast<std::uint32_t>(-1);
  std::vector<std::uint32_t> y_map(g.y_states.size(), unset);
  std::vector<std::uint32_t> order;
  for (auto y : g.initial)
    if (y_map[y] == unset) {
      y_map[y] = static_cast<std::uint32_t>(order.size());
      order.push_back(y);
    }
  for (std::size_t i = 0; i < order.size(); ++i)
    for (auto z : g.yz[order[i]]) {
      if (dead[z]) continue;
      for (const auto& e : g.zy[z])
        if (y_map[e.y] == unset) {
          y_map[e.y] = static_cast<std::uint32_t>(order.size());
          order.push_back(e.y);
        }
    }

  BTSGraph out;
  for (auto y : order) {
    out.y_states.push_back(g.y_states[y]);
    out.marked.push_back(g.marked[y]);
    out.yz.emplace_back();
  }
  for (std::uint32_t ny = 0; ny < order.size(); ++ny) {
    for (auto z : g.yz[order[ny]]) {
      if (dead[z]) continue;
      out.yz[ny].push_back(static_cast<std::uint32_t>(out.z_states.size()));
      out.z_states.push_back({ny, g.z_states[z].decision});
      std::vector<ZYEdge> edges;
      for (const auto& e : g.zy[z]) edges.push_back({e.event, y_map[e.y]});
      out.zy.push_back(std::move(edges));
    }
    if (out.yz[ny].empty())
      fail(ErrorKind::synthesis, "Y-state lost every decision after deadlock removal");
  }
  for (auto y : g.initial) out.initial.push_back(y_map[y]);
  return out;
}

}  // namespace afi
