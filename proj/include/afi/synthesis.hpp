#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "afi/bts.hpp"

namespace afi {

enum class TieBreak {
  standard,       // fastest, smaller disable set, "~" before enforce, lexical
  paper_example,  // as standard, but enforce before "~" at unisolated estimates
};

inline std::string_view to_string(TieBreak t) {
  return t == TieBreak::standard ? "default" : "paper-example";
}

inline TieBreak parse_tie_break(std::string_view s) {
  if (s == "default") return TieBreak::standard;
  if (s == "paper-example") return TieBreak::paper_example;
  fail(ErrorKind::input, "unknown tie-break '" + std::string(s) + "' (expected default or paper-example)");
}

/// Outcome of the good-state fixpoint over the live BTS. Indices refer to the
/// live BTS the result was computed from.
struct FixpointResult {
  std::vector<std::optional<int>> y_round;  // round in which each Y-state became good
  std::vector<std::optional<int>> z_round;
  std::vector<std::optional<std::uint32_t>> choice;  // chosen Z-state per good Y-state
  int rounds = 0;
  bool solvable = false;
  std::optional<int> isolation_bound;  // max round over the frontier when solvable

  bool good_y(std::uint32_t y) const { return y_round[y].has_value(); }
  bool good_z(std::uint32_t z) const { return z_round[z].has_value(); }
};

namespace detail {

inline auto decision_key(const EventTable& table, const ControlDecision& d) {
  std::vector<std::string> disable;
  for (auto e : d.disable) disable.push_back(table.name(e));
  return std::make_tuple(d.enforce ? table.name(*d.enforce) : std::string(), std::move(disable));
}

}  // namespace detail

/// Backward fixpoint from the isolated estimates: a Z-state is good once all its successors are
/// good, a Y-state once some of its Z-states is.
inline FixpointResult good_fixpoint(const BTSGraph& g, const EventTable& table, TieBreak tie = TieBreak::standard) {
  FixpointResult r;
  r.y_round.assign(g.y_states.size(), std::nullopt);
  r.z_round.assign(g.z_states.size(), std::nullopt);
  r.choice.assign(g.y_states.size(), std::nullopt);
  for (std::uint32_t y = 0; y < g.y_states.size(); ++y)
    if (g.is_marked(y)) r.y_round[y] = 0;

  for (int round = 1;; ++round) {
    std::vector<std::uint32_t> new_z, new_y;
    for (std::uint32_t z = 0; z < g.z_states.size(); ++z) {
      if (r.good_z(z) || g.zy[z].empty()) continue;
      if (std::all_of(g.zy[z].begin(), g.zy[z].end(), [&](const ZYEdge& e) { return r.good_y(e.y); }))
        new_z.push_back(z);
    }
    for (auto z : new_z) r.z_round[z] = round;
    for (std::uint32_t y = 0; y < g.y_states.size(); ++y) {
      if (r.good_y(y)) continue;
      if (std::any_of(g.yz[y].begin(), g.yz[y].end(), [&](std::uint32_t z) { return r.good_z(z); }))
        new_y.push_back(y);
    }
    for (auto y : new_y) r.y_round[y] = round;
    if (new_y.empty() && new_z.empty()) break;
    r.rounds = round;
  }

  for (std::uint32_t y = 0; y < g.y_states.size(); ++y) {
    if (!r.good_y(y)) continue;
    const bool marked = g.is_marked(y);
    const bool enforce_first = tie == TieBreak::paper_example && !marked;
    std::optional<std::uint32_t> best;
    auto key = [&](std::uint32_t z) {
      int slowest = 0;
      for (const auto& e : g.zy[z]) slowest = std::max(slowest, *r.y_round[e.y]);
      const auto& d = g.z_states[z].decision;
      const bool none = !d.enforce.has_value();
      return std::make_tuple(slowest, d.disable.size(), enforce_first ? none : !none,
                             detail::decision_key(table, d));
    };
    for (auto z : g.yz[y]) {
      if (!r.good_z(z)) continue;
      if (!marked && *r.z_round[z] > *r.y_round[y]) continue;
      if (!best || key(z) < key(*best)) best = z;
    }
    r.choice[y] = best;
  }

  r.solvable = std::all_of(g.initial.begin(), g.initial.end(), [&](std::uint32_t y) { return r.good_y(y); });
  if (r.solvable) {
    int bound = 0;
    for (auto y : g.initial) bound = std::max(bound, *r.y_round[y]);
    r.isolation_bound = bound;
  }
  return r;
}

/// Why an initial Y-state is not good: for each of its decisions, the
/// successor estimates that are not good.
struct UnsolvedInitial {
  StateEstimate estimate;
  std::vector<std::pair<ControlDecision, std::vector<StateEstimate>>> blocked;
};

inline std::vector<UnsolvedInitial> unsolved_initials(const BTSGraph& g, const FixpointResult& r) {
  std::vector<UnsolvedInitial> out;
  for (auto y : g.initial) {
    if (r.good_y(y)) continue;
    UnsolvedInitial u{g.y_states[y], {}};
    for (auto z : g.yz[y]) {
      std::vector<StateEstimate> bad;
      for (const auto& e : g.zy[z])
        if (!r.good_y(e.y)) bad.push_back(g.y_states[e.y]);
      u.blocked.emplace_back(g.z_states[z].decision, std::move(bad));
    }
    out.push_back(std::move(u));
  }
  return out;
}

/// Runtime supervisor: decisions on good estimates, "<~,{}>" elsewhere.
struct SupervisorPolicy {
  std::vector<StateEstimate> frontier;
  std::map<StateEstimate, ControlDecision> decisions;
  ControlDecision default_decision;
  /// Policy-restricted estimate transitions.
  std::map<std::pair<StateEstimate, EventId>, StateEstimate> transitions;
  TieBreak tie_break = TieBreak::standard;
  int isolation_bound = 0;

  const ControlDecision& decide(const StateEstimate& est) const {
    auto it = decisions.find(est);
    return it == decisions.end() ? default_decision : it->second;
  }
};

/// Everything produced by one synthesis run.
struct SynthesisResult {
  BTSGraph bts;
  std::vector<std::uint32_t> deadlocks;  // indices into bts
  BTSGraph live;
  FixpointResult fixpoint;
  TieBreak tie_break = TieBreak::standard;

  bool solvable() const { return fixpoint.solvable; }

  std::vector<StateEstimate> good_y() const {
    std::vector<StateEstimate> out;
    for (std::uint32_t y = 0; y < live.y_states.size(); ++y)
      if (fixpoint.good_y(y)) out.push_back(live.y_states[y]);
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<std::pair<StateEstimate, ControlDecision>> good_z() const {
    std::vector<std::pair<StateEstimate, ControlDecision>> out;
    for (std::uint32_t z = 0; z < live.z_states.size(); ++z)
      if (fixpoint.good_z(z)) out.emplace_back(live.z_estimate(z), live.z_states[z].decision);
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<std::pair<StateEstimate, ControlDecision>> deadlock_states() const {
    std::vector<std::pair<StateEstimate, ControlDecision>> out;
    for (auto z : deadlocks) out.emplace_back(bts.z_estimate(z), bts.z_states[z].decision);
    return out;
  }

  std::map<StateEstimate, ControlDecision> policy() const {
    std::map<StateEstimate, ControlDecision> out;
    for (std::uint32_t y = 0; y < live.y_states.size(); ++y)
      if (fixpoint.choice[y]) out.emplace(live.y_states[y], live.z_states[*fixpoint.choice[y]].decision);
    return out;
  }

  /// Round of each initial estimate; absent when not good.
  std::vector<std::pair<StateEstimate, std::optional<int>>> initial_rounds() const {
    std::vector<std::pair<StateEstimate, std::optional<int>>> out;
    for (auto y : live.initial) out.emplace_back(live.y_states[y], fixpoint.y_round[y]);
    return out;
  }
};

struct SynthesisOptions {
  TieBreak tie_break = TieBreak::standard;
  std::size_t max_bts_states = default_bts_cap;
};

inline SynthesisResult synthesize(const LabeledAutomaton& la, const std::vector<StateEstimate>& frontier,
                                  const SynthesisOptions& options = {}) {
  SynthesisResult out;
  out.tie_break = options.tie_break;
  out.bts = build_bts(la, frontier, options.max_bts_states);
  out.deadlocks = find_deadlocks(la, out.bts);
  out.live = prune_live(out.bts, out.deadlocks);
  out.fixpoint = good_fixpoint(out.live, la.events(), options.tie_break);
  return out;
}

inline SynthesisResult synthesize(const LabeledAutomaton& la, const SynthesisOptions& options = {}) {
  return synthesize(la, fault_frontier(la), options);
}

inline std::string describe_unsolved(const LabeledAutomaton& la, const std::vector<UnsolvedInitial>& unsolved) {
  std::string out;
  for (const auto& u : unsolved) {
    out += "initial " + format_estimate(la, u.estimate) + " is not good\n";
    for (const auto& [d, bad] : u.blocked) {
      out += "  " + format_decision_short(la.events(), d) + " leads to";
      if (bad.empty()) out += " only good states but is not good";
      for (const auto& est : bad) out += " " + format_estimate(la, est);
      out += '\n';
    }
  }
  return out;
}

/// Recomputes the policy transition table from the decisions and checks that
/// every estimate reachable from the frontier has a decision.
inline void close_policy(const LabeledAutomaton& la, SupervisorPolicy& p) {
  p.transitions.clear();
  const auto observable = la.events().observable_events();
  std::vector<StateEstimate> stack(p.frontier.begin(), p.frontier.end());
  std::map<StateEstimate, char> seen;
  for (const auto& est : stack) seen[est] = 1;
  while (!stack.empty()) {
    auto est = std::move(stack.back());
    stack.pop_back();
    auto it = p.decisions.find(est);
    if (it == p.decisions.end())
      fail(ErrorKind::synthesis, "supervisor has no decision for reachable estimate " + format_estimate(la, est));
    if (!is_feasible(la, est, it->second))
      fail(ErrorKind::synthesis, "supervisor decision " + format_decision(la.events(), it->second) +
                                     " is infeasible at " + format_estimate(la, est));
    for (auto obs : observable) {
      if (contains(it->second.disable, obs)) continue;
      auto next = observable_reach(la, est, it->second, obs);
      if (next.empty()) continue;
      p.transitions.emplace(std::make_pair(est, obs), next);
      if (seen.emplace(next, 1).second) stack.push_back(std::move(next));
    }
  }
}

/// Packages the chosen decisions over good estimates as a runtime supervisor.
inline SupervisorPolicy extract_supervisor(const LabeledAutomaton& la, const SynthesisResult& res) {
  const auto& g = res.live;
  const auto& r = res.fixpoint;
  if (!r.solvable)
    fail(ErrorKind::synthesis, "isolation problem is not solvable\n" + describe_unsolved(la, unsolved_initials(g, r)));
  SupervisorPolicy p;
  p.tie_break = res.tie_break;
  p.isolation_bound = *r.isolation_bound;
  for (auto y : g.initial) p.frontier.push_back(g.y_states[y]);
  std::sort(p.frontier.begin(), p.frontier.end());
  p.frontier.erase(std::unique(p.frontier.begin(), p.frontier.end()), p.frontier.end());
  for (std::uint32_t y = 0; y < g.y_states.size(); ++y) {
    if (!r.choice[y]) continue;
    p.decisions.emplace(g.y_states[y], g.z_states[*r.choice[y]].decision);
  }
  close_policy(la, p);
  return p;
}

}  // namespace afi
