#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "afi/synthesis.hpp"

namespace afi {

enum class Phase { detection, isolation };

inline std::string_view to_string(Phase p) { return p == Phase::detection ? "detection" : "isolation"; }

inline std::string format_verdict(const DiagnosisVerdict& v) {
  return "det=" + std::string(to_string(v.detection)) + " iso=" + v.isolation_string();
}

/// Observer side of the switch architecture: uncontrolled estimation until
/// fault certainty, then supervised estimation.
struct EngineState {
  Phase phase = Phase::detection;
  StateEstimate estimate;
  std::vector<EventId> observations;
  std::vector<ControlDecision> decisions;
  DiagnosisVerdict verdict;

  const ControlDecision* active_decision() const {
    return phase == Phase::isolation && !decisions.empty() ? &decisions.back() : nullptr;
  }
};

class IsolationEngine {
 public:
  IsolationEngine(const LabeledAutomaton& plant, const SupervisorPolicy& policy) : plant_(&plant), policy_(&policy) {}

  EngineState initial() const {
    EngineState s;
    s.estimate = StateEstimate({plant_->automaton.initial()});
    s.verdict = classify(*plant_, s.estimate);
    return s;
  }

  EngineState step(EngineState s, EventId obs) const {
    const auto& table = plant_->events();
    if (index_of(obs) >= table.size() || !table.observable(obs))
      fail(ErrorKind::protocol, "engine received a non-observable event");
    if (s.phase == Phase::detection) {
      auto next = observe_step(plant_->automaton, s.estimate.members, obs);
      if (next.empty())
        fail(ErrorKind::protocol, "observation '" + table.name(obs) + "' is infeasible at " +
                                      format_estimate(*plant_, s.estimate));
      s.estimate = std::move(next);
      s.observations.push_back(obs);
      s.verdict = classify(*plant_, s.estimate);
      if (s.verdict.detection == Detection::faulty) {
        s.phase = Phase::isolation;
        s.decisions.push_back(policy_->decide(s.estimate));
      }
      return s;
    }
    const auto& d = s.decisions.back();
    if (contains(d.disable, obs))
      fail(ErrorKind::protocol, "observed '" + table.name(obs) + "' while it is disabled by " +
                                    format_decision(table, d));
    if (d.enforce && table.observable(*d.enforce) && *d.enforce != obs)
      fail(ErrorKind::protocol, "observed '" + table.name(obs) + "' but '" + table.name(*d.enforce) +
                                    "' was enforced");
    auto next = observable_reach(*plant_, s.estimate, d, obs);
    if (next.empty())
      fail(ErrorKind::protocol, "observation '" + table.name(obs) + "' is infeasible under " +
                                    format_decision(table, d) + " at " + format_estimate(*plant_, s.estimate));
    s.estimate = std::move(next);
    s.observations.push_back(obs);
    s.verdict = classify(*plant_, s.estimate);
    s.decisions.push_back(policy_->decide(s.estimate));
    return s;
  }

  EngineState replay(std::span<const EventId> observations) const {
    auto s = initial();
    for (auto obs : observations) s = step(std::move(s), obs);
    return s;
  }

  const LabeledAutomaton& plant() const { return *plant_; }
  const SupervisorPolicy& policy() const { return *policy_; }

 private:
  const LabeledAutomaton* plant_;
  const SupervisorPolicy* policy_;
};

// --- closed loop --------------------------------------------------------------------

/// Supervisor memory for one closed-loop state. `fresh` marks the point right
/// after an observation (or the switch), where an enforced event must fire.
struct SupervisorMemory {
  Phase phase = Phase::detection;
  StateEstimate estimate;
  bool fresh = false;

  friend auto operator<=>(const SupervisorMemory&, const SupervisorMemory&) = default;
  friend bool operator==(const SupervisorMemory&, const SupervisorMemory&) = default;
};

/// Events the closed loop allows at plant state `q` under memory `m`.
inline EventSet admissible_events(const LabeledAutomaton& la, const SupervisorPolicy& policy, StateId q,
                                  const SupervisorMemory& m) {
  const auto& aut = la.automaton;
  EventSet out;
  if (m.phase == Phase::detection) {
    for (const auto& e : aut.out(q)) out.push_back(e.event);
    return out;
  }
  const auto& d = policy.decide(m.estimate);
  if (m.fresh && d.enforce) {
    if (!aut.next(q, *d.enforce))
      fail(ErrorKind::synthesis, "enforced event '" + la.events().name(*d.enforce) + "' is undefined at " +
                                     la.member_name(q));
    return {*d.enforce};
  }
  for (const auto& e : aut.out(q))
    if (!contains(d.disable, e.event)) out.push_back(e.event);
  return out;
}

inline SupervisorMemory advance_memory(const LabeledAutomaton& la, const SupervisorPolicy& policy,
                                       const SupervisorMemory& m, EventId event) {
  const auto& table = la.events();
  if (!table.observable(event)) {
    SupervisorMemory next = m;
    if (m.phase == Phase::isolation) next.fresh = false;
    return next;
  }
  if (m.phase == Phase::detection) {
    auto est = observe_step(la.automaton, m.estimate.members, event);
    if (est.empty()) fail(ErrorKind::protocol, "observation '" + table.name(event) + "' is infeasible");
    const bool certain = classify(la, est).detection == Detection::faulty;
    return {certain ? Phase::isolation : Phase::detection, std::move(est), certain};
  }
  auto est = observable_reach(la, m.estimate, policy.decide(m.estimate), event);
  if (est.empty()) fail(ErrorKind::protocol, "observation '" + table.name(event) + "' is infeasible");
  return {Phase::isolation, std::move(est), true};
}

inline SupervisorMemory initial_memory(const LabeledAutomaton& la) {
  return {Phase::detection, StateEstimate({la.automaton.initial()}), false};
}

/// Product of the labeled plant with the supervisor memory.
struct ClosedLoop {
  LabeledAutomaton automaton;  // labels inherited from the plant
  std::vector<StateId> plant_state;
  std::vector<SupervisorMemory> memory;
};

inline constexpr std::size_t default_closed_loop_cap = 1'000'000;

inline ClosedLoop build_closed_loop(const LabeledAutomaton& la, const SupervisorPolicy& policy,
                                    std::size_t max_states = default_closed_loop_cap) {
  using Node = std::pair<StateId, SupervisorMemory>;
  std::map<Node, std::uint32_t> index;
  std::vector<Node> nodes;
  std::vector<std::vector<Edge>> out;
  auto intern = [&](Node n) {
    auto [it, inserted] = index.emplace(n, static_cast<std::uint32_t>(nodes.size()));
    if (inserted) {
      nodes.push_back(std::move(n));
      out.emplace_back();
      if (nodes.size() > max_states)
        fail(ErrorKind::resource, "closed loop exceeded " + std::to_string(max_states) + " states");
    }
    return it->second;
  };
  intern({la.automaton.initial(), initial_memory(la)});
  for (std::uint32_t i = 0; i < nodes.size(); ++i) {
    const auto q = nodes[i].first;
    const auto mem = nodes[i].second;
    for (auto e : admissible_events(la, policy, q, mem)) {
      const auto target = *la.automaton.next(q, e);
      auto next_mem = advance_memory(la, policy, mem, e);
      if (la.events().observable(e) && !next_mem.estimate.contains(target))
        fail(ErrorKind::synthesis, "estimate " + format_estimate(la, next_mem.estimate) + " misses true state " +
                                       la.member_name(target));
      const auto t = intern({target, std::move(next_mem)});
      out[i].push_back({e, static_cast<StateId>(t)});
    }
  }

  std::vector<std::string> names;
  std::vector<FaultLabel> labels;
  std::vector<std::string> base_names;
  std::vector<StateId> plant_state;
  std::vector<SupervisorMemory> memory;
  for (std::uint32_t i = 0; i < nodes.size(); ++i) {
    const auto& [q, mem] = nodes[i];
    names.push_back(std::to_string(i) + ":" + la.member_name(q));
    labels.push_back(la.label(q));
    base_names.push_back(la.base_names[index_of(q)]);
    plant_state.push_back(q);
    memory.push_back(mem);
  }
  ClosedLoop cl{
      LabeledAutomaton{Automaton(la.automaton.event_table(), std::move(names), std::move(out), StateId{0}),
                       std::move(labels), std::move(base_names), la.fault_types},
      std::move(plant_state), std::move(memory)};
  return cl;
}

struct ClosedLoopReport {
  bool live = true;
  std::vector<StateId> terminal_states;  // closed-loop states in the isolation phase without successors
  bool isolatable = true;
  std::vector<EstimateCycle> mixed_cycles;  // over closed-loop states
  /// Longest number of observations from each frontier estimate (projected
  /// to plant states) to an isolated estimate; absent when unbounded.
  std::vector<std::pair<StateEstimate, std::optional<int>>> frontier_bounds;
  std::optional<int> bound;
};

inline StateEstimate project_estimate(const ClosedLoop& cl, const StateEstimate& est) {
  std::vector<StateId> out;
  for (auto q : est.members) out.push_back(cl.plant_state[index_of(q)]);
  return StateEstimate(std::move(out));
}

inline ClosedLoopReport verify_closed_loop(const ClosedLoop& cl) {
  ClosedLoopReport r;
  const auto& aut = cl.automaton.automaton;
  for (auto q : aut.states())
    if (cl.memory[index_of(q)].phase == Phase::isolation && aut.out(q).empty()) r.terminal_states.push_back(q);
  r.live = r.terminal_states.empty();

  const auto d = build_diagnoser(cl.automaton);
  const auto iso = check_isolatability(cl.automaton, d);
  r.isolatable = iso.isolatable;
  r.mixed_cycles = iso.witnesses;

  // Longest path over mixed estimates; memoized DFS on the (acyclic when
  // isolatable) mixed subgraph.
  constexpr int unbounded = -1;
  std::vector<std::optional<int>> memo(d.state_count());
  std::vector<char> on_path(d.state_count(), 0);
  std::function<int(std::uint32_t)> longest = [&](std::uint32_t x) -> int {
    if (memo[x]) return *memo[x];
    if (!is_mixed_faulty(cl.automaton, d.estimate(x))) return *(memo[x] = 0);
    if (on_path[x] || d.out(x).empty()) return *(memo[x] = unbounded);
    on_path[x] = 1;
    int best = 0;
    for (const auto& t : d.out(x)) {
      const int sub = longest(t.target);
      if (sub == unbounded) {
        best = unbounded;
        break;
      }
      best = std::max(best, sub + 1);
    }
    on_path[x] = 0;
    return *(memo[x] = best);
  };
  bool bounded = true;
  int overall = 0;
  for (auto x : fault_frontier_states(cl.automaton, d)) {
    const int b = longest(x);
    auto est = project_estimate(cl, d.estimate(x));
    if (b == unbounded) {
      bounded = false;
      r.frontier_bounds.emplace_back(std::move(est), std::nullopt);
    } else {
      overall = std::max(overall, b);
      r.frontier_bounds.emplace_back(std::move(est), b);
    }
  }
  std::sort(r.frontier_bounds.begin(), r.frontier_bounds.end());
  if (bounded) r.bound = overall;
  return r;
}

// --- simulation -----------------------------------------------------------------------

struct SimulationOptions {
  std::optional<std::vector<EventId>> script;
  std::uint64_t seed = 0;
  std::size_t max_steps = 100;
};

/// Runs the closed loop, emitting `EVT`, `OBS`, `DEC` and `VERDICT` lines.
/// Random runs start with a `SEED` header.
inline std::vector<std::string> simulate(const LabeledAutomaton& la, const SupervisorPolicy& policy,
                                         const SimulationOptions& options) {
  if (options.max_steps < 1) fail(ErrorKind::input, "max_steps must be at least 1");
  const auto& table = la.events();
  std::vector<std::string> trace;
  if (!options.script) trace.push_back("SEED " + std::to_string(options.seed));
  std::mt19937_64 rng(options.seed);
  IsolationEngine engine(la, policy);
  auto engine_state = engine.initial();
  auto q = la.automaton.initial();
  auto mem = initial_memory(la);
  const std::size_t steps = options.script ? std::min(options.max_steps, options.script->size()) : options.max_steps;
  for (std::size_t i = 0; i < steps; ++i) {
    const auto allowed = admissible_events(la, policy, q, mem);
    EventId e;
    if (options.script) {
      e = (*options.script)[i];
      if (!contains(allowed, e))
        fail(ErrorKind::scheduler, "event '" + table.name(e) + "' is not admissible at step " + std::to_string(i + 1) +
                                       " (admissible: " + format_event_set(table, allowed) + ")");
    } else {
      if (allowed.empty()) break;
      std::uniform_int_distribution<std::size_t> pick(0, allowed.size() - 1);
      e = allowed[pick(rng)];
    }
    trace.push_back("EVT " + table.name(e));
    q = *la.automaton.next(q, e);
    mem = advance_memory(la, policy, mem, e);
    if (table.observable(e)) {
      const auto before = engine_state.decisions.size();
      engine_state = engine.step(std::move(engine_state), e);
      trace.push_back("OBS " + table.name(e));
      if (engine_state.decisions.size() > before)
        trace.push_back("DEC " + format_decision(table, engine_state.decisions.back()));
      trace.push_back("VERDICT " + format_verdict(engine_state.verdict));
    }
  }
  return trace;
}

}  // namespace afi
