#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "afi/automaton.hpp"
#include "afi/error.hpp"
#include "afi/events.hpp"
#include "afi/graph.hpp"

namespace afi {

/// N (value 0) or F_i (value i).
struct FaultLabel {
  int value = 0;

  static constexpr FaultLabel normal() { return {0}; }
  static constexpr FaultLabel fault(int type) { return {type}; }

  bool is_normal() const { return value == 0; }
  std::string to_string() const { return value == 0 ? "N" : "F" + std::to_string(value); }

  friend auto operator<=>(const FaultLabel&, const FaultLabel&) = default;
};

/// An automaton whose states carry fault labels. Used for the labeled plant
/// G^ = G || G_L and for closed-loop products built over it.
struct LabeledAutomaton {
  Automaton automaton;
  std::vector<FaultLabel> labels;       // per state
  std::vector<std::string> base_names;  // plant state name per state
  int fault_types = 0;

  FaultLabel label(StateId q) const { return labels.at(index_of(q)); }
  const EventTable& events() const { return automaton.events(); }

  /// Compact rendering "2F1" / "0N".
  std::string member_name(StateId q) const { return base_names.at(index_of(q)) + label(q).to_string(); }

  /// Labeled state lookup by plant state name and label.
  std::optional<StateId> find(const std::string& base, FaultLabel label) const {
    for (std::uint32_t i = 0; i < base_names.size(); ++i)
      if (base_names[i] == base && labels[i] == label) return static_cast<StateId>(i);
    return std::nullopt;
  }
};

/// Set of labeled states, canonically sorted by state id. For a labeled plant
/// the id order coincides with (plant state, label) order.
struct StateEstimate {
  std::vector<StateId> members;

  StateEstimate() = default;
  explicit StateEstimate(std::vector<StateId> states) : members(std::move(states)) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
  }

  bool empty() const { return members.empty(); }
  std::size_t size() const { return members.size(); }
  bool contains(StateId q) const { return std::binary_search(members.begin(), members.end(), q); }

  friend auto operator<=>(const StateEstimate&, const StateEstimate&) = default;
  friend bool operator==(const StateEstimate&, const StateEstimate&) = default;
};

struct StateEstimateHash {
  std::size_t operator()(const StateEstimate& est) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (auto q : est.members) {
      h ^= index_of(q) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

inline std::string format_estimate(const LabeledAutomaton& la, const StateEstimate& est) {
  std::string out = "{";
  for (std::size_t i = 0; i < est.members.size(); ++i) {
    if (i) out += ',';
    out += la.member_name(est.members[i]);
  }
  return out + "}";
}

/// Image of the unobservable reach of `from` (avoiding `disabled`) under the
/// observable event `obs`.
inline StateEstimate observe_step(const Automaton& aut, std::span<const StateId> from, EventId obs,
                                  const EventSet& disabled = {}) {
  std::vector<StateId> next;
  for (auto q : unobservable_reach(aut, from, disabled))
    if (auto t = aut.next(q, obs)) next.push_back(*t);
  return StateEstimate(std::move(next));
}

// --- label automaton and labeled plant --------------------------------------

/// G_L over the fault events: N --f--> F_i for f in Sigma_fi, and F_i absorbs
/// its own fault events.
inline Automaton build_label_automaton(const EventTable& table) {
  const int k = table.fault_type_count();
  if (k == 0) fail(ErrorKind::config, "label automaton needs at least one fault type");
  auto faults = std::make_shared<EventTable>();
  for (auto e : table.fault_events()) faults->add(table.info(e));
  AutomatonBuilder builder(faults);
  builder.set_initial("N");
  for (int i = 1; i <= k; ++i) builder.add_state("F" + std::to_string(i));
  for (auto e : faults->all()) {
    const auto label = "F" + std::to_string(*faults->fault_type(e));
    builder.add_transition("N", faults->name(e), label);
    builder.add_transition(label, faults->name(e), label);
  }
  return builder.build();
}

/// G^ = G || G_L. The plant must satisfy A1-A3. A fault-free plant is
/// returned with every label N.
inline LabeledAutomaton build_labeled_plant(const Automaton& plant) {
  const auto report = check_assumptions(plant);
  if (!report.passing())
    fail(ErrorKind::assumption, "plant violates standing assumptions:\n" + describe(plant, report));
  const int k = plant.events().fault_type_count();
  if (k == 0) {
    // Restrict to the accessible part, everything labeled N.
    auto keep = accessible_states(plant);
    std::vector<std::int64_t> remap(plant.state_count(), -1);
    for (std::size_t i = 0; i < keep.size(); ++i) remap[index_of(keep[i])] = static_cast<std::int64_t>(i);
    std::vector<std::string> names;
    std::vector<std::vector<Edge>> out(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) {
      names.push_back(plant.state_name(keep[i]));
      for (const auto& e : plant.out(keep[i]))
        out[i].push_back({e.event, static_cast<StateId>(remap[index_of(e.target)])});
    }
    Automaton aut(plant.event_table(), names, std::move(out),
                  static_cast<StateId>(remap[index_of(plant.initial())]));
    return LabeledAutomaton{std::move(aut), std::vector<FaultLabel>(keep.size()), names, 0};
  }
  const auto label_aut = build_label_automaton(plant.events());
  auto comp = parallel_compose_with_origin(plant, label_aut);
  LabeledAutomaton out{std::move(comp.automaton), {}, {}, k};
  for (const auto& [q, l] : comp.origin) {
    out.base_names.push_back(plant.state_name(q));
    out.labels.push_back(l == label_aut.initial() ? FaultLabel::normal()
                                                  : FaultLabel::fault(std::stoi(label_aut.state_name(l).substr(1))));
  }
  return out;
}

/// SE(t) for the uncontrolled system; t = eps yields {x0}. An infeasible
/// observation yields the empty estimate.
inline StateEstimate estimate_after(const LabeledAutomaton& la, std::span<const EventId> observations) {
  const auto& aut = la.automaton;
  StateEstimate est({aut.initial()});
  for (auto obs : observations) {
    if (index_of(obs) >= aut.events().size() || !aut.events().observable(obs))
      fail(ErrorKind::input, "estimate_after expects observable events only");
    est = observe_step(aut, est.members, obs);
    if (est.empty()) return est;
  }
  return est;
}

// --- diagnoser ----------------------------------------------------------------

/// Deterministic estimate automaton over observable events, x0 = {(q0, N)}.
class Diagnoser {
 public:
  struct Transition {
    EventId event;
    std::uint32_t target;
  };

  std::size_t state_count() const { return states_.size(); }
  const StateEstimate& estimate(std::uint32_t x) const { return states_.at(x); }
  const std::vector<StateEstimate>& estimates() const { return states_; }
  std::span<const Transition> out(std::uint32_t x) const { return out_.at(x); }
  std::uint32_t initial() const { return 0; }

  std::size_t transition_count() const {
    std::size_t n = 0;
    for (const auto& t : out_) n += t.size();
    return n;
  }

  std::optional<std::uint32_t> find(const StateEstimate& est) const {
    auto it = index_.find(est);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<std::uint32_t> next(std::uint32_t x, EventId e) const {
    for (const auto& t : out_.at(x))
      if (t.event == e) return t.target;
    return std::nullopt;
  }

  std::optional<std::uint32_t> run(std::span<const EventId> observations) const {
    std::uint32_t x = initial();
    for (auto e : observations) {
      auto n = next(x, e);
      if (!n) return std::nullopt;
      x = *n;
    }
    return x;
  }

  graph::Adjacency adjacency() const {
    graph::Adjacency adj(states_.size());
    for (std::size_t x = 0; x < states_.size(); ++x)
      for (const auto& t : out_[x]) adj[x].push_back(t.target);
    return adj;
  }

 private:
  friend Diagnoser build_diagnoser(const LabeledAutomaton&, std::size_t);

  std::uint32_t intern(StateEstimate est) {
    auto [it, inserted] = index_.emplace(est, static_cast<std::uint32_t>(states_.size()));
    if (inserted) {
      states_.push_back(std::move(est));
      out_.emplace_back();
    }
    return it->second;
  }

  std::vector<StateEstimate> states_;
  std::vector<std::vector<Transition>> out_;
  std::unordered_map<StateEstimate, std::uint32_t, StateEstimateHash> index_;
};

inline constexpr std::size_t default_diagnoser_cap = 1'000'000;

/// Worklist construction of the accessible estimate automaton.
inline Diagnoser build_diagnoser(const LabeledAutomaton& la, std::size_t max_states = default_diagnoser_cap) {
  const auto& aut = la.automaton;
  const auto observable = aut.events().observable_events();
  Diagnoser d;
  d.intern(StateEstimate({aut.initial()}));
  for (std::uint32_t x = 0; x < d.states_.size(); ++x) {
    const auto reach = unobservable_reach(aut, d.states_[x].members, {});
    for (auto obs : observable) {
      std::vector<StateId> next;
      for (auto q : reach)
        if (auto t = aut.next(q, obs)) next.push_back(*t);
      if (next.empty()) continue;
      const auto target = d.intern(StateEstimate(std::move(next)));
      d.out_[x].push_back({obs, target});
      if (d.states_.size() > max_states)
        fail(ErrorKind::resource, "diagnoser exceeded " + std::to_string(max_states) + " states (explored " +
                                      std::to_string(x + 1) + ", discovered " + std::to_string(d.states_.size()) +
                                      ")");
    }
  }
  return d;
}

// --- classification -------------------------------------------------------------

enum class Detection { normal, faulty, uncertain };

inline std::string_view to_string(Detection d) {
  switch (d) {
    case Detection::normal: return "N";
    case Detection::faulty: return "F";
    case Detection::uncertain: return "U";
  }
  return "?";
}

/// DF and DI of an estimate. `isolated` is 0 for FU, otherwise the fault type.
struct DiagnosisVerdict {
  Detection detection = Detection::normal;
  int isolated = 0;

  std::string isolation_string() const { return isolated == 0 ? "FU" : "F_" + std::to_string(isolated); }
  friend bool operator==(const DiagnosisVerdict&, const DiagnosisVerdict&) = default;
};

inline DiagnosisVerdict classify(const LabeledAutomaton& la, const StateEstimate& est) {
  if (est.empty()) fail(ErrorKind::input, "cannot classify an empty estimate");
  bool any_normal = false, any_fault = false;
  int common = -1;
  for (auto q : est.members) {
    const auto l = la.label(q);
    if (l.is_normal())
      any_normal = true;
    else
      any_fault = true;
    if (common == -1)
      common = l.value;
    else if (common != l.value)
      common = -2;
  }
  DiagnosisVerdict v;
  v.detection = !any_fault ? Detection::normal : (!any_normal ? Detection::faulty : Detection::uncertain);
  v.isolated = common > 0 ? common : 0;
  return v;
}

inline bool is_mixed_faulty(const LabeledAutomaton& la, const StateEstimate& est) {
  const auto v = classify(la, est);
  return v.detection == Detection::faulty && v.isolated == 0;
}

/// A_D(t). Throws on observations the plant cannot produce.
inline Detection detection_agent(const LabeledAutomaton& la, const Diagnoser& d, std::span<const EventId> t) {
  auto x = d.run(t);
  if (!x) fail(ErrorKind::input, "observation infeasible: " + format_word(la.events(), t));
  return classify(la, d.estimate(*x)).detection;
}

/// A_I(t) on the uncontrolled diagnoser.
inline int isolation_agent(const LabeledAutomaton& la, const Diagnoser& d, std::span<const EventId> t) {
  auto x = d.run(t);
  if (!x) fail(ErrorKind::input, "observation infeasible: " + format_word(la.events(), t));
  return classify(la, d.estimate(*x)).isolated;
}

// --- diagnosability (twin plant) ---------------------------------------------------

/// Two runs with equal observations: the faulty one is label-faulty on its
/// cycle, the normal one never faults. Each run is prefix followed by a cycle
/// repeated forever.
struct DiagnosabilityWitness {
  std::vector<EventId> faulty_prefix, faulty_cycle;
  std::vector<EventId> normal_prefix, normal_cycle;
};

struct DiagnosabilityResult {
  bool diagnosable = true;
  std::optional<DiagnosabilityWitness> witness;
};

/// Verifier: normal copy (N-labeled states only) synchronized with the full
/// plant on observable events; unobservable moves interleave. Not diagnosable
/// iff a reachable cycle with (normal, faulty) labels contains a move of the
/// faulty component.
inline DiagnosabilityResult check_diagnosability(const LabeledAutomaton& la) {
  const auto& aut = la.automaton;
  const auto& table = aut.events();
  enum Move : std::uint8_t { normal_only, faulty_only, both };
  struct Arc {
    std::uint32_t target;
    EventId event;
    Move move;
  };
  const std::uint64_t n = aut.state_count();
  std::unordered_map<std::uint64_t, std::uint32_t> index;
  std::vector<std::pair<StateId, StateId>> nodes;
  std::vector<std::vector<Arc>> arcs;
  auto intern = [&](StateId a, StateId b) {
    const std::uint64_t key = index_of(a) * n + index_of(b);
    auto [it, inserted] = index.emplace(key, static_cast<std::uint32_t>(nodes.size()));
    if (inserted) {
      nodes.emplace_back(a, b);
      arcs.emplace_back();
    }
    return it->second;
  };
  intern(aut.initial(), aut.initial());
  for (std::uint32_t i = 0; i < nodes.size(); ++i) {
    const auto [qn, qf] = nodes[i];
    for (const auto& e : aut.out(qn)) {
      if (table.observable(e.event) || !la.label(e.target).is_normal()) continue;
      const auto t = intern(e.target, qf);
      arcs[i].push_back({t, e.event, normal_only});
    }
    for (const auto& e : aut.out(qf)) {
      if (table.observable(e.event)) continue;
      const auto t = intern(qn, e.target);
      arcs[i].push_back({t, e.event, faulty_only});
    }
    for (const auto& e : aut.out(qf)) {
      if (!table.observable(e.event)) continue;
      auto tn = aut.next(qn, e.event);
      if (!tn || !la.label(*tn).is_normal()) continue;
      const auto t = intern(*tn, e.target);
      arcs[i].push_back({t, e.event, both});
    }
  }

  auto relevant = [&](std::uint32_t v) { return !la.label(nodes[v].second).is_normal(); };
  graph::Adjacency adj(nodes.size());
  for (std::uint32_t v = 0; v < nodes.size(); ++v)
    if (relevant(v))
      for (const auto& a : arcs[v])
        if (relevant(a.target)) adj[v].push_back(a.target);
  const auto comp = graph::strongly_connected_components(adj);

  DiagnosabilityResult result;
  for (std::uint32_t v = 0; v < nodes.size(); ++v) {
    if (!relevant(v)) continue;
    for (const auto& a : arcs[v]) {
      if (a.move == normal_only || !relevant(a.target) || comp[a.target] != comp[v]) continue;
      // Cycle v -a-> target ~> v inside the component; prefix initial ~> v.
      graph::Adjacency full(nodes.size());
      for (std::uint32_t u = 0; u < nodes.size(); ++u)
        for (const auto& b : arcs[u]) full[u].push_back(b.target);
      const auto prefix = graph::shortest_path(full, 0, v, [](std::uint32_t) { return true; });
      const auto back = graph::shortest_path(adj, a.target, v, [&](std::uint32_t u) { return comp[u] == comp[v]; });
      DiagnosabilityWitness w;
      auto append = [&](std::uint32_t from, std::uint32_t to, std::vector<EventId>& normal_word,
                        std::vector<EventId>& faulty_word, const Arc* forced) {
        const Arc* chosen = forced;
        if (!chosen)
          for (const auto& b : arcs[from])
            if (b.target == to) {
              chosen = &b;
              break;
            }
        if (chosen->move != faulty_only) normal_word.push_back(chosen->event);
        if (chosen->move != normal_only) faulty_word.push_back(chosen->event);
      };
      for (std::size_t i = 0; i + 1 < prefix.size(); ++i)
        append(prefix[i], prefix[i + 1], w.normal_prefix, w.faulty_prefix, nullptr);
      append(v, a.target, w.normal_cycle, w.faulty_cycle, &a);
      for (std::size_t i = 0; i + 1 < back.size(); ++i)
        append(back[i], back[i + 1], w.normal_cycle, w.faulty_cycle, nullptr);
      result.diagnosable = false;
      result.witness = std::move(w);
      return result;
    }
  }
  return result;
}

inline std::string describe(const EventTable& table, const DiagnosabilityWitness& w) {
  auto run = [&](const std::vector<EventId>& prefix, const std::vector<EventId>& cycle) {
    std::string s = prefix.empty() ? "" : format_word(table, prefix) + " ";
    return s + "(" + (cycle.empty() ? std::string("eps") : format_word(table, cycle)) + ")*";
  };
  return "faulty: " + run(w.faulty_prefix, w.faulty_cycle) + " | normal: " + run(w.normal_prefix, w.normal_cycle);
}

// --- isolatability ------------------------------------------------------------------

/// A cycle of estimates: steps[i] leaves estimate i on `event`, the last step
/// returns to the first estimate.
struct EstimateCycle {
  struct Step {
    StateEstimate estimate;
    EventId event;
  };
  std::vector<Step> steps;
};

struct IsolatabilityResult {
  bool isolatable = true;
  /// One cycle per strongly connected group of mixed estimates.
  std::vector<EstimateCycle> witnesses;
};

/// Diagnoser states first reached in X_F: no proper prefix of the path is
/// fault-certain.
inline std::vector<std::uint32_t> fault_frontier_states(const LabeledAutomaton& la, const Diagnoser& d) {
  std::vector<char> seen(d.state_count(), 0);
  std::deque<std::uint32_t> queue{d.initial()};
  seen[d.initial()] = 1;
  std::vector<std::uint32_t> frontier;
  while (!queue.empty()) {
    const auto x = queue.front();
    queue.pop_front();
    if (classify(la, d.estimate(x)).detection == Detection::faulty) {
      frontier.push_back(x);
      continue;
    }
    for (const auto& t : d.out(x))
      if (!seen[t.target]) {
        seen[t.target] = 1;
        queue.push_back(t.target);
      }
  }
  std::sort(frontier.begin(), frontier.end());
  return frontier;
}

/// Isolatable iff no cycle of the estimate graph, restricted to what is
/// reachable from the fault frontier, passes through a mixed estimate.
/// Requires diagnosability.
inline IsolatabilityResult check_isolatability(const LabeledAutomaton& la, const Diagnoser& d) {
  if (!check_diagnosability(la).diagnosable)
    fail(ErrorKind::precondition, "isolatability requires a diagnosable system");
  std::vector<char> region(d.state_count(), 0);
  std::deque<std::uint32_t> queue;
  for (auto x : fault_frontier_states(la, d)) {
    region[x] = 1;
    queue.push_back(x);
  }
  while (!queue.empty()) {
    const auto x = queue.front();
    queue.pop_front();
    for (const auto& t : d.out(x))
      if (!region[t.target]) {
        region[t.target] = 1;
        queue.push_back(t.target);
      }
  }
  std::vector<char> mixed(d.state_count(), 0);
  for (std::uint32_t x = 0; x < d.state_count(); ++x)
    mixed[x] = region[x] && is_mixed_faulty(la, d.estimate(x));
  graph::Adjacency adj(d.state_count());
  for (std::uint32_t x = 0; x < d.state_count(); ++x)
    if (mixed[x])
      for (const auto& t : d.out(x))
        if (mixed[t.target]) adj[x].push_back(t.target);
  const auto comp = graph::strongly_connected_components(adj);
  const auto cyclic = graph::on_some_cycle(adj);

  IsolatabilityResult result;
  std::vector<char> reported(d.state_count(), 0);
  for (std::uint32_t x = 0; x < d.state_count(); ++x) {
    if (!cyclic[x] || reported[comp[x]]) continue;
    reported[comp[x]] = 1;
    // Smallest-event edge that stays in the component, then back to x.
    for (const auto& t : d.out(x)) {
      if (!mixed[t.target] || comp[t.target] != comp[x]) continue;
      EstimateCycle cycle;
      cycle.steps.push_back({d.estimate(x), t.event});
      if (t.target != x) {
        const auto path = graph::shortest_path(adj, t.target, x, [&](std::uint32_t u) { return comp[u] == comp[x]; });
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
          for (const auto& u : d.out(path[i]))
            if (u.target == path[i + 1]) {
              cycle.steps.push_back({d.estimate(path[i]), u.event});
              break;
            }
        }
      }
      result.witnesses.push_back(std::move(cycle));
      break;
    }
  }
  result.isolatable = result.witnesses.empty();
  return result;
}

inline IsolatabilityResult check_isolatability(const LabeledAutomaton& la) {
  return check_isolatability(la, build_diagnoser(la));
}

inline std::string describe(const LabeledAutomaton& la, const EstimateCycle& cycle) {
  std::string out;
  for (const auto& step : cycle.steps)
    out += format_estimate(la, step.estimate) + " -" + la.events().name(step.event) + "-> ";
  return out + format_estimate(la, cycle.steps.front().estimate);
}

}  // namespace afi
