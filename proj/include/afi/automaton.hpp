#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "afi/error.hpp"
#include "afi/events.hpp"

namespace afi {

struct Edge {
  EventId event;
  StateId target;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Deterministic finite automaton G = (Q, Sigma, delta, q0). Immutable once
/// built; outgoing edges of every state are sorted by event id.
class Automaton {
 public:
  Automaton(std::shared_ptr<const EventTable> events, std::vector<std::string> state_names,
            std::vector<std::vector<Edge>> out, StateId initial)
      : events_(std::move(events)),
        names_(std::move(state_names)),
        out_(std::move(out)),
        initial_(initial) {
    if (!events_) fail(ErrorKind::model, "automaton requires an event table");
    if (names_.empty()) fail(ErrorKind::model, "automaton has no states");
    if (out_.size() != names_.size()) fail(ErrorKind::model, "edge table does not match state list");
    if (index_of(initial_) >= names_.size()) fail(ErrorKind::model, "initial state out of range");
    for (std::uint32_t i = 0; i < names_.size(); ++i) {
      if (!by_name_.emplace(names_[i], static_cast<StateId>(i)).second)
        fail(ErrorKind::model, "duplicate state '" + names_[i] + "'");
      auto& edges = out_[i];
      std::sort(edges.begin(), edges.end(),
                [](const Edge& a, const Edge& b) { return a.event < b.event; });
      for (std::size_t j = 0; j < edges.size(); ++j) {
        if (index_of(edges[j].event) >= events_->size())
          fail(ErrorKind::model, "transition from '" + names_[i] + "' uses an undeclared event");
        if (index_of(edges[j].target) >= names_.size())
          fail(ErrorKind::model, "transition from '" + names_[i] + "' targets an unknown state");
        if (j > 0 && edges[j - 1].event == edges[j].event)
          fail(ErrorKind::model, "nondeterministic transitions from '" + names_[i] + "' on '" +
                                     events_->name(edges[j].event) + "'");
      }
    }
  }

  const EventTable& events() const { return *events_; }
  const std::shared_ptr<const EventTable>& event_table() const { return events_; }

  std::size_t state_count() const { return names_.size(); }
  StateId initial() const { return initial_; }

  std::size_t transition_count() const {
    std::size_t n = 0;
    for (const auto& edges : out_) n += edges.size();
    return n;
  }

  const std::string& state_name(StateId q) const { return names_.at(index_of(q)); }

  std::optional<StateId> find_state(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
  }

  StateId state(const std::string& name) const {
    auto q = find_state(name);
    if (!q) fail(ErrorKind::input, "unknown state '" + name + "'");
    return *q;
  }

  void require_state(StateId q) const {
    if (index_of(q) >= names_.size())
      fail(ErrorKind::input, "unknown state id " + std::to_string(index_of(q)));
  }

  std::span<const Edge> out(StateId q) const { return out_.at(index_of(q)); }

  std::optional<StateId> next(StateId q, EventId e) const {
    const auto& edges = out_.at(index_of(q));
    auto it = std::lower_bound(edges.begin(), edges.end(), e,
                               [](const Edge& edge, EventId ev) { return edge.event < ev; });
    if (it == edges.end() || it->event != e) return std::nullopt;
    return it->target;
  }

  std::vector<StateId> states() const {
    std::vector<StateId> out;
    out.reserve(names_.size());
    for (std::uint32_t i = 0; i < names_.size(); ++i) out.push_back(static_cast<StateId>(i));
    return out;
  }

 private:
  std::shared_ptr<const EventTable> events_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, StateId> by_name_;
  std::vector<std::vector<Edge>> out_;
  StateId initial_;
};

/// Incremental construction by name; states are created on first mention.
class AutomatonBuilder {
 public:
  explicit AutomatonBuilder(std::shared_ptr<const EventTable> events) : events_(std::move(events)) {}

  StateId add_state(const std::string& name) {
    if (name.empty()) fail(ErrorKind::model, "state name must be non-empty");
    auto [it, inserted] = by_name_.emplace(name, static_cast<StateId>(names_.size()));
    if (inserted) {
      names_.push_back(name);
      out_.emplace_back();
    }
    return it->second;
  }

  void add_transition(StateId src, EventId event, StateId dst) {
    for (const auto& e : out_.at(index_of(src)))
      if (e.event == event)
        fail(ErrorKind::model, "nondeterministic transitions from '" + names_[index_of(src)] + "' on '" +
                                   events_->name(event) + "'");
    out_[index_of(src)].push_back({event, dst});
  }

  void add_transition(const std::string& src, const std::string& event, const std::string& dst) {
    auto e = events_->find(event);
    if (!e) fail(ErrorKind::model, "undeclared event '" + event + "'");
    auto s = add_state(src);
    auto d = add_state(dst);
    add_transition(s, *e, d);
  }

  void set_initial(const std::string& name) { initial_ = add_state(name); }
  void set_initial(StateId q) { initial_ = q; }

  Automaton build() const {
    if (!initial_) fail(ErrorKind::model, "no initial state");
    return Automaton(events_, names_, out_, *initial_);
  }

 private:
  std::shared_ptr<const EventTable> events_;
  std::vector<std::string> names_;
  std::vector<std::vector<Edge>> out_;
  std::unordered_map<std::string, StateId> by_name_;
  std::optional<StateId> initial_;
};

/// Gamma_G(q): events defined at q.
inline EventSet active_events(const Automaton& aut, StateId q) {
  aut.require_state(q);
  EventSet out;
  for (const auto& e : aut.out(q)) out.push_back(e.event);
  return out;
}

/// delta(q0, s); nullopt when some step is undefined.
inline std::optional<StateId> run(const Automaton& aut, std::span<const EventId> word) {
  StateId q = aut.initial();
  for (auto e : word) {
    if (index_of(e) >= aut.events().size()) fail(ErrorKind::input, "event id outside alphabet");
    auto next = aut.next(q, e);
    if (!next) return std::nullopt;
    q = *next;
  }
  return q;
}

inline std::vector<EventId> event_ids(const EventTable& table, const std::vector<std::string>& names) {
  std::vector<EventId> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(table.id(n));
  return out;
}

inline std::optional<StateId> run(const Automaton& aut, const std::vector<std::string>& word) {
  auto ids = event_ids(aut.events(), word);
  return run(aut, std::span<const EventId>(ids));
}

/// Natural projection P onto observable events.
inline std::vector<EventId> project(const EventTable& table, std::span<const EventId> word) {
  std::vector<EventId> out;
  for (auto e : word) {
    if (index_of(e) >= table.size()) fail(ErrorKind::input, "event id outside alphabet");
    if (table.observable(e)) out.push_back(e);
  }
  return out;
}

/// States reachable from the initial state, in id order.
inline std::vector<StateId> accessible_states(const Automaton& aut) {
  std::vector<char> seen(aut.state_count(), 0);
  std::deque<StateId> queue{aut.initial()};
  seen[index_of(aut.initial())] = 1;
  while (!queue.empty()) {
    auto q = queue.front();
    queue.pop_front();
    for (const auto& e : aut.out(q))
      if (!seen[index_of(e.target)]) {
        seen[index_of(e.target)] = 1;
        queue.push_back(e.target);
      }
  }
  std::vector<StateId> out;
  for (std::uint32_t i = 0; i < seen.size(); ++i)
    if (seen[i]) out.push_back(static_cast<StateId>(i));
  return out;
}

/// Merge two alphabets by name. Shared events must carry identical attributes.
inline std::shared_ptr<const EventTable> merge_event_tables(const EventTable& a, const EventTable& b) {
  auto merged = std::make_shared<EventTable>();
  for (auto e : a.all()) merged->add(a.info(e));
  for (auto e : b.all()) {
    const auto& info = b.info(e);
    if (auto existing = merged->find(info.name)) {
      if (!merged->info(*existing).same_attributes(info))
        fail(ErrorKind::model, "event '" + info.name + "' has conflicting attributes in composed automata");
      continue;
    }
    merged->add(info);
  }
  return merged;
}

struct Composition {
  Automaton automaton;
  std::vector<std::pair<StateId, StateId>> origin;  // component states per composed state
};

/// Synchronous product on shared event names, interleaving on private ones.
/// Only the accessible part is built; states are numbered in lexicographic
/// order of their component pair and named "(a,b)".
inline Composition parallel_compose_with_origin(const Automaton& a, const Automaton& b) {
  auto table = merge_event_tables(a.events(), b.events());
  // For each merged event: its id in a and in b (if present).
  std::vector<std::optional<EventId>> in_a(table->size()), in_b(table->size());
  for (auto e : table->all()) {
    in_a[index_of(e)] = a.events().find(table->name(e));
    in_b[index_of(e)] = b.events().find(table->name(e));
  }

  using Pair = std::pair<std::uint32_t, std::uint32_t>;
  std::map<Pair, std::uint32_t> discovered;
  std::vector<Pair> order;
  std::vector<std::vector<std::pair<EventId, Pair>>> raw;
  auto visit = [&](Pair p) {
    auto [it, inserted] = discovered.emplace(p, static_cast<std::uint32_t>(order.size()));
    if (inserted) {
      order.push_back(p);
      raw.emplace_back();
    }
    return it->second;
  };
  visit({index_of(a.initial()), index_of(b.initial())});
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto [qa, qb] = order[i];
    for (auto e : table->all()) {
      const auto& ea = in_a[index_of(e)];
      const auto& eb = in_b[index_of(e)];
      std::optional<StateId> na = static_cast<StateId>(qa), nb = static_cast<StateId>(qb);
      if (ea) na = a.next(static_cast<StateId>(qa), *ea);
      if (eb) nb = b.next(static_cast<StateId>(qb), *eb);
      if (!na || !nb) continue;
      Pair target{index_of(*na), index_of(*nb)};
      visit(target);
      raw[i].push_back({e, target});
    }
  }

  // Renumber in canonical pair order (std::map iteration order).
  std::vector<std::string> names;
  std::map<Pair, StateId> canonical;
  std::vector<std::pair<StateId, StateId>> origin;
  for (const auto& [pair, _] : discovered) {
    canonical.emplace(pair, static_cast<StateId>(names.size()));
    origin.emplace_back(static_cast<StateId>(pair.first), static_cast<StateId>(pair.second));
    names.push_back("(" + a.state_name(static_cast<StateId>(pair.first)) + "," +
                    b.state_name(static_cast<StateId>(pair.second)) + ")");
  }
  std::vector<std::vector<Edge>> out(names.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto& edges = out[index_of(canonical.at(order[i]))];
    for (const auto& [e, target] : raw[i]) edges.push_back({e, canonical.at(target)});
  }
  return Composition{Automaton(table, std::move(names), std::move(out), canonical.at(order.front())),
                     std::move(origin)};
}

inline Automaton parallel_compose(const Automaton& a, const Automaton& b) {
  return parallel_compose_with_origin(a, b).automaton;
}

/// Closure of `from` under unobservable events that are not in `disabled`.
/// Result is sorted and includes `from`.
inline std::vector<StateId> unobservable_reach(const Automaton& aut, std::span<const StateId> from,
                                               const EventSet& disabled) {
  std::vector<char> seen(aut.state_count(), 0);
  std::vector<StateId> stack;
  for (auto q : from) {
    aut.require_state(q);
    if (!seen[index_of(q)]) {
      seen[index_of(q)] = 1;
      stack.push_back(q);
    }
  }
  const auto& table = aut.events();
  while (!stack.empty()) {
    auto q = stack.back();
    stack.pop_back();
    for (const auto& e : aut.out(q)) {
      if (table.observable(e.event) || contains(disabled, e.event)) continue;
      if (!seen[index_of(e.target)]) {
        seen[index_of(e.target)] = 1;
        stack.push_back(e.target);
      }
    }
  }
  std::vector<StateId> out;
  for (std::uint32_t i = 0; i < seen.size(); ++i)
    if (seen[i]) out.push_back(static_cast<StateId>(i));
  return out;
}

struct CycleStep {
  StateId state;
  EventId event;  // event taken from `state`

  friend bool operator==(const CycleStep&, const CycleStep&) = default;
};

/// Findings for the standing assumptions A1 (liveness), A2 (no unobservable
/// cycle) and A3 (at most one fault type per string).
struct AssumptionReport {
  bool live = true;
  std::vector<StateId> non_live_states;
  std::optional<std::vector<CycleStep>> unobservable_cycle;
  std::optional<std::vector<EventId>> multi_fault_witness;

  bool passing() const { return live && !unobservable_cycle && !multi_fault_witness; }
};

inline std::optional<std::vector<CycleStep>> find_unobservable_cycle(const Automaton& aut) {
  const auto& table = aut.events();
  enum : char { white, grey, black };
  std::vector<char> color(aut.state_count(), white);
  struct Frame {
    StateId state;
    std::size_t next_edge;
  };
  for (auto root : accessible_states(aut)) {
    if (color[index_of(root)] != white) continue;
    std::vector<Frame> stack{{root, 0}};
    std::vector<EventId> via;  // via[i] = event from stack[i] to stack[i+1]
    color[index_of(root)] = grey;
    while (!stack.empty()) {
      auto& top = stack.back();
      auto edges = aut.out(top.state);
      bool descended = false;
      while (top.next_edge < edges.size()) {
        const auto& edge = edges[top.next_edge++];
        if (table.observable(edge.event)) continue;
        const auto c = color[index_of(edge.target)];
        if (c == grey) {
          std::vector<CycleStep> cycle;
          std::size_t start = 0;
          while (stack[start].state != edge.target) ++start;
          for (std::size_t i = start; i + 1 < stack.size(); ++i) cycle.push_back({stack[i].state, via[i]});
          cycle.push_back({top.state, edge.event});
          return cycle;
        }
        if (c == white) {
          color[index_of(edge.target)] = grey;
          via.push_back(edge.event);
          stack.push_back({edge.target, 0});
          descended = true;
          break;
        }
      }
      if (!descended) {
        color[index_of(stack.back().state)] = black;
        stack.pop_back();
        if (!via.empty() && via.size() >= stack.size()) via.pop_back();
      }
    }
  }
  return std::nullopt;
}

inline std::optional<std::vector<EventId>> find_multi_fault_string(const Automaton& aut) {
  const auto& table = aut.events();
  const int k = table.fault_type_count();
  const std::size_t width = static_cast<std::size_t>(k) + 1;
  auto key = [&](StateId q, int seen) { return index_of(q) * width + static_cast<std::size_t>(seen); };
  struct Parent {
    std::size_t from;
    EventId event;
  };
  std::vector<std::optional<Parent>> parent(aut.state_count() * width);
  std::vector<char> visited(aut.state_count() * width, 0);
  std::deque<std::pair<StateId, int>> queue{{aut.initial(), 0}};
  visited[key(aut.initial(), 0)] = 1;
  auto path_to = [&](std::size_t node) {
    std::vector<EventId> word;
    while (parent[node]) {
      word.push_back(parent[node]->event);
      node = parent[node]->from;
    }
    std::reverse(word.begin(), word.end());
    return word;
  };
  while (!queue.empty()) {
    auto [q, seen] = queue.front();
    queue.pop_front();
    for (const auto& e : aut.out(q)) {
      int next_seen = seen;
      if (auto type = table.fault_type(e.event)) {
        if (seen != 0 && *type != seen) {
          auto word = path_to(key(q, seen));
          word.push_back(e.event);
          return word;
        }
        next_seen = *type;
      }
      const auto node = key(e.target, next_seen);
      if (!visited[node]) {
        visited[node] = 1;
        parent[node] = Parent{key(q, seen), e.event};
        queue.push_back({e.target, next_seen});
      }
    }
  }
  return std::nullopt;
}

/// Checks A1-A3 over the accessible part.
inline AssumptionReport check_assumptions(const Automaton& aut) {
  AssumptionReport report;
  for (auto q : accessible_states(aut))
    if (aut.out(q).empty()) report.non_live_states.push_back(q);
  report.live = report.non_live_states.empty();
  report.unobservable_cycle = find_unobservable_cycle(aut);
  report.multi_fault_witness = find_multi_fault_string(aut);
  return report;
}

inline std::string format_word(const EventTable& table, std::span<const EventId> word) {
  if (word.empty()) return "eps";
  std::string out;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i) out += ' ';
    out += table.name(word[i]);
  }
  return out;
}

inline std::string describe(const Automaton& aut, const AssumptionReport& report) {
  std::ostringstream os;
  os << "live: " << (report.live ? "yes" : "no");
  for (auto q : report.non_live_states) os << ' ' << aut.state_name(q);
  os << "\nunobservable-cycle: ";
  if (!report.unobservable_cycle) {
    os << "none";
  } else {
    for (const auto& step : *report.unobservable_cycle)
      os << aut.state_name(step.state) << " -" << aut.events().name(step.event) << "-> ";
    os << aut.state_name(report.unobservable_cycle->front().state);
  }
  os << "\nmulti-fault-string: ";
  if (!report.multi_fault_witness)
    os << "none";
  else
    os << format_word(aut.events(), *report.multi_fault_witness);
  return os.str();
}

}  // namespace afi
