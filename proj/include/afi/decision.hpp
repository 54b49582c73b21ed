#pragma once

#include <compare>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "afi/events.hpp"

namespace afi {

/// <enforce, disable>; an absent enforce is the "no enforcement" choice,
/// rendered as "~".
struct ControlDecision {
  std::optional<EventId> enforce;
  EventSet disable;

  static ControlDecision none() { return {}; }

  bool is_trivial() const { return !enforce && disable.empty(); }

  friend auto operator<=>(const ControlDecision&, const ControlDecision&) = default;
  friend bool operator==(const ControlDecision&, const ControlDecision&) = default;
};

inline std::string format_event_set(const EventTable& table, const EventSet& set) {
  std::string out = "{";
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (i) out += ',';
    out += table.name(set[i]);
  }
  return out + "}";
}

inline std::string format_decision(const EventTable& table, const ControlDecision& d) {
  return "enforce=" + (d.enforce ? table.name(*d.enforce) : std::string("~")) +
         " disable=" + format_event_set(table, d.disable);
}

/// Compact rendering such as "<o3,{}>".
inline std::string format_decision_short(const EventTable& table, const ControlDecision& d) {
  return "<" + (d.enforce ? table.name(*d.enforce) : std::string("~")) + "," + format_event_set(table, d.disable) +
         ">";
}

/// Listing order: enforce by event id with "~" last, then disable sets by
/// size and lexicographically by id.
inline bool listing_order(const ControlDecision& a, const ControlDecision& b) {
  if (a.enforce != b.enforce) {
    if (!a.enforce) return false;
    if (!b.enforce) return true;
    return *a.enforce < *b.enforce;
  }
  if (a.disable.size() != b.disable.size()) return a.disable.size() < b.disable.size();
  return a.disable < b.disable;
}

/// Element of an interleaved decision/observation trace.
using TraceItem = std::variant<ControlDecision, EventId>;

struct SplitTrace {
  std::vector<ControlDecision> decisions;
  std::vector<EventId> observations;
};

inline SplitTrace split_trace(const std::vector<TraceItem>& trace) {
  SplitTrace out;
  for (const auto& item : trace) {
    if (const auto* d = std::get_if<ControlDecision>(&item))
      out.decisions.push_back(*d);
    else
      out.observations.push_back(std::get<EventId>(item));
  }
  return out;
}

}  // namespace afi
