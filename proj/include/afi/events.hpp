#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "afi/error.hpp"

namespace afi {

enum class EventId : std::uint32_t {};
enum class StateId : std::uint32_t {};

constexpr std::uint32_t index_of(EventId e) { return static_cast<std::uint32_t>(e); }
constexpr std::uint32_t index_of(StateId s) { return static_cast<std::uint32_t>(s); }

/// Sorted, duplicate-free list of events.
using EventSet = std::vector<EventId>;

inline bool contains(const EventSet& set, EventId e) {
  return std::binary_search(set.begin(), set.end(), e);
}

inline EventSet make_event_set(std::vector<EventId> events) {
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());
  return events;
}

struct EventInfo {
  std::string name;
  bool observable = false;
  bool controllable = false;
  bool forcible = false;
  std::optional<int> fault_type;  // 1..k

  bool is_fault() const { return fault_type.has_value(); }

  bool same_attributes(const EventInfo& other) const {
    return observable == other.observable && controllable == other.controllable &&
           forcible == other.forcible && fault_type == other.fault_type;
  }

  friend bool operator==(const EventInfo&, const EventInfo&) = default;
};

/// The alphabet with per-event attributes. Event ids are dense and follow
/// declaration order.
class EventTable {
 public:
  EventTable() = default;

  EventId add(EventInfo info) {
    if (info.name.empty()) fail(ErrorKind::model, "event name must be non-empty");
    if (by_name_.contains(info.name))
      fail(ErrorKind::model, "duplicate event '" + info.name + "'");
    if (info.fault_type) {
      if (*info.fault_type < 1)
        fail(ErrorKind::model, "fault type of '" + info.name + "' must be >= 1");
      if (info.observable)
        fail(ErrorKind::model, "fault event '" + info.name + "' must be unobservable");
    }
    const auto id = static_cast<EventId>(events_.size());
    by_name_.emplace(info.name, id);
    events_.push_back(std::move(info));
    return id;
  }

  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }

  const EventInfo& info(EventId e) const { return events_.at(index_of(e)); }
  const std::string& name(EventId e) const { return info(e).name; }
  bool observable(EventId e) const { return info(e).observable; }
  bool controllable(EventId e) const { return info(e).controllable; }
  bool forcible(EventId e) const { return info(e).forcible; }
  std::optional<int> fault_type(EventId e) const { return info(e).fault_type; }

  std::optional<EventId> find(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
  }

  EventId id(const std::string& name) const {
    auto found = find(name);
    if (!found) fail(ErrorKind::input, "unknown event '" + name + "'");
    return *found;
  }

  std::vector<EventId> all() const {
    std::vector<EventId> out;
    out.reserve(events_.size());
    for (std::uint32_t i = 0; i < events_.size(); ++i) out.push_back(static_cast<EventId>(i));
    return out;
  }

  EventSet select(bool (EventInfo::*flag)) const {
    EventSet out;
    for (std::uint32_t i = 0; i < events_.size(); ++i)
      if (events_[i].*flag) out.push_back(static_cast<EventId>(i));
    return out;
  }

  EventSet observable_events() const { return select(&EventInfo::observable); }
  EventSet controllable_events() const { return select(&EventInfo::controllable); }
  EventSet forcible_events() const { return select(&EventInfo::forcible); }

  EventSet unobservable_events() const {
    EventSet out;
    for (auto e : all())
      if (!observable(e)) out.push_back(e);
    return out;
  }

  EventSet fault_events() const {
    EventSet out;
    for (auto e : all())
      if (info(e).is_fault()) out.push_back(e);
    return out;
  }

  EventSet fault_events(int type) const {
    EventSet out;
    for (auto e : all())
      if (info(e).fault_type == type) out.push_back(e);
    return out;
  }

  /// Number of fault types k. Types must cover 1..k without gaps.
  int fault_type_count() const {
    int k = 0;
    for (const auto& ev : events_)
      if (ev.fault_type) k = std::max(k, *ev.fault_type);
    for (int i = 1; i <= k; ++i)
      if (fault_events(i).empty())
        fail(ErrorKind::model, "fault type " + std::to_string(i) + " has no events (types must be 1.." +
                                   std::to_string(k) + ")");
    return k;
  }

  friend bool operator==(const EventTable& a, const EventTable& b) { return a.events_ == b.events_; }

 private:
  std::vector<EventInfo> events_;
  std::unordered_map<std::string, EventId> by_name_;
};

}  // namespace afi
