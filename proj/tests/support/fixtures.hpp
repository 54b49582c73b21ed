#pragma once

#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "afi/afi.hpp"

namespace afi::test {

inline std::string models_dir() { return AFI_MODELS_DIR; }
inline std::string data_dir() { return AFI_TEST_DATA_DIR; }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Fixture {
  Automaton plant;
  LabeledAutomaton la;

  explicit Fixture(Automaton g) : plant(std::move(g)), la(build_labeled_plant(plant)) {}

  const EventTable& events() const { return plant.events(); }
  EventId ev(const std::string& name) const { return events().id(name); }

  std::vector<EventId> word(std::initializer_list<const char*> names) const {
    std::vector<EventId> out;
    for (auto n : names) out.push_back(ev(n));
    return out;
  }

  /// Estimate from compact member names such as "2F1".
  StateEstimate est(std::initializer_list<const char*> members) const {
    std::vector<StateId> out;
    for (auto m : members) {
      bool found = false;
      for (auto q : la.automaton.states())
        if (la.member_name(q) == m) {
          out.push_back(q);
          found = true;
        }
      if (!found) throw std::runtime_error(std::string("no labeled state ") + m);
    }
    return StateEstimate(std::move(out));
  }

  ControlDecision dec(std::optional<std::string> enforce, std::initializer_list<const char*> disable = {}) const {
    ControlDecision d;
    if (enforce) d.enforce = ev(*enforce);
    std::vector<EventId> dis;
    for (auto n : disable) dis.push_back(ev(n));
    d.disable = make_event_set(std::move(dis));
    return d;
  }
};

inline Fixture load_fixture(const std::string& file) {
  return Fixture(load_model(read_text(models_dir() + "/" + file)));
}

inline Fixture load_data(const std::string& file) {
  return Fixture(load_model(read_text(data_dir() + "/" + file)));
}

inline Fixture paper_fig3() { return load_fixture("paper-fig3.des"); }

/// Builds an automaton from a compact listing, for small hand-written cases.
struct PlantSpec {
  std::vector<EventInfo> events;
  std::string initial;
  std::vector<std::tuple<std::string, std::string, std::string>> transitions;
};

inline Automaton make_plant(const PlantSpec& spec) {
  auto table = std::make_shared<EventTable>();
  for (const auto& e : spec.events) table->add(e);
  AutomatonBuilder b(table);
  b.set_initial(spec.initial);
  for (const auto& [s, e, t] : spec.transitions) b.add_transition(s, e, t);
  return b.build();
}

inline EventInfo obs(std::string name, bool ctrl = false, bool forc = false) {
  return {std::move(name), true, ctrl, forc, std::nullopt};
}
inline EventInfo unobs(std::string name, bool ctrl = false, bool forc = false) {
  return {std::move(name), false, ctrl, forc, std::nullopt};
}
inline EventInfo fault(std::string name, int type) { return {std::move(name), false, false, false, type}; }

/// Kind of the afi::Error thrown by `f`, or nullopt when it returns normally.
template <class F>
std::optional<ErrorKind> error_kind(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

}  // namespace afi::test
