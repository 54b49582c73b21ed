#pragma once

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "afi/automaton.hpp"
#include "afi/synthesis.hpp"

namespace afi {

/// Model or supervisor text error with a 1-based location.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message)
      : Error(ErrorKind::model, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
        line_(line),
        column_(column),
        detail_(message) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_, column_;
  std::string detail_;
};

namespace detail {

struct Token {
  std::string text;
  std::size_t column;
};

inline std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size() || line[i] == '#') break;
    const auto start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    out.push_back({std::string(line.substr(start, i - start)), start + 1});
  }
  return out;
}

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) {
      if (start < text.size()) out.push_back(text.substr(start));
      break;
    }
    out.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

inline bool identifier_char(unsigned char c) {
  return std::isalnum(c) || c == '_' || c == '-' || c == '.' || c >= 0x80;
}

}  // namespace detail

/// Letters, digits, '_', '-', '.', and non-ASCII bytes.
inline bool is_identifier(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return detail::identifier_char(c); });
}

// --- model documents ------------------------------------------------------------------

struct ModelDocument {
  struct Transition {
    std::string source, event, target;
    friend bool operator==(const Transition&, const Transition&) = default;
  };

  std::string name;
  std::string description;
  std::vector<EventInfo> events;
  std::vector<std::string> states;
  std::string initial;
  std::vector<Transition> transitions;

  friend bool operator==(const ModelDocument&, const ModelDocument&) = default;
};

/// Line-oriented grammar:
///   name <id> | description <text> | event <id> [obs] [ctrl] [forc] [fault=<i>]
///   state <id> | init <id> | trans <id> <event> <id>
/// Events must be declared before use; states may be implicit.
inline ModelDocument parse_model(std::string_view text) {
  ModelDocument doc;
  std::set<std::string> events, states, explicit_states;
  std::set<std::pair<std::string, std::string>> defined;
  bool have_init = false, have_name = false, have_description = false;
  std::size_t line_no = 0;
  for (auto line : detail::split_lines(text)) {
    ++line_no;
    const auto tokens = detail::tokenize(line);
    if (tokens.empty()) continue;
    auto error = [&](const detail::Token& t, const std::string& msg) { throw ParseError(line_no, t.column, msg); };
    auto expect_arity = [&](std::size_t n) {
      if (tokens.size() < n) error(tokens.back(), "'" + tokens[0].text + "' expects " + std::to_string(n - 1) +
                                                      " argument(s)");
      if (tokens.size() > n) error(tokens[n], "unexpected token '" + tokens[n].text + "'");
    };
    auto identifier = [&](const detail::Token& t) {
      if (!is_identifier(t.text)) error(t, "invalid identifier '" + t.text + "'");
      return t.text;
    };
    auto declare_state = [&](const std::string& s) {
      if (states.insert(s).second) doc.states.push_back(s);
    };
    const auto& kw = tokens[0].text;
    if (kw == "name") {
      expect_arity(2);
      if (have_name) error(tokens[0], "duplicate name directive");
      have_name = true;
      doc.name = identifier(tokens[1]);
    } else if (kw == "description") {
      if (have_description) error(tokens[0], "duplicate description directive");
      have_description = true;
      if (tokens.size() < 2) error(tokens[0], "'description' expects text");
      auto rest = line.substr(tokens[1].column - 1);
      while (!rest.empty() && (rest.back() == ' ' || rest.back() == '\t' || rest.back() == '\r'))
        rest.remove_suffix(1);
      if (rest.find('#') != std::string_view::npos) rest = rest.substr(0, rest.find('#'));
      while (!rest.empty() && (rest.back() == ' ' || rest.back() == '\t')) rest.remove_suffix(1);
      doc.description = std::string(rest);
    } else if (kw == "event") {
      if (tokens.size() < 2) error(tokens[0], "'event' expects a name");
      EventInfo info;
      info.name = identifier(tokens[1]);
      if (events.contains(info.name)) error(tokens[1], "duplicate event '" + info.name + "'");
      std::set<std::string> seen;
      for (std::size_t i = 2; i < tokens.size(); ++i) {
        const auto& t = tokens[i];
        const auto flag = t.text.starts_with("fault=") ? std::string("fault") : t.text;
        if (!seen.insert(flag).second) error(t, "duplicate attribute '" + flag + "'");
        if (t.text == "obs") {
          info.observable = true;
        } else if (t.text == "ctrl") {
          info.controllable = true;
        } else if (t.text == "forc") {
          info.forcible = true;
        } else if (flag == "fault") {
          const auto digits = t.text.substr(6);
          if (digits.empty() || digits.size() > 6 ||
              !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }) ||
              std::stoi(digits) < 1)
            error(t, "fault type must be a positive integer");
          info.fault_type = std::stoi(digits);
        } else {
          error(t, "unknown event attribute '" + t.text + "'");
        }
      }
      if (info.fault_type && info.observable) error(tokens[1], "fault event '" + info.name + "' must be unobservable");
      events.insert(info.name);
      doc.events.push_back(std::move(info));
    } else if (kw == "state") {
      expect_arity(2);
      auto s = identifier(tokens[1]);
      if (!explicit_states.insert(s).second) error(tokens[1], "duplicate state '" + s + "'");
      declare_state(s);
    } else if (kw == "init") {
      expect_arity(2);
      if (have_init) error(tokens[0], "duplicate init directive");
      have_init = true;
      doc.initial = identifier(tokens[1]);
      declare_state(doc.initial);
    } else if (kw == "trans") {
      expect_arity(4);
      auto src = identifier(tokens[1]);
      auto ev = identifier(tokens[2]);
      auto dst = identifier(tokens[3]);
      if (!events.contains(ev)) error(tokens[2], "undeclared event '" + ev + "'");
      if (!defined.emplace(src, ev).second)
        error(tokens[2], "nondeterministic transitions from '" + src + "' on '" + ev + "'");
      declare_state(src);
      declare_state(dst);
      doc.transitions.push_back({std::move(src), std::move(ev), std::move(dst)});
    } else {
      error(tokens[0], "unknown directive '" + kw + "'");
    }
  }
  if (!have_init) throw ParseError(line_no + 1, 1, "missing init directive");
  return doc;
}

inline std::string serialize_model(const ModelDocument& doc) {
  std::ostringstream os;
  if (!doc.name.empty()) os << "name " << doc.name << '\n';
  if (!doc.description.empty()) os << "description " << doc.description << '\n';
  for (const auto& e : doc.events) {
    os << "event " << e.name;
    if (e.observable) os << " obs";
    if (e.controllable) os << " ctrl";
    if (e.forcible) os << " forc";
    if (e.fault_type) os << " fault=" << *e.fault_type;
    os << '\n';
  }
  for (const auto& s : doc.states) os << "state " << s << '\n';
  os << "init " << doc.initial << '\n';
  for (const auto& t : doc.transitions) os << "trans " << t.source << ' ' << t.event << ' ' << t.target << '\n';
  return os.str();
}

inline Automaton to_automaton(const ModelDocument& doc) {
  auto table = std::make_shared<EventTable>();
  for (const auto& e : doc.events) table->add(e);
  AutomatonBuilder builder(table);
  for (const auto& s : doc.states) builder.add_state(s);
  builder.set_initial(doc.initial);
  for (const auto& t : doc.transitions) builder.add_transition(t.source, t.event, t.target);
  return builder.build();
}

/// Canonical document: states in id order, transitions by (state, event).
inline ModelDocument document_of(const Automaton& aut, std::string name = {}, std::string description = {}) {
  ModelDocument doc;
  doc.name = std::move(name);
  doc.description = std::move(description);
  for (auto e : aut.events().all()) doc.events.push_back(aut.events().info(e));
  for (auto q : aut.states()) doc.states.push_back(aut.state_name(q));
  doc.initial = aut.state_name(aut.initial());
  for (auto q : aut.states())
    for (const auto& e : aut.out(q))
      doc.transitions.push_back({aut.state_name(q), aut.events().name(e.event), aut.state_name(e.target)});
  return doc;
}

inline Automaton load_model(std::string_view text) { return to_automaton(parse_model(text)); }

inline std::string sha256_hex(std::string_view data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &length) != 1)
    fail(ErrorKind::resource, "SHA-256 computation failed");
  std::string hex;
  char buf[3];
  for (unsigned i = 0; i < length; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

/// Digest of the canonical serialization; metadata does not contribute.
inline std::string model_hash(const Automaton& aut) { return sha256_hex(serialize_model(document_of(aut))); }

// --- supervisor documents ---------------------------------------------------------------

struct SupervisorDocument {
  struct Member {
    std::string state;
    int label = 0;
    friend bool operator==(const Member&, const Member&) = default;
  };
  using Estimate = std::vector<Member>;
  struct Decision {
    Estimate estimate;
    std::optional<std::string> enforce;
    std::vector<std::string> disable;
    friend bool operator==(const Decision&, const Decision&) = default;
  };

  std::string model_hash;
  std::string tie_break = "default";
  int bound = 0;
  std::vector<Estimate> frontier;
  std::vector<Decision> decisions;

  friend bool operator==(const SupervisorDocument&, const SupervisorDocument&) = default;
};

inline constexpr std::string_view supervisor_magic = "afi-supervisor 1";

namespace detail {

inline std::string render_estimate(const SupervisorDocument::Estimate& est) {
  std::string out = "{";
  for (std::size_t i = 0; i < est.size(); ++i) {
    if (i) out += ',';
    out += est[i].state + ":" + FaultLabel{est[i].label}.to_string();
  }
  return out + "}";
}

inline std::vector<std::string> split_braced(const Token& t, std::size_t line, std::string_view body) {
  std::vector<std::string> out;
  if (body.empty()) return out;
  std::size_t start = 0;
  while (true) {
    auto end = body.find(',', start);
    auto item = body.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    if (item.empty()) throw ParseError(line, t.column, "empty element in '" + t.text + "'");
    out.emplace_back(item);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

inline std::string_view braced_body(const Token& t, std::size_t line, std::string_view text) {
  if (text.size() < 2 || text.front() != '{' || text.back() != '}')
    throw ParseError(line, t.column, "expected '{...}' but found '" + t.text + "'");
  return text.substr(1, text.size() - 2);
}

inline SupervisorDocument::Estimate parse_estimate(const Token& t, std::size_t line) {
  SupervisorDocument::Estimate est;
  for (const auto& item : split_braced(t, line, braced_body(t, line, t.text))) {
    const auto colon = item.rfind(':');
    if (colon == std::string::npos) throw ParseError(line, t.column, "member '" + item + "' lacks a label");
    const auto state = item.substr(0, colon);
    const auto label = item.substr(colon + 1);
    int value = 0;
    if (label == "N") {
      value = 0;
    } else if (label.size() > 1 && label[0] == 'F' &&
               std::all_of(label.begin() + 1, label.end(), [](char c) { return c >= '0' && c <= '9'; }) &&
               label.size() < 8) {
      value = std::stoi(label.substr(1));
      if (value < 1) throw ParseError(line, t.column, "invalid label '" + label + "'");
    } else {
      throw ParseError(line, t.column, "invalid label '" + label + "'");
    }
    if (!is_identifier(state)) throw ParseError(line, t.column, "invalid state '" + state + "'");
    est.push_back({state, value});
  }
  if (est.empty()) throw ParseError(line, t.column, "empty estimate");
  return est;
}

}  // namespace detail

inline std::string serialize_supervisor(const SupervisorDocument& doc) {
  std::ostringstream os;
  os << supervisor_magic << '\n';
  os << "model " << doc.model_hash << '\n';
  os << "tie-break " << doc.tie_break << '\n';
  os << "bound " << doc.bound << '\n';
  for (const auto& est : doc.frontier) os << "frontier " << detail::render_estimate(est) << '\n';
  for (const auto& d : doc.decisions) {
    os << "decide " << detail::render_estimate(d.estimate) << " enforce=" << (d.enforce ? *d.enforce : "~")
       << " disable={";
    for (std::size_t i = 0; i < d.disable.size(); ++i) os << (i ? "," : "") << d.disable[i];
    os << "}\n";
  }
  return os.str();
}

inline SupervisorDocument parse_supervisor(std::string_view text) {
  SupervisorDocument doc;
  const auto lines = detail::split_lines(text);
  if (lines.empty() || lines[0] != supervisor_magic)
    throw ParseError(1, 1, "expected header '" + std::string(supervisor_magic) + "'");
  bool have_model = false, have_tie = false, have_bound = false;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    const auto line_no = n + 1;
    const auto tokens = detail::tokenize(lines[n]);
    if (tokens.empty()) continue;
    auto error = [&](const detail::Token& t, const std::string& msg) { throw ParseError(line_no, t.column, msg); };
    auto arity = [&](std::size_t count) {
      if (tokens.size() != count) error(tokens[0], "'" + tokens[0].text + "' expects " +
                                                       std::to_string(count - 1) + " argument(s)");
    };
    const auto& kw = tokens[0].text;
    if (kw == "model") {
      arity(2);
      if (have_model) error(tokens[0], "duplicate model line");
      have_model = true;
      doc.model_hash = tokens[1].text;
    } else if (kw == "tie-break") {
      arity(2);
      if (have_tie) error(tokens[0], "duplicate tie-break line");
      have_tie = true;
      if (tokens[1].text != "default" && tokens[1].text != "paper-example")
        error(tokens[1], "unknown tie-break '" + tokens[1].text + "'");
      doc.tie_break = tokens[1].text;
    } else if (kw == "bound") {
      arity(2);
      if (have_bound) error(tokens[0], "duplicate bound line");
      have_bound = true;
      const auto& v = tokens[1].text;
      if (v.empty() || v.size() > 9 || !std::all_of(v.begin(), v.end(), [](char c) { return c >= '0' && c <= '9'; }))
        error(tokens[1], "bound must be a non-negative integer");
      doc.bound = std::stoi(v);
    } else if (kw == "frontier") {
      arity(2);
      doc.frontier.push_back(detail::parse_estimate(tokens[1], line_no));
    } else if (kw == "decide") {
      arity(4);
      SupervisorDocument::Decision d;
      d.estimate = detail::parse_estimate(tokens[1], line_no);
      if (!tokens[2].text.starts_with("enforce=")) error(tokens[2], "expected enforce=<event|~>");
      const auto enforce = tokens[2].text.substr(8);
      if (enforce != "~") {
        if (!is_identifier(enforce)) error(tokens[2], "invalid event '" + enforce + "'");
        d.enforce = enforce;
      }
      if (!tokens[3].text.starts_with("disable=")) error(tokens[3], "expected disable={...}");
      const std::string_view body = std::string_view(tokens[3].text).substr(8);
      d.disable = detail::split_braced(tokens[3], line_no, detail::braced_body(tokens[3], line_no, body));
      for (const auto& e : d.disable)
        if (!is_identifier(e)) error(tokens[3], "invalid event '" + e + "'");
      doc.decisions.push_back(std::move(d));
    } else {
      error(tokens[0], "unknown directive '" + kw + "'");
    }
  }
  if (!have_model) throw ParseError(lines.size() + 1, 1, "missing model line");
  return doc;
}

inline SupervisorDocument::Estimate document_estimate(const LabeledAutomaton& la, const StateEstimate& est) {
  SupervisorDocument::Estimate out;
  for (auto q : est.members) out.push_back({la.base_names[index_of(q)], la.label(q).value});
  return out;
}

inline SupervisorDocument document_of(const LabeledAutomaton& la, const SupervisorPolicy& policy,
                                      const std::string& hash) {
  SupervisorDocument doc;
  doc.model_hash = hash;
  doc.tie_break = std::string(to_string(policy.tie_break));
  doc.bound = policy.isolation_bound;
  for (const auto& est : policy.frontier) doc.frontier.push_back(document_estimate(la, est));
  const auto& table = la.events();
  for (const auto& [est, d] : policy.decisions) {
    SupervisorDocument::Decision dd{document_estimate(la, est), std::nullopt, {}};
    if (d.enforce) dd.enforce = table.name(*d.enforce);
    for (auto e : d.disable) dd.disable.push_back(table.name(e));
    doc.decisions.push_back(std::move(dd));
  }
  return doc;
}

inline StateEstimate resolve_estimate(const LabeledAutomaton& la, const SupervisorDocument::Estimate& est) {
  std::vector<StateId> members;
  for (const auto& m : est) {
    auto q = la.find(m.state, FaultLabel{m.label});
    if (!q)
      fail(ErrorKind::model, "supervisor refers to unknown labeled state " + m.state + ":" +
                                 FaultLabel{m.label}.to_string());
    members.push_back(*q);
  }
  return StateEstimate(std::move(members));
}

/// Rebuilds the runtime policy. The plant must match the recorded hash and
/// the decisions must be closed under the policy's reachable estimates.
inline SupervisorPolicy policy_of(const SupervisorDocument& doc, const Automaton& plant, const LabeledAutomaton& la) {
  const auto hash = model_hash(plant);
  if (doc.model_hash != hash)
    fail(ErrorKind::model, "supervisor was synthesized for model " + doc.model_hash + ", not " + hash);
  SupervisorPolicy p;
  p.tie_break = parse_tie_break(doc.tie_break);
  p.isolation_bound = doc.bound;
  const auto& table = la.events();
  for (const auto& est : doc.frontier) p.frontier.push_back(resolve_estimate(la, est));
  for (const auto& d : doc.decisions) {
    ControlDecision cd;
    if (d.enforce) cd.enforce = table.id(*d.enforce);
    std::vector<EventId> disable;
    for (const auto& e : d.disable) disable.push_back(table.id(e));
    cd.disable = make_event_set(std::move(disable));
    auto est = resolve_estimate(la, d.estimate);
    if (!p.decisions.emplace(est, std::move(cd)).second)
      fail(ErrorKind::model, "duplicate decision for " + format_estimate(la, est));
  }
  close_policy(la, p);
  return p;
}

// --- DOT export -------------------------------------------------------------------------

namespace detail {

inline std::string dot_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

struct BtsDotOptions {
  std::span<const std::uint32_t> deadlocks;  // Z indices to draw red
  const FixpointResult* fixpoint = nullptr;   // good states and policy edges
};

/// Y-states as ellipses, Z-states as boxes. Initial Y-states blue, marked
/// green, deadlocks red; good states filled, policy edges bold.
inline std::string export_dot(const LabeledAutomaton& la, const BTSGraph& g, const BtsDotOptions& options = {}) {
  const auto& table = la.events();
  std::vector<char> initial(g.y_states.size(), 0), dead(g.z_states.size(), 0);
  for (auto y : g.initial) initial[y] = 1;
  for (auto z : options.deadlocks) dead.at(z) = 1;
  const auto* fx = options.fixpoint;
  std::ostringstream os;
  os << "digraph bts {\n  rankdir=LR;\n";
  for (std::uint32_t y = 0; y < g.y_states.size(); ++y) {
    os << "  y" << y << " [shape=ellipse, label=" << detail::dot_quote(format_estimate(la, g.y_states[y]));
    if (initial[y])
      os << ", color=blue";
    else if (g.is_marked(y))
      os << ", color=green";
    if (g.is_marked(y)) os << ", peripheries=2";
    if (fx && fx->good_y(y)) os << ", style=filled, fillcolor=lightyellow";
    os << "];\n";
  }
  for (std::uint32_t z = 0; z < g.z_states.size(); ++z) {
    os << "  z" << z << " [shape=box, label="
       << detail::dot_quote(format_estimate(la, g.z_estimate(z)) + "\n" +
                            format_decision_short(table, g.z_states[z].decision));
    if (dead[z]) os << ", color=red";
    if (fx && fx->good_z(z)) os << ", style=filled, fillcolor=lightyellow";
    os << "];\n";
  }
  for (std::uint32_t y = 0; y < g.y_states.size(); ++y)
    for (auto z : g.yz[y]) {
      os << "  y" << y << " -> z" << z;
      if (fx && fx->choice[y] == z) os << " [penwidth=2.5]";
      os << ";\n";
    }
  for (std::uint32_t z = 0; z < g.z_states.size(); ++z)
    for (const auto& e : g.zy[z]) os << "  z" << z << " -> y" << e.y << " [label=" << detail::dot_quote(table.name(e.event)) << "];\n";
  os << "}\n";
  return os.str();
}

inline std::string export_dot(const LabeledAutomaton& la, const Diagnoser& d) {
  const auto& table = la.events();
  std::ostringstream os;
  os << "digraph diagnoser {\n  rankdir=LR;\n";
  for (std::uint32_t x = 0; x < d.state_count(); ++x) {
    const auto v = classify(la, d.estimate(x));
    os << "  x" << x << " [shape=ellipse, label=" << detail::dot_quote(format_estimate(la, d.estimate(x)));
    if (x == d.initial()) os << ", color=blue";
    if (v.detection == Detection::faulty) os << ", style=filled, fillcolor=" << (v.isolated ? "palegreen" : "lightpink");
    os << "];\n";
  }
  for (std::uint32_t x = 0; x < d.state_count(); ++x)
    for (const auto& t : d.out(x))
      os << "  x" << x << " -> x" << t.target << " [label=" << detail::dot_quote(table.name(t.event)) << "];\n";
  os << "}\n";
  return os.str();
}

inline std::string export_dot(const LabeledAutomaton& la, const SupervisorPolicy& policy) {
  const auto& table = la.events();
  std::map<StateEstimate, std::size_t> ids;
  auto id = [&](const StateEstimate& est) { return ids.emplace(est, ids.size()).first->second; };
  for (const auto& est : policy.frontier) id(est);
  for (const auto& [key, target] : policy.transitions) {
    id(key.first);
    id(target);
  }
  std::vector<const StateEstimate*> order(ids.size());
  for (const auto& [est, i] : ids) order[i] = &est;
  std::set<StateEstimate> frontier(policy.frontier.begin(), policy.frontier.end());
  std::ostringstream os;
  os << "digraph supervisor {\n";
  if (!ids.empty()) os << "  rankdir=LR;\n";
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& est = *order[i];
    os << "  s" << i << " [shape=ellipse, label="
       << detail::dot_quote(format_estimate(la, est) + "\n" + format_decision_short(table, policy.decide(est)));
    if (frontier.contains(est))
      os << ", color=blue";
    else if (is_isolated(la, est))
      os << ", color=green, peripheries=2";
    os << "];\n";
  }
  for (const auto& [key, target] : policy.transitions)
    os << "  s" << ids.at(key.first) << " -> s" << ids.at(target)
       << " [label=" << detail::dot_quote(table.name(key.second)) << "];\n";
  os << "}\n";
  return os.str();
}

}  // namespace afi
