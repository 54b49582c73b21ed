// afi: command-line front end for the fault-isolation library.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "afi/afi.hpp"

namespace {

using namespace afi;

enum Exit : int {
  ok = 0,
  usage = 1,
  model_error = 2,
  assumption_failure = 3,
  not_diagnosable = 4,
  not_solvable = 5,
  protocol_error = 6,
  resource_error = 7,
};

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::input: return usage;
    case ErrorKind::model:
    case ErrorKind::config: return model_error;
    case ErrorKind::assumption: return assumption_failure;
    case ErrorKind::precondition: return not_diagnosable;
    case ErrorKind::synthesis: return not_solvable;
    case ErrorKind::protocol:
    case ErrorKind::scheduler: return protocol_error;
    case ErrorKind::resource: return resource_error;
  }
  return usage;
}

void report(const std::string& kind, const std::string& message, const nlohmann::json& extra = {}) {
  nlohmann::json j{{"error", kind}, {"message", message}};
  if (extra.is_object()) j.update(extra);
  std::cerr << j.dump() << '\n';
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::input, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << content)) fail(ErrorKind::input, "cannot write '" + path + "'");
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

Automaton load_plant(const std::string& path) { return load_model(read_file(path)); }

std::string estimates_line(const LabeledAutomaton& la, const std::vector<StateEstimate>& ests) {
  std::string out;
  for (const auto& e : ests) out += (out.empty() ? "" : " ") + format_estimate(la, e);
  return out.empty() ? "-" : out;
}

int cmd_check(const std::string& path) {
  auto plant = load_plant(path);
  std::cout << "states: " << plant.state_count() << "\nevents: " << plant.events().size()
            << "\ntransitions: " << plant.transition_count() << '\n';
  const auto report = check_assumptions(plant);
  std::cout << describe(plant, report) << '\n';
  std::cout << "assumptions: " << (report.passing() ? "pass" : "fail") << '\n';
  if (!report.passing()) return assumption_failure;
  const auto la = build_labeled_plant(plant);
  const auto diag = check_diagnosability(la);
  std::cout << "diagnosable: " << (diag.diagnosable ? "yes" : "no") << '\n';
  if (!diag.diagnosable) {
    std::cout << "witness: " << describe(plant.events(), *diag.witness) << '\n';
    return not_diagnosable;
  }
  const auto iso = check_isolatability(la);
  std::cout << "isolatable: " << (iso.isolatable ? "yes" : "no") << '\n';
  for (const auto& w : iso.witnesses) std::cout << "witness: " << describe(la, w) << '\n';
  return ok;
}

int cmd_diagnoser(const std::string& path, const std::string& dot) {
  const auto la = build_labeled_plant(load_plant(path));
  const auto d = build_diagnoser(la);
  int normal = 0, uncertain = 0, faulty = 0, isolated = 0;
  for (const auto& est : d.estimates()) {
    const auto v = classify(la, est);
    if (v.detection == Detection::normal) ++normal;
    if (v.detection == Detection::uncertain) ++uncertain;
    if (v.detection == Detection::faulty) ++faulty;
    if (v.isolated) ++isolated;
  }
  std::cout << "labeled-states: " << la.automaton.state_count() << "\ndiagnoser-states: " << d.state_count()
            << "\ndiagnoser-transitions: " << d.transition_count() << "\nnormal: " << normal
            << "\nuncertain: " << uncertain << "\nfaulty: " << faulty << "\nisolated: " << isolated << '\n';
  std::vector<StateEstimate> frontier;
  for (auto x : fault_frontier_states(la, d)) frontier.push_back(d.estimate(x));
  std::cout << "frontier: " << estimates_line(la, frontier) << '\n';
  if (!dot.empty()) write_file(dot, export_dot(la, d));
  return ok;
}

int cmd_synth(const std::string& path, const std::string& tie, const std::string& out, const std::string& dot) {
  const auto plant = load_plant(path);
  const auto la = build_labeled_plant(plant);
  const auto res = synthesize(la, SynthesisOptions{parse_tie_break(tie)});
  std::vector<StateEstimate> initial, marked;
  for (auto y : res.bts.initial) initial.push_back(res.bts.y_states[y]);
  for (std::uint32_t y = 0; y < res.bts.y_states.size(); ++y)
    if (res.bts.is_marked(y)) marked.push_back(res.bts.y_states[y]);
  std::sort(marked.begin(), marked.end());
  const auto& table = plant.events();
  std::cout << "frontier: " << estimates_line(la, initial) << '\n';
  std::cout << "isolated: " << estimates_line(la, marked) << '\n';
  std::cout << "bts: y=" << res.bts.y_states.size() << " z=" << res.bts.z_states.size() << '\n';
  std::cout << "deadlocks: " << res.deadlocks.size() << '\n';
  for (const auto& [est, d] : res.deadlock_states())
    std::cout << "  " << format_estimate(la, est) << ' ' << format_decision_short(table, d) << '\n';
  std::cout << "live-bts: y=" << res.live.y_states.size() << " z=" << res.live.z_states.size() << '\n';
  std::cout << "good-estimates: " << res.good_y().size() << '\n';
  for (const auto& [est, d] : res.policy())
    std::cout << "  " << format_estimate(la, est) << ' ' << format_decision_short(table, d) << '\n';
  std::cout << "good-decisions: " << res.good_z().size() << '\n';
  std::cout << "rounds: " << res.fixpoint.rounds << '\n';
  for (const auto& [est, round] : res.initial_rounds())
    std::cout << "  " << format_estimate(la, est) << ' ' << (round ? std::to_string(*round) : "-") << '\n';
  std::cout << "solvable: " << (res.solvable() ? "yes" : "no") << '\n';
  if (!dot.empty())
    write_file(dot, export_dot(la, res.live, BtsDotOptions{{}, &res.fixpoint}));
  if (!res.solvable()) {
    std::cout << "bound: -\n" << describe_unsolved(la, unsolved_initials(res.live, res.fixpoint));
    return not_solvable;
  }
  std::cout << "bound: " << *res.fixpoint.isolation_bound << '\n';
  if (!out.empty()) {
    const auto policy = extract_supervisor(la, res);
    write_file(out, serialize_supervisor(document_of(la, policy, model_hash(plant))));
  }
  return ok;
}

std::vector<EventId> resolve_events(const EventTable& table, const std::string& list) {
  std::vector<EventId> out;
  for (const auto& name : split_commas(list)) out.push_back(table.id(name));
  return out;
}

int cmd_simulate(const std::string& path, const std::string& sup, const std::string& script,
                 std::optional<std::uint64_t> seed, std::optional<std::size_t> steps) {
  const auto plant = load_plant(path);
  const auto la = build_labeled_plant(plant);
  const auto policy = policy_of(parse_supervisor(read_file(sup)), plant, la);
  SimulationOptions options;
  if (seed) {
    options.seed = *seed;
    options.max_steps = steps.value_or(50);
  } else {
    options.script = resolve_events(plant.events(), script);
    if (options.script->empty()) fail(ErrorKind::input, "empty script");
    options.max_steps = steps.value_or(options.script->size());
  }
  for (const auto& line : simulate(la, policy, options)) std::cout << line << '\n';
  return ok;
}

int cmd_explain(const std::string& path, const std::string& sup, const std::string& obs) {
  const auto plant = load_plant(path);
  const auto la = build_labeled_plant(plant);
  const auto policy = policy_of(parse_supervisor(read_file(sup)), plant, la);
  const IsolationEngine engine(la, policy);
  auto state = engine.initial();
  std::cout << "step 0 phase=" << to_string(state.phase) << " estimate=" << format_estimate(la, state.estimate)
            << ' ' << format_verdict(state.verdict) << '\n';
  std::size_t n = 0;
  for (auto e : resolve_events(plant.events(), obs)) {
    const auto before = state.decisions.size();
    state = engine.step(std::move(state), e);
    std::cout << "step " << ++n << " obs=" << plant.events().name(e) << " phase=" << to_string(state.phase)
              << " estimate=" << format_estimate(la, state.estimate) << ' ' << format_verdict(state.verdict) << '\n';
    if (state.decisions.size() > before)
      std::cout << "  DEC " << format_decision(plant.events(), state.decisions.back()) << '\n';
  }
  std::cout << "verdict: " << state.verdict.isolation_string() << '\n';
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active fault isolation for discrete event systems"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::string model, sup, tie = "default", out, dot, script, obs;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> steps;

  auto* check = app.add_subcommand("check", "assumptions, diagnosability and uncontrolled isolatability");
  check->add_option("model", model, "model file")->required();

  auto* diag = app.add_subcommand("diagnoser", "build the diagnoser");
  diag->add_option("model", model, "model file")->required();
  diag->add_option("--dot", dot, "write the diagnoser as DOT");

  auto* synth = app.add_subcommand("synth", "synthesize an isolation supervisor");
  synth->add_option("model", model, "model file")->required();
  synth->add_option("--tie-break", tie, "default | paper-example")->check(CLI::IsMember({"default", "paper-example"}));
  synth->add_option("--out", out, "write the supervisor file");
  synth->add_option("--dot", dot, "write the live BTS as DOT");

  auto* sim = app.add_subcommand("simulate", "run the closed loop");
  sim->add_option("model", model, "model file")->required();
  sim->add_option("supervisor", sup, "supervisor file")->required();
  auto* script_opt = sim->add_option("--script", script, "comma-separated plant events");
  auto* seed_opt = sim->add_option("--seed", seed, "seed for the random scheduler");
  script_opt->excludes(seed_opt);
  sim->add_option("--steps", steps, "maximum plant events")->check(CLI::PositiveNumber);

  auto* explain = app.add_subcommand("explain", "replay observations through the supervisor");
  explain->add_option("model", model, "model file")->required();
  explain->add_option("supervisor", sup, "supervisor file")->required();
  explain->add_option("--obs", obs, "comma-separated observations")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report("usage", e.what());
    return usage;
  }

  try {
    if (check->parsed()) return cmd_check(model);
    if (diag->parsed()) return cmd_diagnoser(model, dot);
    if (synth->parsed()) return cmd_synth(model, tie, out, dot);
    if (sim->parsed()) {
      if (script.empty() && !seed) {
        report("usage", "simulate needs --script or --seed");
        return usage;
      }
      return cmd_simulate(model, sup, script, seed, steps);
    }
    if (explain->parsed()) return cmd_explain(model, sup, obs);
  } catch (const ParseError& e) {
    report("model", e.detail(), {{"line", e.line()}, {"column", e.column()}});
    return model_error;
  } catch (const Error& e) {
    report(std::string(to_string(e.kind())), e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    report("internal", e.what());
    return usage;
  }
  return usage;
}
