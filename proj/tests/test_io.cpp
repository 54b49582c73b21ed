#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <random>

#include "support/fixtures.hpp"
#include "support/smart_home.hpp"

namespace afi::test {
namespace {

namespace fs = std::filesystem;

std::size_t count(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
  return n;
}

template <class F>
ParseError parse_error(F&& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "expected a parse error";
  return ParseError(0, 0, "none");
}

// --- models -------------------------------------------------------------------------

TEST(ModelFormat, FixtureLoads) {
  const auto f = paper_fig3();
  EXPECT_EQ(f.plant.state_count(), 11u);
  EXPECT_EQ(f.plant.transition_count(), 16u);
  EXPECT_EQ(f.events().observable_events().size(), 4u);
  EXPECT_EQ(f.events().controllable_events(), make_event_set({f.ev("o3")}));
  EXPECT_EQ(f.events().forcible_events(), make_event_set({f.ev("o1"), f.ev("o2"), f.ev("o3"), f.ev("a")}));
}

TEST(ModelFormat, NondeterminismRejected) {
  const auto e = parse_error([] { parse_model("event e obs\ninit a\ntrans a e b\ntrans a e c\n"); });
  EXPECT_EQ(e.line(), 4u);
  EXPECT_EQ(e.column(), 9u);
}

TEST(ModelFormat, FaultEventsMustBeUnobservable) {
  EXPECT_NO_THROW(parse_model("event f fault=1\ninit 0\n"));
  const auto e = parse_error([] { parse_model("event f obs fault=1\ninit 0\n"); });
  EXPECT_EQ(e.line(), 1u);
  EXPECT_EQ(e.kind(), ErrorKind::model);
}

TEST(ModelFormat, ErrorsCarryPositions) {
  struct Case {
    const char* text;
    std::size_t line, column;
  };
  const Case cases[] = {
      {"event o obs\ninit 0\ntrans 0 x 0\n", 3, 9},         // undeclared event
      {"event o obs bogus\ninit 0\n", 1, 13},                // unknown attribute
      {"event o obs\n  frobnicate 1\ninit 0\n", 2, 3},       // unknown directive
      {"event o obs\ninit 0\ninit 1\n", 3, 1},               // duplicate init
      {"event o obs\nevent o\ninit 0\n", 2, 7},              // duplicate event
      {"event o obs\ntrans 0 o 0\n", 3, 1},                  // missing init
      {"event o fault=0\ninit 0\n", 1, 9},                   // bad fault type
      {"event o obs\ninit 0\ntrans 0 o\n", 3, 9},            // arity
      {"event o obs\ninit a$b\n", 2, 6},                     // bad identifier
      {"event o obs\nstate s\nstate s\ninit s\n", 3, 7},     // duplicate state
  };
  for (const auto& c : cases) {
    const auto e = parse_error([&] { parse_model(c.text); });
    EXPECT_EQ(e.line(), c.line) << c.text;
    EXPECT_EQ(e.column(), c.column) << c.text;
  }
}

TEST(ModelFormat, CommentsAndBlankLines) {
  const auto doc = parse_model("# header\n\nevent o obs   # trailing\ninit 0\ntrans 0 o 0\n");
  EXPECT_EQ(doc.events.size(), 1u);
  EXPECT_EQ(doc.transitions.size(), 1u);
}

TEST(ModelFormat, NonAsciiIdentifiers) {
  const auto g = load_model("event \xcf\x83 obs\ninit q\xe2\x82\x80\ntrans q\xe2\x82\x80 \xcf\x83 q\xe2\x82\x80\n");
  EXPECT_EQ(g.state_name(g.initial()), "q\xe2\x82\x80");
}

ModelDocument random_model(std::mt19937_64& rng) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const std::string alphabet = "abcxyz019_-.";
  auto ident = [&] {
    std::string s;
    for (int i = pick(1, 6); i > 0; --i) s += alphabet[pick(0, int(alphabet.size()) - 1)];
    return s;
  };
  ModelDocument doc;
  if (pick(0, 1)) doc.name = ident();
  if (pick(0, 1)) doc.description = ident() + " " + ident() + " words";
  std::set<std::string> used;
  for (int i = pick(1, 5); i > 0; --i) {
    auto n = "e" + ident();
    if (!used.insert(n).second) continue;
    EventInfo e{n, false, bool(pick(0, 1)), bool(pick(0, 1)), std::nullopt};
    if (pick(0, 2) == 0)
      e.fault_type = pick(1, 3);
    else
      e.observable = pick(0, 1);
    doc.events.push_back(e);
  }
  std::set<std::string> states;
  for (int i = pick(1, 6); i > 0; --i) {
    auto s = "s" + ident();
    if (states.insert(s).second) doc.states.push_back(s);
  }
  doc.initial = doc.states[pick(0, int(doc.states.size()) - 1)];
  std::set<std::pair<std::string, std::string>> defined;
  for (int i = pick(0, 10); i > 0; --i) {
    const auto& src = doc.states[pick(0, int(doc.states.size()) - 1)];
    const auto& ev = doc.events[pick(0, int(doc.events.size()) - 1)].name;
    if (!defined.emplace(src, ev).second) continue;
    doc.transitions.push_back({src, ev, doc.states[pick(0, int(doc.states.size()) - 1)]});
  }
  return doc;
}

TEST(ModelFormat, RandomRoundTrip) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 300; ++i) {
    const auto doc = random_model(rng);
    const auto text = serialize_model(doc);
    const auto back = parse_model(text);
    ASSERT_EQ(back, doc) << text;
    ASSERT_EQ(serialize_model(back), text);
  }
}

TEST(ModelFormat, FixtureCanonicalFormIsStable) {
  const auto f = paper_fig3();
  const auto canonical = serialize_model(document_of(f.plant));
  EXPECT_EQ(serialize_model(document_of(load_model(canonical))), canonical);
  EXPECT_EQ(model_hash(load_model(canonical)), model_hash(f.plant));
}

TEST(ModelFormat, SmartHomeFileMatchesGenerator) {
  const auto f = load_fixture("smart-home.des");
  EXPECT_EQ(model_hash(f.plant), model_hash(build_smart_home()));
}

TEST(Hash, KnownDigest) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

// --- supervisors --------------------------------------------------------------------

SupervisorDocument random_supervisor(std::mt19937_64& rng) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto estimate = [&] {
    SupervisorDocument::Estimate est;
    for (int i = pick(1, 4); i > 0; --i) est.push_back({"q" + std::to_string(pick(0, 30)), pick(0, 3)});
    return est;
  };
  SupervisorDocument doc;
  doc.model_hash = sha256_hex(std::to_string(pick(0, 1000)));
  doc.tie_break = pick(0, 1) ? "default" : "paper-example";
  doc.bound = pick(0, 20);
  for (int i = pick(0, 3); i > 0; --i) doc.frontier.push_back(estimate());
  for (int i = pick(0, 6); i > 0; --i) {
    SupervisorDocument::Decision d{estimate(), std::nullopt, {}};
    if (pick(0, 1)) d.enforce = "e" + std::to_string(pick(0, 9));
    for (int j = pick(0, 3); j > 0; --j) d.disable.push_back("c" + std::to_string(pick(0, 9)));
    doc.decisions.push_back(std::move(d));
  }
  return doc;
}

TEST(SupervisorFormat, RandomRoundTrip) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 300; ++i) {
    const auto doc = random_supervisor(rng);
    const auto text = serialize_supervisor(doc);
    const auto back = parse_supervisor(text);
    ASSERT_EQ(back, doc) << text;
    ASSERT_EQ(serialize_supervisor(back), text);
  }
}

TEST(SupervisorFormat, FixtureRoundTrip) {
  const auto f = paper_fig3();
  const auto policy = extract_supervisor(f.la, synthesize(f.la));
  const auto text = serialize_supervisor(document_of(f.la, policy, model_hash(f.plant)));
  EXPECT_NE(text.find("decide {2:F1,7:F2} enforce=o3 disable={}"), std::string::npos) << text;
  const auto back = policy_of(parse_supervisor(text), f.plant, f.la);
  EXPECT_EQ(back.decisions, policy.decisions);
  EXPECT_EQ(back.frontier, policy.frontier);
  EXPECT_EQ(back.transitions, policy.transitions);
  EXPECT_EQ(back.isolation_bound, policy.isolation_bound);
}

TEST(SupervisorFormat, WrongModelRejected) {
  const auto f = paper_fig3();
  const auto other = load_data("unsolvable.des");
  const auto policy = extract_supervisor(f.la, synthesize(f.la));
  const auto doc = document_of(f.la, policy, model_hash(f.plant));
  EXPECT_EQ(error_kind([&] { policy_of(doc, other.plant, other.la); }), ErrorKind::model);
}

TEST(SupervisorFormat, ParseErrors) {
  EXPECT_EQ(parse_error([] { parse_supervisor("afi-supervisor 2\n"); }).line(), 1u);
  const auto e = parse_error([] { parse_supervisor("afi-supervisor 1\nmodel x\nfrontier {1:G}\n"); });
  EXPECT_EQ(e.line(), 3u);
  EXPECT_EQ(e.column(), 10u);
  EXPECT_EQ(parse_error([] { parse_supervisor("afi-supervisor 1\ntie-break default\n"); }).line(), 3u);
}

// --- DOT ------------------------------------------------------------------------------

TEST(Dot, FixtureBts) {
  const auto f = paper_fig3();
  const auto g = build_bts(f.la);
  const auto dl = find_deadlocks(f.la, g);
  const auto dot = export_dot(f.la, g, BtsDotOptions{dl, nullptr});
  EXPECT_EQ(count(dot, "shape=ellipse"), 6u);
  EXPECT_EQ(count(dot, "shape=box"), g.z_states.size());
  EXPECT_EQ(count(dot, "color=red"), 1u);
  EXPECT_NE(dot.find("{5F1,9F2}\\n<~,{o3}>\", color=red"), std::string::npos);
}

TEST(Dot, LiveBtsLacksTheDeadlock) {
  const auto f = paper_fig3();
  const auto res = synthesize(f.la);
  const auto dot = export_dot(f.la, res.live, BtsDotOptions{{}, &res.fixpoint});
  EXPECT_EQ(dot.find("{5F1,9F2}\\n<~,{o3}>"), std::string::npos);
  EXPECT_NE(dot.find("{5F1,9F2}\\n<~,{}>"), std::string::npos);
  EXPECT_EQ(count(dot, "penwidth=2.5"), res.good_y().size());
}

TEST(Dot, EmptySupervisor) {
  const auto f = paper_fig3();
  EXPECT_EQ(export_dot(f.la, SupervisorPolicy{}), "digraph supervisor {\n}\n");
}

TEST(Dot, Diagnoser) {
  const auto f = paper_fig3();
  const auto dot = export_dot(f.la, build_diagnoser(f.la));
  EXPECT_EQ(count(dot, "shape=ellipse"), 7u);
  EXPECT_EQ(count(dot, "palegreen"), 2u);
}

// --- command line ---------------------------------------------------------------------

#ifdef AFI_CLI_PATH

struct CliResult {
  int status;
  std::string out, err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("afi-cli-" + std::to_string(::getpid()) + "-" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CliResult run(const std::string& args) const {
    const auto out = dir_ / "stdout", err = dir_ / "stderr";
    const auto cmd = std::string(AFI_CLI_PATH) + " " + args + " > " + out.string() + " 2> " + err.string();
    const int raw = std::system(cmd.c_str());
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, read_text(out.string()), read_text(err.string())};
  }

  std::string model(const std::string& name) const { return models_dir() + "/" + name; }
  std::string data(const std::string& name) const { return data_dir() + "/" + name; }
  std::string tmp(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(Cli, CheckFixture) {
  const auto r = run("check " + model("paper-fig3.des"));
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("diagnosable: yes"), std::string::npos);
  EXPECT_NE(r.out.find("isolatable: no"), std::string::npos);
  EXPECT_NE(r.out.find("witness: {5F1,9F2} -o3-> {5F1,9F2}"), std::string::npos);
}

TEST_F(Cli, SynthFixture) {
  const auto sup = tmp("fig3.sup");
  const auto r = run("synth " + model("paper-fig3.des") + " --out " + sup);
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("solvable: yes"), std::string::npos);
  EXPECT_NE(r.out.find("deadlocks: 1\n"), std::string::npos);
  EXPECT_NE(r.out.find("frontier: {1F1,6F2} {2F1,7F2}"), std::string::npos);
  EXPECT_NE(r.out.find("isolated: {3F1} {8F2}"), std::string::npos);
  EXPECT_TRUE(fs::exists(sup));

  const auto x = run("explain " + model("paper-fig3.des") + " " + sup + " --obs o2,o3,o2");
  EXPECT_EQ(x.status, 0) << x.err;
  EXPECT_NE(x.out.find("verdict: F_2"), std::string::npos) << x.out;
  EXPECT_NE(x.out.find("DEC enforce=o3 disable={}"), std::string::npos);

  const auto s = run("simulate " + model("paper-fig3.des") + " " + sup + " --script f1,o2,a");
  EXPECT_EQ(s.status, 6);
  EXPECT_NE(s.err.find("\"error\":\"scheduler\""), std::string::npos) << s.err;

  const auto a = run("simulate " + model("paper-fig3.des") + " " + sup + " --seed 5 --steps 20");
  const auto b = run("simulate " + model("paper-fig3.des") + " " + sup + " --seed 5 --steps 20");
  EXPECT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.rfind("SEED 5\n", 0), 0u);

  const auto bad = run("explain " + model("paper-fig3.des") + " " + sup + " --obs o2,o4");
  EXPECT_EQ(bad.status, 6);
}

TEST_F(Cli, OutputIsDeterministic) {
  const auto a = run("synth " + model("smart-home.des"));
  const auto b = run("synth " + model("smart-home.des"));
  EXPECT_EQ(a.status, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
}

TEST_F(Cli, PaperExampleTieBreak) {
  const auto r = run("synth " + model("paper-fig3.des") + " --tie-break paper-example");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("  {1F1,6F2} <o2,{}>"), std::string::npos) << r.out;
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("synth " + data("unsolvable.des")).status, 5);
  EXPECT_EQ(run("check " + data("not-diagnosable.des")).status, 4);
  EXPECT_EQ(run("synth " + data("not-diagnosable.des")).status, 4);
  EXPECT_EQ(run("check " + data("unobservable-cycle.des")).status, 3);
  EXPECT_EQ(run("synth " + data("unobservable-cycle.des")).status, 3);
  EXPECT_EQ(run("check " + tmp("missing.des")).status, 1);
  EXPECT_EQ(run("frobnicate").status, 1);
  EXPECT_EQ(run("synth " + model("paper-fig3.des") + " --tie-break fastest").status, 1);
}

TEST_F(Cli, ModelErrorsAreJsonWithPosition) {
  const auto r = run("check " + data("bad-syntax.des"));
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("\"error\":\"model\""), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("\"line\":5"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("\"column\":9"), std::string::npos) << r.err;
}

TEST_F(Cli, DotOutputs) {
  EXPECT_EQ(run("synth " + model("paper-fig3.des") + " --dot " + tmp("bts.dot")).status, 0);
  EXPECT_EQ(count(read_text(tmp("bts.dot")), "shape=ellipse"), 6u);
  EXPECT_EQ(run("diagnoser " + model("paper-fig3.des") + " --dot " + tmp("diag.dot")).status, 0);
  EXPECT_EQ(count(read_text(tmp("diag.dot")), "shape=ellipse"), 7u);
}

#endif

}  // namespace
}  // namespace afi::test
