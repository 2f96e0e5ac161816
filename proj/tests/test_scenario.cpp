#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "agentmix/fault.hpp"
#include "agentmix/runner.hpp"

using namespace agentmix;

namespace {

const char* kMinimal = R"js({
  "version": "agentmix/1",
  "spaces": {"actions": ["a", "b"], "observations": ["o"], "rewards": ["-1", "0", "1"]},
  "agents": {"Db": {"type": "constant", "action": "b"}, "U": {"type": "uniform"}},
  "environments": {"E1": {"type": "table", "horizon": 1, "entries": {"": {"(o,0)": "1"}, "(o,0) b": {"(o,1)": "1"}, "(o,0) a": {"(o,-1)": "1"}}}},
  "checks": [{"name": "v", "op": "value", "agent": "Db", "env": "E1", "t": 2, "equals": "1"}]
})js";

std::string fixture_text() {
  std::ifstream in(AGENTMIX_FIXTURE_DIR "/fix1.json");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ojson minimal() { return ojson::parse(kMinimal); }

Error error_of(const std::string& text) {
  try {
    Scenario s = parse_scenario(text);
    // Validation of references happens when checks are built.
    std::ostringstream out;
    run_scenario(s, RunOptions{}, out);
  } catch (const Error& e) {
    return e;
  }
  return Error(ErrorCode::UnknownName, "no error");
}

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args) {
  std::string cmd = std::string(AGENTMIX_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = ::popen(cmd.c_str(), "r");
  REQUIRE(p);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int status = ::pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string write_temp(const std::string& name, const std::string& text) {
  std::string path = std::string(AGENTMIX_TEST_TMP) + "/" + name;
  std::ofstream(path) << text;
  return path;
}

const std::string kFix = AGENTMIX_FIXTURE_DIR "/fix1.json";

}  // namespace

TEST_CASE("a minimal scenario parses and runs") {
  Scenario s = parse_scenario(kMinimal);
  CHECK(s.actions == std::vector<std::string>{"a", "b"});
  CHECK(s.rewards == std::vector<Rational>{Rational(-1), Rational(0), Rational(1)});
  CHECK(s.agents.size() == 2);
  CHECK(s.agents[0].name == "Db");
  CHECK(s.find_environment("E1"));
  CHECK_FALSE(s.find_agent("E1"));
  std::ostringstream out;
  CHECK(run_scenario(s, RunOptions{}, out) == kExitPass);
  CHECK(out.str() == "{\"name\":\"v\",\"op\":\"value\",\"verdict\":\"pass\",\"depth\":2,"
                     "\"details\":{\"value\":\"1\",\"tail\":\"0\",\"t\":2}}\n");
}

TEST_CASE("parse errors carry line and column") {
  Error e = error_of("{\n  \"version\": \"agentmix/1\",\n  \"spaces\": [,]\n}");
  CHECK(e.code() == ErrorCode::ParseError);
  CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  CHECK(std::string(e.what()).find("column") != std::string::npos);
}

TEST_CASE("schema errors name the offending path") {
  ojson j = minimal();
  j["checks"][0]["colour"] = "red";
  Error e = error_of(j.dump());
  CHECK(e.code() == ErrorCode::SchemaError);
  CHECK(std::string(e.what()).find("/checks/0/colour") != std::string::npos);

  ojson v = minimal();
  v["version"] = "agentmix/0";
  CHECK(error_of(v.dump()).code() == ErrorCode::SchemaError);

  ojson op = minimal();
  op["checks"][0]["op"] = "levitate";
  CHECK(error_of(op.dump()).code() == ErrorCode::SchemaError);

  ojson dup = minimal();
  dup["checks"].push_back(dup["checks"][0]);
  Error d = error_of(dup.dump());
  CHECK(d.code() == ErrorCode::ValidationError);
  CHECK(std::string(d.what()).find("/checks/1/name") != std::string::npos);
}

TEST_CASE("unnormalized measure weights are a validation error naming the measure") {
  ojson j = minimal();
  j["measures"] = ojson::parse(R"js({"Bad": {"components": [{"env": "E1", "weight": "1/2"}, {"env": "E1", "weight": "1/3"}]}})js");
  j["checks"].push_back(ojson::parse(R"js({"name": "u", "op": "upsilon", "agent": "Db", "measure": "Bad", "t": 2})js"));
  Error e = error_of(j.dump());
  CHECK(e.code() == ErrorCode::ValidationError);
  CHECK(std::string(e.what()).find("/measures/Bad") != std::string::npos);
  CHECK(std::string(e.what()).find("5/6") != std::string::npos);
}

TEST_CASE("duals over rewards that are not closed under negation are rejected") {
  ojson j = minimal();
  j["spaces"]["rewards"] = ojson::parse(R"(["0", "1"])");
  j["environments"] = ojson::parse(R"js({"S": {"type": "silent"}, "Sbar": {"type": "envdual", "env": "S"}})js");
  j["checks"] = ojson::parse(R"([{"name": "v", "op": "value", "agent": "Db", "env": "Sbar", "t": 1}])");
  Error e = error_of(j.dump());
  CHECK(e.code() == ErrorCode::ValidationError);
  CHECK(std::string(e.what()).find("/environments/Sbar") != std::string::npos);
}

TEST_CASE("unknown names and self references") {
  ojson j = minimal();
  j["checks"][0]["agent"] = "Nobody";
  CHECK(error_of(j.dump()).code() == ErrorCode::UnknownName);

  ojson loop = minimal();
  loop["agents"]["L"] = ojson::parse(R"js({"type": "dual", "agent": "L"})js");
  loop["checks"][0]["agent"] = "L";
  CHECK(error_of(loop.dump()).code() == ErrorCode::ValidationError);
}

TEST_CASE("serialization round-trips") {
  Scenario s = parse_scenario(fixture_text());
  ojson canon = serialize_scenario(s);
  Scenario back = parse_scenario(canon.dump());
  CHECK(back == s);
  CHECK(serialize_scenario(back) == canon);
  CHECK(back.checks.size() == s.checks.size());
  CHECK(back.checks.front()["name"] == "value-Db");
  Scenario m = parse_scenario(kMinimal);
  CHECK(parse_scenario(serialize_scenario(m).dump(2)) == m);
}

TEST_CASE("runner outcomes") {
  Scenario s = parse_scenario(fixture_text());
  RunOptions opts;
  CheckOutcome c = run_check(s, *s.find_check("closure"), opts);
  CHECK(c.verdict == Verdict::Pass);  // expected to fail, so the check passes
  CheckOutcome ex = run_check(s, *s.find_check("extrema-deterministic"), opts);
  CHECK(ex.verdict == Verdict::Pass);
  CheckOutcome def = run_check(s, *s.find_check("seeded-fallback-defect"), opts);
  CHECK(def.verdict == Verdict::Pass);
  // The defect does not leak past the check that injected it.
  CHECK(fault::active() == fault::Defect::None);

  std::ostringstream out;
  CHECK(run_scenario(s, opts, out, std::string("duality")) == kExitPass);
  CHECK(out.str().find("\"name\":\"duality\"") == 1);
  std::ostringstream none;
  CHECK_THROWS_AS(run_scenario(s, opts, none, std::string("missing")), Error);
}

TEST_CASE("a failing check makes the run fail") {
  ojson j = minimal();
  j["checks"][0]["equals"] = "-1";
  std::ostringstream out;
  CHECK(run_scenario(parse_scenario(j.dump()), RunOptions{}, out) == kExitFail);
  CHECK(out.str().find("\"verdict\":\"fail\"") != std::string::npos);

  ojson d = minimal();
  d["agents"]["Da"] = ojson::parse(R"js({"type": "constant", "action": "a"})js");
  d["checks"] = ojson::parse(R"([{"name": "m", "op": "mixture_laws", "weights": ["1/3", "2/3"],
    "agents": ["Db", "Da"], "env": "E1", "t": 3, "inject_defect": "missing_bayes_denominator"}])");
  std::ostringstream o2;
  CHECK(run_scenario(parse_scenario(d.dump()), RunOptions{}, o2) == kExitFail);
}

TEST_CASE("csv output") {
  Scenario s = parse_scenario(kMinimal);
  RunOptions opts;
  opts.format = OutputFormat::Csv;
  std::ostringstream out;
  run_scenario(s, opts, out);
  CHECK(out.str().rfind("name,op,verdict", 0) == 0);
  CHECK(out.str().find("v,value,pass") != std::string::npos);
}

TEST_CASE("cli value and upsilon") {
  Run v = cli("value " + kFix + " Db E1 --t 2");
  CHECK(v.code == 0);
  CHECK(v.out == "{\"value\":\"1\",\"tail\":\"0\",\"t\":2}\n");
  Run m = cli("value " + kFix + " M E1 --t 2");
  CHECK(m.out == "{\"value\":\"-1/3\",\"tail\":\"0\",\"t\":2}\n");
  Run u = cli("upsilon " + kFix + " Db Y1 --t 2");
  CHECK(u.code == 0);
  CHECK(u.out == "{\"value\":\"0\",\"tail\":\"0\",\"t\":2}\n");
}

TEST_CASE("cli check is deterministic and passes on the fixture") {
  Run a = cli("check " + kFix);
  Run b = cli("check " + kFix);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(std::count(a.out.begin(), a.out.end(), '\n') == static_cast<long>(parse_scenario(fixture_text()).checks.size()));
  Run one = cli("--format csv check " + kFix + " --only value-Db");
  CHECK(one.code == 0);
  CHECK(one.out == "name,op,verdict\nvalue-Db,value,pass\n");
  Run table = cli("--format csv value " + kFix + " M E1 --t 2");
  CHECK(table.out == "agent,env,t,value,tail\nM,E1,2,-1/3,0\n");
  Run utable = cli("--format csv upsilon " + kFix + " Db Y1 --t 2");
  CHECK(utable.out == "agent,measure,t,value,tail\nDb,Y1,2,0,0\n");
}

TEST_CASE("cli exit codes") {
  CHECK(cli("check /nonexistent/scenario.json").code == 2);
  CHECK(cli("value " + kFix + " Nobody E1 --t 2").code == 2);
  CHECK(cli("check " + kFix + " --only missing").code == 2);
  CHECK(cli("frobnicate").code == 2);
  CHECK(cli("check " + write_temp("broken.json", "{\"version\": ")).code == 2);

  ojson j = minimal();
  j["agents"]["Da"] = ojson::parse(R"js({"type": "constant", "action": "a"})js");
  j["checks"] = ojson::parse(R"([{"name": "m", "op": "mixture_laws", "weights": ["1/3", "2/3"],
    "agents": ["Db", "Da"], "env": "E1", "t": 3, "inject_defect": "nonuniform_fallback"}])");
  Run r = cli("check " + write_temp("defect.json", j.dump()));
  CHECK(r.code == 1);
  CHECK(r.out.find("\"verdict\":\"fail\"") != std::string::npos);
}

TEST_CASE("cli universal and probes") {
  Run u = cli("universal " + kFix + " Y1 --out MU");
  CHECK(u.code == 0);
  std::string path = write_temp("with_universal.json", u.out);
  Run v = cli("value " + path + " Db MU --t 2");
  CHECK(v.code == 0);
  CHECK(v.out.find("\"value\":\"0\"") != std::string::npos);

  Run e = cli("probe-extrema " + kFix + " Lop T --site \"(o,0)\" --eps 1/2 --t 2");
  CHECK(e.code == 0);
  CHECK(e.out.find("\"eps_prime\":\"1/20\"") != std::string::npos);
  Run det = cli("probe-extrema " + kFix + " Lop Da --site \"(o,0)\" --eps 1/4 --t 2");
  CHECK(det.code == 1);
  CHECK(det.out.find("\"code\":\"SiteDeterministic\"") != std::string::npos);

  Run s = cli("probe-separability " + kFix + " E1 --inside Db --outside Da --t 2");
  CHECK(s.code == 0);
  CHECK(s.out.find("\"verdict\":\"pass\"") != std::string::npos);
}
