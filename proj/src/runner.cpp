#include "agentmix/runner.hpp"

#include <ostream>

#include "agentmix/fault.hpp"

namespace agentmix {

namespace {

std::size_t count_of(const ojson& check, const char* key, std::size_t fallback) {
  return check.contains(key) ? check.at(key).get<std::size_t>() : fallback;
}

std::string desc(const Agent& a) { return a.descriptor().dump(); }

CheckReport equality_report(const char* name, std::size_t t, const Rational& value, const ojson& check,
                            const std::string& subject) {
  CheckReport r;
  r.check_name = name;
  r.depth = t;
  if (check.contains("equals")) {
    Rational expected = rational_field(check.at("equals"), "/equals");
    if (value != expected) r.fail({"value equals the declared expectation", "", subject, value, expected});
  }
  return r;
}

CheckReport truncated_report(const char* name, std::size_t t, const TruncatedVerdict& v, bool expected,
                             const Spaces& s) {
  CheckReport r;
  r.check_name = name;
  r.depth = t;
  r.details["holds"] = v.holds;
  r.notes.push_back("relation evaluated up to depth " + std::to_string(t));
  if (!v.holds) {
    r.details["witness"] = v.witness ? format_history(s, *v.witness) : "";
    r.details["reason"] = v.reason;
  }
  if (v.holds != expected) {
    Counterexample c{expected ? "relation holds up to depth T" : "relation fails somewhere up to depth T",
                     v.witness ? format_history(s, *v.witness) : "", "", v.lhs.value_or(Rational(0)),
                     v.rhs.value_or(Rational(0))};
    if (!v.holds) c.what += " (" + v.reason + ")";
    r.fail(std::move(c));
  }
  return r;
}

CheckReport dispatch(const Scenario& s, const Workspace& ws, const ojson& c, const std::string& op,
                     std::size_t t, std::uint64_t seed, const EvalOptions& eval) {
  const Spaces& sp = *s.spaces;
  if (op == "value") {
    AgentPtr a = ws.agent(c.at("agent"), "/agent");
    EnvPtr e = ws.env(c.at("env"), "/env");
    ValueResult v = value_interval(*a, *e, t, eval);
    CheckReport r = equality_report("value", t, v.value, c, desc(*a));
    r.details = to_json(v);
    return r;
  }
  if (op == "upsilon") {
    AgentPtr a = ws.agent(c.at("agent"), "/agent");
    WeightedMeasure m = ws.measure(c.at("measure"), "/measure");
    ValueResult v = upsilon(m, *a, t, eval);
    CheckReport r = equality_report("upsilon", t, v.value, c, desc(*a));
    r.details = to_json(v);
    return r;
  }
  if (op == "mixture_laws") {
    WeightVector w = WeightVector::make(rational_list(c.at("weights"), "/weights"));
    return check_mixture_laws(w, ws.agents(c.at("agents"), "/agents"), *ws.env(c.at("env"), "/env"), t, eval);
  }
  if (op == "envmix_laws") {
    Rational tail;
    if (c.contains("silent_tail")) tail = rational_field(c.at("silent_tail"), "/silent_tail");
    EnvWeightVector w = EnvWeightVector::make(rational_list(c.at("weights"), "/weights"), tail);
    return check_envmix_laws(w, ws.envs(c.at("envs"), "/envs"), *ws.agent(c.at("agent"), "/agent"), t, eval);
  }
  if (op == "factorization")
    return check_factorization(*ws.agent(c.at("agent"), "/agent"), *ws.env(c.at("env"), "/env"), t, eval);
  if (op == "duality") {
    WeightVector copies = c.contains("copies") ? WeightVector::make(rational_list(c.at("copies"), "/copies"))
                                               : WeightVector::uniform(2);
    return check_duality(ws.agent(c.at("agent"), "/agent"), copies, t, eval);
  }
  if (op == "env_duality")
    return check_env_duality(ws.agent(c.at("agent"), "/agent"), ws.env(c.at("env"), "/env"), t, eval);
  if (op == "patch_lemmas") {
    PatchSpec p{parse_history(sp, c.at("site").get<std::string>()), action_dist_from_json(sp, to_plain(c.at("dist")))};
    return check_patch_lemmas(ws.agent(c.at("agent"), "/agent"), p, t, eval);
  }
  if (op == "tail_bound")
    return check_tail_bound(*ws.agent(c.at("agent"), "/agent"), *ws.env(c.at("env"), "/env"), t, eval);
  if (op == "universal")
    return check_universal_env(ws.measure(c.at("measure"), "/measure"), ws.agents(c.at("agents"), "/agents"), t,
                               eval);
  if (op == "symmetry")
    return check_symmetry(ws.measure(c.at("measure"), "/measure"), ws.agents(c.at("battery"), "/battery"), t, eval);
  if (op == "separability")
    return separability_probe(*ws.env(c.at("env"), "/env"), ws.agents(c.at("inside"), "/inside"),
                              ws.agents(c.at("outside"), "/outside"), t, eval);
  if (op == "closure") {
    const ojson& m = c.at("membership");
    Membership mem = value_threshold(ws.env(m.at("env"), "/membership/env"), m.at("t").get<std::size_t>(),
                                     m.at("op").get<std::string>(), rational_field(m.at("threshold"), "/threshold"),
                                     eval);
    return closure_probe(ws.agents(c.at("members"), "/members"), mem, count_of(c, "trials", 20), seed,
                         static_cast<std::uint32_t>(count_of(c, "denominator", 12)));
  }
  if (op == "extrema") {
    History site = parse_history(sp, c.at("site").get<std::string>());
    return extrema_probe(ws.measure(c.at("measure"), "/measure"), ws.agent(c.at("agent"), "/agent"), site,
                         rational_field(c.at("eps"), "/eps"), t, eval);
  }
  if (op == "certify") {
    EnvPtr e = ws.env(c.at("env"), "/env");
    std::optional<std::size_t> horizon;
    if (c.contains("t")) horizon = t;
    SwbCertificate cert = certify_strongly_well_behaved(*e, horizon);
    CheckReport r;
    r.check_name = "certify";
    r.depth = cert.steps_checked;
    r.details["steps_checked"] = cert.steps_checked;
    r.details["max_value"] = cert.max_value.str();
    r.details["min_value"] = cert.min_value.str();
    if (!cert.strongly_well_behaved) {
      const std::size_t step = cert.violating_step.value_or(0);
      const bool high = cert.max_value > Rational(1);
      r.fail({"-1 <= V_t <= 1 for every agent at t=" + std::to_string(step), "", "",
              high ? cert.max_value : cert.min_value, high ? Rational(1) : Rational(-1)});
    }
    return r;
  }
  if (op == "equivalent" || op == "self_dual") {
    bool expected = c.contains("holds") ? c.at("holds").get<bool>() : true;
    if (op == "equivalent")
      return truncated_report("equivalent", t,
                              equivalent_up_to(*ws.agent(c.at("left"), "/left"), *ws.agent(c.at("right"), "/right"),
                                               t, eval),
                              expected, sp);
    return truncated_report("self_dual", t, self_dual_up_to(ws.agent(c.at("agent"), "/agent"), t, eval), expected,
                            sp);
  }
  if (op == "distance") {
    AgentPtr l = ws.agent(c.at("left"), "/left"), rt = ws.agent(c.at("right"), "/right");
    DistanceResult d = distance_up_to(*l, *rt, t, eval);
    CheckReport r = equality_report("distance", t, d.distance, c, "");
    r.details["distance"] = d.distance.str();
    if (d.history) r.details["history"] = format_history(sp, *d.history);
    if (d.action) r.details["action"] = sp.action_name(*d.action);
    return r;
  }
  throw Error(ErrorCode::SchemaError, "unknown check op '" + op + "'");
}

}  // namespace

CheckOutcome run_check(const Scenario& s, const ojson& check, const RunOptions& options) {
  CheckOutcome out;
  out.name = check.at("name").get<std::string>();
  const std::string op = check.at("op").get<std::string>();
  const std::size_t t = count_of(check, "t", 0);
  const std::uint64_t seed =
      check.contains("seed") ? check.at("seed").get<std::uint64_t>() : options.seed.value_or(s.seed.value_or(0));
  fault::Defect defect = fault::Defect::None;
  if (check.contains("inject_defect"))
    defect = fault::parse_defect(check.at("inject_defect").get<std::string>()).value_or(fault::Defect::None);

  ojson report;
  report["name"] = out.name;
  report["op"] = op;
  if (defect != fault::Defect::None) report["inject_defect"] = std::string(fault::to_string(defect));

  fault::ScopedDefect scope(defect);
  Workspace ws(s);
  CheckReport r;
  std::optional<ojson> error;
  bool raised_expected = false;
  try {
    r = dispatch(s, ws, check, op, t, seed, options.eval);
  } catch (const Error& e) {
    const std::string code = to_string(e.code());
    if (check.contains("expect_error") && check.at("expect_error").get<std::string>() == code) {
      r.check_name = op;
      r.depth = t;
      r.notes.push_back("raised the expected " + code);
      raised_expected = true;
    } else {
      error = ojson{{"code", code}, {"message", e.what()}};
    }
  }

  if (error) {
    out.verdict = Verdict::Error;
    report["verdict"] = to_string(Verdict::Error);
    report["depth"] = t;
    report["error"] = *error;
    out.report = std::move(report);
    return out;
  }
  if (check.contains("expect_error") && !raised_expected) {
    r.fail({"raises " + check.at("expect_error").get<std::string>(), "", "", Rational(0), Rational(0)});
  }

  const std::string expect = check.contains("expect") ? check.at("expect").get<std::string>() : "pass";
  Verdict observed = r.verdict;
  if (expect == "fail") {
    report["expect"] = "fail";
    report["observed"] = to_string(observed);
    if (observed == Verdict::Fail) {
      r.verdict = Verdict::Pass;
    } else if (observed == Verdict::Pass) {
      r.verdict = Verdict::Fail;
      r.notes.push_back("expected the check to fail, but it passed");
    }
  }
  out.verdict = r.verdict;
  const ojson body = to_json(r);
  for (const auto& [k, v] : body.items())
    if (k != "check") report[k] = v;
  out.report = std::move(report);
  return out;
}

int run_scenario(const Scenario& s, const RunOptions& options, std::ostream& out,
                 const std::optional<std::string>& only) {
  std::vector<const ojson*> selected;
  if (only) {
    const ojson* c = s.find_check(*only);
    if (!c) throw Error(ErrorCode::UnknownName, "no check named '" + *only + "'");
    selected.push_back(c);
  } else {
    for (const auto& c : s.checks) selected.push_back(&c);
  }
  int code = kExitPass;
  if (options.format == OutputFormat::Csv) out << "name,op,verdict\n";
  for (const ojson* c : selected) {
    CheckOutcome o = run_check(s, *c, options);
    if (o.verdict != Verdict::Pass) code = kExitFail;
    if (options.format == OutputFormat::Csv) {
      out << o.name << ',' << o.report.at("op").get<std::string>() << ',' << to_string(o.verdict) << '\n';
    } else {
      out << o.report.dump() << '\n';
    }
  }
  out.flush();
  return code;
}

}  // namespace agentmix
