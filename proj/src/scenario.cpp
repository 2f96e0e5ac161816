#include "agentmix/scenario.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "agentmix/fault.hpp"

namespace agentmix {

// --- small helpers

std::string json_path(const std::string& base, std::string_view key) {
  std::string k;
  for (char c : key) {
    if (c == '~') k += "~0";
    else if (c == '/') k += "~1";
    else k += c;
  }
  return base + "/" + k;
}

std::string json_path(const std::string& base, std::size_t index) { return base + "/" + std::to_string(index); }

json to_plain(const ojson& j) { return json::parse(j.dump()); }
ojson to_ordered(const json& j) { return ojson::parse(j.dump()); }

namespace {

std::string where(const std::string& path) { return path.empty() ? "/" : path; }

[[noreturn]] void raise(ErrorCode code, const std::string& path, const std::string& msg) {
  throw Error(code, "at " + where(path) + ": " + msg);
}

// Library errors raised while building an object become validation errors
// located at `path`; errors already carrying a location pass through.
template <class F>
auto located(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    switch (e.code()) {
      case ErrorCode::ParseError:
      case ErrorCode::SchemaError:
      case ErrorCode::ValidationError:
      case ErrorCode::UnknownName:
        throw;
      case ErrorCode::UnknownFamily:
        raise(ErrorCode::SchemaError, path, e.what());
      default:
        raise(ErrorCode::ValidationError, path, e.what());
    }
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::ValidationError, path, e.what());
  }
}

const ojson& member(const ojson& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) raise(ErrorCode::SchemaError, path, std::string("missing field '") + key + "'");
  return obj.at(key);
}

void allow_only(const ojson& obj, const std::set<std::string>& allowed, const std::string& path) {
  for (const auto& [k, v] : obj.items())
    if (!allowed.count(k)) raise(ErrorCode::SchemaError, json_path(path, k), "unknown field '" + k + "'");
}

void require_all(const ojson& obj, const std::vector<std::string>& required, const std::string& path) {
  for (const auto& k : required)
    if (!obj.contains(k)) raise(ErrorCode::SchemaError, path, "missing field '" + k + "'");
}

std::string string_field(const ojson& j, const std::string& path) {
  if (!j.is_string()) raise(ErrorCode::SchemaError, path, "expected a string");
  return j.get<std::string>();
}

std::uint64_t count_field(const ojson& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    raise(ErrorCode::SchemaError, path, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

std::vector<NamedDescriptor> named_section(const ojson& doc, const char* key) {
  std::vector<NamedDescriptor> out;
  if (!doc.contains(key)) return out;
  const ojson& sec = doc.at(key);
  const std::string path = json_path("", key);
  if (!sec.is_object()) raise(ErrorCode::SchemaError, path, "expected an object of named descriptors");
  for (const auto& [name, d] : sec.items()) {
    if (name.empty()) raise(ErrorCode::SchemaError, path, "empty name");
    out.push_back({name, d});
  }
  return out;
}

struct Family {
  std::set<std::string> allowed;
  std::vector<std::string> required;
};

const std::map<std::string, Family>& agent_families() {
  static const std::map<std::string, Family> f{
      {"uniform", {{}, {}}},
      {"constant", {{"action"}, {"action"}}},
      {"greedy", {{"threshold", "high", "low"}, {"threshold", "high", "low"}}},
      {"table", {{"entries", "default"}, {}}},
      {"random", {{"seed", "denominator"}, {"seed"}}},
      {"mix", {{"weights", "agents"}, {"weights", "agents"}}},
      {"dual", {{"agent"}, {"agent"}}},
      {"patch", {{"agent", "site", "dist"}, {"agent", "site", "dist"}}},
      {"symmetrize", {{"agent"}, {"agent"}}},
  };
  return f;
}

const std::map<std::string, Family>& env_families() {
  static const std::map<std::string, Family> f{
      {"silent", {{}, {}}},
      {"table", {{"horizon", "entries", "default", "padding"}, {"horizon"}}},
      {"random", {{"horizon", "seed", "denominator"}, {"horizon", "seed"}}},
      {"terminating", {{"gamma", "halt", "initial", "after"}, {"gamma", "halt", "initial", "after"}}},
      {"envmix", {{"weights", "envs", "silent_tail"}, {"weights", "envs"}}},
      {"envdual", {{"env"}, {"env"}}},
      {"universal", {{"measure"}, {"measure"}}},
  };
  return f;
}

const std::string& typed(const ojson& desc, const std::map<std::string, Family>& families, const std::string& path,
                         const char* what) {
  if (!desc.is_object()) raise(ErrorCode::SchemaError, path, std::string(what) + " must be a name or an object");
  const ojson& t = member(desc, "type", path);
  if (!t.is_string()) raise(ErrorCode::SchemaError, json_path(path, "type"), "expected a string");
  auto it = families.find(t.get_ref<const std::string&>());
  if (it == families.end())
    raise(ErrorCode::SchemaError, json_path(path, "type"), std::string("unknown ") + what + " type '" +
                                                               t.get<std::string>() + "'");
  std::set<std::string> allowed = it->second.allowed;
  allowed.insert("type");
  allow_only(desc, allowed, path);
  require_all(desc, it->second.required, path);
  return it->first;
}

json params_of(const ojson& desc) {
  json p = to_plain(desc);
  p.erase("type");
  return p;
}

}  // namespace

Rational rational_field(const ojson& j, const std::string& path) {
  return located(path, [&] { return rational_from_json(to_plain(j)); });
}

std::vector<Rational> rational_list(const ojson& j, const std::string& path) {
  if (!j.is_array()) raise(ErrorCode::SchemaError, path, "expected a list of rationals");
  std::vector<Rational> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(rational_field(j[i], json_path(path, i)));
  return out;
}

// --- scenario lookups

namespace {
const NamedDescriptor* find_in(const std::vector<NamedDescriptor>& v, std::string_view name) {
  for (const auto& d : v)
    if (d.name == name) return &d;
  return nullptr;
}
}  // namespace

const NamedDescriptor* Scenario::find_agent(std::string_view name) const { return find_in(agents, name); }
const NamedDescriptor* Scenario::find_environment(std::string_view name) const {
  return find_in(environments, name);
}
const NamedDescriptor* Scenario::find_measure(std::string_view name) const { return find_in(measures, name); }

const ojson* Scenario::find_check(std::string_view name) const {
  for (const auto& c : checks)
    if (c.at("name").get_ref<const std::string&>() == name) return &c;
  return nullptr;
}

bool Scenario::operator==(const Scenario& o) const {
  return version == o.version && actions == o.actions && observations == o.observations && rewards == o.rewards &&
         seed == o.seed && agents == o.agents && environments == o.environments && measures == o.measures &&
         checks == o.checks && output == o.output;
}

// --- workspace

AgentVector Workspace::agents(const ojson& list, const std::string& path) const {
  if (!list.is_array() || list.empty()) raise(ErrorCode::SchemaError, path, "expected a nonempty list of agents");
  AgentVector out;
  for (std::size_t i = 0; i < list.size(); ++i) out.push_back(agent(list[i], json_path(path, i)));
  return out;
}

std::vector<EnvPtr> Workspace::envs(const ojson& list, const std::string& path) const {
  if (!list.is_array() || list.empty())
    raise(ErrorCode::SchemaError, path, "expected a nonempty list of environments");
  std::vector<EnvPtr> out;
  for (std::size_t i = 0; i < list.size(); ++i) out.push_back(env(list[i], json_path(path, i)));
  return out;
}

AgentPtr Workspace::agent(const ojson& desc, const std::string& path) const {
  if (desc.is_string()) {
    const std::string name = desc.get<std::string>();
    const NamedDescriptor* nd = s_.find_agent(name);
    if (!nd) raise(ErrorCode::UnknownName, path, "unknown agent '" + name + "'");
    const std::string key = "agent:" + name;
    if (std::find(resolving_.begin(), resolving_.end(), key) != resolving_.end())
      raise(ErrorCode::ValidationError, path, "agent '" + name + "' refers to itself");
    resolving_.push_back(key);
    AgentPtr a = build_agent(nd->descriptor, json_path("/agents", name));
    resolving_.pop_back();
    return a;
  }
  return build_agent(desc, path);
}

AgentPtr Workspace::build_agent(const ojson& desc, const std::string& path) const {
  if (desc.is_string()) return agent(desc, path);
  const std::string& type = typed(desc, agent_families(), path, "agent");
  const SpacesPtr& sp = s_.spaces;
  if (type == "mix") {
    std::vector<Rational> ws = rational_list(desc.at("weights"), json_path(path, "weights"));
    WeightVector w = located(json_path(path, "weights"), [&] { return WeightVector::make(ws); });
    AgentVector parts = agents(desc.at("agents"), json_path(path, "agents"));
    return located(path, [&] { return mix_agents(w, parts); });
  }
  if (type == "dual" || type == "symmetrize") {
    AgentPtr inner = agent(desc.at("agent"), json_path(path, "agent"));
    return located(path, [&] { return type == "dual" ? dual_agent(inner) : symmetrize(inner); });
  }
  if (type == "patch") {
    AgentPtr inner = agent(desc.at("agent"), json_path(path, "agent"));
    History site = located(json_path(path, "site"), [&] {
      return parse_history(*sp, string_field(desc.at("site"), json_path(path, "site")));
    });
    Dist m = located(json_path(path, "dist"), [&] { return action_dist_from_json(*sp, to_plain(desc.at("dist"))); });
    return located(path, [&] { return patch_agent(inner, PatchSpec{site, m}); });
  }
  return located(path, [&] { return builtin_agent(sp, type, params_of(desc)); });
}

EnvPtr Workspace::env(const ojson& desc, const std::string& path) const {
  if (desc.is_string()) {
    const std::string name = desc.get<std::string>();
    const NamedDescriptor* nd = s_.find_environment(name);
    if (!nd) raise(ErrorCode::UnknownName, path, "unknown environment '" + name + "'");
    const std::string key = "env:" + name;
    if (std::find(resolving_.begin(), resolving_.end(), key) != resolving_.end())
      raise(ErrorCode::ValidationError, path, "environment '" + name + "' refers to itself");
    resolving_.push_back(key);
    EnvPtr e = build_env(nd->descriptor, json_path("/environments", name));
    resolving_.pop_back();
    return e;
  }
  return build_env(desc, path);
}

EnvPtr Workspace::build_env(const ojson& desc, const std::string& path) const {
  const std::string& type = typed(desc, env_families(), path, "environment");
  const SpacesPtr& sp = s_.spaces;
  if (type == "envmix") {
    std::vector<Rational> ws = rational_list(desc.at("weights"), json_path(path, "weights"));
    Rational tail;
    if (desc.contains("silent_tail")) tail = rational_field(desc.at("silent_tail"), json_path(path, "silent_tail"));
    EnvWeightVector w = located(json_path(path, "weights"), [&] { return EnvWeightVector::make(ws, tail); });
    std::vector<EnvPtr> parts = envs(desc.at("envs"), json_path(path, "envs"));
    return located(path, [&] { return mix_envs(w, parts); });
  }
  if (type == "envdual") {
    EnvPtr inner = env(desc.at("env"), json_path(path, "env"));
    return located(path, [&] { return env_dual(inner); });
  }
  if (type == "universal") {
    WeightedMeasure m = measure(desc.at("measure"), json_path(path, "measure"));
    return located(path, [&] { return universal_env(m, to_plain(desc)); });
  }
  return located(path, [&] { return builtin_env(sp, type, params_of(desc)); });
}

WeightedMeasure Workspace::measure(const ojson& desc, const std::string& path) const {
  if (desc.is_string()) {
    const std::string name = desc.get<std::string>();
    const NamedDescriptor* nd = s_.find_measure(name);
    if (!nd) raise(ErrorCode::UnknownName, path, "unknown measure '" + name + "'");
    const std::string key = "measure:" + name;
    if (std::find(resolving_.begin(), resolving_.end(), key) != resolving_.end())
      raise(ErrorCode::ValidationError, path, "measure '" + name + "' refers to itself");
    resolving_.push_back(key);
    WeightedMeasure m = measure(nd->descriptor, json_path("/measures", name));
    resolving_.pop_back();
    return m;
  }
  if (!desc.is_object()) raise(ErrorCode::SchemaError, path, "measure must be a name or an object");
  allow_only(desc, {"components"}, path);
  const ojson& comps = member(desc, "components", path);
  const std::string cpath = json_path(path, "components");
  if (!comps.is_array() || comps.empty()) raise(ErrorCode::SchemaError, cpath, "expected a nonempty list");
  std::vector<MeasureComponent> parts;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const std::string p = json_path(cpath, i);
    if (!comps[i].is_object()) raise(ErrorCode::SchemaError, p, "expected {\"env\": ..., \"weight\": ...}");
    allow_only(comps[i], {"env", "weight"}, p);
    require_all(comps[i], {"env", "weight"}, p);
    parts.push_back({env(comps[i].at("env"), json_path(p, "env")),
                     rational_field(comps[i].at("weight"), json_path(p, "weight"))});
  }
  WeightedMeasure m = located(path, [&] { return WeightedMeasure::make(std::move(parts)); });
  if (!m.normalized()) {
    Rational sum;
    for (const auto& c : m.components()) sum += c.weight;
    raise(ErrorCode::ValidationError, path, "measure weights sum to " + sum.str() + ", not 1");
  }
  return m;
}

// --- check schema

namespace {

enum class Kind { Agent, AgentList, Env, EnvList, Measure, Weights, Rational, History, ActionDist, Count, Bool,
                  ErrorName, Membership };

struct Field {
  Kind kind;
  bool required;
};

using OpSchema = std::map<std::string, Field>;

const std::map<std::string, OpSchema>& op_schemas() {
  using K = Kind;
  static const std::map<std::string, OpSchema> ops{
      {"value", {{"agent", {K::Agent, true}}, {"env", {K::Env, true}}, {"equals", {K::Rational, false}}}},
      {"upsilon", {{"agent", {K::Agent, true}}, {"measure", {K::Measure, true}}, {"equals", {K::Rational, false}}}},
      {"mixture_laws",
       {{"weights", {K::Weights, true}}, {"agents", {K::AgentList, true}}, {"env", {K::Env, true}}}},
      {"envmix_laws",
       {{"weights", {K::Weights, true}},
        {"envs", {K::EnvList, true}},
        {"silent_tail", {K::Rational, false}},
        {"agent", {K::Agent, true}}}},
      {"factorization", {{"agent", {K::Agent, true}}, {"env", {K::Env, true}}}},
      {"duality", {{"agent", {K::Agent, true}}, {"copies", {K::Weights, false}}}},
      {"env_duality", {{"agent", {K::Agent, true}}, {"env", {K::Env, true}}}},
      {"patch_lemmas",
       {{"agent", {K::Agent, true}}, {"site", {K::History, true}}, {"dist", {K::ActionDist, true}}}},
      {"tail_bound", {{"agent", {K::Agent, true}}, {"env", {K::Env, true}}}},
      {"universal", {{"measure", {K::Measure, true}}, {"agents", {K::AgentList, true}}}},
      {"symmetry", {{"measure", {K::Measure, true}}, {"battery", {K::AgentList, true}}}},
      {"separability",
       {{"env", {K::Env, true}}, {"inside", {K::AgentList, true}}, {"outside", {K::AgentList, true}}}},
      {"closure",
       {{"members", {K::AgentList, true}},
        {"membership", {K::Membership, true}},
        {"trials", {K::Count, false}},
        {"denominator", {K::Count, false}}}},
      {"extrema",
       {{"measure", {K::Measure, true}},
        {"agent", {K::Agent, true}},
        {"site", {K::History, true}},
        {"eps", {K::Rational, true}},
        {"expect_error", {K::ErrorName, false}}}},
      {"certify", {{"env", {K::Env, true}}}},
      {"equivalent", {{"left", {K::Agent, true}}, {"right", {K::Agent, true}}, {"holds", {K::Bool, false}}}},
      {"self_dual", {{"agent", {K::Agent, true}}, {"holds", {K::Bool, false}}}},
      {"distance", {{"left", {K::Agent, true}}, {"right", {K::Agent, true}}, {"equals", {K::Rational, false}}}},
  };
  return ops;
}

const std::set<std::string> kCommonCheckFields{"name", "op", "t", "expect", "inject_defect", "seed", "description"};

bool needs_t(const std::string& op) { return op != "certify" && op != "closure"; }

const std::set<std::string> kErrorNames{"SiteDeterministic", "SiteUnreachable", "NotFiniteHorizon",
                                        "NoTailBound",       "DepthOverflow",   "NotStronglyWellBehaved"};

void validate_field(const Workspace& ws, const std::string& op, const ojson& check, const std::string& key,
                    Kind kind, const std::string& path) {
  const ojson& v = check.at(key);
  switch (kind) {
    case Kind::Agent: ws.agent(v, path); break;
    case Kind::AgentList: ws.agents(v, path); break;
    case Kind::Env: ws.env(v, path); break;
    case Kind::EnvList: ws.envs(v, path); break;
    case Kind::Measure: ws.measure(v, path); break;
    case Kind::Weights: {
      std::vector<Rational> w = rational_list(v, path);
      if (op == "envmix_laws") {
        Rational tail;
        if (check.contains("silent_tail")) tail = rational_field(check.at("silent_tail"), json_path(path, "silent_tail"));
        located(path, [&] { return EnvWeightVector::make(w, tail); });
      } else {
        located(path, [&] { return WeightVector::make(w); });
      }
      break;
    }
    case Kind::Rational: rational_field(v, path); break;
    case Kind::History:
      located(path, [&] { return parse_history(ws.spaces(), string_field(v, path)); });
      break;
    case Kind::ActionDist: located(path, [&] { return action_dist_from_json(ws.spaces(), to_plain(v)); }); break;
    case Kind::Count: count_field(v, path); break;
    case Kind::Bool:
      if (!v.is_boolean()) raise(ErrorCode::SchemaError, path, "expected true or false");
      break;
    case Kind::ErrorName:
      if (!kErrorNames.count(string_field(v, path)))
        raise(ErrorCode::SchemaError, path, "unknown error name '" + v.get<std::string>() + "'");
      break;
    case Kind::Membership: {
      if (!v.is_object()) raise(ErrorCode::SchemaError, path, "expected a membership object");
      allow_only(v, {"env", "t", "op", "threshold"}, path);
      require_all(v, {"env", "t", "op", "threshold"}, path);
      ws.env(v.at("env"), json_path(path, "env"));
      count_field(v.at("t"), json_path(path, "t"));
      const std::string cmp = string_field(v.at("op"), json_path(path, "op"));
      if (cmp != ">=" && cmp != ">" && cmp != "<=" && cmp != "<")
        raise(ErrorCode::SchemaError, json_path(path, "op"), "comparison must be one of >=, >, <=, <");
      rational_field(v.at("threshold"), json_path(path, "threshold"));
      break;
    }
  }
}

void validate_check(const Workspace& ws, const ojson& check, const std::string& path) {
  if (!check.is_object()) raise(ErrorCode::SchemaError, path, "a check must be an object");
  const std::string name = string_field(member(check, "name", path), json_path(path, "name"));
  const std::string op = string_field(member(check, "op", path), json_path(path, "op"));
  auto it = op_schemas().find(op);
  if (it == op_schemas().end()) raise(ErrorCode::SchemaError, json_path(path, "op"), "unknown check op '" + op + "'");
  std::set<std::string> allowed = kCommonCheckFields;
  for (const auto& [k, f] : it->second) allowed.insert(k);
  allow_only(check, allowed, path);
  if (needs_t(op)) count_field(member(check, "t", path), json_path(path, "t"));
  else if (check.contains("t")) count_field(check.at("t"), json_path(path, "t"));
  if (check.contains("seed")) count_field(check.at("seed"), json_path(path, "seed"));
  if (check.contains("description")) string_field(check.at("description"), json_path(path, "description"));
  if (check.contains("expect")) {
    const std::string e = string_field(check.at("expect"), json_path(path, "expect"));
    if (e != "pass" && e != "fail") raise(ErrorCode::SchemaError, json_path(path, "expect"), "expected pass or fail");
  }
  fault::Defect defect = fault::Defect::None;
  if (check.contains("inject_defect")) {
    const std::string d = string_field(check.at("inject_defect"), json_path(path, "inject_defect"));
    auto parsed = fault::parse_defect(d);
    if (!parsed) raise(ErrorCode::SchemaError, json_path(path, "inject_defect"), "unknown defect '" + d + "'");
    defect = *parsed;
  }
  fault::ScopedDefect scope(defect);
  for (const auto& [key, field] : it->second) {
    if (!check.contains(key)) {
      if (field.required) raise(ErrorCode::SchemaError, path, "missing field '" + key + "'");
      continue;
    }
    validate_field(ws, op, check, key, field.kind, json_path(path, key));
  }
}

}  // namespace

// --- parse / serialize

Scenario scenario_from_json(const ojson& doc) {
  if (!doc.is_object()) raise(ErrorCode::SchemaError, "", "a scenario must be a JSON object");
  allow_only(doc, {"version", "description", "spaces", "seed", "agents", "environments", "measures", "checks", "output"},
             "");
  Scenario s;
  s.version = string_field(member(doc, "version", ""), "/version");
  if (s.version != kScenarioVersion)
    raise(ErrorCode::SchemaError, "/version",
          "unsupported version '" + s.version + "' (expected '" + kScenarioVersion + "')");

  const ojson& sp = member(doc, "spaces", "");
  if (!sp.is_object()) raise(ErrorCode::SchemaError, "/spaces", "expected an object");
  allow_only(sp, {"actions", "observations", "rewards"}, "/spaces");
  require_all(sp, {"actions", "observations", "rewards"}, "/spaces");
  for (const char* k : {"actions", "observations"}) {
    const ojson& list = sp.at(k);
    const std::string p = json_path("/spaces", k);
    if (!list.is_array()) raise(ErrorCode::SchemaError, p, "expected a list of names");
    auto& dst = std::string(k) == "actions" ? s.actions : s.observations;
    for (std::size_t i = 0; i < list.size(); ++i) dst.push_back(string_field(list[i], json_path(p, i)));
  }
  s.rewards = rational_list(sp.at("rewards"), "/spaces/rewards");
  s.spaces = located("/spaces", [&] { return Spaces::make(s.actions, s.observations, s.rewards); });

  if (doc.contains("seed")) s.seed = count_field(doc.at("seed"), "/seed");
  s.agents = named_section(doc, "agents");
  s.environments = named_section(doc, "environments");
  s.measures = named_section(doc, "measures");
  if (doc.contains("output")) {
    s.output = doc.at("output");
    if (!s.output.is_object()) raise(ErrorCode::SchemaError, "/output", "expected an object");
    allow_only(s.output, {"format"}, "/output");
    if (s.output.contains("format")) {
      const std::string f = string_field(s.output.at("format"), "/output/format");
      if (f != "json" && f != "csv") raise(ErrorCode::SchemaError, "/output/format", "expected json or csv");
    }
  }
  if (doc.contains("checks")) {
    const ojson& cs = doc.at("checks");
    if (!cs.is_array()) raise(ErrorCode::SchemaError, "/checks", "expected a list of checks");
    for (const auto& c : cs) s.checks.push_back(c);
  }

  Workspace ws(s);
  for (const auto& a : s.agents) ws.agent(ojson(a.name), json_path("/agents", a.name));
  for (const auto& e : s.environments) ws.env(ojson(e.name), json_path("/environments", e.name));
  for (const auto& m : s.measures) ws.measure(ojson(m.name), json_path("/measures", m.name));
  std::set<std::string> names;
  for (std::size_t i = 0; i < s.checks.size(); ++i) {
    const std::string p = json_path("/checks", i);
    validate_check(ws, s.checks[i], p);
    if (!names.insert(s.checks[i].at("name").get<std::string>()).second)
      raise(ErrorCode::ValidationError, json_path(p, "name"), "duplicate check name");
  }
  return s;
}

Scenario parse_scenario(std::string_view text) {
  ojson doc;
  try {
    doc = ojson::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    // Convert the byte offset to a 1-based line and column.
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    auto pos = msg.find("syntax error");
    if (pos != std::string::npos) msg = msg.substr(pos);
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg);
  }
  return scenario_from_json(doc);
}

ojson serialize_scenario(const Scenario& s) {
  ojson doc;
  doc["version"] = s.version;
  ojson sp;
  sp["actions"] = s.actions;
  sp["observations"] = s.observations;
  ojson rs = ojson::array();
  for (const auto& r : s.rewards) rs.push_back(r.str());
  sp["rewards"] = rs;
  doc["spaces"] = sp;
  if (s.seed) doc["seed"] = *s.seed;
  auto section = [](const std::vector<NamedDescriptor>& v) {
    ojson o = ojson::object();
    for (const auto& d : v) o[d.name] = d.descriptor;
    return o;
  };
  doc["agents"] = section(s.agents);
  doc["environments"] = section(s.environments);
  doc["measures"] = section(s.measures);
  doc["checks"] = s.checks;
  if (!s.output.empty()) doc["output"] = s.output;
  return doc;
}

}  // namespace agentmix
