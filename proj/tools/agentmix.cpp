#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "agentmix/runner.hpp"

namespace fs = std::filesystem;
using namespace agentmix;

namespace {

// A scenario argument is a path, a path missing its ".json", or the name of
// a bundled fixture.
fs::path locate_scenario(const std::string& arg) {
  std::vector<fs::path> candidates{arg, arg + ".json", fs::path(AGENTMIX_FIXTURE_DIR) / (arg + ".json")};
  if (const char* dir = std::getenv("AGENTMIX_FIXTURE_DIR"))
    candidates.push_back(fs::path(dir) / (arg + ".json"));
  for (const auto& p : candidates) {
    std::error_code ec;
    if (fs::is_regular_file(p, ec)) return p;
  }
  throw Error(ErrorCode::UnknownName, "cannot read scenario '" + arg + "'");
}

Scenario load(const std::string& arg) {
  fs::path p = locate_scenario(arg);
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::UnknownName, "cannot read scenario '" + p.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str());
}

// A command-line reference: a declared name, or an inline JSON descriptor.
ojson reference(const std::string& text) {
  if (!text.empty() && text.front() == '{') {
    try {
      return ojson::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::ParseError, "inline descriptor: " + std::string(e.what()));
    }
  }
  return ojson(text);
}

ojson reference_list(const std::string& text) {
  ojson list = ojson::array();
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) list.push_back(item);
  return list;
}

struct Globals {
  std::string format = "json";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_nodes;

  RunOptions options(const Scenario& s) const {
    RunOptions o;
    if (max_nodes) o.eval.max_nodes = *max_nodes;
    o.seed = seed;
    std::string f = format;
    if (f.empty() && s.output.contains("format")) f = s.output.at("format").get<std::string>();
    o.format = f == "csv" ? OutputFormat::Csv : OutputFormat::Json;
    return o;
  }
};

void print_value(const Globals& g, const Scenario& s, const std::string& agent, const std::string& target,
                 const char* target_column, const ValueResult& v) {
  if (g.options(s).format == OutputFormat::Csv) {
    std::cout << "agent," << target_column << ",t,value,tail\n"
              << agent << ',' << target << ',' << v.t << ',' << v.value.str() << ',' << v.tail.str() << '\n';
  } else {
    std::cout << to_json(v).dump() << '\n';
  }
}

// Runs a synthetic check through the same path as scenario checks.
int run_adhoc(const Globals& g, const Scenario& s, ojson check) {
  Scenario copy = s;
  copy.checks = {check};
  // Validation of the synthetic check uses the scenario's own rules.
  Scenario validated = scenario_from_json(serialize_scenario(copy));
  return run_scenario(validated, g.options(validated), std::cout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact valuation and law checking for mixtures of agents and environments"};
  app.require_subcommand(1);
  Globals g;
  g.format.clear();
  std::string format;
  std::uint64_t seed = 0;
  std::size_t max_nodes = 0;
  auto* fmt_opt = app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  auto* seed_opt = app.add_option("--seed", seed, "Seed overriding the scenario seed");
  auto* nodes_opt = app.add_option("--max-nodes", max_nodes, "Node budget per valuation");

  std::string scenario, agent, target, only, out_name, site, eps, inside, outside;
  std::size_t t = 0;

  auto* value = app.add_subcommand("value", "Exact V^pi_{mu,t} with its tail bound");
  value->add_option("scenario", scenario)->required();
  value->add_option("agent", agent)->required();
  value->add_option("env", target)->required();
  value->add_option("--t", t, "Interaction steps")->required();

  auto* ups = app.add_subcommand("upsilon", "Weighted measure value at depth t");
  ups->add_option("scenario", scenario)->required();
  ups->add_option("agent", agent)->required();
  ups->add_option("measure", target)->required();
  ups->add_option("--t", t, "Interaction steps")->required();

  auto* check = app.add_subcommand("check", "Run the scenario's checks in declaration order");
  check->add_option("scenario", scenario)->required();
  check->add_option("--only", only, "Run a single named check");

  auto* uni = app.add_subcommand("universal", "Add the universal environment of a measure to the scenario");
  uni->add_option("scenario", scenario)->required();
  uni->add_option("measure", target)->required();
  uni->add_option("--out", out_name, "Name of the new environment")->required();

  auto* pex = app.add_subcommand("probe-extrema", "Perturb an agent at one history and compare measure values");
  pex->add_option("scenario", scenario)->required();
  pex->add_option("measure", target)->required();
  pex->add_option("agent", agent)->required();
  pex->add_option("--site", site, "History ending in a percept")->required();
  pex->add_option("--eps", eps, "Perturbation radius")->required();
  pex->add_option("--t", t, "Depth")->required();

  auto* psep = app.add_subcommand("probe-separability", "Compare value ranges of two agent samples");
  psep->add_option("scenario", scenario)->required();
  psep->add_option("env", target)->required();
  psep->add_option("--inside", inside, "Comma-separated agent names")->required();
  psep->add_option("--outside", outside, "Comma-separated agent names")->required();
  psep->add_option("--t", t, "Depth")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }
  if (*fmt_opt) g.format = format;
  if (*seed_opt) g.seed = seed;
  if (*nodes_opt) g.max_nodes = max_nodes;

  try {
    Scenario s = load(scenario);
    RunOptions opts = g.options(s);
    Workspace ws(s);
    if (*value) {
      AgentPtr a = ws.agent(reference(agent), "/agent");
      EnvPtr e = ws.env(reference(target), "/env");
      print_value(g, s, agent, target, "env", value_interval(*a, *e, t, opts.eval));
      return kExitPass;
    }
    if (*ups) {
      AgentPtr a = ws.agent(reference(agent), "/agent");
      WeightedMeasure m = ws.measure(reference(target), "/measure");
      print_value(g, s, agent, target, "measure", upsilon(m, *a, t, opts.eval));
      return kExitPass;
    }
    if (*check) {
      std::optional<std::string> one;
      if (!only.empty()) one = only;
      return run_scenario(s, opts, std::cout, one);
    }
    if (*uni) {
      if (s.find_environment(out_name)) throw Error(ErrorCode::ValidationError, "environment '" + out_name + "' exists");
      ojson desc{{"type", "universal"}, {"measure", reference(target)}};
      ws.env(desc, "/environments/" + out_name);
      Scenario grown = s;
      grown.environments.push_back({out_name, desc});
      std::cout << serialize_scenario(grown).dump(2) << '\n';
      return kExitPass;
    }
    if (*pex) {
      ojson c{{"name", "probe-extrema"}, {"op", "extrema"}, {"measure", reference(target)}, {"agent", reference(agent)},
              {"site", site}, {"eps", eps}, {"t", t}};
      return run_adhoc(g, s, c);
    }
    if (*psep) {
      ojson c{{"name", "probe-separability"}, {"op", "separability"}, {"env", reference(target)},
              {"inside", reference_list(inside)}, {"outside", reference_list(outside)}, {"t", t}};
      return run_adhoc(g, s, c);
    }
  } catch (const Error& e) {
    std::cerr << "agentmix: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "agentmix: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}
