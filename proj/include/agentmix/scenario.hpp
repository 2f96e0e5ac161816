#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agentmix/analysis.hpp"
#include "agentmix/envmix.hpp"
#include "agentmix/json_io.hpp"
#include "agentmix/mixtures.hpp"
#include "agentmix/valuation.hpp"

namespace agentmix {

inline constexpr const char* kScenarioVersion = "agentmix/1";

struct NamedDescriptor {
  std::string name;
  ojson descriptor;
  bool operator==(const NamedDescriptor&) const = default;
};

/// A parsed and validated scenario file. Declaration order of every
/// section is preserved; checks run and report in that order.
struct Scenario {
  std::string version;
  std::vector<std::string> actions;
  std::vector<std::string> observations;
  std::vector<Rational> rewards;
  SpacesPtr spaces;
  std::optional<std::uint64_t> seed;
  std::vector<NamedDescriptor> agents;
  std::vector<NamedDescriptor> environments;
  std::vector<NamedDescriptor> measures;
  std::vector<ojson> checks;
  ojson output = ojson::object();

  const NamedDescriptor* find_agent(std::string_view name) const;
  const NamedDescriptor* find_environment(std::string_view name) const;
  const NamedDescriptor* find_measure(std::string_view name) const;
  const ojson* find_check(std::string_view name) const;

  bool operator==(const Scenario& o) const;
};

/// Throws ParseError (with line and column), SchemaError or ValidationError
/// (with the JSON path of the offending value) or UnknownName.
Scenario parse_scenario(std::string_view text);
Scenario scenario_from_json(const ojson& doc);

/// Canonical form; parse_scenario(serialize_scenario(s).dump()) == s.
ojson serialize_scenario(const Scenario& s);

/// Builds fresh objects from descriptors. Every call constructs new
/// instances, so a fault::ScopedDefect active at the call applies to them.
class Workspace {
 public:
  explicit Workspace(const Scenario& s) : s_(s) {}

  AgentPtr agent(const ojson& desc, const std::string& path) const;
  EnvPtr env(const ojson& desc, const std::string& path) const;
  /// A measure name or an inline {"components": [...]} object.
  WeightedMeasure measure(const ojson& desc, const std::string& path) const;
  AgentVector agents(const ojson& list, const std::string& path) const;
  std::vector<EnvPtr> envs(const ojson& list, const std::string& path) const;

  const Spaces& spaces() const { return *s_.spaces; }

 private:
  AgentPtr build_agent(const ojson& desc, const std::string& path) const;
  EnvPtr build_env(const ojson& desc, const std::string& path) const;

  const Scenario& s_;
  mutable std::vector<std::string> resolving_;
};

/// Helpers shared with the runner: JSON-pointer path building and exact
/// rational fields.
std::string json_path(const std::string& base, std::string_view key);
std::string json_path(const std::string& base, std::size_t index);
Rational rational_field(const ojson& j, const std::string& path);
std::vector<Rational> rational_list(const ojson& j, const std::string& path);

/// Converts between the ordered scenario form and the plain form used by
/// the built-in family factories.
json to_plain(const ojson& j);
ojson to_ordered(const json& j);

}  // namespace agentmix
