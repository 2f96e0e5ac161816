#include "agentmix/agents.hpp"

#include <algorithm>

#include "agentmix/random.hpp"

namespace agentmix {

// --- random helpers and JSON codecs live here: agents is the first module
// that needs them.

std::uint64_t hash_combine(std::uint64_t seed, std::string_view bytes) {
  std::uint64_t h = seed ^ 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  SplitMix64 mix(h);
  return mix.next();
}

std::vector<Rational> random_masses(SplitMix64& rng, std::size_t n, std::uint32_t denominator) {
  std::vector<std::uint64_t> cuts;
  for (std::size_t i = 0; i + 1 < n; ++i) cuts.push_back(rng.below(denominator + 1ULL));
  std::sort(cuts.begin(), cuts.end());
  std::vector<Rational> out;
  std::uint64_t prev = 0;
  for (auto c : cuts) {
    out.emplace_back(static_cast<long>(c - prev), static_cast<long>(denominator));
    prev = c;
  }
  out.emplace_back(static_cast<long>(denominator - prev), static_cast<long>(denominator));
  return out;
}

std::vector<Rational> random_positive_weights(SplitMix64& rng, std::size_t n,
                                              std::uint32_t denominator) {
  if (n == 0 || denominator < n) throw Error(ErrorCode::BadParams, "denominator too small");
  // n-1 distinct cuts in [1, denominator-1] give n positive parts.
  std::vector<std::uint64_t> cuts;
  while (cuts.size() + 1 < n) {
    std::uint64_t c = 1 + rng.below(denominator - 1ULL);
    if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<Rational> out;
  std::uint64_t prev = 0;
  for (auto c : cuts) {
    out.emplace_back(static_cast<long>(c - prev), static_cast<long>(denominator));
    prev = c;
  }
  out.emplace_back(static_cast<long>(denominator - prev), static_cast<long>(denominator));
  return out;
}

Rational rational_from_json(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_string()) return Rational::parse(j.get<std::string>());
  throw Error(ErrorCode::BadRational, "expected a rational string, got " + j.dump());
}

json rational_to_json(const Rational& r) { return r.str(); }

Dist action_dist_from_json(const Spaces& spaces, const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::BadParams, "action distribution must be an object");
  std::vector<Rational> m(spaces.num_actions());
  for (const auto& [name, value] : j.items()) m[spaces.parse_action(name).index] = rational_from_json(value);
  return Dist::make(std::move(m));
}

json action_dist_to_json(const Spaces& spaces, const Dist& d) {
  json j = json::object();
  for (std::size_t i = 0; i < d.size(); ++i)
    if (!d[i].is_zero()) j[spaces.actions()[i]] = d[i].str();
  return j;
}

Dist percept_dist_from_json(const Spaces& spaces, const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::BadParams, "percept distribution must be an object");
  std::vector<Rational> m(spaces.num_percepts());
  for (const auto& [name, value] : j.items()) m[spaces.parse_percept(name).index] = rational_from_json(value);
  return Dist::make(std::move(m));
}

json percept_dist_to_json(const Spaces& spaces, const Dist& d) {
  json j = json::object();
  for (std::size_t i = 0; i < d.size(); ++i)
    if (!d[i].is_zero()) j[spaces.percept_name(PerceptId{static_cast<std::uint16_t>(i)})] = d[i].str();
  return j;
}

// --- agents

Dist act(const Agent& agent, const History& h) {
  if (!h.ends_in_percept())
    throw Error(ErrorCode::WrongParity,
                std::string("agents act on histories ending in a percept, got ") + to_string(h.parity()));
  return agent.act_unchecked(h);
}

Rational agent_prob(const Agent& agent, const History& h) {
  Rational p(1);
  History g;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (i % 2 == 0) {
      g.push(PerceptId{h.items()[i]});
    } else {
      ActionId y{h.items()[i]};
      p *= agent.act_unchecked(g)[y.index];
      if (p.is_zero()) return p;
      g.push(y);
    }
  }
  return p;
}

Dist UniformAgent::act_unchecked(const History&) const { return Dist::uniform(spaces().num_actions()); }

json UniformAgent::descriptor() const { return {{"type", "uniform"}}; }

ConstantAgent::ConstantAgent(SpacesPtr spaces, ActionId action) : Agent(std::move(spaces)), action_(action) {
  if (action_.index >= this->spaces().num_actions())
    throw Error(ErrorCode::SymbolOutOfSpace, "constant action out of range");
}

Dist ConstantAgent::act_unchecked(const History&) const {
  return Dist::point(spaces().num_actions(), action_.index);
}

json ConstantAgent::descriptor() const {
  return {{"type", "constant"}, {"action", spaces().action_name(action_)}};
}

TableAgent::TableAgent(SpacesPtr spaces, std::vector<std::pair<History, Dist>> entries,
                       std::optional<Dist> fallback)
    : Agent(std::move(spaces)),
      entries_(std::move(entries)),
      fallback_(fallback ? *fallback : Dist::uniform(this->spaces().num_actions())),
      explicit_fallback_(fallback.has_value()) {
  const std::size_t n = this->spaces().num_actions();
  if (fallback_.size() != n) throw Error(ErrorCode::CarrierMismatch, "default dist has wrong carrier");
  for (const auto& [h, d] : entries_) {
    if (!h.ends_in_percept())
      throw Error(ErrorCode::WrongParity, "table agent keys must end in a percept");
    if (d.size() != n) throw Error(ErrorCode::CarrierMismatch, "table entry has wrong carrier");
    table_.insert_or_assign(h.key(), d);
  }
}

Dist TableAgent::act_unchecked(const History& h) const {
  auto it = table_.find(h.key());
  return it == table_.end() ? fallback_ : it->second;
}

json TableAgent::descriptor() const {
  json entries = json::object();
  for (const auto& [h, d] : entries_) entries[format_history(spaces(), h)] = action_dist_to_json(spaces(), d);
  json j = {{"type", "table"}, {"entries", entries}};
  if (explicit_fallback_) j["default"] = action_dist_to_json(spaces(), fallback_);
  return j;
}

LastRewardGreedyAgent::LastRewardGreedyAgent(SpacesPtr spaces, Rational threshold, ActionId high, ActionId low)
    : Agent(std::move(spaces)), threshold_(std::move(threshold)), high_(high), low_(low) {
  if (high_.index >= this->spaces().num_actions() || low_.index >= this->spaces().num_actions())
    throw Error(ErrorCode::SymbolOutOfSpace, "greedy action out of range");
}

Dist LastRewardGreedyAgent::act_unchecked(const History& h) const {
  const Rational& r = spaces().reward_of(h.last_percept());
  return Dist::point(spaces().num_actions(), (r >= threshold_ ? high_ : low_).index);
}

json LastRewardGreedyAgent::descriptor() const {
  return {{"type", "greedy"},
          {"threshold", threshold_.str()},
          {"high", spaces().action_name(high_)},
          {"low", spaces().action_name(low_)}};
}

RandomTableAgent::RandomTableAgent(SpacesPtr spaces, std::uint64_t seed, std::uint32_t denominator)
    : Agent(std::move(spaces)), seed_(seed), denominator_(denominator) {
  if (denominator_ == 0) throw Error(ErrorCode::BadParams, "denominator must be positive");
}

Dist RandomTableAgent::act_unchecked(const History& h) const {
  SplitMix64 rng(hash_combine(seed_, h.key()));
  return Dist::make(random_masses(rng, spaces().num_actions(), denominator_));
}

json RandomTableAgent::descriptor() const {
  return {{"type", "random"}, {"seed", seed_}, {"denominator", denominator_}};
}

namespace {

const json& require(const json& params, const char* field) {
  if (!params.is_object() || !params.contains(field))
    throw Error(ErrorCode::BadParams, std::string("missing parameter '") + field + "'");
  return params.at(field);
}

std::string require_string(const json& params, const char* field) {
  const json& v = require(params, field);
  if (!v.is_string()) throw Error(ErrorCode::BadParams, std::string("'") + field + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

AgentPtr builtin_agent(const SpacesPtr& spaces, const std::string& family, const json& params) {
  try {
    if (family == "uniform") return std::make_shared<UniformAgent>(spaces);
    if (family == "constant")
      return std::make_shared<ConstantAgent>(spaces, spaces->parse_action(require_string(params, "action")));
    if (family == "greedy") {
      return std::make_shared<LastRewardGreedyAgent>(
          spaces, rational_from_json(require(params, "threshold")),
          spaces->parse_action(require_string(params, "high")),
          spaces->parse_action(require_string(params, "low")));
    }
    if (family == "table") {
      std::vector<std::pair<History, Dist>> entries;
      if (params.contains("entries")) {
        const json& e = params.at("entries");
        if (!e.is_object()) throw Error(ErrorCode::BadParams, "'entries' must be an object");
        for (const auto& [key, dist] : e.items())
          entries.emplace_back(parse_history(*spaces, key), action_dist_from_json(*spaces, dist));
      }
      std::optional<Dist> fallback;
      if (params.contains("default")) fallback = action_dist_from_json(*spaces, params.at("default"));
      return std::make_shared<TableAgent>(spaces, std::move(entries), std::move(fallback));
    }
    if (family == "random") {
      const json& seed = require(params, "seed");
      if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<long long>() < 0))
        throw Error(ErrorCode::BadParams, "'seed' must be a non-negative integer");
      std::uint32_t den = 12;
      if (params.contains("denominator")) {
        const json& d = params.at("denominator");
        if (!d.is_number_integer() || d.get<long long>() <= 0 || d.get<long long>() > 1'000'000)
          throw Error(ErrorCode::BadParams, "'denominator' must be a positive integer");
        den = params.at("denominator").get<std::uint32_t>();
      }
      return std::make_shared<RandomTableAgent>(spaces, seed.get<std::uint64_t>(), den);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::BadParams) throw;
    throw Error(ErrorCode::BadParams, family + ": " + e.what());
  }
  throw Error(ErrorCode::UnknownFamily, "unknown agent family '" + family + "'");
}

}  // namespace agentmix
