#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "agentmix/core.hpp"
#include "agentmix/json_io.hpp"

namespace agentmix {

/// An agent maps every history ending in a percept to a distribution over
/// actions. Implementations must be total and pure: the same history always
/// yields the same distribution, including on histories the agent itself
/// would never reach.
class Agent {
 public:
  explicit Agent(SpacesPtr spaces) : spaces_(std::move(spaces)) {}
  virtual ~Agent() = default;

  /// `h` is already known to end in a percept and to lie in spaces().
  virtual Dist act_unchecked(const History& h) const = 0;

  /// Structured provenance; re-parsing it rebuilds an equivalent agent.
  virtual json descriptor() const = 0;

  const Spaces& spaces() const { return *spaces_; }
  const SpacesPtr& spaces_ptr() const { return spaces_; }

 private:
  SpacesPtr spaces_;
};

using AgentPtr = std::shared_ptr<const Agent>;
using AgentVector = std::vector<AgentPtr>;

/// pi(.|h). Throws WrongParity unless h ends in a percept.
Dist act(const Agent& agent, const History& h);

/// P^pi(h): 1 at the empty history, unchanged on percept append, times
/// pi(y|g) on appending action y to g.
Rational agent_prob(const Agent& agent, const History& h);

class UniformAgent final : public Agent {
 public:
  using Agent::Agent;
  Dist act_unchecked(const History& h) const override;
  json descriptor() const override;
};

/// Always the same action.
class ConstantAgent final : public Agent {
 public:
  ConstantAgent(SpacesPtr spaces, ActionId action);
  Dist act_unchecked(const History& h) const override;
  json descriptor() const override;

 private:
  ActionId action_;
};

/// Explicit finite table; unmapped histories fall back to `fallback`
/// (uniform unless given).
class TableAgent final : public Agent {
 public:
  TableAgent(SpacesPtr spaces, std::vector<std::pair<History, Dist>> entries,
             std::optional<Dist> fallback = std::nullopt);
  Dist act_unchecked(const History& h) const override;
  json descriptor() const override;

 private:
  std::map<std::string, Dist> table_;
  std::vector<std::pair<History, Dist>> entries_;
  Dist fallback_;
  bool explicit_fallback_;
};

/// Picks `high` when the most recent reward is >= threshold, `low`
/// otherwise.
class LastRewardGreedyAgent final : public Agent {
 public:
  LastRewardGreedyAgent(SpacesPtr spaces, Rational threshold, ActionId high, ActionId low);
  Dist act_unchecked(const History& h) const override;
  json descriptor() const override;

 private:
  Rational threshold_;
  ActionId high_;
  ActionId low_;
};

/// A table agent whose entries are drawn lazily: the distribution at h is a
/// pure function of (seed, h), with masses k/denominator.
class RandomTableAgent final : public Agent {
 public:
  RandomTableAgent(SpacesPtr spaces, std::uint64_t seed, std::uint32_t denominator = 12);
  Dist act_unchecked(const History& h) const override;
  json descriptor() const override;

 private:
  std::uint64_t seed_;
  std::uint32_t denominator_;
};

/// Builds one of the leaf families: uniform, constant, table, greedy,
/// random. Throws UnknownFamily or BadParams.
AgentPtr builtin_agent(const SpacesPtr& spaces, const std::string& family, const json& params);

}  // namespace agentmix
