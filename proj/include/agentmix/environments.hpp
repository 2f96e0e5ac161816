#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "agentmix/agents.hpp"
#include "agentmix/core.hpp"
#include "agentmix/json_io.hpp"

namespace agentmix {

/// An environment maps every history that is empty or ends in an action to
/// a distribution over percepts. Total and pure, like agents.
///
/// Environments may advertise a tail bound b(t) with
///   |V^pi_mu - V^pi_{mu,t}| <= b(t)   for every agent pi,
/// non-increasing in t. value_horizon() is the first t from which b is 0,
/// when such a t exists; from that step on, every reachable percept carries
/// reward 0, so V^pi_mu = V^pi_{mu,t} exactly.
class Environment {
 public:
  explicit Environment(SpacesPtr spaces) : spaces_(std::move(spaces)) {}
  virtual ~Environment() = default;

  /// `h` is already known to be empty or end in an action.
  virtual Dist perceive_unchecked(const History& h) const = 0;

  virtual std::optional<Rational> tail_bound(std::size_t) const { return std::nullopt; }
  virtual std::optional<std::size_t> value_horizon() const { return std::nullopt; }
  bool has_tail_bound() const { return tail_bound(0).has_value(); }

  virtual json descriptor() const = 0;

  const Spaces& spaces() const { return *spaces_; }
  const SpacesPtr& spaces_ptr() const { return spaces_; }

 private:
  SpacesPtr spaces_;
};

using EnvPtr = std::shared_ptr<const Environment>;

/// mu(.|h). Throws WrongParity when h ends in a percept.
Dist perceive(const Environment& env, const History& h);

/// P_mu(h): 1 at the empty history, times mu(x|g) on appending percept x to
/// g, unchanged on action append.
Rational env_prob(const Environment& env, const History& h);

/// P^pi_mu(h), computed by its own recursion (not via the factorization).
Rational joint_prob(const Agent& agent, const Environment& env, const History& h);

/// Always emits (first observation, 0). Value horizon 0.
class SilentEnv final : public Environment {
 public:
  explicit SilentEnv(SpacesPtr spaces);
  Dist perceive_unchecked(const History& h) const override;
  std::optional<Rational> tail_bound(std::size_t) const override { return Rational(0); }
  std::optional<std::size_t> value_horizon() const override { return 0; }
  json descriptor() const override { return {{"type", "silent"}}; }
};

/// Table environment with `horizon` rewarded agent actions: entries are
/// keyed by histories with at most `horizon` actions (so the percepts
/// x_1 .. x_{horizon+1} come from the table or its default), and every later
/// percept is drawn from the zero-reward padding distribution. Hence the
/// value horizon is horizon + 1.
class FiniteHorizonTableEnv final : public Environment {
 public:
  FiniteHorizonTableEnv(SpacesPtr spaces, std::size_t horizon,
                        std::vector<std::pair<History, Dist>> entries,
                        std::optional<Dist> fallback = std::nullopt,
                        std::optional<Dist> padding = std::nullopt);

  Dist perceive_unchecked(const History& h) const override;
  std::optional<Rational> tail_bound(std::size_t t) const override;
  std::optional<std::size_t> value_horizon() const override { return horizon_ + 1; }
  json descriptor() const override;

  std::size_t horizon() const { return horizon_; }

 private:
  std::size_t horizon_;
  std::vector<std::pair<History, Dist>> entries_;
  std::map<std::string, Dist> table_;
  Dist fallback_;
  Dist padding_;
  bool explicit_fallback_;
  bool explicit_padding_;
  std::vector<Rational> tail_;  // tail_[t] for t <= horizon + 1
};

/// Finite-horizon environment whose pre-horizon percept distributions are a
/// pure function of (seed, h), with masses k/denominator.
class RandomTableEnv final : public Environment {
 public:
  RandomTableEnv(SpacesPtr spaces, std::size_t horizon, std::uint64_t seed,
                 std::uint32_t denominator = 12);

  Dist perceive_unchecked(const History& h) const override;
  std::optional<Rational> tail_bound(std::size_t t) const override;
  std::optional<std::size_t> value_horizon() const override { return horizon_ + 1; }
  json descriptor() const override;

 private:
  std::size_t horizon_;
  std::uint64_t seed_;
  std::uint32_t denominator_;
  Rational max_abs_reward_;
  bool halved_;
};

/// Per-step percept rule with continuation probability gamma. The first
/// percept comes from `initial`; afterwards, with probability gamma the
/// percept comes from the rule for the last action and with probability
/// 1 - gamma the environment halts, emitting (halt, 0) forever. The k-th
/// percept is live with probability gamma^(k-1), so b(t) = gamma^t/(1-gamma).
class TerminatingEnv final : public Environment {
 public:
  TerminatingEnv(SpacesPtr spaces, Rational gamma, std::size_t halt_observation, Dist initial,
                 std::vector<Dist> after_action);

  Dist perceive_unchecked(const History& h) const override;
  std::optional<Rational> tail_bound(std::size_t t) const override;
  json descriptor() const override;

  const Rational& gamma() const { return gamma_; }

 private:
  Rational gamma_;
  std::size_t halt_obs_;
  PerceptId halt_;
  Dist initial_;
  std::vector<Dist> after_;
  bool halved_;
};

/// Leaf families: silent, table, random, terminating. Throws UnknownFamily or
/// BadParams.
EnvPtr builtin_env(const SpacesPtr& spaces, const std::string& family, const json& params);

struct SwbCertificate {
  bool strongly_well_behaved = false;
  std::size_t steps_checked = 0;
  /// Extremes of V_t over deterministic agents, over t <= steps_checked.
  Rational max_value;
  Rational min_value;
  /// First t at which a bound was violated, if any.
  std::optional<std::size_t> violating_step;
};

/// Decides whether -1 <= V^pi_{mu,t} <= 1 for every agent and every t.
/// Partial values are multilinear in the agent's action probabilities, so
/// their extremes over all agents are attained at deterministic agents; the
/// search maximizes and minimizes over every deterministic choice at every
/// reachable history (expectimax). Past the value horizon, reachable rewards
/// are zero and V_t is constant. Throws NoFiniteHorizon.
SwbCertificate certify_strongly_well_behaved(const Environment& env,
                                             std::optional<std::size_t> horizon = std::nullopt);

}  // namespace agentmix
