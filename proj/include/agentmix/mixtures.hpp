#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "agentmix/agents.hpp"
#include "agentmix/detail/prefix_memo.hpp"
#include "agentmix/fault.hpp"
#include "agentmix/valuation.hpp"

namespace agentmix {

/// Positive rational weights summing to exactly 1.
class WeightVector {
 public:
  /// Throws InvalidWeights.
  static WeightVector make(std::vector<Rational> weights);
  static WeightVector uniform(std::size_t n);

  const std::vector<Rational>& weights() const { return weights_; }
  std::size_t size() const { return weights_.size(); }
  const Rational& operator[](std::size_t i) const { return weights_[i]; }

  /// w . v
  Rational dot(const std::vector<Rational>& v) const;

 private:
  std::vector<Rational> weights_;
};

/// The Bayes mixture w.pi: at h it plays y with probability
/// (w . P^pi(hy)) / (w . P^pi(h)), or 1/|A| when the denominator vanishes.
/// Component probabilities are memoized per instance.
class MixtureAgent final : public Agent {
 public:
  MixtureAgent(WeightVector weights, AgentVector components, json descriptor_override = nullptr);

  Dist act_unchecked(const History& h) const override;
  json descriptor() const override;

  const WeightVector& weights() const { return weights_; }
  const AgentVector& components() const { return components_; }

  /// P^{pi_i}(h) for every component, memoized.
  std::vector<Rational> component_probs(const History& h) const;

 private:
  std::vector<Rational> probs_through_action(const History& h) const;

  WeightVector weights_;
  AgentVector components_;
  json descriptor_override_;
  fault::Defect defect_;
  detail::PrefixMemo<std::vector<Rational>> memo_;
};

/// pi-bar(y|h) = pi(y|h-bar).
class DualAgent final : public Agent {
 public:
  explicit DualAgent(AgentPtr inner);
  Dist act_unchecked(const History& h) const override;
  json descriptor() const override { return {{"type", "dual"}, {"agent", inner_->descriptor()}}; }
  const AgentPtr& inner() const { return inner_; }

 private:
  AgentPtr inner_;
  fault::Defect defect_;
};

struct PatchSpec {
  History site;
  Dist replacement;
};

/// pi^{site -> m}: m at the site, pi everywhere else.
class PatchedAgent final : public Agent {
 public:
  PatchedAgent(AgentPtr inner, PatchSpec patch);
  Dist act_unchecked(const History& h) const override;
  json descriptor() const override;

 private:
  AgentPtr inner_;
  PatchSpec patch_;
};

/// Throws LengthMismatch or InvalidWeights.
AgentPtr mix_agents(const WeightVector& w, const AgentVector& agents);
/// Throws RewardsNotNegationClosed.
AgentPtr dual_agent(const AgentPtr& agent);
/// Throws WrongParity / CarrierMismatch on an invalid patch.
AgentPtr patch_agent(const AgentPtr& agent, PatchSpec patch);
/// (1/2, 1/2) . (pi, pi-bar). Throws RewardsNotNegationClosed.
AgentPtr symmetrize(const AgentPtr& agent);

/// Pointwise w . m. Throws LengthMismatch or CarrierMismatch.
Dist mix_dists(const WeightVector& w, const std::vector<Dist>& dists);

struct TruncatedVerdict {
  bool holds = true;
  std::size_t depth = 0;
  std::optional<History> witness;
  /// Exact values at the witness (probabilities or masses, per `reason`).
  std::optional<Rational> lhs;
  std::optional<Rational> rhs;
  std::string reason;
};

/// The relation p == q restricted to histories of length <= 2T: the same
/// histories have zero probability, and on every non-zero-probability
/// history ending in a percept both agents act identically.
TruncatedVerdict equivalent_up_to(const Agent& p, const Agent& q, std::size_t depth,
                                  const EvalOptions& options = default_eval_options());

/// equivalent_up_to(pi, dual_agent(pi), T).
TruncatedVerdict self_dual_up_to(const AgentPtr& agent, std::size_t depth,
                                 const EvalOptions& options = default_eval_options());

struct DistanceResult {
  Rational distance;
  std::optional<History> history;
  std::optional<ActionId> action;
};

/// max |p(y|h) - q(y|h)| over histories ending in a percept with at most T
/// percepts (length <= 2T-1).
DistanceResult distance_up_to(const Agent& p, const Agent& q, std::size_t depth,
                              const EvalOptions& options = default_eval_options());

}  // namespace agentmix
