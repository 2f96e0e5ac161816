#pragma once

#include <vector>

#include "agentmix/detail/prefix_memo.hpp"
#include "agentmix/environments.hpp"
#include "agentmix/fault.hpp"
#include "agentmix/valuation.hpp"

namespace agentmix {

/// Positive weights for a finite prefix of environments plus a residual
/// mass carried by the silent environment; everything sums to exactly 1.
class EnvWeightVector {
 public:
  /// Throws InvalidWeights.
  static EnvWeightVector make(std::vector<Rational> weights, Rational silent_tail = Rational(0));

  const std::vector<Rational>& weights() const { return weights_; }
  const Rational& silent_tail() const { return silent_tail_; }
  std::size_t size() const { return weights_.size(); }

 private:
  std::vector<Rational> weights_;
  Rational silent_tail_;
};

/// (w.mu)(x|h) = (w . P_mu(hx)) / (w . P_mu(h)), or 1/|E| when the
/// denominator vanishes. The tail bound is the weighted sum of component
/// tail bounds.
class MixtureEnv final : public Environment {
 public:
  MixtureEnv(EnvWeightVector weights, std::vector<EnvPtr> envs, json descriptor_override = nullptr);

  Dist perceive_unchecked(const History& h) const override;
  std::optional<Rational> tail_bound(std::size_t t) const override;
  std::optional<std::size_t> value_horizon() const override { return value_horizon_; }
  json descriptor() const override;

  /// Components actually mixed, silent environment included when the
  /// residual mass is positive, with their weights.
  const std::vector<EnvPtr>& components() const { return components_; }
  const std::vector<Rational>& component_weights() const { return weights_; }

  /// P_{mu_i}(h) for every component, memoized.
  std::vector<Rational> component_probs(const History& h) const;

 private:
  std::vector<Rational> probs_through_percept(const History& h) const;

  EnvWeightVector declared_;
  std::vector<EnvPtr> declared_envs_;
  std::vector<EnvPtr> components_;
  std::vector<Rational> weights_;
  std::optional<std::size_t> value_horizon_;
  json descriptor_override_;
  fault::Defect defect_;
  detail::PrefixMemo<std::vector<Rational>> memo_;
};

/// (env_dual mu)((o,r)|h) = mu((o,-r) | h-bar); tail bound inherited.
class DualEnv final : public Environment {
 public:
  explicit DualEnv(EnvPtr inner);
  Dist perceive_unchecked(const History& h) const override;
  std::optional<Rational> tail_bound(std::size_t t) const override { return inner_->tail_bound(t); }
  std::optional<std::size_t> value_horizon() const override { return inner_->value_horizon(); }
  json descriptor() const override { return {{"type", "envdual"}, {"env", inner_->descriptor()}}; }

 private:
  EnvPtr inner_;
  fault::Defect defect_;
};

/// Throws LengthMismatch, InvalidWeights or NoTailBound.
EnvPtr mix_envs(const EnvWeightVector& w, const std::vector<EnvPtr>& envs);

/// Throws RewardsNotNegationClosed.
EnvPtr env_dual(const EnvPtr& env);

/// The single environment whose values reproduce the measure:
/// V^pi_{mu_Y,t} = Y_t(pi). Throws NotNormalized or NotStronglyWellBehaved.
EnvPtr universal_env(const WeightedMeasure& measure, json descriptor_override = nullptr);

}  // namespace agentmix
