#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "agentmix/agents.hpp"
#include "agentmix/environments.hpp"

namespace agentmix {

struct EvalOptions {
  /// Interaction-tree nodes a single valuation may visit before failing with
  /// DepthOverflow.
  std::size_t max_nodes = 10'000'000;
};

/// Defaults, with AGENTMIX_MAX_NODES overriding max_nodes when set.
EvalOptions default_eval_options();

/// Exact V^pi_{mu,t}: the expected sum of the rewards in x_1 .. x_t. Depth
/// first over the interaction tree, skipping zero-probability branches.
Rational value_at(const Agent& agent, const Environment& env, std::size_t t,
                  const EvalOptions& options = default_eval_options());

struct ValueResult {
  Rational value;
  std::size_t t = 0;
  Rational tail;

  Rational lo() const { return value - tail; }
  Rational hi() const { return value + tail; }
  bool exact() const { return tail.is_zero(); }
};

/// {"value":"p/q","tail":"p/q","t":n}
ojson to_json(const ValueResult& r);

/// V^pi_{mu,t} together with the environment's tail bound at t. Throws
/// NoTailBound.
ValueResult value_interval(const Agent& agent, const Environment& env, std::size_t t,
                           const EvalOptions& options = default_eval_options());

struct MeasureComponent {
  EnvPtr env;
  Rational weight;
};

/// Finite-support weighted intelligence measure.
class WeightedMeasure {
 public:
  /// Requires a nonempty list, positive weights and tail-bounded
  /// environments over one Spaces. Computes the normalized flag and, when
  /// every component has a value horizon, certifies each component.
  static WeightedMeasure make(std::vector<MeasureComponent> components);

  const std::vector<MeasureComponent>& components() const { return components_; }
  bool normalized() const { return normalized_; }
  bool strongly_well_behaved() const { return strongly_well_behaved_; }
  /// Largest component value horizon, if all components have one.
  std::optional<std::size_t> value_horizon() const { return value_horizon_; }
  Rational tail_bound(std::size_t t) const;
  const Spaces& spaces() const { return components_.front().env->spaces(); }

 private:
  std::vector<MeasureComponent> components_;
  bool normalized_ = false;
  bool strongly_well_behaved_ = false;
  std::optional<std::size_t> value_horizon_;
};

/// value = sum_mu w_mu V^pi_{mu,t}; tail = sum_mu w_mu b_mu(t).
ValueResult upsilon(const WeightedMeasure& measure, const Agent& agent, std::size_t t,
                    const EvalOptions& options = default_eval_options());

std::vector<Rational> value_vector(const AgentVector& agents, const Environment& env, std::size_t t,
                                   const EvalOptions& options = default_eval_options());
std::vector<ValueResult> upsilon_vector(const WeightedMeasure& measure, const AgentVector& agents,
                                        std::size_t t,
                                        const EvalOptions& options = default_eval_options());

}  // namespace agentmix
