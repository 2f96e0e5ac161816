#include "agentmix/mixtures.hpp"

#include <functional>

namespace agentmix {

WeightVector WeightVector::make(std::vector<Rational> weights) {
  if (weights.empty()) throw Error(ErrorCode::InvalidWeights, "weight vector is empty");
  Rational sum;
  for (const auto& w : weights) {
    if (w.sign() <= 0) throw Error(ErrorCode::InvalidWeights, "weight " + w.str() + " is not positive");
    sum += w;
  }
  if (sum != Rational(1) && fault::active() != fault::Defect::UnnormalizedWeights)
    throw Error(ErrorCode::InvalidWeights, "weights sum to " + sum.str() + ", not 1");
  WeightVector v;
  v.weights_ = std::move(weights);
  return v;
}

WeightVector WeightVector::uniform(std::size_t n) {
  return make(std::vector<Rational>(n, Rational(1, static_cast<long>(n))));
}

Rational WeightVector::dot(const std::vector<Rational>& v) const {
  if (v.size() != weights_.size()) throw Error(ErrorCode::LengthMismatch, "dot product of unequal lengths");
  Rational s;
  for (std::size_t i = 0; i < v.size(); ++i) s += weights_[i] * v[i];
  return s;
}

// --- mixture agent

MixtureAgent::MixtureAgent(WeightVector weights, AgentVector components, json descriptor_override)
    : Agent(components.empty() ? nullptr : components.front()->spaces_ptr()),
      weights_(std::move(weights)),
      components_(std::move(components)),
      descriptor_override_(std::move(descriptor_override)),
      defect_(fault::active()) {
  if (components_.empty()) throw Error(ErrorCode::LengthMismatch, "mixture of no agents");
  if (components_.size() != weights_.size())
    throw Error(ErrorCode::LengthMismatch, std::to_string(weights_.size()) + " weights for " +
                                               std::to_string(components_.size()) + " agents");
  for (const auto& c : components_)
    if (!(c->spaces() == spaces())) throw Error(ErrorCode::CarrierMismatch, "mixed agents use different spaces");
}

std::vector<Rational> MixtureAgent::probs_through_action(const History& h) const {
  // h is empty or ends in an action.
  if (h.empty()) return std::vector<Rational>(components_.size(), Rational(1));
  std::string key = h.key();
  if (auto hit = memo_.find(key)) return *hit;
  History g = h.prefix(h.size() - 1);  // ends in a percept
  ActionId y = h.last_action();
  std::vector<Rational> p = probs_through_action(g.prefix(g.size() - 1));
  for (std::size_t i = 0; i < components_.size(); ++i)
    if (!p[i].is_zero()) p[i] *= components_[i]->act_unchecked(g)[y.index];
  memo_.store(std::move(key), p);
  return p;
}

std::vector<Rational> MixtureAgent::component_probs(const History& h) const {
  return probs_through_action(h.ends_in_percept() ? h.prefix(h.size() - 1) : h);
}

Dist MixtureAgent::act_unchecked(const History& h) const {
  const std::size_t na = spaces().num_actions();
  std::vector<Rational> p = probs_through_action(h.prefix(h.size() - 1));
  Rational denom = weights_.dot(p);
  if (denom.is_zero()) {
    if (defect_ == fault::Defect::NonUniformFallback) return Dist::point(na, 0);
    return Dist::uniform(na);
  }
  std::vector<Rational> num(na);
  // Child probabilities P^{pi_i}(h y), stored so later queries below h y
  // hit the memo instead of re-asking the components.
  std::vector<std::vector<Rational>> child(na, std::vector<Rational>(components_.size()));
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (p[i].is_zero()) continue;
    Dist d = components_[i]->act_unchecked(h);
    Rational wp = weights_[i] * p[i];
    for (std::size_t y = 0; y < na; ++y) {
      if (d[y].is_zero()) continue;
      child[y][i] = p[i] * d[y];
      num[y] += wp * d[y];
    }
  }
  History hy = h;
  for (std::size_t y = 0; y < na; ++y) {
    hy.push(ActionId{static_cast<std::uint16_t>(y)});
    memo_.store(hy.key(), std::move(child[y]));
    hy.pop();
  }
  if (defect_ == fault::Defect::MissingBayesDenominator) return Dist::unchecked(std::move(num));
  for (auto& m : num) m /= denom;
  return Dist::make(std::move(num));
}

json MixtureAgent::descriptor() const {
  if (!descriptor_override_.is_null()) return descriptor_override_;
  json ws = json::array();
  for (const auto& w : weights_.weights()) ws.push_back(w.str());
  json as = json::array();
  for (const auto& a : components_) as.push_back(a->descriptor());
  return {{"type", "mix"}, {"weights", ws}, {"agents", as}};
}

// --- dual agent

DualAgent::DualAgent(AgentPtr inner)
    : Agent(inner->spaces_ptr()), inner_(std::move(inner)), defect_(fault::active()) {
  if (!spaces().negation_closed())
    throw Error(ErrorCode::RewardsNotNegationClosed, "dual agents need negation-closed rewards");
}

Dist DualAgent::act_unchecked(const History& h) const {
  if (defect_ == fault::Defect::DualSkipsNegation) return inner_->act_unchecked(h);
  return inner_->act_unchecked(dual_history(spaces(), h));
}

// --- patched agent

PatchedAgent::PatchedAgent(AgentPtr inner, PatchSpec patch)
    : Agent(inner->spaces_ptr()), inner_(std::move(inner)), patch_(std::move(patch)) {
  if (!patch_.site.ends_in_percept()) throw Error(ErrorCode::WrongParity, "patch site must end in a percept");
  if (patch_.replacement.size() != spaces().num_actions())
    throw Error(ErrorCode::CarrierMismatch, "patch distribution has wrong carrier");
  if (!patch_.replacement.is_normalized()) throw Error(ErrorCode::NotNormalized, "patch distribution");
  for (std::size_t i = 0; i < patch_.site.size(); ++i) {
    auto v = patch_.site.items()[i];
    if (v >= (i % 2 == 0 ? spaces().num_percepts() : spaces().num_actions()))
      throw Error(ErrorCode::SymbolOutOfSpace, "patch site leaves the spaces");
  }
}

Dist PatchedAgent::act_unchecked(const History& h) const {
  if (h == patch_.site) return patch_.replacement;
  return inner_->act_unchecked(h);
}

json PatchedAgent::descriptor() const {
  return {{"type", "patch"},
          {"agent", inner_->descriptor()},
          {"site", format_history(spaces(), patch_.site)},
          {"dist", action_dist_to_json(spaces(), patch_.replacement)}};
}

AgentPtr mix_agents(const WeightVector& w, const AgentVector& agents) {
  return std::make_shared<MixtureAgent>(w, agents);
}

AgentPtr dual_agent(const AgentPtr& agent) { return std::make_shared<DualAgent>(agent); }

AgentPtr patch_agent(const AgentPtr& agent, PatchSpec patch) {
  return std::make_shared<PatchedAgent>(agent, std::move(patch));
}

AgentPtr symmetrize(const AgentPtr& agent) {
  AgentVector pair{agent, dual_agent(agent)};
  return std::make_shared<MixtureAgent>(WeightVector::uniform(2), pair,
                                        json{{"type", "symmetrize"}, {"agent", agent->descriptor()}});
}

Dist mix_dists(const WeightVector& w, const std::vector<Dist>& dists) {
  if (dists.size() != w.size())
    throw Error(ErrorCode::LengthMismatch, std::to_string(w.size()) + " weights for " +
                                               std::to_string(dists.size()) + " distributions");
  const std::size_t n = dists.front().size();
  std::vector<Rational> m(n);
  for (std::size_t i = 0; i < dists.size(); ++i) {
    if (dists[i].size() != n) throw Error(ErrorCode::CarrierMismatch, "distributions over different carriers");
    for (std::size_t y = 0; y < n; ++y) m[y] += w[i] * dists[i][y];
  }
  return Dist::make(std::move(m));
}

// --- truncated relations

namespace {

void charge(std::size_t& nodes, const EvalOptions& options) {
  if (++nodes > options.max_nodes)
    throw Error(ErrorCode::DepthOverflow, "exceeded the node budget of " + std::to_string(options.max_nodes));
}

}  // namespace

TruncatedVerdict equivalent_up_to(const Agent& p, const Agent& q, std::size_t depth,
                                  const EvalOptions& options) {
  TruncatedVerdict v;
  v.depth = depth;
  const Spaces& s = p.spaces();
  const std::size_t max_len = 2 * depth;
  std::size_t nodes = 0;
  History h;

  // Returns false once a witness is recorded. Both probabilities are those
  // of the current history h.
  std::function<bool(const Rational&, const Rational&)> walk = [&](const Rational& pp,
                                                                   const Rational& pq) -> bool {
    charge(nodes, options);
    if (pp.is_zero() != pq.is_zero()) {
      v = {false, depth, h, pp, pq, "zero-probability sets differ"};
      return false;
    }
    if (pp.is_zero() || h.size() >= max_len) return true;
    if (h.ends_in_percept()) {
      Dist dp = p.act_unchecked(h);
      Dist dq = q.act_unchecked(h);
      for (std::size_t y = 0; y < dp.size(); ++y) {
        if (dp[y] != dq[y]) {
          v = {false, depth, h, dp[y], dq[y], "action distributions differ at " + s.actions()[y]};
          return false;
        }
      }
      for (std::size_t y = 0; y < s.num_actions(); ++y) {
        h.push(ActionId{static_cast<std::uint16_t>(y)});
        bool ok = walk(pp * dp[y], pq * dq[y]);
        h.pop();
        if (!ok) return false;
      }
    } else {
      for (std::size_t x = 0; x < s.num_percepts(); ++x) {
        h.push(PerceptId{static_cast<std::uint16_t>(x)});
        bool ok = walk(pp, pq);
        h.pop();
        if (!ok) return false;
      }
    }
    return true;
  };
  walk(Rational(1), Rational(1));
  return v;
}

TruncatedVerdict self_dual_up_to(const AgentPtr& agent, std::size_t depth, const EvalOptions& options) {
  AgentPtr dual = dual_agent(agent);
  return equivalent_up_to(*agent, *dual, depth, options);
}

DistanceResult distance_up_to(const Agent& p, const Agent& q, std::size_t depth, const EvalOptions& options) {
  DistanceResult r;
  const Spaces& s = p.spaces();
  std::size_t nodes = 0;
  History h;
  std::function<void()> walk = [&]() {
    charge(nodes, options);
    if (h.ends_in_percept()) {
      Dist dp = p.act_unchecked(h);
      Dist dq = q.act_unchecked(h);
      for (std::size_t y = 0; y < dp.size(); ++y) {
        Rational gap = (dp[y] - dq[y]).abs();
        if (gap > r.distance) {
          r.distance = gap;
          r.history = h;
          r.action = ActionId{static_cast<std::uint16_t>(y)};
        }
      }
      if (h.num_percepts() >= depth) return;
      for (std::size_t y = 0; y < s.num_actions(); ++y) {
        h.push(ActionId{static_cast<std::uint16_t>(y)});
        walk();
        h.pop();
      }
    } else {
      for (std::size_t x = 0; x < s.num_percepts(); ++x) {
        h.push(PerceptId{static_cast<std::uint16_t>(x)});
        walk();
        h.pop();
      }
    }
  };
  if (depth > 0) walk();
  return r;
}

}  // namespace agentmix
