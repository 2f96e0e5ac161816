#include "agentmix/envmix.hpp"

namespace agentmix {

EnvWeightVector EnvWeightVector::make(std::vector<Rational> weights, Rational silent_tail) {
  if (weights.empty()) throw Error(ErrorCode::InvalidWeights, "environment weight vector is empty");
  if (silent_tail.sign() < 0) throw Error(ErrorCode::InvalidWeights, "silent tail mass is negative");
  Rational sum = silent_tail;
  for (const auto& w : weights) {
    if (w.sign() <= 0) throw Error(ErrorCode::InvalidWeights, "weight " + w.str() + " is not positive");
    sum += w;
  }
  if (sum != Rational(1) && fault::active() != fault::Defect::UnnormalizedWeights)
    throw Error(ErrorCode::InvalidWeights, "weights plus silent tail sum to " + sum.str() + ", not 1");
  EnvWeightVector v;
  v.weights_ = std::move(weights);
  v.silent_tail_ = std::move(silent_tail);
  return v;
}

MixtureEnv::MixtureEnv(EnvWeightVector weights, std::vector<EnvPtr> envs, json descriptor_override)
    : Environment(envs.empty() ? nullptr : envs.front()->spaces_ptr()),
      declared_(std::move(weights)),
      declared_envs_(std::move(envs)),
      descriptor_override_(std::move(descriptor_override)),
      defect_(fault::active()) {
  if (declared_envs_.empty()) throw Error(ErrorCode::LengthMismatch, "mixture of no environments");
  if (declared_envs_.size() != declared_.size())
    throw Error(ErrorCode::LengthMismatch, std::to_string(declared_.size()) + " weights for " +
                                               std::to_string(declared_envs_.size()) + " environments");
  components_ = declared_envs_;
  weights_ = declared_.weights();
  if (declared_.silent_tail().sign() > 0) {
    components_.push_back(std::make_shared<SilentEnv>(spaces_ptr()));
    weights_.push_back(declared_.silent_tail());
  }
  std::size_t horizon = 0;
  bool all = true;
  for (const auto& e : components_) {
    if (!(e->spaces() == spaces())) throw Error(ErrorCode::CarrierMismatch, "mixed environments use different spaces");
    if (!e->has_tail_bound()) throw Error(ErrorCode::NoTailBound, "mixture component lacks a tail bound");
    if (auto h = e->value_horizon()) {
      horizon = std::max(horizon, *h);
    } else {
      all = false;
    }
  }
  if (all) value_horizon_ = horizon;
}

std::vector<Rational> MixtureEnv::probs_through_percept(const History& h) const {
  // h is empty or ends in a percept.
  if (h.empty()) return std::vector<Rational>(components_.size(), Rational(1));
  std::string key = h.key();
  if (auto hit = memo_.find(key)) return *hit;
  History g = h.prefix(h.size() - 1);  // empty or ends in an action
  PerceptId x = h.last_percept();
  std::vector<Rational> p = probs_through_percept(g.empty() ? g : g.prefix(g.size() - 1));
  for (std::size_t i = 0; i < components_.size(); ++i)
    if (!p[i].is_zero()) p[i] *= components_[i]->perceive_unchecked(g)[x.index];
  memo_.store(std::move(key), p);
  return p;
}

std::vector<Rational> MixtureEnv::component_probs(const History& h) const {
  if (h.empty() || h.ends_in_percept()) return probs_through_percept(h);
  return probs_through_percept(h.prefix(h.size() - 1));
}

Dist MixtureEnv::perceive_unchecked(const History& h) const {
  const std::size_t ne = spaces().num_percepts();
  std::vector<Rational> p = component_probs(h);
  Rational denom;
  for (std::size_t i = 0; i < p.size(); ++i) denom += weights_[i] * p[i];
  if (denom.is_zero()) {
    if (defect_ == fault::Defect::NonUniformFallback) return Dist::point(ne, 0);
    return Dist::uniform(ne);
  }
  std::vector<Rational> num(ne);
  std::vector<std::vector<Rational>> child(ne, std::vector<Rational>(components_.size()));
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (p[i].is_zero()) continue;
    Dist d = components_[i]->perceive_unchecked(h);
    Rational wp = weights_[i] * p[i];
    for (std::size_t x = 0; x < ne; ++x) {
      if (d[x].is_zero()) continue;
      child[x][i] = p[i] * d[x];
      num[x] += wp * d[x];
    }
  }
  History hx = h;
  for (std::size_t x = 0; x < ne; ++x) {
    hx.push(PerceptId{static_cast<std::uint16_t>(x)});
    memo_.store(hx.key(), std::move(child[x]));
    hx.pop();
  }
  if (defect_ == fault::Defect::MissingBayesDenominator) return Dist::unchecked(std::move(num));
  for (auto& m : num) m /= denom;
  return Dist::make(std::move(num));
}

std::optional<Rational> MixtureEnv::tail_bound(std::size_t t) const {
  Rational b;
  for (std::size_t i = 0; i < components_.size(); ++i) b += weights_[i] * *components_[i]->tail_bound(t);
  return b;
}

json MixtureEnv::descriptor() const {
  if (!descriptor_override_.is_null()) return descriptor_override_;
  json ws = json::array();
  for (const auto& w : declared_.weights()) ws.push_back(w.str());
  json es = json::array();
  for (const auto& e : declared_envs_) es.push_back(e->descriptor());
  return {{"type", "envmix"}, {"weights", ws}, {"envs", es}, {"silent_tail", declared_.silent_tail().str()}};
}

DualEnv::DualEnv(EnvPtr inner) : Environment(inner->spaces_ptr()), inner_(std::move(inner)), defect_(fault::active()) {
  if (!spaces().negation_closed())
    throw Error(ErrorCode::RewardsNotNegationClosed, "dual environments need negation-closed rewards");
}

Dist DualEnv::perceive_unchecked(const History& h) const {
  if (defect_ == fault::Defect::DualSkipsNegation) return inner_->perceive_unchecked(h);
  const Spaces& s = spaces();
  Dist d = inner_->perceive_unchecked(dual_history(s, h));
  std::vector<Rational> m(d.size());
  for (std::size_t x = 0; x < d.size(); ++x)
    m[x] = d[s.negate(PerceptId{static_cast<std::uint16_t>(x)}).index];
  return Dist::make(std::move(m));
}

EnvPtr mix_envs(const EnvWeightVector& w, const std::vector<EnvPtr>& envs) {
  return std::make_shared<MixtureEnv>(w, envs);
}

EnvPtr env_dual(const EnvPtr& env) { return std::make_shared<DualEnv>(env); }

EnvPtr universal_env(const WeightedMeasure& measure, json descriptor_override) {
  if (!measure.normalized()) throw Error(ErrorCode::NotNormalized, "measure weights do not sum to 1");
  if (!measure.strongly_well_behaved())
    throw Error(ErrorCode::NotStronglyWellBehaved, "measure has a component that is not certified");
  std::vector<Rational> ws;
  std::vector<EnvPtr> envs;
  for (const auto& c : measure.components()) {
    ws.push_back(c.weight);
    envs.push_back(c.env);
  }
  return std::make_shared<MixtureEnv>(EnvWeightVector::make(std::move(ws)), std::move(envs),
                                      std::move(descriptor_override));
}

}  // namespace agentmix
