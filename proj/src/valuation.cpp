#include "agentmix/valuation.hpp"

#include <cstdlib>
#include <string>

namespace agentmix {

EvalOptions default_eval_options() {
  EvalOptions o;
  if (const char* env = std::getenv("AGENTMIX_MAX_NODES")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) o.max_nodes = static_cast<std::size_t>(v);
  }
  return o;
}

namespace {

class TreeValuer {
 public:
  TreeValuer(const Agent& agent, const Environment& env, std::size_t t, const EvalOptions& options)
      : agent_(agent), env_(env), spaces_(env.spaces()), t_(t), options_(options) {}

  Rational run() {
    if (t_ == 0) return Rational(0);
    visit(Rational(1), 0);
    return total_;
  }

 private:
  // Environment node: `h` is empty or ends in an action, k percepts so far.
  void visit(const Rational& prob, std::size_t k) {
    if (++nodes_ > options_.max_nodes)
      throw Error(ErrorCode::DepthOverflow,
                  "valuation exceeded the node budget of " + std::to_string(options_.max_nodes));
    Dist d = env_.perceive_unchecked(h_);
    for (std::size_t x = 0; x < d.size(); ++x) {
      if (d[x].is_zero()) continue;
      PerceptId px{static_cast<std::uint16_t>(x)};
      Rational p = prob * d[x];
      const Rational& r = spaces_.reward_of(px);
      if (!r.is_zero()) total_ += p * r;
      if (k + 1 >= t_) continue;
      h_.push(px);
      Dist a = agent_.act_unchecked(h_);
      for (std::size_t y = 0; y < a.size(); ++y) {
        if (a[y].is_zero()) continue;
        h_.push(ActionId{static_cast<std::uint16_t>(y)});
        visit(p * a[y], k + 1);
        h_.pop();
      }
      h_.pop();
    }
  }

  const Agent& agent_;
  const Environment& env_;
  const Spaces& spaces_;
  std::size_t t_;
  const EvalOptions& options_;
  History h_;
  Rational total_;
  std::size_t nodes_ = 0;
};

}  // namespace

Rational value_at(const Agent& agent, const Environment& env, std::size_t t, const EvalOptions& options) {
  return TreeValuer(agent, env, t, options).run();
}

ojson to_json(const ValueResult& r) {
  ojson j;
  j["value"] = r.value.str();
  j["tail"] = r.tail.str();
  j["t"] = r.t;
  return j;
}

ValueResult value_interval(const Agent& agent, const Environment& env, std::size_t t,
                           const EvalOptions& options) {
  auto tail = env.tail_bound(t);
  if (!tail) throw Error(ErrorCode::NoTailBound, "environment advertises no tail bound");
  return ValueResult{value_at(agent, env, t, options), t, *tail};
}

WeightedMeasure WeightedMeasure::make(std::vector<MeasureComponent> components) {
  if (components.empty()) throw Error(ErrorCode::InvalidWeights, "measure has no components");
  WeightedMeasure m;
  Rational sum;
  bool all_horizons = true;
  std::size_t horizon = 0;
  const Spaces* spaces = nullptr;
  for (const auto& c : components) {
    if (!c.env) throw Error(ErrorCode::BadParams, "null environment");
    if (c.weight.sign() <= 0)
      throw Error(ErrorCode::InvalidWeights, "measure weight " + c.weight.str() + " is not positive");
    if (!c.env->has_tail_bound()) throw Error(ErrorCode::NoTailBound, "measure component lacks a tail bound");
    if (spaces && !(*spaces == c.env->spaces()))
      throw Error(ErrorCode::CarrierMismatch, "measure components use different spaces");
    spaces = &c.env->spaces();
    sum += c.weight;
    if (auto h = c.env->value_horizon()) {
      horizon = std::max(horizon, *h);
    } else {
      all_horizons = false;
    }
  }
  m.normalized_ = sum == Rational(1);
  if (all_horizons) {
    m.value_horizon_ = horizon;
    m.strongly_well_behaved_ = m.normalized_;
    for (const auto& c : components) {
      if (!m.strongly_well_behaved_) break;
      m.strongly_well_behaved_ = certify_strongly_well_behaved(*c.env).strongly_well_behaved;
    }
  }
  m.components_ = std::move(components);
  return m;
}

Rational WeightedMeasure::tail_bound(std::size_t t) const {
  Rational tail;
  for (const auto& c : components_) tail += c.weight * *c.env->tail_bound(t);
  return tail;
}

ValueResult upsilon(const WeightedMeasure& measure, const Agent& agent, std::size_t t,
                    const EvalOptions& options) {
  ValueResult r;
  r.t = t;
  for (const auto& c : measure.components()) {
    r.value += c.weight * value_at(agent, *c.env, t, options);
    r.tail += c.weight * *c.env->tail_bound(t);
  }
  return r;
}

std::vector<Rational> value_vector(const AgentVector& agents, const Environment& env, std::size_t t,
                                   const EvalOptions& options) {
  std::vector<Rational> out;
  out.reserve(agents.size());
  for (const auto& a : agents) out.push_back(value_at(*a, env, t, options));
  return out;
}

std::vector<ValueResult> upsilon_vector(const WeightedMeasure& measure, const AgentVector& agents,
                                        std::size_t t, const EvalOptions& options) {
  std::vector<ValueResult> out;
  out.reserve(agents.size());
  for (const auto& a : agents) out.push_back(upsilon(measure, *a, t, options));
  return out;
}

}  // namespace agentmix
