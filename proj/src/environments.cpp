#include "agentmix/environments.hpp"

#include <functional>

#include "agentmix/fault.hpp"
#include "agentmix/random.hpp"

namespace agentmix {

Dist perceive(const Environment& env, const History& h) {
  if (h.ends_in_percept())
    throw Error(ErrorCode::WrongParity,
                "environments respond to histories that are empty or end in an action");
  return env.perceive_unchecked(h);
}

Rational env_prob(const Environment& env, const History& h) {
  Rational p(1);
  History g;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (i % 2 == 0) {
      PerceptId x{h.items()[i]};
      p *= env.perceive_unchecked(g)[x.index];
      if (p.is_zero()) return p;
      g.push(x);
    } else {
      g.push(ActionId{h.items()[i]});
    }
  }
  return p;
}

Rational joint_prob(const Agent& agent, const Environment& env, const History& h) {
  Rational p(1);
  History g;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (i % 2 == 0) {
      PerceptId x{h.items()[i]};
      p *= env.perceive_unchecked(g)[x.index];
      g.push(x);
    } else {
      ActionId y{h.items()[i]};
      p *= agent.act_unchecked(g)[y.index];
      g.push(y);
    }
    if (p.is_zero()) return p;
  }
  return p;
}

// --- silent

SilentEnv::SilentEnv(SpacesPtr spaces) : Environment(std::move(spaces)) {
  (void)this->spaces().zero_percept();
}

Dist SilentEnv::perceive_unchecked(const History&) const {
  return Dist::point(spaces().num_percepts(), spaces().zero_percept().index);
}

// --- finite-horizon table

namespace {

bool zero_reward_only(const Spaces& spaces, const Dist& d) {
  for (std::size_t i = 0; i < d.size(); ++i)
    if (!d[i].is_zero() && !spaces.reward_of(PerceptId{static_cast<std::uint16_t>(i)}).is_zero())
      return false;
  return true;
}

Rational max_abs_reward_in(const Spaces& spaces, const Dist& d) {
  Rational m;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (!d[i].is_zero()) m = max(m, spaces.reward_of(PerceptId{static_cast<std::uint16_t>(i)}).abs());
  return m;
}

Rational halve_if_defective(Rational b, bool halved) { return halved ? b / Rational(2) : b; }

}  // namespace

FiniteHorizonTableEnv::FiniteHorizonTableEnv(SpacesPtr spaces, std::size_t horizon,
                                             std::vector<std::pair<History, Dist>> entries,
                                             std::optional<Dist> fallback, std::optional<Dist> padding)
    : Environment(std::move(spaces)),
      horizon_(horizon),
      entries_(std::move(entries)),
      explicit_fallback_(fallback.has_value()),
      explicit_padding_(padding.has_value()) {
  const Spaces& s = this->spaces();
  const std::size_t n = s.num_percepts();
  padding_ = padding ? *padding : Dist::point(n, s.zero_percept().index);
  if (padding_.size() != n) throw Error(ErrorCode::CarrierMismatch, "padding has wrong carrier");
  if (!zero_reward_only(s, padding_))
    throw Error(ErrorCode::BadParams, "padding must only emit zero-reward percepts");
  fallback_ = fallback ? *fallback : padding_;
  if (fallback_.size() != n) throw Error(ErrorCode::CarrierMismatch, "default has wrong carrier");

  // per_step[k] bounds |reward| of percept x_{k+1}, which responds to a
  // history with k actions.
  std::vector<Rational> per_step(horizon_ + 1, max_abs_reward_in(s, fallback_));
  for (const auto& [h, d] : entries_) {
    if (h.ends_in_percept())
      throw Error(ErrorCode::WrongParity, "table environment keys must be empty or end in an action");
    if (h.num_actions() > horizon_)
      throw Error(ErrorCode::BadParams, "entry '" + format_history(s, h) + "' lies past the horizon");
    if (d.size() != n) throw Error(ErrorCode::CarrierMismatch, "table entry has wrong carrier");
    table_.insert_or_assign(h.key(), d);
    per_step[h.num_actions()] = max(per_step[h.num_actions()], max_abs_reward_in(s, d));
  }
  const bool halved = fault::active() == fault::Defect::TailBoundHalved;
  tail_.assign(horizon_ + 2, Rational(0));
  for (std::size_t t = horizon_ + 1; t-- > 0;)
    tail_[t] = tail_[t + 1] + per_step[t];
  for (auto& b : tail_) b = halve_if_defective(b, halved);
}

Dist FiniteHorizonTableEnv::perceive_unchecked(const History& h) const {
  if (h.num_actions() > horizon_) return padding_;
  auto it = table_.find(h.key());
  return it == table_.end() ? fallback_ : it->second;
}

std::optional<Rational> FiniteHorizonTableEnv::tail_bound(std::size_t t) const {
  return t < tail_.size() ? tail_[t] : Rational(0);
}

json FiniteHorizonTableEnv::descriptor() const {
  json entries = json::object();
  for (const auto& [h, d] : entries_)
    entries[format_history(spaces(), h)] = percept_dist_to_json(spaces(), d);
  json j = {{"type", "table"}, {"horizon", horizon_}, {"entries", entries}};
  if (explicit_fallback_) j["default"] = percept_dist_to_json(spaces(), fallback_);
  if (explicit_padding_) j["padding"] = percept_dist_to_json(spaces(), padding_);
  return j;
}

// --- random finite-horizon

RandomTableEnv::RandomTableEnv(SpacesPtr spaces, std::size_t horizon, std::uint64_t seed,
                               std::uint32_t denominator)
    : Environment(std::move(spaces)),
      horizon_(horizon),
      seed_(seed),
      denominator_(denominator),
      halved_(fault::active() == fault::Defect::TailBoundHalved) {
  (void)this->spaces().zero_percept();
  if (denominator_ == 0) throw Error(ErrorCode::BadParams, "denominator must be positive");
  for (const auto& r : this->spaces().rewards()) max_abs_reward_ = max(max_abs_reward_, r.abs());
}

Dist RandomTableEnv::perceive_unchecked(const History& h) const {
  const std::size_t n = spaces().num_percepts();
  if (h.num_actions() > horizon_) return Dist::point(n, spaces().zero_percept().index);
  SplitMix64 rng(hash_combine(seed_ ^ 0x5EEDE7ULL, h.key()));
  return Dist::make(random_masses(rng, n, denominator_));
}

std::optional<Rational> RandomTableEnv::tail_bound(std::size_t t) const {
  if (t > horizon_) return Rational(0);
  return halve_if_defective(max_abs_reward_ * Rational(static_cast<long>(horizon_ + 1 - t)), halved_);
}

json RandomTableEnv::descriptor() const {
  return {{"type", "random"}, {"horizon", horizon_}, {"seed", seed_}, {"denominator", denominator_}};
}

// --- terminating

TerminatingEnv::TerminatingEnv(SpacesPtr spaces, Rational gamma, std::size_t halt_observation,
                               Dist initial, std::vector<Dist> after_action)
    : Environment(std::move(spaces)),
      gamma_(std::move(gamma)),
      halt_obs_(halt_observation),
      initial_(std::move(initial)),
      after_(std::move(after_action)),
      halved_(fault::active() == fault::Defect::TailBoundHalved) {
  const Spaces& s = this->spaces();
  if (gamma_ <= Rational(0) || gamma_ >= Rational(1))
    throw Error(ErrorCode::BadParams, "gamma must lie strictly between 0 and 1");
  auto zero = s.find_reward(Rational(0));
  if (!zero) throw Error(ErrorCode::BadParams, "terminating environments need reward 0");
  halt_ = s.percept(halt_obs_, *zero);
  if (after_.size() != s.num_actions())
    throw Error(ErrorCode::LengthMismatch, "need one percept rule per action");
  auto check = [&](const Dist& d) {
    if (d.size() != s.num_percepts()) throw Error(ErrorCode::CarrierMismatch, "percept rule has wrong carrier");
    for (std::size_t i = 0; i < d.size(); ++i)
      if (!d[i].is_zero() && s.observation_of(PerceptId{static_cast<std::uint16_t>(i)}) == halt_obs_)
        throw Error(ErrorCode::BadParams, "percept rules may not emit the halt observation");
  };
  check(initial_);
  for (const auto& d : after_) check(d);
}

Dist TerminatingEnv::perceive_unchecked(const History& h) const {
  const Spaces& s = spaces();
  if (h.empty()) return initial_;
  for (std::size_t i = 0; i < h.num_percepts(); ++i)
    if (s.observation_of(h.percept(i)) == halt_obs_) return Dist::point(s.num_percepts(), halt_.index);
  const Dist& live = after_[h.last_action().index];
  std::vector<Rational> m(s.num_percepts());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = gamma_ * live[i];
  m[halt_.index] += Rational(1) - gamma_;
  return Dist::make(std::move(m));
}

std::optional<Rational> TerminatingEnv::tail_bound(std::size_t t) const {
  return halve_if_defective(gamma_.pow(t) / (Rational(1) - gamma_), halved_);
}

json TerminatingEnv::descriptor() const {
  json after = json::object();
  for (std::size_t a = 0; a < after_.size(); ++a)
    after[spaces().actions()[a]] = percept_dist_to_json(spaces(), after_[a]);
  return {{"type", "terminating"},
          {"gamma", gamma_.str()},
          {"halt", spaces().observations()[halt_obs_]},
          {"initial", percept_dist_to_json(spaces(), initial_)},
          {"after", after}};
}

// --- factory

namespace {

const json& require(const json& params, const char* field) {
  if (!params.is_object() || !params.contains(field))
    throw Error(ErrorCode::BadParams, std::string("missing parameter '") + field + "'");
  return params.at(field);
}

std::size_t require_count(const json& params, const char* field) {
  const json& v = require(params, field);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long>() >= 0))
    throw Error(ErrorCode::BadParams, std::string("'") + field + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

}  // namespace

EnvPtr builtin_env(const SpacesPtr& spaces, const std::string& family, const json& params) {
  try {
    if (family == "silent") return std::make_shared<SilentEnv>(spaces);
    if (family == "table") {
      std::vector<std::pair<History, Dist>> entries;
      if (params.contains("entries")) {
        const json& e = params.at("entries");
        if (!e.is_object()) throw Error(ErrorCode::BadParams, "'entries' must be an object");
        for (const auto& [key, dist] : e.items())
          entries.emplace_back(parse_history(*spaces, key), percept_dist_from_json(*spaces, dist));
      }
      std::optional<Dist> fallback, padding;
      if (params.contains("default")) fallback = percept_dist_from_json(*spaces, params.at("default"));
      if (params.contains("padding")) padding = percept_dist_from_json(*spaces, params.at("padding"));
      return std::make_shared<FiniteHorizonTableEnv>(spaces, require_count(params, "horizon"),
                                                     std::move(entries), std::move(fallback),
                                                     std::move(padding));
    }
    if (family == "random") {
      std::uint32_t den = 12;
      if (params.contains("denominator")) den = static_cast<std::uint32_t>(require_count(params, "denominator"));
      return std::make_shared<RandomTableEnv>(spaces, require_count(params, "horizon"),
                                              require_count(params, "seed"), den);
    }
    if (family == "terminating") {
      const json& halt = require(params, "halt");
      if (!halt.is_string()) throw Error(ErrorCode::BadParams, "'halt' must be an observation name");
      auto obs = spaces->find_observation(halt.get<std::string>());
      if (!obs) throw Error(ErrorCode::SymbolOutOfSpace, "unknown halt observation");
      Dist initial = percept_dist_from_json(*spaces, require(params, "initial"));
      const json& after = require(params, "after");
      if (!after.is_object()) throw Error(ErrorCode::BadParams, "'after' must map actions to rules");
      std::vector<Dist> rules;
      for (const auto& a : spaces->actions()) {
        if (!after.contains(a)) throw Error(ErrorCode::BadParams, "'after' lacks a rule for action " + a);
        rules.push_back(percept_dist_from_json(*spaces, after.at(a)));
      }
      if (after.size() != rules.size()) throw Error(ErrorCode::BadParams, "'after' names unknown actions");
      return std::make_shared<TerminatingEnv>(spaces, rational_from_json(require(params, "gamma")), *obs,
                                              std::move(initial), std::move(rules));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::BadParams) throw;
    throw Error(ErrorCode::BadParams, family + ": " + e.what());
  }
  throw Error(ErrorCode::UnknownFamily, "unknown environment family '" + family + "'");
}

// --- strong well-behavedness

SwbCertificate certify_strongly_well_behaved(const Environment& env, std::optional<std::size_t> horizon) {
  auto settled = env.value_horizon();
  if (!settled) throw Error(ErrorCode::NoFiniteHorizon, "environment has no finite value horizon");
  const Spaces& s = env.spaces();
  const std::size_t steps = std::max(*settled, horizon.value_or(0));

  SwbCertificate cert;
  cert.steps_checked = steps;
  History h;
  // Extreme of V_t over deterministic continuations from an environment node
  // at which `k` percepts have been emitted.
  std::function<Rational(std::size_t, std::size_t, bool)> extreme = [&](std::size_t k, std::size_t t,
                                                                        bool maximize) -> Rational {
    Dist d = env.perceive_unchecked(h);
    Rational total;
    for (std::size_t x = 0; x < d.size(); ++x) {
      if (d[x].is_zero()) continue;
      PerceptId px{static_cast<std::uint16_t>(x)};
      Rational inner = s.reward_of(px);
      if (k + 1 < t) {
        h.push(px);
        std::optional<Rational> best;
        for (std::size_t y = 0; y < s.num_actions(); ++y) {
          h.push(ActionId{static_cast<std::uint16_t>(y)});
          Rational v = extreme(k + 1, t, maximize);
          h.pop();
          if (!best || (maximize ? v > *best : v < *best)) best = v;
        }
        h.pop();
        inner += *best;
      }
      total += d[x] * inner;
    }
    return total;
  };

  cert.strongly_well_behaved = true;
  for (std::size_t t = 1; t <= steps; ++t) {
    Rational hi = extreme(0, t, true);
    Rational lo = extreme(0, t, false);
    cert.max_value = max(cert.max_value, hi);
    cert.min_value = min(cert.min_value, lo);
    if ((hi > Rational(1) || lo < Rational(-1)) && !cert.violating_step) {
      cert.strongly_well_behaved = false;
      cert.violating_step = t;
    }
  }
  return cert;
}

}  // namespace agentmix
