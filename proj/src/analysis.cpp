#include "agentmix/analysis.hpp"

#include <algorithm>
#include <functional>

#include "agentmix/random.hpp"

namespace agentmix {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
    case Verdict::Error: return "error";
  }
  return "?";
}

void CheckReport::fail(Counterexample c) {
  if (verdict == Verdict::Fail) return;  // keep the first witness
  verdict = Verdict::Fail;
  counterexample = std::move(c);
}

ojson to_json(const CheckReport& r) {
  ojson j;
  j["check"] = r.check_name;
  j["verdict"] = to_string(r.verdict);
  j["depth"] = r.depth;
  if (r.counterexample) {
    const auto& c = *r.counterexample;
    ojson cj;
    cj["what"] = c.what;
    cj["history"] = c.history;
    if (!c.subject.empty()) cj["subject"] = c.subject;
    cj["lhs"] = c.lhs.str();
    cj["rhs"] = c.rhs.str();
    cj["lhs_decimal"] = c.lhs.decimal();
    cj["rhs_decimal"] = c.rhs.decimal();
    j["counterexample"] = std::move(cj);
  }
  if (!r.notes.empty()) j["notes"] = r.notes;
  if (!r.details.empty()) j["details"] = r.details;
  return j;
}

ValueRange ValueRange::hull(const std::vector<Rational>& values) {
  if (values.empty()) throw Error(ErrorCode::BadParams, "value range of an empty sample");
  ValueRange r{values.front(), values.front()};
  for (const auto& v : values) {
    r.lo = min(r.lo, v);
    r.hi = max(r.hi, v);
  }
  return r;
}

namespace {

void charge(std::size_t& nodes, const EvalOptions& options) {
  if (++nodes > options.max_nodes)
    throw Error(ErrorCode::DepthOverflow, "exceeded the node budget of " + std::to_string(options.max_nodes));
}

bool all_zero(const std::vector<Rational>& v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& x) { return x.is_zero(); });
}

Rational dot(const std::vector<Rational>& w, const std::vector<Rational>& v) {
  Rational s;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * v[i];
  return s;
}

// Nonnegative masses summing to exactly 1.
bool proper(const Dist& d) {
  for (const auto& m : d.masses())
    if (m.sign() < 0) return false;
  return d.total() == Rational(1);
}

ojson rationals(const std::vector<Rational>& v) {
  ojson a = ojson::array();
  for (const auto& x : v) a.push_back(x.str());
  return a;
}

std::vector<Rational> prefix_sums(const std::vector<Rational>& per_step) {
  // per_step[k] is the expected reward of percept k (k >= 1).
  std::vector<Rational> v(per_step.size());
  for (std::size_t k = 1; k < per_step.size(); ++k) v[k] = v[k - 1] + per_step[k];
  return v;
}

std::string describe(const Agent& a) { return a.descriptor().dump(); }

void require_finite(const WeightedMeasure& m, std::size_t depth) {
  if (!m.tail_bound(depth).is_zero())
    throw Error(ErrorCode::NotFiniteHorizon,
                "measure tail bound at t=" + std::to_string(depth) + " is " + m.tail_bound(depth).str());
}

void require_finite(const Environment& env, std::size_t depth) {
  auto b = env.tail_bound(depth);
  if (!b) throw Error(ErrorCode::NoTailBound, "environment has no tail bound");
  if (!b->is_zero())
    throw Error(ErrorCode::NotFiniteHorizon,
                "environment tail bound at t=" + std::to_string(depth) + " is " + b->str());
}

}  // namespace

// --- mixture agent laws

CheckReport check_mixture_laws(const WeightVector& w, const AgentVector& agents, const Environment& env,
                               std::size_t depth, const EvalOptions& options) {
  CheckReport r;
  r.check_name = "mixture_laws";
  r.depth = depth;
  AgentPtr mix = mix_agents(w, agents);
  const Spaces& s = env.spaces();
  const std::size_t n = agents.size();
  const std::size_t max_len = 2 * depth;
  const Rational fallback(1, static_cast<long>(s.num_actions()));
  std::vector<Rational> step_mix(depth + 1);
  std::vector<std::vector<Rational>> step_comp(n, std::vector<Rational>(depth + 1));
  std::size_t nodes = 0;
  History h;
  bool failed = false;
  auto fail = [&](std::string what, const Rational& lhs, const Rational& rhs) {
    r.fail({std::move(what), format_history(s, h), "", lhs, rhs});
    failed = true;
  };

  // pm = P^{w.pi}(h), pi = P^{pi_i}(h), jm / ji the joint probabilities.
  std::function<void(const Rational&, const std::vector<Rational>&, const Rational&, const std::vector<Rational>&)>
      walk = [&](const Rational& pm, const std::vector<Rational>& pi, const Rational& jm,
                 const std::vector<Rational>& ji) {
        charge(nodes, options);
        Rational rhs = w.dot(pi);
        if (pm != rhs) return fail("P^{w.pi}(h) = w.P^pi(h)", pm, rhs);
        rhs = w.dot(ji);
        if (jm != rhs) return fail("P^{w.pi}_mu(h) = w.P^pi_mu(h)", jm, rhs);
        const bool dead = pm.is_zero() && all_zero(pi);
        if (h.size() >= max_len) return;
        if (h.ends_in_percept()) {
          Dist d = mix->act_unchecked(h);
          if (!proper(d)) return fail("mixture emits a probability distribution", d.total(), Rational(1));
          std::vector<Dist> comp(n);
          for (std::size_t i = 0; i < n; ++i) comp[i] = agents[i]->act_unchecked(h);
          const Rational denom = w.dot(pi);
          for (std::size_t y = 0; y < s.num_actions(); ++y) {
            Rational expected = fallback;
            if (!denom.is_zero()) {
              Rational num;
              for (std::size_t i = 0; i < n; ++i) num += w[i] * pi[i] * comp[i][y];
              expected = num / denom;
            }
            if (d[y] != expected)
              return fail(denom.is_zero() ? "mixture fallback is uniform where w.P^pi(h) = 0"
                                          : "mixture action probability is the Bayes ratio",
                          d[y], expected);
          }
          if (dead) return;
          std::vector<Rational> cpi(n), cji(n);
          for (std::size_t y = 0; y < s.num_actions(); ++y) {
            for (std::size_t i = 0; i < n; ++i) {
              cpi[i] = pi[i] * comp[i][y];
              cji[i] = ji[i] * comp[i][y];
            }
            h.push(ActionId{static_cast<std::uint16_t>(y)});
            walk(pm * d[y], cpi, jm * d[y], cji);
            h.pop();
            if (failed) return;
          }
        } else {
          // Not pruned here even when dead: the percept children are where
          // the mixture's fallback clause gets exercised.
          Dist e = env.perceive_unchecked(h);
          const std::size_t k = h.num_percepts() + 1;
          std::vector<Rational> cji(n);
          for (std::size_t x = 0; x < s.num_percepts(); ++x) {
            const PerceptId px{static_cast<std::uint16_t>(x)};
            const Rational& rew = s.reward_of(px);
            Rational cjm = jm * e[x];
            for (std::size_t i = 0; i < n; ++i) cji[i] = ji[i] * e[x];
            if (!rew.is_zero()) {
              step_mix[k] += cjm * rew;
              for (std::size_t i = 0; i < n; ++i) step_comp[i][k] += cji[i] * rew;
            }
            h.push(px);
            walk(pm, pi, cjm, cji);
            h.pop();
            if (failed) return;
          }
        }
      };
  walk(Rational(1), std::vector<Rational>(n, Rational(1)), Rational(1), std::vector<Rational>(n, Rational(1)));
  r.details["histories_checked"] = nodes;
  if (failed) return r;

  h = History();
  std::vector<Rational> v_mix = prefix_sums(step_mix);
  std::vector<std::vector<Rational>> v_comp(n);
  for (std::size_t i = 0; i < n; ++i) v_comp[i] = prefix_sums(step_comp[i]);
  std::vector<Rational> column(n);
  for (std::size_t t = 1; t <= depth; ++t) {
    for (std::size_t i = 0; i < n; ++i) column[i] = v_comp[i][t];
    Rational rhs = w.dot(column);
    if (v_mix[t] != rhs) {
      r.fail({"V^{w.pi}_{mu,t} = w.V^pi_{mu,t} at t=" + std::to_string(t), "", "", v_mix[t], rhs});
      return r;
    }
  }
  if (depth > 0) {
    Rational direct = value_at(*mix, env, depth, options);
    if (direct != v_mix[depth])
      r.fail({"value_at agrees with the enumerated sum at t=" + std::to_string(depth), "", "", direct,
              v_mix[depth]});
  }
  r.details["values"] = rationals(std::vector<Rational>(v_mix.begin() + (depth > 0 ? 1 : 0), v_mix.end()));
  return r;
}

// --- environment mixture laws

CheckReport check_envmix_laws(const EnvWeightVector& w, const std::vector<EnvPtr>& envs, const Agent& agent,
                              std::size_t depth, const EvalOptions& options) {
  CheckReport r;
  r.check_name = "envmix_laws";
  r.depth = depth;
  EnvPtr mix = mix_envs(w, envs);
  const Spaces& s = agent.spaces();
  std::vector<EnvPtr> comps = envs;
  std::vector<Rational> ws = w.weights();
  if (w.silent_tail().sign() > 0) {
    comps.push_back(std::make_shared<SilentEnv>(agent.spaces_ptr()));
    ws.push_back(w.silent_tail());
  }
  const std::size_t n = comps.size();
  const std::size_t max_len = 2 * depth;
  const Rational fallback(1, static_cast<long>(s.num_percepts()));
  std::vector<Rational> step_mix(depth + 1);
  std::vector<std::vector<Rational>> step_comp(n, std::vector<Rational>(depth + 1));
  std::size_t nodes = 0;
  History h;
  bool failed = false;
  auto fail = [&](std::string what, const Rational& lhs, const Rational& rhs) {
    r.fail({std::move(what), format_history(s, h), "", lhs, rhs});
    failed = true;
  };

  std::function<void(const Rational&, const std::vector<Rational>&, const Rational&, const std::vector<Rational>&)>
      walk = [&](const Rational& pm, const std::vector<Rational>& pe, const Rational& jm,
                 const std::vector<Rational>& je) {
        charge(nodes, options);
        Rational rhs = dot(ws, pe);
        if (pm != rhs) return fail("P_{w.mu}(h) = w.P_mu(h)", pm, rhs);
        rhs = dot(ws, je);
        if (jm != rhs) return fail("P^pi_{w.mu}(h) = w.P^pi_mu(h)", jm, rhs);
        const bool dead = pm.is_zero() && all_zero(pe);
        if (h.size() >= max_len) return;
        if (h.ends_in_percept()) {
          Dist a = agent.act_unchecked(h);
          std::vector<Rational> cje(n);
          for (std::size_t y = 0; y < s.num_actions(); ++y) {
            for (std::size_t i = 0; i < n; ++i) cje[i] = je[i] * a[y];
            h.push(ActionId{static_cast<std::uint16_t>(y)});
            walk(pm, pe, jm * a[y], cje);
            h.pop();
            if (failed) return;
          }
        } else {
          Dist d = mix->perceive_unchecked(h);
          if (!proper(d)) return fail("mixture environment emits a probability distribution", d.total(), Rational(1));
          std::vector<Dist> comp(n);
          for (std::size_t i = 0; i < n; ++i) comp[i] = comps[i]->perceive_unchecked(h);
          const Rational denom = dot(ws, pe);
          for (std::size_t x = 0; x < s.num_percepts(); ++x) {
            Rational expected = fallback;
            if (!denom.is_zero()) {
              Rational num;
              for (std::size_t i = 0; i < n; ++i) num += ws[i] * pe[i] * comp[i][x];
              expected = num / denom;
            }
            if (d[x] != expected)
              return fail(denom.is_zero() ? "mixture environment fallback is uniform where w.P_mu(h) = 0"
                                          : "mixture percept probability is the Bayes ratio",
                          d[x], expected);
          }
          if (dead) return;
          const std::size_t k = h.num_percepts() + 1;
          std::vector<Rational> cpe(n), cje(n);
          for (std::size_t x = 0; x < s.num_percepts(); ++x) {
            const PerceptId px{static_cast<std::uint16_t>(x)};
            const Rational& rew = s.reward_of(px);
            for (std::size_t i = 0; i < n; ++i) {
              cpe[i] = pe[i] * comp[i][x];
              cje[i] = je[i] * comp[i][x];
            }
            Rational cjm = jm * d[x];
            if (!rew.is_zero()) {
              step_mix[k] += cjm * rew;
              for (std::size_t i = 0; i < n; ++i) step_comp[i][k] += cje[i] * rew;
            }
            h.push(px);
            walk(pm * d[x], cpe, cjm, cje);
            h.pop();
            if (failed) return;
          }
        }
      };
  walk(Rational(1), std::vector<Rational>(n, Rational(1)), Rational(1), std::vector<Rational>(n, Rational(1)));
  r.details["histories_checked"] = nodes;
  if (failed) return r;

  std::vector<Rational> v_mix = prefix_sums(step_mix);
  std::vector<std::vector<Rational>> v_comp(n);
  for (std::size_t i = 0; i < n; ++i) v_comp[i] = prefix_sums(step_comp[i]);
  std::vector<Rational> column(n);
  for (std::size_t t = 1; t <= depth; ++t) {
    for (std::size_t i = 0; i < n; ++i) column[i] = v_comp[i][t];
    Rational rhs = dot(ws, column);
    if (v_mix[t] != rhs) {
      r.fail({"V^pi_{w.mu,t} = w.V^pi_{mu,t} at t=" + std::to_string(t), "", "", v_mix[t], rhs});
      return r;
    }
  }
  if (depth > 0) {
    Rational direct = value_at(agent, *mix, depth, options);
    if (direct != v_mix[depth])
      r.fail({"value_at agrees with the enumerated sum at t=" + std::to_string(depth), "", "", direct,
              v_mix[depth]});
  }
  return r;
}

// --- factorization

CheckReport check_factorization(const Agent& agent, const Environment& env, std::size_t depth,
                                const EvalOptions& options) {
  CheckReport r;
  r.check_name = "factorization";
  r.depth = depth;
  const Spaces& s = agent.spaces();
  const std::size_t max_len = 2 * depth;
  std::vector<Rational> mass(depth + 1);
  std::size_t nodes = 0;
  History h;
  bool failed = false;
  auto fail = [&](std::string what, const Rational& lhs, const Rational& rhs) {
    r.fail({std::move(what), format_history(s, h), "", lhs, rhs});
    failed = true;
  };

  std::function<void(const Rational&, const Rational&, const Rational&)> walk =
      [&](const Rational& pa, const Rational& pe, const Rational& pj) {
        charge(nodes, options);
        Rational prod = pa * pe;
        if (pj != prod) return fail("P^pi_mu(h) = P^pi(h) P_mu(h)", pj, prod);
        if (!h.empty() && !h.ends_in_percept()) mass[h.num_actions()] += pj;
        // Once the joint vanishes one factor is zero and stays zero below.
        if (pj.is_zero()) return;
        if (h.size() >= max_len) {
          // Leaves also exercise the standalone recursions.
          Rational a = agent_prob(agent, h), e = env_prob(env, h), j = joint_prob(agent, env, h);
          if (a != pa) return fail("agent_prob matches the incremental recursion", a, pa);
          if (e != pe) return fail("env_prob matches the incremental recursion", e, pe);
          if (j != pj) return fail("joint_prob matches the incremental recursion", j, pj);
          return;
        }
        if (h.ends_in_percept()) {
          Dist a = agent.act_unchecked(h);
          for (std::size_t y = 0; y < s.num_actions(); ++y) {
            h.push(ActionId{static_cast<std::uint16_t>(y)});
            walk(pa * a[y], pe, pj * a[y]);
            h.pop();
            if (failed) return;
          }
        } else {
          Dist e = env.perceive_unchecked(h);
          for (std::size_t x = 0; x < s.num_percepts(); ++x) {
            h.push(PerceptId{static_cast<std::uint16_t>(x)});
            walk(pa, pe * e[x], pj * e[x]);
            h.pop();
            if (failed) return;
          }
        }
      };
  walk(Rational(1), Rational(1), Rational(1));
  r.details["histories_checked"] = nodes;
  if (failed) return r;
  h = History();
  for (std::size_t t = 1; t <= depth; ++t)
    if (mass[t] != Rational(1)) {
      r.fail({"P^pi_mu sums to 1 over histories with " + std::to_string(t) + " actions", "", "", mass[t],
              Rational(1)});
      break;
    }
  return r;
}

// --- duality

CheckReport check_duality(const AgentPtr& agent, const WeightVector& copies, std::size_t depth,
                          const EvalOptions& options) {
  CheckReport r;
  r.check_name = "duality";
  r.depth = depth;
  const Spaces& s = agent->spaces();
  AgentPtr dual = dual_agent(agent);
  AgentPtr double_dual = dual_agent(dual);
  const std::size_t max_len = 2 * depth;
  std::size_t nodes = 0;
  History h, hbar;
  bool failed = false;
  auto fail = [&](std::string what, const Rational& lhs, const Rational& rhs) {
    r.fail({std::move(what), format_history(s, h), describe(*agent), lhs, rhs});
    failed = true;
  };

  // p = P^pi(h-bar), q = P^{pi-bar}(h); h-bar is built alongside h by
  // negating each percept as it is pushed.
  std::function<void(const Rational&, const Rational&)> walk = [&](const Rational& p, const Rational& q) {
    charge(nodes, options);
    if (dual_history(s, h) != hbar) return fail("dual_history negates every reward", Rational(0), Rational(1));
    if (dual_history(s, hbar) != h) return fail("dual_history is an involution", Rational(0), Rational(1));
    if (p != q) return fail("P^pi(h-bar) = P^{pi-bar}(h)", p, q);
    if (h.ends_in_percept()) {
      Dist a = agent->act_unchecked(h);
      Dist aa = double_dual->act_unchecked(h);
      for (std::size_t y = 0; y < a.size(); ++y)
        if (a[y] != aa[y]) return fail("dual(dual(pi)) acts like pi at " + s.actions()[y], aa[y], a[y]);
    }
    if (p.is_zero() || h.size() >= max_len) return;
    if (h.ends_in_percept()) {
      Dist a = agent->act_unchecked(hbar);
      Dist b = dual->act_unchecked(h);
      for (std::size_t y = 0; y < s.num_actions(); ++y) {
        ActionId ay{static_cast<std::uint16_t>(y)};
        h.push(ay);
        hbar.push(ay);
        walk(p * a[y], q * b[y]);
        h.pop();
        hbar.pop();
        if (failed) return;
      }
    } else {
      for (std::size_t x = 0; x < s.num_percepts(); ++x) {
        PerceptId px{static_cast<std::uint16_t>(x)};
        h.push(px);
        hbar.push(s.negate(px));
        walk(p, q);
        h.pop();
        hbar.pop();
        if (failed) return;
      }
    }
  };
  walk(Rational(1), Rational(1));
  r.details["histories_checked"] = nodes;
  if (failed) return r;

  auto from_verdict = [&](const TruncatedVerdict& v, const std::string& what) {
    if (v.holds) return true;
    r.fail({what + " (" + v.reason + ")", v.witness ? format_history(s, *v.witness) : "", describe(*agent),
            v.lhs.value_or(Rational(0)), v.rhs.value_or(Rational(0))});
    return false;
  };
  if (!from_verdict(self_dual_up_to(symmetrize(agent), depth, options), "symmetrize(pi) is self-dual")) return r;
  AgentPtr many = mix_agents(copies, AgentVector(copies.size(), agent));
  from_verdict(equivalent_up_to(*agent, *many, depth, options), "pi == w.(pi,...,pi)");
  return r;
}

CheckReport check_env_duality(const AgentPtr& agent, const EnvPtr& env, std::size_t depth,
                              const EvalOptions& options) {
  CheckReport r;
  r.check_name = "env_duality";
  r.depth = depth;
  const Spaces& s = env->spaces();
  EnvPtr denv = env_dual(env);
  AgentPtr dagent = dual_agent(agent);
  ojson values = ojson::array();
  for (std::size_t t = 1; t <= depth; ++t) {
    Rational v = value_at(*agent, *env, t, options);
    Rational vd = value_at(*dagent, *denv, t, options);
    values.push_back({{"t", t}, {"value", v.str()}, {"dual_value", vd.str()}});
    if (vd != -v) {
      r.fail({"V^{pi-bar}_{env_dual(mu),t} = -V^pi_{mu,t} at t=" + std::to_string(t), "", describe(*agent), vd,
              -v});
      r.details["values"] = values;
      return r;
    }
  }
  r.details["values"] = values;

  EnvPtr back = env_dual(denv);
  std::size_t nodes = 0;
  History h;
  std::function<bool()> walk = [&]() -> bool {
    charge(nodes, options);
    if (h.size() >= 2 * depth) return true;
    if (h.ends_in_percept()) {
      for (std::size_t y = 0; y < s.num_actions(); ++y) {
        h.push(ActionId{static_cast<std::uint16_t>(y)});
        bool ok = walk();
        h.pop();
        if (!ok) return false;
      }
      return true;
    }
    Dist a = env->perceive_unchecked(h);
    Dist b = back->perceive_unchecked(h);
    for (std::size_t x = 0; x < a.size(); ++x)
      if (a[x] != b[x]) {
        r.fail({"env_dual(env_dual(mu)) perceives like mu", format_history(s, h), "", b[x], a[x]});
        return false;
      }
    for (std::size_t x = 0; x < s.num_percepts(); ++x) {
      h.push(PerceptId{static_cast<std::uint16_t>(x)});
      bool ok = walk();
      h.pop();
      if (!ok) return false;
    }
    return true;
  };
  walk();
  return r;
}

// --- patches

CheckReport check_patch_lemmas(const AgentPtr& agent, const PatchSpec& patch, std::size_t depth,
                               const EvalOptions& options) {
  CheckReport r;
  r.check_name = "patch_lemmas";
  r.depth = depth;
  const Spaces& s = agent->spaces();
  AgentPtr patched = patch_agent(agent, patch);
  const History& site = patch.site;
  const Dist& m = patch.replacement;
  const Rational p_site = agent_prob(*agent, site);
  const Dist at_site = agent->act_unchecked(site);
  const std::size_t max_len = 2 * depth;
  std::size_t nodes = 0;
  History h;
  bool failed = false;
  auto fail = [&](std::string what, const Rational& lhs, const Rational& rhs) {
    r.fail({std::move(what), format_history(s, h), describe(*agent), lhs, rhs});
    failed = true;
  };

  // pp = P^{patched}(h), pa = P^pi(h).
  std::function<void(const Rational&, const Rational&)> walk = [&](const Rational& pp, const Rational& pa) {
    charge(nodes, options);
    const bool below = h.size() > site.size() && h.starts_with(site);
    if (!below) {
      if (pp != pa) return fail("P^{pi^{h->m}}(g) = P^pi(g) when g does not extend the site", pp, pa);
    } else {
      const std::size_t y = h.items()[site.size()];
      if (h.size() == site.size() + 1) {
        Rational rhs = p_site * m[y];
        if (pp != rhs) return fail("P^{pi^{h->m}}(h y) = P^pi(h) m(y)", pp, rhs);
      }
      if (!at_site[y].is_zero()) {
        Rational rhs = pa * m[y] / at_site[y];
        if (pp != rhs) return fail("P^{pi^{h->m}}(g) = P^pi(g) m(y) / pi(y|h) below h y", pp, rhs);
      }
    }
    if ((pp.is_zero() && pa.is_zero()) || h.size() >= max_len) return;
    if (h.ends_in_percept()) {
      Dist a = agent->act_unchecked(h);
      Dist b = patched->act_unchecked(h);
      for (std::size_t y = 0; y < s.num_actions(); ++y) {
        h.push(ActionId{static_cast<std::uint16_t>(y)});
        walk(pp * b[y], pa * a[y]);
        h.pop();
        if (failed) return;
      }
    } else {
      for (std::size_t x = 0; x < s.num_percepts(); ++x) {
        h.push(PerceptId{static_cast<std::uint16_t>(x)});
        walk(pp, pa);
        h.pop();
        if (failed) return;
      }
    }
  };
  walk(Rational(1), Rational(1));
  r.details["histories_checked"] = nodes;
  return r;
}

// --- tails and the universal environment

CheckReport check_tail_bound(const Agent& agent, const Environment& env, std::size_t t_max,
                             const EvalOptions& options) {
  CheckReport r;
  r.check_name = "tail_bound";
  r.depth = t_max;
  if (!env.has_tail_bound()) throw Error(ErrorCode::NoTailBound, "environment has no tail bound");
  std::vector<Rational> v(t_max + 1);
  for (std::size_t t = 1; t <= t_max; ++t) v[t] = value_at(agent, env, t, options);
  for (std::size_t t = 0; t <= t_max; ++t) {
    const Rational b = *env.tail_bound(t);
    if (b.sign() < 0) {
      r.fail({"b(" + std::to_string(t) + ") >= 0", "", describe(agent), b, Rational(0)});
      return r;
    }
    if (t > 0 && b > *env.tail_bound(t - 1)) {
      r.fail({"b is non-increasing at t=" + std::to_string(t), "", describe(agent), b, *env.tail_bound(t - 1)});
      return r;
    }
    for (std::size_t u = t + 1; u <= t_max; ++u) {
      Rational gap = (v[u] - v[t]).abs();
      if (gap > b) {
        r.fail({"|V_" + std::to_string(u) + " - V_" + std::to_string(t) + "| <= b(" + std::to_string(t) + ")", "",
                describe(agent), gap, b});
        return r;
      }
    }
  }
  r.details["values"] = rationals(std::vector<Rational>(v.begin() + (t_max > 0 ? 1 : 0), v.end()));
  return r;
}

CheckReport check_universal_env(const WeightedMeasure& measure, const AgentVector& battery, std::size_t depth,
                                const EvalOptions& options) {
  CheckReport r;
  r.check_name = "universal";
  r.depth = depth;
  EnvPtr mu = universal_env(measure);
  for (std::size_t t = 0; t <= depth; ++t) {
    Rational b = *mu->tail_bound(t), expect = measure.tail_bound(t);
    if (b != expect) {
      r.fail({"tail bound of mu_Y equals the measure tail at t=" + std::to_string(t), "", "", b, expect});
      return r;
    }
  }
  ojson values = ojson::array();
  for (const auto& a : battery) {
    Rational lhs = value_at(*a, *mu, depth, options);
    Rational rhs = upsilon(measure, *a, depth, options).value;
    values.push_back(lhs.str());
    if (lhs != rhs) {
      r.fail({"V^pi_{mu_Y,T} = Y_T(pi)", "", describe(*a), lhs, rhs});
      break;
    }
  }
  r.details["values"] = values;
  return r;
}

// --- symmetry

CheckReport check_symmetry(const WeightedMeasure& measure, const AgentVector& battery, std::size_t depth,
                           const EvalOptions& options) {
  require_finite(measure, depth);
  CheckReport r;
  r.check_name = "symmetry";
  r.depth = depth;

  std::optional<Counterexample> strong_witness;
  for (const auto& a : battery) {
    Rational u = upsilon(measure, *a, depth, options).value;
    Rational ud = upsilon(measure, *dual_agent(a), depth, options).value;
    if (ud != -u) {
      strong_witness = Counterexample{"Y(pi-bar) = -Y(pi)", "", describe(*a), ud, -u};
      break;
    }
  }

  std::optional<Counterexample> weak_witness;
  std::size_t self_dual_tested = 0;
  AgentVector candidates;
  for (const auto& a : battery)
    if (self_dual_up_to(a, depth, options).holds) candidates.push_back(a);
  for (const auto& a : battery) {
    AgentPtr sym = symmetrize(a);
    if (!self_dual_up_to(sym, depth, options).holds) {
      // Would contradict the construction; treat as an implementation fault.
      r.verdict = Verdict::Error;
      r.notes.push_back("symmetrize produced an agent that is not self-dual: " + describe(*a));
      continue;
    }
    candidates.push_back(sym);
  }
  for (const auto& c : candidates) {
    ++self_dual_tested;
    Rational u = upsilon(measure, *c, depth, options).value;
    if (!u.is_zero()) {
      weak_witness = Counterexample{"Y(pi) = 0 for self-dual pi", "", describe(*c), u, Rational(0)};
      break;
    }
  }

  const bool weak = !weak_witness, strong = !strong_witness;
  auto side = [](bool holds, const std::optional<Counterexample>& w) {
    ojson j;
    j["holds"] = holds;
    if (w) j["witness"] = {{"subject", w->subject}, {"lhs", w->lhs.str()}, {"rhs", w->rhs.str()}};
    return j;
  };
  r.details["weak"] = side(weak, weak_witness);
  r.details["strong"] = side(strong, strong_witness);
  r.details["verdicts_agree"] = weak == strong;
  r.details["self_dual_candidates"] = self_dual_tested;
  r.notes.push_back("symmetry evaluated up to depth " + std::to_string(depth));
  if (r.verdict == Verdict::Error) return r;
  if (weak != strong) {
    r.verdict = Verdict::Error;
    r.notes.push_back("weak and strong symmetry verdicts disagree");
    r.counterexample = weak_witness ? weak_witness : strong_witness;
    return r;
  }
  if (!weak) r.fail(*weak_witness);
  if (!strong) {
    r.verdict = Verdict::Fail;
    if (!r.counterexample) r.counterexample = strong_witness;
  }
  return r;
}

// --- probes

CheckReport separability_probe(const Environment& env, const AgentVector& inside, const AgentVector& outside,
                               std::size_t depth, const EvalOptions& options) {
  require_finite(env, depth);
  CheckReport r;
  r.check_name = "separability";
  r.depth = depth;
  std::vector<Rational> vin = value_vector(inside, env, depth, options);
  std::vector<Rational> vout = value_vector(outside, env, depth, options);
  ValueRange a = ValueRange::hull(vin), b = ValueRange::hull(vout);
  r.details["inside"] = {{"lo", a.lo.str()}, {"hi", a.hi.str()}};
  r.details["outside"] = {{"lo", b.lo.str()}, {"hi", b.hi.str()}};
  if (a.disjoint(b)) {
    r.notes.push_back("value ranges are disjoint: consistent with separability");
    return r;
  }
  // Overlap: exhibit an inside agent whose value lies in the outside range,
  // or vice versa.
  for (std::size_t i = 0; i < inside.size(); ++i)
    if (b.contains(vin[i])) {
      r.fail({"inside value lies in the outside range", "", describe(*inside[i]), vin[i], b.lo});
      break;
    }
  if (r.passed())
    for (std::size_t j = 0; j < outside.size(); ++j)
      if (a.contains(vout[j])) {
        r.fail({"outside value lies in the inside range", "", describe(*outside[j]), vout[j], a.lo});
        break;
      }
  r.notes.push_back("value ranges overlap: separability refuted for this environment");
  return r;
}

Membership value_threshold(EnvPtr env, std::size_t t, const std::string& op, Rational threshold,
                           EvalOptions options) {
  if (op != ">=" && op != ">" && op != "<=" && op != "<")
    throw Error(ErrorCode::BadParams, "unknown comparison '" + op + "'");
  Membership m;
  m.description = "V_" + std::to_string(t) + " " + op + " " + threshold.str();
  m.test = [env = std::move(env), t, op, threshold = std::move(threshold), options](const Agent& a) {
    Rational v = value_at(a, *env, t, options);
    bool in = op == ">=" ? v >= threshold : op == ">" ? v > threshold : op == "<=" ? v <= threshold : v < threshold;
    return MembershipResult{in, v, threshold};
  };
  return m;
}

CheckReport closure_probe(const AgentVector& members, const Membership& membership, std::size_t trials,
                          std::uint64_t seed, std::uint32_t denominator) {
  CheckReport r;
  r.check_name = "closure";
  if (members.empty()) throw Error(ErrorCode::BadParams, "closure probe needs at least one member");
  std::size_t tested = 0;
  auto try_mix = [&](const std::vector<Rational>& ws, const std::vector<std::size_t>& idx) {
    AgentVector parts;
    for (auto i : idx) parts.push_back(members[i]);
    AgentPtr m = mix_agents(WeightVector::make(ws), parts);
    ++tested;
    MembershipResult res = membership.test(*m);
    if (res.member) return true;
    std::string subject = "weights (";
    for (std::size_t k = 0; k < ws.size(); ++k) subject += (k ? "," : "") + ws[k].str();
    subject += ") over members [";
    for (std::size_t k = 0; k < idx.size(); ++k) subject += (k ? "," : "") + std::to_string(idx[k]);
    subject += "]";
    r.fail({"mixture stays in the set: " + membership.description, "", subject, res.value.value_or(Rational(0)),
            res.bound.value_or(Rational(0))});
    r.details["witness"] = m->descriptor();
    return false;
  };

  const std::vector<Rational> half{Rational(1, 2), Rational(1, 2)};
  bool ok = true;
  for (std::size_t i = 0; ok && i < members.size(); ++i)
    for (std::size_t j = i; ok && j < members.size(); ++j) ok = try_mix(half, {i, j});
  SplitMix64 rng(seed);
  for (std::size_t k = 0; ok && k < trials; ++k) {
    std::size_t n = 2 + rng.below(2);
    std::uint32_t d = std::max<std::uint32_t>(denominator, static_cast<std::uint32_t>(n));
    std::vector<std::size_t> idx(n);
    for (auto& i : idx) i = rng.below(members.size());
    ok = try_mix(random_positive_weights(rng, n, d), idx);
  }
  r.details["mixtures_tested"] = tested;
  r.notes.push_back("membership: " + membership.description);
  if (ok) r.notes.push_back("no mixture left the set: consistent with closure");
  return r;
}

CheckReport extrema_probe(const WeightedMeasure& measure, const AgentPtr& agent, const History& site,
                          const Rational& eps, std::size_t depth, const EvalOptions& options) {
  require_finite(measure, depth);
  const Spaces& s = agent->spaces();
  if (!site.ends_in_percept()) throw Error(ErrorCode::WrongParity, "perturbation site must end in a percept");
  if (site.num_percepts() > depth)
    throw Error(ErrorCode::BadParams, "perturbation site lies beyond depth " + std::to_string(depth));
  if (eps.sign() <= 0) throw Error(ErrorCode::BadParams, "eps must be positive");
  if (agent_prob(*agent, site).is_zero())
    throw Error(ErrorCode::SiteUnreachable, "P^pi(" + format_history(s, site) + ") = 0");
  Dist d = agent->act_unchecked(site);
  std::vector<std::size_t> open;
  for (std::size_t y = 0; y < d.size(); ++y)
    if (d[y].sign() > 0 && d[y] < Rational(1)) open.push_back(y);
  if (open.size() < 2)
    throw Error(ErrorCode::SiteDeterministic, "agent is deterministic at " + format_history(s, site));

  CheckReport r;
  r.check_name = "extrema";
  r.depth = depth;
  const std::size_t y0 = open[0], y1 = open[1];
  const Rational one(1);
  Rational slack = min(min(d[y0], one - d[y0]), min(d[y1], one - d[y1]));
  Rational ep = eps < slack ? eps : slack / Rational(2);
  std::vector<Rational> m1 = d.masses(), m2 = d.masses();
  m1[y0] -= ep;
  m1[y1] += ep;
  m2[y0] += ep;
  m2[y1] -= ep;
  PatchSpec s1{site, Dist::make(m1)}, s2{site, Dist::make(m2)};
  AgentPtr p1 = patch_agent(agent, s1), p2 = patch_agent(agent, s2);
  const WeightVector half = WeightVector::uniform(2);

  r.details["site"] = format_history(s, site);
  r.details["eps_prime"] = ep.str();
  r.details["actions"] = {s.actions()[y0], s.actions()[y1]};
  r.details["m1"] = format_dist(s.actions(), s1.replacement);
  r.details["m2"] = format_dist(s.actions(), s2.replacement);

  Dist back = mix_dists(half, {s1.replacement, s2.replacement});
  if (back != d) {
    r.fail({"(1/2,1/2).(m1,m2) = pi(.|h)", format_history(s, site), describe(*agent), back[y0], d[y0]});
    return r;
  }
  Rational u = upsilon(measure, *agent, depth, options).value;
  Rational u1 = upsilon(measure, *p1, depth, options).value;
  Rational u2 = upsilon(measure, *p2, depth, options).value;
  Rational umix = upsilon(measure, *mix_agents(half, {p1, p2}), depth, options).value;
  r.details["upsilon"] = u.str();
  r.details["upsilon_m1"] = u1.str();
  r.details["upsilon_m2"] = u2.str();
  r.details["upsilon_mixture"] = umix.str();
  if (umix != u) {
    r.fail({"Y(pi) = Y((1/2,1/2).(pi^{h->m1}, pi^{h->m2}))", format_history(s, site), describe(*agent), umix, u});
    return r;
  }
  Rational avg = (u1 + u2) / Rational(2);
  if (avg != u) {
    r.fail({"Y(pi) = (Y(pi^{h->m1}) + Y(pi^{h->m2}))/2", format_history(s, site), describe(*agent), avg, u});
    return r;
  }
  for (const auto& p : {p1, p2}) {
    Rational dist = distance_up_to(*agent, *p, depth, options).distance;
    if (dist != ep) {
      r.fail({"d(pi, pi^{h->m}) = eps'", format_history(s, site), describe(*agent), dist, ep});
      return r;
    }
    if (equivalent_up_to(*agent, *p, depth, options).holds) {
      r.fail({"pi^{h->m} is not equivalent to pi", format_history(s, site), describe(*agent), Rational(0), ep});
      return r;
    }
  }
  // Since Y(pi) is the average of u1 and u2, one neighbour is >= and one <=.
  r.details["not_strict_max_witness"] = u1 >= u ? "m1" : "m2";
  r.details["not_strict_min_witness"] = u1 <= u ? "m1" : "m2";
  r.notes.push_back("pi is neither a strict local maximum nor a strict local minimum within eps'");
  return r;
}

}  // namespace agentmix
