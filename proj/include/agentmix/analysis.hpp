#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "agentmix/envmix.hpp"
#include "agentmix/mixtures.hpp"
#include "agentmix/valuation.hpp"

namespace agentmix {

enum class Verdict { Pass, Fail, Inconclusive, Error };

const char* to_string(Verdict v);

struct Counterexample {
  std::string what;     // which identity or bound broke
  std::string history;  // canonical text, may be empty (the empty history)
  std::string subject;  // agent / weights description, when relevant
  Rational lhs;
  Rational rhs;
};

/// Outcome of one executable check. A Fail always carries a counterexample
/// with the exact witnessing values. Verdicts about relations defined over
/// all histories hold "up to depth T" only.
struct CheckReport {
  std::string check_name;
  Verdict verdict = Verdict::Pass;
  std::size_t depth = 0;
  std::optional<Counterexample> counterexample;
  std::vector<std::string> notes;
  ojson details = ojson::object();

  bool passed() const { return verdict == Verdict::Pass; }
  void fail(Counterexample c);
};

ojson to_json(const CheckReport& r);

struct ValueRange {
  Rational lo;
  Rational hi;

  /// Smallest interval containing every value. Requires a nonempty list.
  static ValueRange hull(const std::vector<Rational>& values);
  bool disjoint(const ValueRange& other) const { return hi < other.lo || other.hi < lo; }
  bool contains(const Rational& v) const { return lo <= v && v <= hi; }
};

/// Mixture-agent laws at every history of length <= 2T: the defining Bayes
/// formula (including the 1/|A| fallback) and normalization of every
/// emitted distribution; P^{w.pi}(h) = w.P^pi(h); P^{w.pi}_mu(h) =
/// w.P^pi_mu(h); and V^{w.pi}_{mu,t} = w.V^pi_{mu,t} for every t <= T.
/// The mixture is built inside, so an active seeded defect applies to it.
CheckReport check_mixture_laws(const WeightVector& w, const AgentVector& agents, const Environment& env,
                               std::size_t depth, const EvalOptions& options = default_eval_options());

/// Same three laws for the environment mixture w.mu against a fixed agent.
CheckReport check_envmix_laws(const EnvWeightVector& w, const std::vector<EnvPtr>& envs, const Agent& agent,
                              std::size_t depth, const EvalOptions& options = default_eval_options());

/// P^pi_mu(h) = P^pi(h) P_mu(h) on every history of length <= 2T and
/// sum over length-2t histories of P^pi_mu = 1 for every t <= T.
CheckReport check_factorization(const Agent& agent, const Environment& env, std::size_t depth,
                                const EvalOptions& options = default_eval_options());

/// Duality identities for one agent up to depth T: dual histories are an
/// involution, P^pi(h-bar) = P^{pi-bar}(h), the double dual acts like pi,
/// symmetrize(pi) is self-dual, and pi == w.(pi,...,pi) for the given w.
CheckReport check_duality(const AgentPtr& agent, const WeightVector& copies, std::size_t depth,
                          const EvalOptions& options = default_eval_options());

/// V^{pi-bar}_{env_dual(mu),t} = -V^pi_{mu,t} for every t <= T, and
/// env_dual(env_dual(mu)) perceives like mu on every history of length < 2T.
CheckReport check_env_duality(const AgentPtr& agent, const EnvPtr& env, std::size_t depth,
                              const EvalOptions& options = default_eval_options());

/// The three single-site patch formulas on every history of length <= 2T.
CheckReport check_patch_lemmas(const AgentPtr& agent, const PatchSpec& patch, std::size_t depth,
                               const EvalOptions& options = default_eval_options());

/// |V_{t'} - V_t| <= b(t) for all t < t' <= t_max.
CheckReport check_tail_bound(const Agent& agent, const Environment& env, std::size_t t_max,
                             const EvalOptions& options = default_eval_options());

/// V^pi_{mu_Y,T} = Y_T(pi) for every agent of the battery, plus the tail
/// bound of mu_Y at every t <= T.
CheckReport check_universal_env(const WeightedMeasure& measure, const AgentVector& battery, std::size_t depth,
                                const EvalOptions& options = default_eval_options());

/// Weak symmetry (Y = 0 on the self-dual members of battery and on every
/// symmetrized member) and strong symmetry (Y(pi-bar) = -Y(pi) on the
/// battery), evaluated exactly at depth T. Pass iff both hold; details
/// record both verdicts and whether they agree. Throws NotFiniteHorizon
/// unless the measure's tail bound vanishes at T.
CheckReport check_symmetry(const WeightedMeasure& measure, const AgentVector& battery, std::size_t depth,
                           const EvalOptions& options = default_eval_options());

/// Refutation-only probe: value ranges of two agent samples at depth T.
/// Pass means the ranges are disjoint (consistent with separability), Fail
/// means they overlap (separability refuted for this environment).
CheckReport separability_probe(const Environment& env, const AgentVector& inside, const AgentVector& outside,
                               std::size_t depth, const EvalOptions& options = default_eval_options());

struct MembershipResult {
  bool member = false;
  std::optional<Rational> value;
  std::optional<Rational> bound;  // the threshold the value was compared to
};

struct Membership {
  std::string description;
  std::function<MembershipResult(const Agent&)> test;
};

/// Membership "V^pi_{env,t} <op> threshold" with op one of >=, >, <=, <.
Membership value_threshold(EnvPtr env, std::size_t t, const std::string& op, Rational threshold,
                           EvalOptions options = default_eval_options());

/// Mixes members and tests membership of each mixture: first every
/// self-mixture and every pair at (1/2, 1/2), then `trials` random
/// mixtures of 2-3 members with positive weights k/denominator.
CheckReport closure_probe(const AgentVector& members, const Membership& membership, std::size_t trials,
                          std::uint64_t seed, std::uint32_t denominator = 12);

/// Constructive perturbation at a reachable non-deterministic site: picks
/// the first two actions with mass strictly inside (0,1), shifts them by
/// +-eps' to get m1, m2 with (1/2,1/2).(m1,m2) = pi(.|site), and verifies
/// Y(pi) = Y((1/2,1/2).(pi^{site->m1}, pi^{site->m2})) = (Y(pi^m1)+Y(pi^m2))/2,
/// d(pi, pi^{site->mi}) = eps', and exhibits neighbours with Y >= Y(pi) and
/// Y <= Y(pi). eps' = eps when eps is below the slack
/// min(p0, 1-p0, p1, 1-p1), otherwise half the slack, so all shifted masses
/// stay strictly inside (0,1). Throws SiteUnreachable, SiteDeterministic,
/// NotFiniteHorizon.
CheckReport extrema_probe(const WeightedMeasure& measure, const AgentPtr& agent, const History& site,
                          const Rational& eps, std::size_t depth,
                          const EvalOptions& options = default_eval_options());

}  // namespace agentmix
