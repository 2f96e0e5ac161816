#include "agentmix/core.hpp"

#include <algorithm>
#include <set>

#include "agentmix/fault.hpp"

namespace agentmix {

namespace fault {

namespace {
thread_local Defect current_defect = Defect::None;
}

Defect active() { return current_defect; }

ScopedDefect::ScopedDefect(Defect d) : previous_(current_defect) { current_defect = d; }
ScopedDefect::~ScopedDefect() { current_defect = previous_; }

std::string_view to_string(Defect d) {
  switch (d) {
    case Defect::None: return "none";
    case Defect::NonUniformFallback: return "nonuniform_fallback";
    case Defect::UnnormalizedWeights: return "unnormalized_weights";
    case Defect::MissingBayesDenominator: return "missing_bayes_denominator";
    case Defect::DualSkipsNegation: return "dual_skips_negation";
    case Defect::TailBoundHalved: return "tail_bound_halved";
  }
  return "none";
}

std::optional<Defect> parse_defect(std::string_view name) {
  for (Defect d : {Defect::None, Defect::NonUniformFallback, Defect::UnnormalizedWeights,
                   Defect::MissingBayesDenominator, Defect::DualSkipsNegation,
                   Defect::TailBoundHalved})
    if (to_string(d) == name) return d;
  return std::nullopt;
}

}  // namespace fault

namespace {

bool valid_symbol(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c == '(' || c == ')' || c == ',' || c == ':' || c == ' ' || c == '\t' || c == '\n')
      return false;
  }
  return true;
}

void check_symbols(const std::vector<std::string>& names, const char* what) {
  if (names.empty()) throw Error(ErrorCode::BadSpaces, std::string(what) + " list is empty");
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (!valid_symbol(n))
      throw Error(ErrorCode::BadSpaces, std::string("malformed ") + what + " symbol '" + n + "'");
    if (!seen.insert(n).second)
      throw Error(ErrorCode::BadSpaces, std::string("duplicate ") + what + " symbol '" + n + "'");
  }
  if (names.size() > 4096) throw Error(ErrorCode::BadSpaces, std::string("too many ") + what);
}

}  // namespace

std::shared_ptr<const Spaces> Spaces::make(std::vector<std::string> actions,
                                           std::vector<std::string> observations,
                                           std::vector<Rational> rewards) {
  check_symbols(actions, "action");
  check_symbols(observations, "observation");
  if (rewards.empty()) throw Error(ErrorCode::BadSpaces, "reward list is empty");
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    if (rewards[i] < Rational(-1) || rewards[i] > Rational(1))
      throw Error(ErrorCode::BadSpaces, "reward " + rewards[i].str() + " outside [-1,1]");
    for (std::size_t j = 0; j < i; ++j)
      if (rewards[i] == rewards[j])
        throw Error(ErrorCode::BadSpaces, "duplicate reward " + rewards[i].str());
  }
  if (observations.size() * rewards.size() > 0xFFFF)
    throw Error(ErrorCode::BadSpaces, "too many percepts");

  std::shared_ptr<Spaces> s(new Spaces());
  s->actions_ = std::move(actions);
  s->observations_ = std::move(observations);
  s->rewards_ = std::move(rewards);
  s->negation_closed_ = true;
  s->negated_reward_.resize(s->rewards_.size());
  for (std::size_t i = 0; i < s->rewards_.size(); ++i) {
    if (s->rewards_[i].is_zero()) s->zero_reward_ = i;
    auto neg = s->find_reward(-s->rewards_[i]);
    if (neg) {
      s->negated_reward_[i] = *neg;
    } else {
      s->negation_closed_ = false;
    }
  }
  for (std::size_t o = 0; o < s->observations_.size(); ++o)
    for (const auto& r : s->rewards_) s->percept_rewards_.push_back(r);
  return s;
}

PerceptId Spaces::percept(std::size_t obs, std::size_t reward_index) const {
  if (obs >= observations_.size() || reward_index >= rewards_.size())
    throw Error(ErrorCode::SymbolOutOfSpace, "percept index out of range");
  return PerceptId{static_cast<std::uint16_t>(obs * rewards_.size() + reward_index)};
}

PerceptId Spaces::negate(PerceptId x) const {
  if (!negation_closed_)
    throw Error(ErrorCode::RewardsNotNegationClosed, "reward set is not closed under negation");
  return percept(observation_of(x), negated_reward_[reward_index_of(x)]);
}

PerceptId Spaces::zero_percept() const {
  if (!zero_reward_) throw Error(ErrorCode::BadSpaces, "reward set does not contain 0");
  return percept(0, *zero_reward_);
}

std::optional<ActionId> Spaces::find_action(std::string_view name) const {
  for (std::size_t i = 0; i < actions_.size(); ++i)
    if (actions_[i] == name) return ActionId{static_cast<std::uint16_t>(i)};
  return std::nullopt;
}

std::optional<std::size_t> Spaces::find_observation(std::string_view name) const {
  for (std::size_t i = 0; i < observations_.size(); ++i)
    if (observations_[i] == name) return i;
  return std::nullopt;
}

std::optional<std::size_t> Spaces::find_reward(const Rational& r) const {
  for (std::size_t i = 0; i < rewards_.size(); ++i)
    if (rewards_[i] == r) return i;
  return std::nullopt;
}

std::string Spaces::percept_name(PerceptId x) const {
  return "(" + observations_.at(observation_of(x)) + "," + reward_of(x).str() + ")";
}

PerceptId Spaces::parse_percept(std::string_view text) const {
  if (text.size() < 5 || text.front() != '(' || text.back() != ')')
    throw Error(ErrorCode::ParseError, "malformed percept '" + std::string(text) + "'");
  auto inner = text.substr(1, text.size() - 2);
  auto comma = inner.find(',');
  if (comma == std::string_view::npos)
    throw Error(ErrorCode::ParseError, "malformed percept '" + std::string(text) + "'");
  auto obs = find_observation(inner.substr(0, comma));
  if (!obs)
    throw Error(ErrorCode::SymbolOutOfSpace,
                "unknown observation '" + std::string(inner.substr(0, comma)) + "'");
  Rational r = Rational::parse(inner.substr(comma + 1));
  auto ri = find_reward(r);
  if (!ri) throw Error(ErrorCode::SymbolOutOfSpace, "reward " + r.str() + " not in reward set");
  return percept(*obs, *ri);
}

ActionId Spaces::parse_action(std::string_view text) const {
  auto a = find_action(text);
  if (!a) throw Error(ErrorCode::SymbolOutOfSpace, "unknown action '" + std::string(text) + "'");
  return *a;
}

const char* to_string(Parity p) {
  switch (p) {
    case Parity::Empty: return "Empty";
    case Parity::EndsInPercept: return "EndsInPercept";
    case Parity::EndsInAction: return "EndsInAction";
  }
  return "?";
}

PerceptId History::last_percept() const {
  if (items_.empty()) throw Error(ErrorCode::WrongParity, "empty history has no percept");
  std::size_t i = ends_in_percept() ? items_.size() - 1 : items_.size() - 2;
  return PerceptId{items_[i]};
}

ActionId History::last_action() const {
  if (items_.size() < 2) throw Error(ErrorCode::WrongParity, "history has no action");
  std::size_t i = ends_in_percept() ? items_.size() - 2 : items_.size() - 1;
  return ActionId{items_[i]};
}

void History::push(PerceptId x) {
  if (ends_in_percept())
    throw Error(ErrorCode::AlternationViolation, "percept cannot follow a percept");
  items_.push_back(x.index);
}

void History::push(ActionId y) {
  if (!ends_in_percept())
    throw Error(ErrorCode::AlternationViolation, "an action must follow a percept");
  items_.push_back(y.index);
}

History History::prefix(std::size_t length) const {
  History h;
  h.items_.assign(items_.begin(), items_.begin() + static_cast<std::ptrdiff_t>(std::min(length, items_.size())));
  return h;
}

bool History::starts_with(const History& other) const {
  return other.items_.size() <= items_.size() &&
         std::equal(other.items_.begin(), other.items_.end(), items_.begin());
}

std::string History::key() const {
  std::string k;
  k.reserve(items_.size() * 2);
  for (auto v : items_) {
    k.push_back(static_cast<char>(v & 0xFF));
    k.push_back(static_cast<char>(v >> 8));
  }
  return k;
}

Dist Dist::make(std::vector<Rational> masses) {
  Rational sum;
  for (const auto& m : masses) {
    if (m.sign() < 0) throw Error(ErrorCode::NegativeMass, "mass " + m.str() + " is negative");
    sum += m;
  }
  if (sum != Rational(1))
    throw Error(ErrorCode::NotNormalized, "masses sum to " + sum.str() + ", not 1");
  return Dist(std::move(masses));
}

Dist Dist::uniform(std::size_t n) {
  return Dist(std::vector<Rational>(n, Rational(1, static_cast<long>(n))));
}

Dist Dist::point(std::size_t n, std::size_t at) {
  std::vector<Rational> m(n);
  m.at(at) = Rational(1);
  return Dist(std::move(m));
}

Dist Dist::unchecked(std::vector<Rational> masses) { return Dist(std::move(masses)); }

Rational Dist::total() const {
  Rational sum;
  for (const auto& m : mass_) sum += m;
  return sum;
}

bool Dist::is_normalized() const {
  for (const auto& m : mass_)
    if (m.sign() < 0) return false;
  return total() == Rational(1);
}

Dist dist_make(std::span<const std::string> carrier, std::vector<Rational> masses) {
  if (carrier.size() != masses.size())
    throw Error(ErrorCode::LengthMismatch, "carrier has " + std::to_string(carrier.size()) +
                                               " symbols but " + std::to_string(masses.size()) +
                                               " masses were given");
  return Dist::make(std::move(masses));
}

History history_append(const Spaces& spaces, const History& h, HistoryItem item) {
  History out = h;
  if (auto* x = std::get_if<PerceptId>(&item)) {
    if (x->index >= spaces.num_percepts())
      throw Error(ErrorCode::SymbolOutOfSpace, "percept id out of range");
    out.push(*x);
  } else {
    auto y = std::get<ActionId>(item);
    if (y.index >= spaces.num_actions())
      throw Error(ErrorCode::SymbolOutOfSpace, "action id out of range");
    out.push(y);
  }
  return out;
}

History dual_history(const Spaces& spaces, const History& h) {
  if (!spaces.negation_closed())
    throw Error(ErrorCode::RewardsNotNegationClosed, "dual history needs negation-closed rewards");
  History out;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (i % 2 == 0) {
      out.push(spaces.negate(PerceptId{h.items()[i]}));
    } else {
      out.push(ActionId{h.items()[i]});
    }
  }
  return out;
}

std::string format_history(const Spaces& spaces, const History& h) {
  std::string out;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (i) out.push_back(' ');
    if (i % 2 == 0) {
      out += spaces.percept_name(PerceptId{h.items()[i]});
    } else {
      out += spaces.action_name(ActionId{h.items()[i]});
    }
  }
  return out;
}

History parse_history(const Spaces& spaces, std::string_view text) {
  History h;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    if (pos >= text.size()) break;
    std::size_t end = pos;
    while (end < text.size() && text[end] != ' ' && text[end] != '\t') ++end;
    auto token = text.substr(pos, end - pos);
    if (h.ends_in_percept()) {
      if (token.front() == '(')
        throw Error(ErrorCode::AlternationViolation,
                    "expected an action, got '" + std::string(token) + "'");
      h.push(spaces.parse_action(token));
    } else {
      if (token.front() != '(')
        throw Error(ErrorCode::AlternationViolation,
                    "expected a percept, got '" + std::string(token) + "'");
      h.push(spaces.parse_percept(token));
    }
    pos = end;
  }
  return h;
}

std::string format_dist(std::span<const std::string> carrier, const Dist& d) {
  std::string out;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (i) out.push_back(' ');
    out += (i < carrier.size() ? carrier[i] : std::to_string(i)) + ":" + d[i].str();
  }
  return out;
}

std::vector<std::string> percept_names(const Spaces& spaces) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < spaces.num_percepts(); ++i)
    names.push_back(spaces.percept_name(PerceptId{static_cast<std::uint16_t>(i)}));
  return names;
}

std::vector<History> all_histories(const Spaces& spaces, std::size_t length) {
  std::vector<History> level{History{}};
  for (std::size_t i = 0; i < length; ++i) {
    std::vector<History> next;
    for (const auto& h : level) {
      if (h.ends_in_percept()) {
        for (std::size_t y = 0; y < spaces.num_actions(); ++y) {
          History g = h;
          g.push(ActionId{static_cast<std::uint16_t>(y)});
          next.push_back(std::move(g));
        }
      } else {
        for (std::size_t x = 0; x < spaces.num_percepts(); ++x) {
          History g = h;
          g.push(PerceptId{static_cast<std::uint16_t>(x)});
          next.push_back(std::move(g));
        }
      }
    }
    level = std::move(next);
  }
  return level;
}

}  // namespace agentmix
