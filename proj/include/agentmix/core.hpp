#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "agentmix/error.hpp"
#include "agentmix/rational.hpp"

namespace agentmix {

struct ActionId {
  std::uint16_t index = 0;
  auto operator<=>(const ActionId&) const = default;
};

/// A percept is an (observation, reward) pair; ids enumerate them
/// observation-major, i.e. id = obs * |rewards| + reward.
struct PerceptId {
  std::uint16_t index = 0;
  auto operator<=>(const PerceptId&) const = default;
};

/// The fixed finite action, observation and reward sets of a scenario.
class Spaces {
 public:
  /// Validates: nonempty lists, distinct well-formed symbol names, distinct
  /// rewards in [-1, 1]. Throws Error(BadSpaces).
  static std::shared_ptr<const Spaces> make(std::vector<std::string> actions,
                                            std::vector<std::string> observations,
                                            std::vector<Rational> rewards);

  std::size_t num_actions() const { return actions_.size(); }
  std::size_t num_observations() const { return observations_.size(); }
  std::size_t num_rewards() const { return rewards_.size(); }
  std::size_t num_percepts() const { return observations_.size() * rewards_.size(); }

  const std::vector<std::string>& actions() const { return actions_; }
  const std::vector<std::string>& observations() const { return observations_; }
  const std::vector<Rational>& rewards() const { return rewards_; }

  bool negation_closed() const { return negation_closed_; }
  bool contains_zero() const { return zero_reward_.has_value(); }

  PerceptId percept(std::size_t obs, std::size_t reward_index) const;
  std::size_t observation_of(PerceptId x) const { return x.index / rewards_.size(); }
  std::size_t reward_index_of(PerceptId x) const { return x.index % rewards_.size(); }
  const Rational& reward_of(PerceptId x) const { return percept_rewards_[x.index]; }

  /// The percept (o, -r) for x = (o, r). Throws RewardsNotNegationClosed.
  PerceptId negate(PerceptId x) const;

  /// (first observation, 0). Throws BadSpaces when 0 is not a reward.
  PerceptId zero_percept() const;

  std::optional<ActionId> find_action(std::string_view name) const;
  std::optional<std::size_t> find_observation(std::string_view name) const;
  std::optional<std::size_t> find_reward(const Rational& r) const;

  const std::string& action_name(ActionId a) const { return actions_.at(a.index); }
  /// "(obs,reward)"
  std::string percept_name(PerceptId x) const;
  /// Parses "(obs,reward)"; throws SymbolOutOfSpace or ParseError.
  PerceptId parse_percept(std::string_view text) const;
  /// Throws SymbolOutOfSpace.
  ActionId parse_action(std::string_view text) const;

  bool operator==(const Spaces& o) const {
    return actions_ == o.actions_ && observations_ == o.observations_ && rewards_ == o.rewards_;
  }

 private:
  Spaces() = default;

  std::vector<std::string> actions_;
  std::vector<std::string> observations_;
  std::vector<Rational> rewards_;
  std::vector<Rational> percept_rewards_;
  std::vector<std::size_t> negated_reward_;
  std::optional<std::size_t> zero_reward_;
  bool negation_closed_ = false;
};

using SpacesPtr = std::shared_ptr<const Spaces>;

enum class Parity { Empty, EndsInPercept, EndsInAction };

const char* to_string(Parity p);

using HistoryItem = std::variant<PerceptId, ActionId>;

/// Alternating sequence x1 y1 x2 y2 ... starting with a percept. Alternation
/// is enforced on every push; membership in a particular Spaces is checked by
/// the validating free functions (history_append, parse_history).
class History {
 public:
  History() = default;

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  Parity parity() const {
    if (items_.empty()) return Parity::Empty;
    return items_.size() % 2 == 1 ? Parity::EndsInPercept : Parity::EndsInAction;
  }
  bool ends_in_percept() const { return items_.size() % 2 == 1; }

  std::size_t num_percepts() const { return (items_.size() + 1) / 2; }
  std::size_t num_actions() const { return items_.size() / 2; }

  PerceptId percept(std::size_t i) const { return PerceptId{items_.at(2 * i)}; }
  ActionId action(std::size_t i) const { return ActionId{items_.at(2 * i + 1)}; }
  PerceptId last_percept() const;
  ActionId last_action() const;

  /// Throws AlternationViolation.
  void push(PerceptId x);
  void push(ActionId y);
  void pop() { items_.pop_back(); }

  History prefix(std::size_t length) const;
  bool starts_with(const History& other) const;

  /// Compact byte string uniquely identifying the item sequence.
  std::string key() const;

  const std::vector<std::uint16_t>& items() const { return items_; }

  bool operator==(const History&) const = default;

 private:
  std::vector<std::uint16_t> items_;
};

/// Exact probability distribution over the actions or the percepts of a
/// Spaces, in carrier order.
class Dist {
 public:
  Dist() = default;

  /// Throws NegativeMass or NotNormalized.
  static Dist make(std::vector<Rational> masses);
  static Dist uniform(std::size_t n);
  static Dist point(std::size_t n, std::size_t at);
  /// No validation. Used only to model seeded defects.
  static Dist unchecked(std::vector<Rational> masses);

  std::size_t size() const { return mass_.size(); }
  const Rational& operator[](std::size_t i) const { return mass_[i]; }
  const std::vector<Rational>& masses() const { return mass_; }
  Rational total() const;
  bool is_normalized() const;

  bool operator==(const Dist&) const = default;

 private:
  explicit Dist(std::vector<Rational> m) : mass_(std::move(m)) {}
  std::vector<Rational> mass_;
};

/// Validated construction against an explicit carrier list.
Dist dist_make(std::span<const std::string> carrier, std::vector<Rational> masses);

/// Appends with alternation and space-membership checks.
History history_append(const Spaces& spaces, const History& h, HistoryItem item);

/// Replaces every percept (o, r) by (o, -r).
History dual_history(const Spaces& spaces, const History& h);

/// Space-separated tokens: percepts "(obs,reward)", actions bare.
std::string format_history(const Spaces& spaces, const History& h);
History parse_history(const Spaces& spaces, std::string_view text);

/// "a:1/2 b:1/2" style rendering for reports.
std::string format_dist(std::span<const std::string> carrier, const Dist& d);

/// Percept names in id order.
std::vector<std::string> percept_names(const Spaces& spaces);

/// Every history of length exactly `length`, in lexicographic id order.
std::vector<History> all_histories(const Spaces& spaces, std::size_t length);

}  // namespace agentmix
