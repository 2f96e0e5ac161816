#pragma once

#include <cstddef>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

namespace agentmix::detail {

/// Thread-safe memo keyed by History::key(). Clears itself when it grows past
/// `capacity`; callers must treat entries as a pure cache.
template <class Value>
class PrefixMemo {
 public:
  explicit PrefixMemo(std::size_t capacity = std::size_t{1} << 20) : capacity_(capacity) {}

  std::optional<Value> find(const std::string& key) const {
    std::lock_guard lock(mu_);
    auto it = map_.find(key);
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }

  void store(std::string key, Value value) const {
    std::lock_guard lock(mu_);
    if (map_.size() >= capacity_) map_.clear();
    map_.insert_or_assign(std::move(key), std::move(value));
  }

 private:
  std::size_t capacity_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::string, Value> map_;
};

}  // namespace agentmix::detail
