#pragma once

#include <cstddef>
#include <list>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <utility>

namespace hdt {

/// Fixed-capacity map that evicts the least recently used entry on overflow.
/// `get` and `put` refresh recency; `peek` does not.
template <typename Key, typename Value>
class LruCache {
 public:
  using Entry = std::pair<Key, Value>;

  explicit LruCache(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("LRU capacity must be positive");
    index_.reserve(capacity_);
  }

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return index_.size(); }
  bool contains(const Key& key) const { return index_.count(key) != 0; }

  std::optional<Value> peek(const Key& key) const {
    auto it = index_.find(key);
    if (it == index_.end()) return std::nullopt;
    return it->second->second;
  }

  std::optional<Value> get(const Key& key) {
    auto it = index_.find(key);
    if (it == index_.end()) return std::nullopt;
    order_.splice(order_.begin(), order_, it->second);
    return it->second->second;
  }

  /// Inserts or overwrites `key` as most recent. Returns the evicted entry, if any.
  std::optional<Entry> put(const Key& key, Value value) {
    auto it = index_.find(key);
    if (it != index_.end()) {
      it->second->second = std::move(value);
      order_.splice(order_.begin(), order_, it->second);
      return std::nullopt;
    }
    std::optional<Entry> evicted;
    if (index_.size() == capacity_) {
      evicted = std::move(order_.back());
      index_.erase(evicted->first);
      order_.pop_back();
    }
    order_.emplace_front(key, std::move(value));
    index_.emplace(key, order_.begin());
    return evicted;
  }

  /// Entries from most to least recently used.
  const std::list<Entry>& entries() const noexcept { return order_; }

 private:
  std::size_t capacity_;
  std::list<Entry> order_;
  std::unordered_map<Key, typename std::list<Entry>::iterator> index_;
};

}  // namespace hdt
