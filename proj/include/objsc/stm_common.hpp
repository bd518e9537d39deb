#ifndef OBJSC_STM_COMMON_HPP
#define OBJSC_STM_COMMON_HPP

#include <atomic>
#include <cstdint>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <vector>

#include "objsc/types.hpp"

namespace objsc {

// Shared pieces of the two object STMs: timestamp issue, the committed
// conflict-list registry and an optional history recorder for tests.

class TsSource {
 public:
  // 0 is reserved for scripted T0 transactions; normal begins start at 1.
  Ts fresh() { return next_.fetch_add(1, std::memory_order_relaxed); }

  // Scripted begins (tests, worked scenarios) pick their own ts. Keep the
  // counter above it so later fresh() calls stay unique.
  void reserve(Ts ts) {
    Ts cur = next_.load(std::memory_order_relaxed);
    while (cur <= ts &&
           !next_.compare_exchange_weak(cur, ts + 1, std::memory_order_relaxed)) {
    }
  }

 private:
  std::atomic<Ts> next_{1};
};

// What the STM publishes for each committed transaction: its conflict list,
// the SCT it carried and the key footprint (used by the serializability and
// completeness oracles, and by the adversary to pick genuinely conflicting
// edges).
struct CommitRecord {
  std::uint32_t payload = 0;  // sct id
  std::vector<Ts> conflicts;
  std::vector<Key> lookup_keys;
  std::vector<Key> update_keys;
};

// Conflict lists are materialized inside tryC and immutable afterwards, so
// readers only need the map lookup to be synchronized.
class ConflictRegistry {
 public:
  void record(Ts ts, CommitRecord rec) {
    std::lock_guard<std::mutex> g(mu_);
    records_.emplace(ts, std::move(rec));
  }

  std::optional<CommitRecord> get(Ts ts) const {
    std::lock_guard<std::mutex> g(mu_);
    auto it = records_.find(ts);
    if (it == records_.end()) return std::nullopt;
    return it->second;
  }

  std::vector<Ts> committed_ts() const {
    std::lock_guard<std::mutex> g(mu_);
    std::vector<Ts> out;
    out.reserve(records_.size());
    for (const auto& [ts, rec] : records_) out.push_back(ts);
    return out;
  }

  std::size_t size() const {
    std::lock_guard<std::mutex> g(mu_);
    return records_.size();
  }

 private:
  mutable std::mutex mu_;
  std::unordered_map<Ts, CommitRecord> records_;
};

// Test-only sequential history recorder: one entry per method with its
// response folded in.
class HistoryLog {
 public:
  enum class Method : std::uint8_t { Begin, Lookup, Insert, Delete, TryCommit };
  enum class Outcome : std::uint8_t { Ok, NotFound, Abort, Commit };

  struct Event {
    Ts ts;
    Method method;
    Key key;
    Value value;
    Outcome outcome;
  };

  void append(Event e) {
    std::lock_guard<std::mutex> g(mu_);
    events_.push_back(e);
  }

  std::vector<Event> events() const {
    std::lock_guard<std::mutex> g(mu_);
    return events_;
  }

 private:
  mutable std::mutex mu_;
  std::vector<Event> events_;
};

}  // namespace objsc

#endif  // OBJSC_STM_COMMON_HPP
