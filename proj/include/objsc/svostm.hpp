#ifndef OBJSC_SVOSTM_HPP
#define OBJSC_SVOSTM_HPP

#include <atomic>
#include <memory>
#include <mutex>
#include <vector>

#include "objsc/stm_common.hpp"
#include "objsc/types.hpp"

namespace objsc {

// Single-version object STM over a fixed-bucket hash table.
//
// Each key record keeps the committed value plus the timestamps of every
// committed lookup (cL) and update (cU) on it. Timestamp validation happens
// at commit under per-key locks taken in ascending key order; lookups read
// committed state lock-free through an immutable snapshot pointer and are
// re-checked at commit by pointer identity.
class SvStore {
 public:
  struct Txn {
    Ts ts = kNoTs;
    std::uint32_t payload = 0;
    TxnState state = TxnState::Live;

    struct ReadObs {
      Key key;
      const void* snap;  // snapshot pointer observed at read time
      bool present;
      Value value;
    };
    struct Upd {
      Key key;
      bool present;  // false = tombstone
      Value value;
    };
    std::vector<ReadObs> reads;
    std::vector<Upd> updates;
  };

  explicit SvStore(std::size_t buckets = kDefaultBuckets);
  ~SvStore();

  SvStore(const SvStore&) = delete;
  SvStore& operator=(const SvStore&) = delete;

  static constexpr Protocol protocol() { return Protocol::Svostm; }

  // Installs initial state as the virtual T0. Not a committed transaction:
  // it never shows up in conflict lists.
  void preload(Key k, Value v);

  Txn begin(std::uint32_t payload = 0);
  // Scripted begin with a chosen timestamp (worked scenarios and tests).
  Txn begin_at(Ts ts, std::uint32_t payload = 0);

  OpStatus lookup(Txn& txn, Key k);
  void insert(Txn& txn, Key k, Value v);
  // Buffers a tombstone. The returned value reflects the local/committed
  // view and is not validated; contracts must not branch on it.
  OpStatus erase(Txn& txn, Key k);
  OpStatus try_commit(Txn& txn);

  std::optional<std::vector<Ts>> conflicts_of(Ts ts) const;
  const ConflictRegistry& registry() const { return registry_; }

  // Quiescent: all records sorted by key, tombstones included.
  FinalState snapshot() const;

  void set_history(HistoryLog* log) { history_ = log; }

 private:
  struct Committed {   // immutable once published
    bool present;
    Value value;
    Ts creator;        // max committed update ts; kNoTs for preloaded state
  };

  struct Record {
    Key key;
    std::mutex mu;
    std::atomic<const Committed*> state;
    Ts max_lookup = kNoTs;             // guarded by mu
    std::vector<Ts> committed_lookups;  // cL, guarded by mu
    std::vector<Ts> committed_updates;  // cU, guarded by mu
    std::vector<std::unique_ptr<const Committed>> retired;  // guarded by mu
    std::atomic<Record*> next{nullptr};

    Record(Key k, const Committed* init) : key(k), state(init) {}
  };

  Record* find(Key k) const;
  Record* find_or_create(Key k, bool present, Value value);

  std::size_t bucket_of(Key k) const { return k % buckets_.size(); }

  struct Bucket {
    std::atomic<Record*> head{nullptr};
    std::mutex insert_mu;
  };
  std::vector<Bucket> buckets_;
  TsSource ts_source_;
  ConflictRegistry registry_;
  HistoryLog* history_ = nullptr;
};

}  // namespace objsc

#endif  // OBJSC_SVOSTM_HPP
