#ifndef OBJSC_MVOSTM_HPP
#define OBJSC_MVOSTM_HPP

#include <atomic>
#include <mutex>
#include <utility>
#include <vector>

#include "objsc/stm_common.hpp"
#include "objsc/types.hpp"

namespace objsc {

// Multi-version object STM. Every key carries an append-only version list
// ordered by creator timestamp; version 0 (the initial value) is always
// present. Lookups never abort: a reader takes the largest version below its
// own timestamp. Versions are published with atomic links so readers
// traverse the list lock-free while commits hold the per-key lock.
class MvStore {
 public:
  struct Version {
    Ts ts;
    bool present;  // false = tombstone
    Value value;
    bool real;     // created by a committed transaction (not preload)
    Ts max_lookup = kNoTs;     // guarded by the record lock
    std::vector<Ts> rvl;       // committed readers, guarded by the record lock
    std::atomic<Version*> next{nullptr};

    Version(Ts t, bool p, Value v, bool r)
        : ts(t), present(p), value(v), real(r) {}
  };

  struct Txn {
    Ts ts = kNoTs;
    std::uint32_t payload = 0;
    TxnState state = TxnState::Live;

    struct ReadObs {
      Key key;
      const Version* version;  // version actually read
      bool present;
      Value value;
    };
    struct Upd {
      Key key;
      bool present;
      Value value;
    };
    std::vector<ReadObs> reads;
    std::vector<Upd> updates;
  };

  explicit MvStore(std::size_t buckets = kDefaultBuckets);
  ~MvStore();

  MvStore(const MvStore&) = delete;
  MvStore& operator=(const MvStore&) = delete;

  static constexpr Protocol protocol() { return Protocol::Mvostm; }

  void preload(Key k, Value v);

  Txn begin(std::uint32_t payload = 0);
  Txn begin_at(Ts ts, std::uint32_t payload = 0);

  OpStatus lookup(Txn& txn, Key k);
  void insert(Txn& txn, Key k, Value v);
  OpStatus erase(Txn& txn, Key k);
  OpStatus try_commit(Txn& txn);

  std::optional<std::vector<Ts>> conflicts_of(Ts ts) const;
  const ConflictRegistry& registry() const { return registry_; }

  // Quiescent: per key, the value of its highest-ts version.
  FinalState snapshot() const;

  // Quiescent inspection: full ascending version history of k.
  // Empty optional if the key was never touched.
  std::optional<std::vector<std::pair<Ts, std::optional<Value>>>>
  read_version_chain(Key k) const;

  void set_history(HistoryLog* log) { history_ = log; }

 private:
  struct Record {
    Key key;
    std::mutex mu;
    Version* head;  // version list, ascending ts; never empty
    std::atomic<Record*> next{nullptr};

    Record(Key k, Version* v0) : key(k), head(v0) {}
  };

  Record* find(Key k) const;
  Record* find_or_create(Key k, bool present, Value value);

  // Largest version with ts < limit; falls back to the first version for
  // scripted limits at or below 0.
  static Version* version_before(const Record* rec, Ts limit);

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

#endif  // OBJSC_MVOSTM_HPP
