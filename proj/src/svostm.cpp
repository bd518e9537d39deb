#include "objsc/svostm.hpp"

#include <algorithm>
#include <set>

namespace objsc {

SvStore::SvStore(std::size_t buckets) : buckets_(buckets == 0 ? 1 : buckets) {}

SvStore::~SvStore() {
  for (auto& b : buckets_) {
    Record* r = b.head.load(std::memory_order_relaxed);
    while (r != nullptr) {
      Record* next = r->next.load(std::memory_order_relaxed);
      delete r->state.load(std::memory_order_relaxed);
      delete r;
      r = next;
    }
  }
}

SvStore::Record* SvStore::find(Key k) const {
  const Bucket& b = buckets_[bucket_of(k)];
  Record* r = b.head.load(std::memory_order_acquire);
  while (r != nullptr && r->key < k) {
    r = r->next.load(std::memory_order_acquire);
  }
  return (r != nullptr && r->key == k) ? r : nullptr;
}

SvStore::Record* SvStore::find_or_create(Key k, bool present, Value value) {
  if (Record* r = find(k)) return r;
  Bucket& b = buckets_[bucket_of(k)];
  std::lock_guard<std::mutex> guard(b.insert_mu);
  std::atomic<Record*>* link = &b.head;
  Record* cur = link->load(std::memory_order_acquire);
  while (cur != nullptr && cur->key < k) {
    link = &cur->next;
    cur = link->load(std::memory_order_acquire);
  }
  if (cur != nullptr && cur->key == k) return cur;
  auto* init = new Committed{present, value, kNoTs};
  Record* fresh = new Record(k, init);
  fresh->next.store(cur, std::memory_order_relaxed);
  link->store(fresh, std::memory_order_release);
  return fresh;
}

void SvStore::preload(Key k, Value v) { find_or_create(k, true, v); }

SvStore::Txn SvStore::begin(std::uint32_t payload) {
  Txn txn;
  txn.ts = ts_source_.fresh();
  txn.payload = payload;
  if (history_ != nullptr) {
    history_->append({txn.ts, HistoryLog::Method::Begin, 0, 0,
                      HistoryLog::Outcome::Ok});
  }
  return txn;
}

SvStore::Txn SvStore::begin_at(Ts ts, std::uint32_t payload) {
  ts_source_.reserve(ts);
  Txn txn;
  txn.ts = ts;
  txn.payload = payload;
  return txn;
}

OpStatus SvStore::lookup(Txn& txn, Key k) {
  if (txn.state != TxnState::Live) return OpStatus::abort();
  // Read-your-writes.
  for (const Txn::Upd& u : txn.updates) {
    if (u.key == k) {
      return u.present ? OpStatus::okv(u.value) : OpStatus::not_found();
    }
  }
  // Repeatable read within the transaction.
  for (const Txn::ReadObs& r : txn.reads) {
    if (r.key == k) {
      return r.present ? OpStatus::okv(r.value) : OpStatus::not_found();
    }
  }
  Record* rec = find_or_create(k, false, 0);
  const Committed* snap = rec->state.load(std::memory_order_acquire);
  if (snap->creator > txn.ts) {
    // A younger transaction already committed an update: this read cannot
    // be ordered before it.
    txn.state = TxnState::Aborted;
    if (history_ != nullptr) {
      history_->append({txn.ts, HistoryLog::Method::Lookup, k, 0,
                        HistoryLog::Outcome::Abort});
    }
    return OpStatus::abort();
  }
  txn.reads.push_back({k, snap, snap->present, snap->value});
  if (history_ != nullptr) {
    history_->append({txn.ts, HistoryLog::Method::Lookup, k, snap->value,
                      snap->present ? HistoryLog::Outcome::Ok
                                    : HistoryLog::Outcome::NotFound});
  }
  return snap->present ? OpStatus::okv(snap->value) : OpStatus::not_found();
}

void SvStore::insert(Txn& txn, Key k, Value v) {
  for (Txn::Upd& u : txn.updates) {
    if (u.key == k) {
      u.present = true;
      u.value = v;
      return;
    }
  }
  txn.updates.push_back({k, true, v});
  if (history_ != nullptr) {
    history_->append({txn.ts, HistoryLog::Method::Insert, k, v,
                      HistoryLog::Outcome::Ok});
  }
}

OpStatus SvStore::erase(Txn& txn, Key k) {
  OpStatus view = OpStatus::not_found();
  for (const Txn::Upd& u : txn.updates) {
    if (u.key == k) {
      view = u.present ? OpStatus::okv(u.value) : OpStatus::not_found();
    }
  }
  if (view.kind == OpStatus::Kind::NotFound) {
    if (Record* rec = find(k)) {
      const Committed* snap = rec->state.load(std::memory_order_acquire);
      if (snap->present) view = OpStatus::okv(snap->value);
    }
  }
  for (Txn::Upd& u : txn.updates) {
    if (u.key == k) {
      u.present = false;
      u.value = 0;
      if (history_ != nullptr) {
        history_->append({txn.ts, HistoryLog::Method::Delete, k, 0,
                          HistoryLog::Outcome::Ok});
      }
      return view;
    }
  }
  txn.updates.push_back({k, false, 0});
  if (history_ != nullptr) {
    history_->append({txn.ts, HistoryLog::Method::Delete, k, 0,
                      HistoryLog::Outcome::Ok});
  }
  return view;
}

OpStatus SvStore::try_commit(Txn& txn) {
  if (txn.state != TxnState::Live) return OpStatus::abort();

  // Gather involved records, ascending by key, each locked exactly once.
  std::vector<Record*> records;
  records.reserve(txn.reads.size() + txn.updates.size());
  for (const Txn::ReadObs& r : txn.reads) {
    records.push_back(find_or_create(r.key, false, 0));
  }
  for (const Txn::Upd& u : txn.updates) {
    records.push_back(find_or_create(u.key, false, 0));
  }
  std::sort(records.begin(), records.end(),
            [](const Record* a, const Record* b) { return a->key < b->key; });
  records.erase(std::unique(records.begin(), records.end()), records.end());

  std::vector<std::unique_lock<std::mutex>> locks;
  locks.reserve(records.size());
  for (Record* r : records) locks.emplace_back(r->mu);

  bool valid = true;
  for (const Txn::ReadObs& r : txn.reads) {
    Record* rec = find(r.key);
    if (rec->state.load(std::memory_order_relaxed) != r.snap) {
      valid = false;  // value read is no longer current
      break;
    }
  }
  if (valid) {
    for (const Txn::Upd& u : txn.updates) {
      Record* rec = find(u.key);
      const Committed* snap = rec->state.load(std::memory_order_relaxed);
      if (txn.ts <= rec->max_lookup || txn.ts <= snap->creator) {
        valid = false;
        break;
      }
    }
  }

  if (!valid) {
    locks.clear();
    txn.state = TxnState::Aborted;
    if (history_ != nullptr) {
      history_->append({txn.ts, HistoryLog::Method::TryCommit, 0, 0,
                        HistoryLog::Outcome::Abort});
    }
    return OpStatus::abort();
  }

  // Conflict list, from the lists as they stand before this commit.
  // An updater conflicts with every committed lookup and update on its keys;
  // a lookup conflicts with the committed updates on its keys.
  std::set<Ts> conflicts;
  for (const Txn::Upd& u : txn.updates) {
    Record* rec = find(u.key);
    conflicts.insert(rec->committed_updates.begin(),
                     rec->committed_updates.end());
    conflicts.insert(rec->committed_lookups.begin(),
                     rec->committed_lookups.end());
  }
  for (const Txn::ReadObs& r : txn.reads) {
    Record* rec = find(r.key);
    conflicts.insert(rec->committed_updates.begin(),
                     rec->committed_updates.end());
  }
  conflicts.erase(txn.ts);

  CommitRecord commit;
  commit.payload = txn.payload;
  commit.conflicts.assign(conflicts.begin(), conflicts.end());
  for (const Txn::ReadObs& r : txn.reads) commit.lookup_keys.push_back(r.key);
  for (const Txn::Upd& u : txn.updates) commit.update_keys.push_back(u.key);

  // Apply updates and append this transaction to the committed lists.
  for (const Txn::Upd& u : txn.updates) {
    Record* rec = find(u.key);
    const Committed* old = rec->state.load(std::memory_order_relaxed);
    rec->state.store(new Committed{u.present, u.value, txn.ts},
                     std::memory_order_release);
    rec->retired.emplace_back(old);
    rec->committed_updates.push_back(txn.ts);
  }
  for (const Txn::ReadObs& r : txn.reads) {
    Record* rec = find(r.key);
    rec->committed_lookups.push_back(txn.ts);
    rec->max_lookup = std::max(rec->max_lookup, txn.ts);
  }

  registry_.record(txn.ts, std::move(commit));
  locks.clear();
  txn.state = TxnState::Committed;
  if (history_ != nullptr) {
    history_->append({txn.ts, HistoryLog::Method::TryCommit, 0, 0,
                      HistoryLog::Outcome::Commit});
  }
  return OpStatus::okv(0);
}

std::optional<std::vector<Ts>> SvStore::conflicts_of(Ts ts) const {
  auto rec = registry_.get(ts);
  if (!rec.has_value()) return std::nullopt;
  return rec->conflicts;
}

FinalState SvStore::snapshot() const {
  FinalState out;
  for (const auto& b : buckets_) {
    Record* r = b.head.load(std::memory_order_acquire);
    while (r != nullptr) {
      const Committed* snap = r->state.load(std::memory_order_acquire);
      // Records that exist only because a lookup missed are not state.
      if (snap->creator != kNoTs || snap->present) {
        out.push_back({r->key, snap->present, snap->present ? snap->value : 0});
      }
      r = r->next.load(std::memory_order_acquire);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const FsEntry& a, const FsEntry& b) { return a.key < b.key; });
  return out;
}

}  // namespace objsc
