#include "objsc/mvostm.hpp"

#include <algorithm>
#include <set>

namespace objsc {

MvStore::MvStore(std::size_t buckets) : buckets_(buckets == 0 ? 1 : buckets) {}

MvStore::~MvStore() {
  for (auto& b : buckets_) {
    Record* r = b.head.load(std::memory_order_relaxed);
    while (r != nullptr) {
      Record* next_rec = r->next.load(std::memory_order_relaxed);
      Version* v = r->head;
      while (v != nullptr) {
        Version* next_ver = v->next.load(std::memory_order_relaxed);
        delete v;
        v = next_ver;
      }
      delete r;
      r = next_rec;
    }
  }
}

MvStore::Record* MvStore::find(Key k) const {
  const Bucket& b = buckets_[bucket_of(k)];
  Record* r = b.head.load(std::memory_order_acquire);
  while (r != nullptr && r->key < k) {
    r = r->next.load(std::memory_order_acquire);
  }
  return (r != nullptr && r->key == k) ? r : nullptr;
}

MvStore::Record* MvStore::find_or_create(Key k, bool present, Value value) {
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
  Record* fresh = new Record(k, new Version(0, present, value, false));
  fresh->next.store(cur, std::memory_order_relaxed);
  link->store(fresh, std::memory_order_release);
  return fresh;
}

MvStore::Version* MvStore::version_before(const Record* rec, Ts limit) {
  Version* best = rec->head;
  Version* v = rec->head;
  while (v != nullptr && v->ts < limit) {
    best = v;
    v = v->next.load(std::memory_order_acquire);
  }
  return best;
}

void MvStore::preload(Key k, Value v) { find_or_create(k, true, v); }

MvStore::Txn MvStore::begin(std::uint32_t payload) {
  Txn txn;
  txn.ts = ts_source_.fresh();
  txn.payload = payload;
  if (history_ != nullptr) {
    history_->append({txn.ts, HistoryLog::Method::Begin, 0, 0,
                      HistoryLog::Outcome::Ok});
  }
  return txn;
}

MvStore::Txn MvStore::begin_at(Ts ts, std::uint32_t payload) {
  ts_source_.reserve(ts);
  Txn txn;
  txn.ts = ts;
  txn.payload = payload;
  return txn;
}

OpStatus MvStore::lookup(Txn& txn, Key k) {
  if (txn.state != TxnState::Live) return OpStatus::abort();
  for (const Txn::Upd& u : txn.updates) {
    if (u.key == k) {
      return u.present ? OpStatus::okv(u.value) : OpStatus::not_found();
    }
  }
  for (const Txn::ReadObs& r : txn.reads) {
    if (r.key == k) {
      return r.present ? OpStatus::okv(r.value) : OpStatus::not_found();
    }
  }
  Record* rec = find_or_create(k, false, 0);
  Version* v = version_before(rec, txn.ts);
  txn.reads.push_back({k, v, v->present, v->value});
  if (history_ != nullptr) {
    history_->append({txn.ts, HistoryLog::Method::Lookup, k, v->value,
                      v->present ? HistoryLog::Outcome::Ok
                                 : HistoryLog::Outcome::NotFound});
  }
  return v->present ? OpStatus::okv(v->value) : OpStatus::not_found();
}

void MvStore::insert(Txn& txn, Key k, Value v) {
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

OpStatus MvStore::erase(Txn& txn, Key k) {
  OpStatus view = OpStatus::not_found();
  for (const Txn::Upd& u : txn.updates) {
    if (u.key == k) {
      view = u.present ? OpStatus::okv(u.value) : OpStatus::not_found();
    }
  }
  if (view.kind == OpStatus::Kind::NotFound) {
    if (Record* rec = find(k)) {
      Version* v = version_before(rec, txn.ts);
      if (v->present) view = OpStatus::okv(v->value);
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

OpStatus MvStore::try_commit(Txn& txn) {
  if (txn.state != TxnState::Live) return OpStatus::abort();

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
  // A committed reader of the previous version with a larger timestamp must
  // not end up serialized after the version this transaction would create.
  for (const Txn::Upd& u : txn.updates) {
    Record* rec = find(u.key);
    Version* prev = version_before(rec, txn.ts);
    for (Ts reader : prev->rvl) {
      if (reader > txn.ts) {
        valid = false;
        break;
      }
    }
    if (!valid) break;
  }
  // A read is stale if some version committed between it and this ts.
  if (valid) {
    for (const Txn::ReadObs& r : txn.reads) {
      Record* rec = find(r.key);
      if (version_before(rec, txn.ts) != r.version) {
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

  // Conflicts, collected before this transaction's versions go in.
  // Update on k: the previous version's readers, or its creator when nobody
  // read it yet. Lookup of version j: j's creator plus the next version.
  std::set<Ts> conflicts;
  for (const Txn::Upd& u : txn.updates) {
    Record* rec = find(u.key);
    Version* prev = version_before(rec, txn.ts);
    if (prev->rvl.empty()) {
      if (prev->real) conflicts.insert(prev->ts);
    } else {
      conflicts.insert(prev->rvl.begin(), prev->rvl.end());
    }
  }
  for (const Txn::ReadObs& r : txn.reads) {
    auto* read = const_cast<Version*>(r.version);
    if (read->real) conflicts.insert(read->ts);
    if (Version* next = read->next.load(std::memory_order_relaxed)) {
      conflicts.insert(next->ts);
    }
  }
  conflicts.erase(txn.ts);

  CommitRecord commit;
  commit.payload = txn.payload;
  commit.conflicts.assign(conflicts.begin(), conflicts.end());
  for (const Txn::ReadObs& r : txn.reads) commit.lookup_keys.push_back(r.key);
  for (const Txn::Upd& u : txn.updates) commit.update_keys.push_back(u.key);

  // Publish new versions in sorted position and register this ts as a
  // committed reader of every version it looked up.
  for (const Txn::Upd& u : txn.updates) {
    Record* rec = find(u.key);
    Version* prev = version_before(rec, txn.ts);
    if (prev->ts == txn.ts) {
      // Scripted T0 writing over the virtual initial version: same slot.
      prev->present = u.present;
      prev->value = u.value;
      prev->real = true;
      continue;
    }
    auto* fresh = new Version(txn.ts, u.present, u.value, true);
    fresh->next.store(prev->next.load(std::memory_order_relaxed),
                      std::memory_order_relaxed);
    prev->next.store(fresh, std::memory_order_release);
  }
  for (const Txn::ReadObs& r : txn.reads) {
    auto* read = const_cast<Version*>(r.version);
    read->rvl.push_back(txn.ts);
    read->max_lookup = std::max(read->max_lookup, txn.ts);
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

std::optional<std::vector<Ts>> MvStore::conflicts_of(Ts ts) const {
  auto rec = registry_.get(ts);
  if (!rec.has_value()) return std::nullopt;
  return rec->conflicts;
}

FinalState MvStore::snapshot() const {
  FinalState out;
  for (const auto& b : buckets_) {
    Record* r = b.head.load(std::memory_order_acquire);
    while (r != nullptr) {
      Version* v = r->head;
      while (v->next.load(std::memory_order_acquire) != nullptr) {
        v = v->next.load(std::memory_order_acquire);
      }
      // Records that exist only because a lookup missed are not state.
      if (v->real || v->present) {
        out.push_back({r->key, v->present, v->present ? v->value : 0});
      }
      r = r->next.load(std::memory_order_acquire);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const FsEntry& a, const FsEntry& b) { return a.key < b.key; });
  return out;
}

std::optional<std::vector<std::pair<Ts, std::optional<Value>>>>
MvStore::read_version_chain(Key k) const {
  Record* rec = find(k);
  if (rec == nullptr) return std::nullopt;
  std::vector<std::pair<Ts, std::optional<Value>>> out;
  for (Version* v = rec->head; v != nullptr;
       v = v->next.load(std::memory_order_acquire)) {
    out.emplace_back(v->ts, v->present ? std::optional<Value>(v->value)
                                       : std::nullopt);
  }
  return out;
}

}  // namespace objsc
