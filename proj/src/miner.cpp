#include "objsc/miner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <set>
#include <thread>
#include <unordered_map>

#include "objsc/chained_table.hpp"
#include "objsc/contracts.hpp"
#include "objsc/mvostm.hpp"
#include "objsc/stm_executor.hpp"
#include "objsc/svostm.hpp"

namespace objsc {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

template <class Store>
MineResult mine_with(const MinerConfig& cfg, const std::vector<Sct>& scts,
                     const FinalState& init_state, std::uint64_t prev_hash) {
  Store store(cfg.workload.hash_buckets);
  for (const FsEntry& e : init_state) {
    if (e.present) store.preload(e.key, e.value);
  }

  MineResult result;
  BlockGraph bg;
  std::vector<SctStatus> statuses(scts.size(), SctStatus::Pending);
  std::vector<Ts> committed_ts(scts.size(), kNoTs);
  std::atomic<std::uint32_t> next_index{0};
  std::atomic<std::uint32_t> begin_count{0};
  std::atomic<std::uint32_t> abort_count{0};

  auto worker = [&] {
    for (;;) {
      std::uint32_t i = next_index.fetch_add(1, std::memory_order_relaxed);
      if (i >= scts.size()) break;
      for (;;) {
        typename Store::Txn txn = store.begin(i);
        begin_count.fetch_add(1, std::memory_order_relaxed);
        StmExecutor<Store> ex(store, txn);
        SctStatus status = SctStatus::Pending;
        bool aborted = false;
        try {
          status = run_sct(scts[i], ex);
        } catch (const TxnAborted&) {
          aborted = true;
        }
        if (!aborted && store.try_commit(txn).aborted()) aborted = true;
        if (aborted) {
          abort_count.fetch_add(1, std::memory_order_relaxed);
          continue;  // fresh transaction, fresh timestamp
        }
        statuses[i] = status;
        committed_ts[i] = txn.ts;
        auto rec = store.registry().get(txn.ts);
        std::vector<std::uint32_t> conflict_ids;
        conflict_ids.reserve(rec->conflicts.size());
        for (Ts other : rec->conflicts) {
          conflict_ids.push_back(store.registry().get(other)->payload);
        }
        bg.build_bg(txn.ts, i, rec->conflicts, conflict_ids);
        break;
      }
    }
  };

  Clock::time_point start = Clock::now();
  std::uint32_t nthreads = std::max<std::uint32_t>(1, cfg.threads);
  if (nthreads == 1 || scts.empty()) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::uint32_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  FinalState fs = store.snapshot();
  result.elapsed_ms = ms_since(start);

  result.begin_count = begin_count.load();
  result.abort_count = abort_count.load();
  result.footprints.reserve(scts.size());
  for (std::uint32_t i = 0; i < scts.size(); ++i) {
    auto rec = store.registry().get(committed_ts[i]);
    SctFootprint fp;
    fp.ts = committed_ts[i];
    fp.sct_id = i;
    fp.lookup_keys = rec->lookup_keys;
    fp.update_keys = rec->update_keys;
    result.footprints.push_back(std::move(fp));
  }

  Block& block = result.block;
  block.scts = scts;
  for (std::uint32_t i = 0; i < scts.size(); ++i) {
    block.scts[i].status = statuses[i];
  }
  block.bg = std::move(bg);
  block.final_state = std::move(fs);
  block.prev_hash = prev_hash;
  block.meta.protocol = Store::protocol();
  block.meta.threads = nthreads;
  block.meta.abort_count = result.abort_count;
  block.meta.contract = cfg.workload.contract;
  block.meta.shared_items = cfg.workload.shared_items;
  block.meta.hash_buckets = cfg.workload.hash_buckets;
  block.meta.workload_seed = cfg.workload.seed;
  block.meta.mint_value = cfg.workload.mint_value;
  return result;
}

// Records the committed footprint of a directly executed SCT, mirroring the
// STM's rvSet/updSet semantics (read-your-writes never reaches shared state).
class RecordingExecutor final : public Executor {
 public:
  explicit RecordingExecutor(ChainedTable& table) : table_(table) {}

  std::optional<Value> lookup(Key k) override {
    if (std::find(update_keys.begin(), update_keys.end(), k) ==
            update_keys.end() &&
        std::find(lookup_keys.begin(), lookup_keys.end(), k) ==
            lookup_keys.end()) {
      lookup_keys.push_back(k);
    }
    return table_.lookup(k);
  }
  void insert(Key k, Value v) override {
    note_update(k);
    table_.insert(k, v);
  }
  void erase(Key k) override {
    note_update(k);
    table_.erase(k);
  }

  std::vector<Key> lookup_keys;
  std::vector<Key> update_keys;

 private:
  void note_update(Key k) {
    if (std::find(update_keys.begin(), update_keys.end(), k) ==
        update_keys.end()) {
      update_keys.push_back(k);
    }
  }
  ChainedTable& table_;
};

}  // namespace

MineResult mine_block(const MinerConfig& cfg, const std::vector<Sct>& scts,
                      const FinalState& init_state, std::uint64_t prev_hash) {
  switch (cfg.protocol) {
    case Protocol::Svostm:
      return mine_with<SvStore>(cfg, scts, init_state, prev_hash);
    case Protocol::Mvostm:
      return mine_with<MvStore>(cfg, scts, init_state, prev_hash);
    case Protocol::Serial:
      return mine_serial(cfg.workload, scts, init_state, prev_hash);
  }
  throw std::invalid_argument("unknown protocol");
}

MineResult mine_serial(const WorkloadSpec& workload,
                       const std::vector<Sct>& scts,
                       const FinalState& init_state, std::uint64_t prev_hash) {
  ChainedTable table(workload.hash_buckets);
  table.preload(init_state);

  MineResult result;
  std::vector<SctStatus> statuses(scts.size(), SctStatus::Pending);

  Clock::time_point start = Clock::now();
  for (std::uint32_t i = 0; i < scts.size(); ++i) {
    RecordingExecutor ex(table);
    statuses[i] = run_sct(scts[i], ex);
    SctFootprint fp;
    fp.ts = static_cast<Ts>(i) + 1;
    fp.sct_id = i;
    fp.lookup_keys = std::move(ex.lookup_keys);
    fp.update_keys = std::move(ex.update_keys);
    result.footprints.push_back(std::move(fp));
  }
  FinalState fs = table.snapshot();
  result.elapsed_ms = ms_since(start);

  // Conflict bookkeeping identical in shape to the single-version STM's:
  // an updater conflicts with every earlier committed access to its keys,
  // a lookup with every earlier committed update.
  BlockGraph bg;
  std::unordered_map<Key, std::vector<Ts>> committed_lookups;
  std::unordered_map<Key, std::vector<Ts>> committed_updates;
  for (const SctFootprint& fp : result.footprints) {
    std::set<Ts> conflicts;
    for (Key k : fp.update_keys) {
      const auto& cu = committed_updates[k];
      const auto& cl = committed_lookups[k];
      conflicts.insert(cu.begin(), cu.end());
      conflicts.insert(cl.begin(), cl.end());
    }
    for (Key k : fp.lookup_keys) {
      const auto& cu = committed_updates[k];
      conflicts.insert(cu.begin(), cu.end());
    }
    bg.add_vertex(fp.ts, fp.sct_id);
    for (Ts other : conflicts) bg.add_edge(other, fp.ts);
    for (Key k : fp.lookup_keys) committed_lookups[k].push_back(fp.ts);
    for (Key k : fp.update_keys) committed_updates[k].push_back(fp.ts);
  }

  result.begin_count = static_cast<std::uint32_t>(scts.size());
  result.abort_count = 0;

  Block& block = result.block;
  block.scts = scts;
  for (std::uint32_t i = 0; i < scts.size(); ++i) {
    block.scts[i].status = statuses[i];
  }
  block.bg = std::move(bg);
  block.final_state = std::move(fs);
  block.prev_hash = prev_hash;
  block.meta.protocol = Protocol::Serial;
  block.meta.threads = 1;
  block.meta.abort_count = 0;
  block.meta.contract = workload.contract;
  block.meta.shared_items = workload.shared_items;
  block.meta.hash_buckets = workload.hash_buckets;
  block.meta.workload_seed = workload.seed;
  block.meta.mint_value = workload.mint_value;
  return result;
}

}  // namespace objsc
