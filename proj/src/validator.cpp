#include "objsc/validator.hpp"

#include <algorithm>
#include <barrier>
#include <chrono>
#include <thread>

#include "objsc/contracts.hpp"

namespace objsc {

namespace {
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

constexpr std::size_t kMaxCounterSpace = 1u << 22;
}  // namespace

const char* to_string(Verdict::Kind k) {
  switch (k) {
    case Verdict::Kind::Accept: return "accept";
    case Verdict::Kind::RejectStateMismatch: return "reject-state-mismatch";
    case Verdict::Kind::RejectMaliciousMiner: return "reject-malicious-miner";
  }
  return "?";
}

CounterTable::CounterTable(std::size_t num_keys)
    : guc_(num_keys), glc_(num_keys) {
  for (std::size_t i = 0; i < num_keys; ++i) {
    guc_[i].store(0, std::memory_order_relaxed);
    glc_[i].store(0, std::memory_order_relaxed);
  }
}

bool CounterTable::all_zero() const {
  for (std::size_t i = 0; i < guc_.size(); ++i) {
    if (guc_[i].load(std::memory_order_seq_cst) != 0) return false;
    if (glc_[i].load(std::memory_order_seq_cst) != 0) return false;
  }
  return true;
}

SmvExecutor::Local& SmvExecutor::local(Key k) {
  for (Local& l : locals_) {
    if (l.key == k) return l;
  }
  locals_.push_back({k, 0, 0});
  return locals_.back();
}

std::optional<Value> SmvExecutor::lookup(Key k) {
  check_stop();
  Local& l = local(k);
  if (l.luc != counters_.guc(k).load(std::memory_order_seq_cst)) {
    throw MaliciousSignal{k};  // someone else is mid-update on k
  }
  counters_.glc(k).fetch_add(1, std::memory_order_seq_cst);
  ++l.llc;
  return table_.lookup(k);
}

void SmvExecutor::insert(Key k, Value v) {
  check_stop();
  Local& l = local(k);
  if (l.luc != counters_.guc(k).load(std::memory_order_seq_cst) ||
      l.llc != counters_.glc(k).load(std::memory_order_seq_cst)) {
    throw MaliciousSignal{k};
  }
  counters_.guc(k).fetch_add(1, std::memory_order_seq_cst);
  ++l.luc;
  table_.insert(k, v);
}

void SmvExecutor::erase(Key k) {
  check_stop();
  Local& l = local(k);
  if (l.luc != counters_.guc(k).load(std::memory_order_seq_cst) ||
      l.llc != counters_.glc(k).load(std::memory_order_seq_cst)) {
    throw MaliciousSignal{k};
  }
  counters_.guc(k).fetch_add(1, std::memory_order_seq_cst);
  ++l.luc;
  table_.erase(k);
}

void SmvExecutor::txn_end() {
  for (const Local& l : locals_) {
    if (l.luc != 0) {
      counters_.guc(l.key).fetch_sub(l.luc, std::memory_order_seq_cst);
    }
    if (l.llc != 0) {
      counters_.glc(l.key).fetch_sub(l.llc, std::memory_order_seq_cst);
    }
  }
  locals_.clear();
}

namespace {

// Shared context of one validation run.
struct RunContext {
  const Block* block;
  BlockGraph bg;  // private clone; claiming consumes indegrees
  ChainedTable table;
  CounterTable counters;
  bool smv;
  std::atomic<std::uint32_t> claimed{0};
  std::atomic<bool> stop{false};
  std::atomic<bool> malicious{false};
  Key signal_key = 0;
  std::uint32_t signal_sct = 0;
  std::mutex signal_mu;

  RunContext(const Block& b, const FinalState& init, std::size_t counter_keys,
             bool use_smv)
      : block(&b),
        bg(b.bg.clone()),
        table(b.meta.hash_buckets),
        counters(counter_keys),
        smv(use_smv) {
    table.preload(init);
  }

  void record_signal(Key k, std::uint32_t sct) {
    std::lock_guard<std::mutex> g(signal_mu);
    if (!malicious.load(std::memory_order_relaxed)) {
      malicious.store(true, std::memory_order_relaxed);
      signal_key = k;
      signal_sct = sct;
    }
    stop.store(true, std::memory_order_seq_cst);
  }
};

std::size_t counter_space(const Block& block, const FinalState& init) {
  std::size_t max_key = 0;
  for (const FsEntry& e : init) {
    max_key = std::max<std::size_t>(max_key, e.key);
  }
  for (const Sct& s : block.scts) {
    for (std::size_t i = 0; i < s.args.size(); ++i) {
      if (!is_key_arg(s.fn, i)) continue;
      if (s.args[i] < 0 ||
          s.args[i] >= static_cast<Value>(kMaxCounterSpace)) {
        throw BlockFormatError("sct key argument out of range");
      }
      max_key = std::max<std::size_t>(max_key, static_cast<std::size_t>(s.args[i]));
    }
  }
  if (max_key + 1 > kMaxCounterSpace) {
    throw BlockFormatError("key space too large");
  }
  return max_key + 1;
}

void check_block_shape(const Block& block) {
  if (block.bg.vertex_count() != block.scts.size()) {
    throw BlockFormatError("graph vertex set does not match sct set");
  }
  std::vector<bool> seen(block.scts.size(), false);
  bool ok = true;
  block.bg.for_each_vertex([&](const BlockGraph::VertexNode& v) {
    if (v.sct_id >= seen.size() || seen[v.sct_id]) {
      ok = false;
    } else {
      seen[v.sct_id] = true;
    }
  });
  if (!ok) throw BlockFormatError("graph vertices do not map onto scts");
}

// Executes one claimed vertex; returns false when the run must stop.
bool execute_vertex(RunContext& ctx, BlockGraph::VertexNode* v) {
  const Sct& sct = ctx.block->scts[v->sct_id];
  if (ctx.smv) {
    SmvExecutor ex(ctx.table, ctx.counters, ctx.stop);
    try {
      run_sct(sct, ex);
    } catch (const MaliciousSignal& m) {
      ex.txn_end();  // drain counters before reporting
      ctx.record_signal(m.key, sct.id);
      return false;
    } catch (const RunStopped&) {
      ex.txn_end();
      return false;
    }
    ex.txn_end();
  } else {
    DirectExecutor ex(ctx.table);
    run_sct(sct, ex);
  }
  return true;
}

void jitter_spin(std::uint64_t seed, std::uint32_t max_spin) {
  if (max_spin == 0) return;
  // xorshift; the delay models independently scheduled validator threads.
  std::uint64_t x = seed != 0 ? seed : 0x9e3779b97f4a7c15ull;
  x ^= x << 13;
  x ^= x >> 7;
  x ^= x << 17;
  std::uint64_t spins = x % max_spin;
  volatile std::uint64_t sink = 0;
  for (std::uint64_t i = 0; i < spins; ++i) sink = sink + i;
  (void)sink;
}

void decentralized_worker(RunContext& ctx, std::uint32_t thread_idx,
                          const ValidateOptions& options,
                          const std::atomic<bool>& go) {
  while (!go.load(std::memory_order_acquire)) {
    std::this_thread::yield();  // wait for the whole pool to exist
  }
  jitter_spin(options.jitter_seed * 0x100001b3ull + thread_idx + 1,
              options.jitter_max_spin);
  const std::uint32_t total = static_cast<std::uint32_t>(ctx.block->scts.size());
  std::vector<BlockGraph::VertexNode*> local_log;
  while (!ctx.stop.load(std::memory_order_relaxed)) {
    BlockGraph::VertexNode* v = BlockGraph::local_search(local_log);
    if (v == nullptr) v = ctx.bg.global_search();
    if (v == nullptr) {
      if (ctx.claimed.load(std::memory_order_acquire) >= total) break;
      std::this_thread::yield();
      continue;
    }
    ctx.claimed.fetch_add(1, std::memory_order_acq_rel);
    if (!execute_vertex(ctx, v)) break;
    // Counters drained before successors are released; otherwise a
    // dependent SCT could observe this one's counters and cry foul.
    BlockGraph::rem_exec_node(v, local_log);
  }
}

Verdict finish(RunContext& ctx, Clock::time_point start) {
  Verdict verdict;
  verdict.counters_zero = ctx.counters.all_zero();
  if (ctx.malicious.load()) {
    verdict.kind = Verdict::Kind::RejectMaliciousMiner;
    verdict.signal_key = ctx.signal_key;
    verdict.signal_sct = ctx.signal_sct;
    verdict.elapsed_ms = ms_since(start);
    return verdict;
  }
  FinalState fs = ctx.table.snapshot();
  verdict.elapsed_ms = ms_since(start);
  if (fs == ctx.block->final_state) {
    verdict.kind = Verdict::Kind::Accept;
    verdict.fs_v = std::move(fs);
  } else {
    verdict.kind = Verdict::Kind::RejectStateMismatch;
  }
  return verdict;
}

}  // namespace

Verdict validate_decentralized(const Block& block, const FinalState& init_state,
                               const ValidateOptions& options) {
  check_block_shape(block);
  RunContext ctx(block, init_state, counter_space(block, init_state),
                 options.smv);
  Clock::time_point start = Clock::now();
  std::uint32_t nthreads = std::max<std::uint32_t>(1, options.threads);
  std::atomic<bool> go{false};
  if (nthreads == 1 || block.scts.empty()) {
    go.store(true, std::memory_order_release);
    decentralized_worker(ctx, 0, options, go);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::uint32_t t = 0; t < nthreads; ++t) {
      pool.emplace_back(decentralized_worker, std::ref(ctx), t,
                        std::cref(options), std::cref(go));
    }
    go.store(true, std::memory_order_release);
    for (std::thread& t : pool) t.join();
  }
  return finish(ctx, start);
}

Verdict validate_forkjoin(const Block& block, const FinalState& init_state,
                          const ValidateOptions& options) {
  check_block_shape(block);
  RunContext ctx(block, init_state, counter_space(block, init_state),
                 options.smv);
  Clock::time_point start = Clock::now();

  const std::uint32_t total = static_cast<std::uint32_t>(block.scts.size());
  std::uint32_t nslaves = std::max<std::uint32_t>(1, options.threads);
  std::vector<BlockGraph::VertexNode*> wave;
  std::atomic<std::size_t> wave_ix{0};
  std::atomic<bool> finished{false};
  std::barrier<> wave_start(nslaves + 1);
  std::barrier<> wave_end(nslaves + 1);

  auto slave = [&] {
    std::vector<BlockGraph::VertexNode*> scratch;
    for (;;) {
      wave_start.arrive_and_wait();
      if (finished.load(std::memory_order_acquire)) return;
      for (;;) {
        std::size_t i = wave_ix.fetch_add(1, std::memory_order_relaxed);
        if (i >= wave.size()) break;
        BlockGraph::VertexNode* v = wave[i];
        if (execute_vertex(ctx, v)) {
          scratch.clear();
          BlockGraph::rem_exec_node(v, scratch);
        }
      }
      wave_end.arrive_and_wait();
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(nslaves);
  for (std::uint32_t t = 0; t < nslaves; ++t) pool.emplace_back(slave);

  std::uint32_t executed = 0;
  for (;;) {
    wave.clear();
    if (!ctx.stop.load(std::memory_order_relaxed)) {
      // Harvest every current source into this wave.
      for (BlockGraph::VertexNode* v = ctx.bg.global_search(); v != nullptr;
           v = ctx.bg.global_search()) {
        wave.push_back(v);
      }
    }
    if (wave.empty()) break;
    executed += static_cast<std::uint32_t>(wave.size());
    wave_ix.store(0, std::memory_order_relaxed);
    wave_start.arrive_and_wait();
    wave_end.arrive_and_wait();
    if (executed >= total) break;
  }
  finished.store(true, std::memory_order_release);
  wave_start.arrive_and_wait();
  for (std::thread& t : pool) t.join();

  return finish(ctx, start);
}

Verdict validate_block(const Block& block, const FinalState& init_state,
                       const ValidateOptions& options) {
  return options.strategy == ValidatorStrategy::ForkJoin
             ? validate_forkjoin(block, init_state, options)
             : validate_decentralized(block, init_state, options);
}

Verdict validate_serial(const Block& block, const FinalState& init_state) {
  check_block_shape(block);
  counter_space(block, init_state);  // same key-range screening as concurrent
  auto order = block.bg.topo_order();
  if (!order.has_value()) {
    throw BlockFormatError("block graph has a cycle");
  }
  ChainedTable table(block.meta.hash_buckets);
  table.preload(init_state);

  Clock::time_point start = Clock::now();
  DirectExecutor ex(table);
  for (Ts ts : *order) {
    const BlockGraph::VertexNode* v = block.bg.find_vertex(ts);
    run_sct(block.scts[v->sct_id], ex);
  }
  FinalState fs = table.snapshot();

  Verdict verdict;
  verdict.elapsed_ms = ms_since(start);
  if (fs == block.final_state) {
    verdict.kind = Verdict::Kind::Accept;
    verdict.fs_v = std::move(fs);
  } else {
    verdict.kind = Verdict::Kind::RejectStateMismatch;
  }
  return verdict;
}

}  // namespace objsc
