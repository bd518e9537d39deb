#ifndef OBJSC_VALIDATOR_HPP
#define OBJSC_VALIDATOR_HPP

#include <atomic>
#include <cstdint>
#include <vector>

#include "objsc/block.hpp"
#include "objsc/chained_table.hpp"
#include "objsc/executor.hpp"

namespace objsc {

// Per-key global lookup/update counters of the smart multi-threaded
// validator. Before a lookup the local and global update counters must
// agree; before an update both counter pairs must. A mismatch means two
// dependent SCTs are running concurrently, which an honest block graph
// makes impossible - so the miner lied.
class CounterTable {
 public:
  explicit CounterTable(std::size_t num_keys);

  std::atomic<std::int64_t>& guc(Key k) { return guc_[k]; }
  std::atomic<std::int64_t>& glc(Key k) { return glc_[k]; }

  bool all_zero() const;
  std::size_t size() const { return guc_.size(); }

 private:
  std::vector<std::atomic<std::int64_t>> guc_;
  std::vector<std::atomic<std::int64_t>> glc_;
};

// Thrown when a worker must unwind because another thread already signaled.
struct RunStopped {};

// Counter-guarded executor for one SCT. txn_end() must run on every path,
// signal or not, so the global counters drain back to zero.
class SmvExecutor final : public Executor {
 public:
  SmvExecutor(ChainedTable& table, CounterTable& counters,
              const std::atomic<bool>& stop)
      : table_(table), counters_(counters), stop_(stop) {}
  ~SmvExecutor() { txn_end(); }

  std::optional<Value> lookup(Key k) override;
  void insert(Key k, Value v) override;
  void erase(Key k) override;

  // Atomically gives back this SCT's contribution to the global counters
  // and resets the locals.
  void txn_end();

 private:
  struct Local {
    Key key;
    std::int64_t luc = 0;
    std::int64_t llc = 0;
  };
  Local& local(Key k);
  void check_stop() const {
    if (stop_.load(std::memory_order_relaxed)) throw RunStopped{};
  }

  ChainedTable& table_;
  CounterTable& counters_;
  const std::atomic<bool>& stop_;
  std::vector<Local> locals_;
};

enum class ValidatorStrategy : std::uint8_t { Decentralized = 0, ForkJoin = 1 };

struct ValidateOptions {
  std::uint32_t threads = 8;
  bool smv = true;
  ValidatorStrategy strategy = ValidatorStrategy::Decentralized;
  // Randomized per-thread start delay, used by the adversarial-acceptance
  // experiment to model independently scheduled validators. 0 = off.
  std::uint64_t jitter_seed = 0;
  std::uint32_t jitter_max_spin = 0;
};

struct Verdict {
  enum class Kind : std::uint8_t {
    Accept = 0,
    RejectStateMismatch = 1,
    RejectMaliciousMiner = 2,
  };
  Kind kind = Kind::Accept;
  FinalState fs_v;                 // computed final state (Accept carries it)
  Key signal_key = 0;              // RejectMaliciousMiner details
  std::uint32_t signal_sct = 0;
  bool counters_zero = true;       // global counters drained after the run
  double elapsed_ms = 0.0;

  bool accepted() const { return kind == Kind::Accept; }
};

const char* to_string(Verdict::Kind k);

// Deterministic concurrent replay of a block over its graph. Throws
// BlockFormatError when the graph's vertex set does not match the SCT list
// (distinct from a Reject verdict).
Verdict validate_decentralized(const Block& block, const FinalState& init_state,
                               const ValidateOptions& options);
Verdict validate_forkjoin(const Block& block, const FinalState& init_state,
                          const ValidateOptions& options);
// Master entry point dispatching on options.strategy.
Verdict validate_block(const Block& block, const FinalState& init_state,
                       const ValidateOptions& options);

// Serial baseline: replays SCTs in the graph's topological order.
Verdict validate_serial(const Block& block, const FinalState& init_state);

}  // namespace objsc

#endif  // OBJSC_VALIDATOR_HPP
