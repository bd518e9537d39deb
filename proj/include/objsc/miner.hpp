#ifndef OBJSC_MINER_HPP
#define OBJSC_MINER_HPP

#include <vector>

#include "objsc/block.hpp"
#include "objsc/workload.hpp"

namespace objsc {

struct MinerConfig {
  Protocol protocol = Protocol::Svostm;
  std::uint32_t threads = 8;  // ignored for Serial
  WorkloadSpec workload;
};

// Committed key footprint of one SCT, for the oracles (serializability,
// graph completeness) and the adversary's edge selection.
struct SctFootprint {
  Ts ts = kNoTs;
  std::uint32_t sct_id = 0;
  std::vector<Key> lookup_keys;
  std::vector<Key> update_keys;
};

struct MineResult {
  Block block;
  std::uint32_t begin_count = 0;
  std::uint32_t abort_count = 0;
  std::vector<SctFootprint> footprints;  // one per SCT, ordered by sct id
  double elapsed_ms = 0.0;               // execution + graph construction
};

// Multi-threaded miner: worker threads drain a shared index over the SCT
// list, execute each SCT under the chosen STM with retry-on-abort, and build
// the block graph from the conflict list of every commit. The final state is
// snapshotted once all workers drained the index.
MineResult mine_block(const MinerConfig& cfg, const std::vector<Sct>& scts,
                      const FinalState& init_state, std::uint64_t prev_hash);

// Serial baseline: in-order execution on raw shared memory. The block graph
// is rebuilt from the same per-key conflict bookkeeping the STM would have
// produced; elapsed_ms covers the execution loop only.
MineResult mine_serial(const WorkloadSpec& workload,
                       const std::vector<Sct>& scts,
                       const FinalState& init_state, std::uint64_t prev_hash);

}  // namespace objsc

#endif  // OBJSC_MINER_HPP
