#ifndef OBJSC_HARNESS_HPP
#define OBJSC_HARNESS_HPP

#include <optional>
#include <string>
#include <vector>

#include "objsc/adversary.hpp"
#include "objsc/miner.hpp"
#include "objsc/validator.hpp"

namespace objsc {

enum class Sweep : std::uint8_t { W1 = 0, W2 = 1, W3 = 2, Custom = 3 };

const char* to_string(Sweep s);
std::optional<Sweep> sweep_from_string(const std::string& s);

// W1 varies the SCT count (50..300 step 50, 50 threads), W2 the thread
// count (10..60 step 10, 100 SCTs), W3 the shared data-items (100..600 step
// 100, 50 threads, 100 SCTs); hash buckets stay at 30 and shared items at
// 500 unless the sweep varies them.
struct RunConfig {
  Sweep sweep = Sweep::W1;
  std::uint32_t repeats = 26;  // first run is warm-up and discarded
  std::vector<Protocol> protocols = {Protocol::Svostm, Protocol::Mvostm};
  ContractMix contract = ContractMix::Mix;
  WorkloadSpec base;  // seed, shared, buckets; Custom also takes scts/threads
  bool smv = true;
  ValidatorStrategy strategy = ValidatorStrategy::Decentralized;
  std::string out_path;  // CSV; a .jsonl debug stream lands next to it
};

struct RunRecord {
  Sweep sweep = Sweep::Custom;
  std::uint32_t point = 0;  // the varied quantity's value at this point
  ContractMix contract = ContractMix::Mix;
  Protocol protocol = Protocol::Svostm;
  std::uint32_t scts = 0;
  std::uint32_t threads = 0;
  std::uint32_t shared_items = 0;
  std::uint32_t hash_buckets = 0;
  std::uint32_t samples = 0;  // measured repeats (warm-up excluded)

  double miner_ms = 0.0;
  double serial_miner_ms = 0.0;
  double validator_ms = 0.0;
  double serial_validator_ms = 0.0;
  double miner_speedup = 0.0;      // serial_miner_ms / miner_ms
  double validator_speedup = 0.0;  // serial_validator_ms / validator_ms
  double aborts = 0.0;             // mean abort count
  double bg_edges = 0.0;           // mean M_e
  double bg_bytes = 0.0;           // mean beta
  double bg_pct = 0.0;             // mean beta_p
  std::uint32_t accepts = 0;
  std::uint32_t runs = 0;
};

// Runs the sweep, writes CSV (+ JSON lines) when cfg.out_path is set.
// Empty optional plus *error on failure; an honest block being rejected is
// a failure, not a data point.
std::optional<std::vector<RunRecord>> run_sweep(const RunConfig& cfg,
                                                std::string* error);

std::string run_records_csv(const std::vector<RunRecord>& records);
bool write_run_records(const std::vector<RunRecord>& records,
                       const std::string& csv_path, std::string* error);

struct AdversaryConfig {
  std::uint32_t trials = 200;
  std::uint32_t threads = 4;
  std::uint64_t seed = 1;
  // Padding and a small bucket count lengthen the chains the racing SCTs
  // walk, so independently scheduled validators really do interleave.
  std::uint32_t filler_items = 1998;
  std::uint32_t hash_buckets = 3;
  std::uint32_t jitter_max_spin = 1000;
};

struct AdversaryResult {
  std::uint32_t trials = 0;
  std::uint32_t nonsmv_accepts = 0;
  std::uint32_t smv_accepts = 0;
  std::uint32_t smv_signal_rejects = 0;  // counter violation detected
  std::uint32_t smv_state_rejects = 0;
  bool counters_always_zero = true;

  double nonsmv_accept_pct() const {
    return trials == 0 ? 0.0 : 100.0 * nonsmv_accepts / trials;
  }
  double smv_accept_pct() const {
    return trials == 0 ? 0.0 : 100.0 * smv_accepts / trials;
  }
};

// Builds `trials` malicious blocks (double-spend and double-vote
// alternating) and validates each once without and once with counters.
AdversaryResult run_adversary_experiment(const AdversaryConfig& cfg);

std::string adversary_table(const AdversaryResult& r);

struct BgStatsRow {
  std::string label;
  Protocol protocol = Protocol::Serial;
  std::size_t scts = 0;
  std::size_t edges = 0;
  BgSizeStats stats;
};

BgStatsRow bg_stats_row(const std::string& label, const Block& block);
std::string bg_stats_table(const std::vector<BgStatsRow>& rows);

}  // namespace objsc

#endif  // OBJSC_HARNESS_HPP
