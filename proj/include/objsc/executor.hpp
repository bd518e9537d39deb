#ifndef OBJSC_EXECUTOR_HPP
#define OBJSC_EXECUTOR_HPP

#include <optional>

#include "objsc/chained_table.hpp"
#include "objsc/types.hpp"

namespace objsc {

// Thrown by an STM-backed executor when an operation returns Abort. The
// miner catches it and retries the whole SCT under a fresh transaction.
struct TxnAborted {};

// Thrown by the counter-instrumented executor when a counter check fails.
struct MaliciousSignal {
  Key key = 0;
};

// Contract code is written once against this interface and runs under three
// different memories: the miner's STM, the validator's raw shared table and
// the smart validator's counter-guarded table.
class Executor {
 public:
  virtual ~Executor() = default;
  virtual std::optional<Value> lookup(Key k) = 0;
  virtual void insert(Key k, Value v) = 0;
  virtual void erase(Key k) = 0;
};

// Plain replay executor: direct reads and writes on the shared table,
// no concurrency control (the block graph provides the ordering).
class DirectExecutor final : public Executor {
 public:
  explicit DirectExecutor(ChainedTable& table) : table_(table) {}

  std::optional<Value> lookup(Key k) override { return table_.lookup(k); }
  void insert(Key k, Value v) override { table_.insert(k, v); }
  void erase(Key k) override { table_.erase(k); }

 private:
  ChainedTable& table_;
};

}  // namespace objsc

#endif  // OBJSC_EXECUTOR_HPP
