#ifndef OBJSC_STM_EXECUTOR_HPP
#define OBJSC_STM_EXECUTOR_HPP

#include "objsc/executor.hpp"

namespace objsc {

// Bridges contract code onto an STM transaction. An Abort from the store
// unwinds the contract via TxnAborted; the miner catches it and re-runs the
// SCT under a fresh transaction.
template <class Store>
class StmExecutor final : public Executor {
 public:
  StmExecutor(Store& store, typename Store::Txn& txn)
      : store_(store), txn_(txn) {}

  std::optional<Value> lookup(Key k) override {
    OpStatus st = store_.lookup(txn_, k);
    if (st.aborted()) throw TxnAborted{};
    if (!st.ok()) return std::nullopt;
    return st.value;
  }

  void insert(Key k, Value v) override { store_.insert(txn_, k, v); }

  void erase(Key k) override { store_.erase(txn_, k); }

 private:
  Store& store_;
  typename Store::Txn& txn_;
};

}  // namespace objsc

#endif  // OBJSC_STM_EXECUTOR_HPP
