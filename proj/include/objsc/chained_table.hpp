#ifndef OBJSC_CHAINED_TABLE_HPP
#define OBJSC_CHAINED_TABLE_HPP

#include <atomic>
#include <memory>
#include <mutex>
#include <vector>

#include "objsc/types.hpp"

namespace objsc {

// Fixed-bucket chained hash table used wherever SCTs run without an STM:
// the serial miner, the replay validators and the adversary's fabricated
// replays. Values live in atomics so that a deliberately racy replay of a
// malicious block stays within the memory model; node creation is serialized
// per bucket. Chains are sorted ascending by key and nodes are never removed
// (a delete only clears the present flag).
class ChainedTable {
 public:
  explicit ChainedTable(std::size_t buckets = kDefaultBuckets);
  ~ChainedTable();

  ChainedTable(const ChainedTable&) = delete;
  ChainedTable& operator=(const ChainedTable&) = delete;

  void preload(Key k, Value v);
  void preload(const FinalState& state);

  std::optional<Value> lookup(Key k) const;
  void insert(Key k, Value v);
  void erase(Key k);

  // Quiescent snapshot of every node, sorted by key.
  FinalState snapshot() const;

 private:
  struct Node {
    Key key;
    std::atomic<bool> present;
    std::atomic<Value> value;
    std::atomic<Node*> next{nullptr};
    Node(Key k, bool p, Value v) : key(k), present(p), value(v) {}
  };

  Node* find(Key k) const;
  Node* find_or_create(Key k);

  std::size_t bucket_of(Key k) const { return k % buckets_.size(); }

  struct Bucket {
    std::atomic<Node*> head{nullptr};
    std::mutex insert_mu;
  };
  std::vector<Bucket> buckets_;
};

}  // namespace objsc

#endif  // OBJSC_CHAINED_TABLE_HPP
