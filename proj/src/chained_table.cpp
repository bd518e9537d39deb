#include "objsc/chained_table.hpp"

#include <algorithm>

namespace objsc {

ChainedTable::ChainedTable(std::size_t buckets)
    : buckets_(buckets == 0 ? 1 : buckets) {}

ChainedTable::~ChainedTable() {
  for (auto& b : buckets_) {
    Node* n = b.head.load(std::memory_order_relaxed);
    while (n != nullptr) {
      Node* next = n->next.load(std::memory_order_relaxed);
      delete n;
      n = next;
    }
  }
}

ChainedTable::Node* ChainedTable::find(Key k) const {
  const Bucket& b = buckets_[bucket_of(k)];
  Node* n = b.head.load(std::memory_order_acquire);
  while (n != nullptr && n->key < k) {
    n = n->next.load(std::memory_order_acquire);
  }
  return (n != nullptr && n->key == k) ? n : nullptr;
}

ChainedTable::Node* ChainedTable::find_or_create(Key k) {
  if (Node* n = find(k)) return n;
  Bucket& b = buckets_[bucket_of(k)];
  std::lock_guard<std::mutex> guard(b.insert_mu);
  // Re-scan under the lock; an earlier racer may have created the node.
  std::atomic<Node*>* link = &b.head;
  Node* cur = link->load(std::memory_order_acquire);
  while (cur != nullptr && cur->key < k) {
    link = &cur->next;
    cur = link->load(std::memory_order_acquire);
  }
  if (cur != nullptr && cur->key == k) return cur;
  Node* fresh = new Node(k, false, 0);
  fresh->next.store(cur, std::memory_order_relaxed);
  link->store(fresh, std::memory_order_release);
  return fresh;
}

void ChainedTable::preload(Key k, Value v) {
  Node* n = find_or_create(k);
  n->value.store(v, std::memory_order_relaxed);
  n->present.store(true, std::memory_order_relaxed);
}

void ChainedTable::preload(const FinalState& state) {
  for (const FsEntry& e : state) {
    Node* n = find_or_create(e.key);
    n->value.store(e.value, std::memory_order_relaxed);
    n->present.store(e.present, std::memory_order_relaxed);
  }
}

std::optional<Value> ChainedTable::lookup(Key k) const {
  Node* n = find(k);
  if (n == nullptr || !n->present.load(std::memory_order_seq_cst)) {
    return std::nullopt;
  }
  return n->value.load(std::memory_order_seq_cst);
}

void ChainedTable::insert(Key k, Value v) {
  Node* n = find_or_create(k);
  n->value.store(v, std::memory_order_seq_cst);
  n->present.store(true, std::memory_order_seq_cst);
}

void ChainedTable::erase(Key k) {
  Node* n = find_or_create(k);
  n->present.store(false, std::memory_order_seq_cst);
}

FinalState ChainedTable::snapshot() const {
  FinalState out;
  for (const auto& b : buckets_) {
    Node* n = b.head.load(std::memory_order_acquire);
    while (n != nullptr) {
      out.push_back({n->key, n->present.load(std::memory_order_relaxed),
                     n->value.load(std::memory_order_relaxed)});
      n = n->next.load(std::memory_order_acquire);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const FsEntry& a, const FsEntry& b) { return a.key < b.key; });
  // A deleted key reports value 0 so snapshots compare by (key, present).
  for (FsEntry& e : out) {
    if (!e.present) e.value = 0;
  }
  return out;
}

}  // namespace objsc
