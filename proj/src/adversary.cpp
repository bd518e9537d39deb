#include "objsc/adversary.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <stdexcept>

#include "objsc/chained_table.hpp"
#include "objsc/contracts.hpp"
#include "objsc/executor.hpp"
#include "objsc/workload.hpp"

namespace objsc {

namespace {

// Reads fall through to the base table unless this SCT already wrote the
// key; writes stay buffered until apply().
class BufferingExecutor final : public Executor {
 public:
  explicit BufferingExecutor(ChainedTable& base) : base_(base) {}

  std::optional<Value> lookup(Key k) override {
    for (auto it = buffer_.rbegin(); it != buffer_.rend(); ++it) {
      if (it->first == k) return it->second;
    }
    return base_.lookup(k);
  }
  void insert(Key k, Value v) override { buffer_.emplace_back(k, v); }
  void erase(Key k) override { buffer_.emplace_back(k, std::nullopt); }

  void apply() {
    for (const auto& [k, v] : buffer_) {
      if (v.has_value()) {
        base_.insert(k, *v);
      } else {
        base_.erase(k);
      }
    }
  }

 private:
  ChainedTable& base_;
  std::vector<std::pair<Key, std::optional<Value>>> buffer_;
};

// Executes `first` and `second` as if their reads all happened before either
// write: both read the same pre-state, then the writes land in order.
void run_pair_overlapped(ChainedTable& table, const Sct& first,
                         const Sct& second, bool reverse_writes) {
  BufferingExecutor ex_a(table);
  BufferingExecutor ex_b(table);
  run_sct(first, ex_a);
  run_sct(second, ex_b);
  if (reverse_writes) {
    ex_b.apply();
    ex_a.apply();
  } else {
    ex_a.apply();
    ex_b.apply();
  }
}

struct FabricationPlan {
  std::vector<std::uint32_t> order;  // sct ids, execution order
  std::size_t overlap_at = 0;        // order[overlap_at] races order[overlap_at+1]
  bool has_overlap = false;
};

FinalState fabricate_state(const std::vector<Sct>& scts,
                           const FinalState& init, std::size_t buckets,
                           const FabricationPlan& plan, bool reverse_writes) {
  ChainedTable table(buckets);
  table.preload(init);
  for (std::size_t i = 0; i < plan.order.size(); ++i) {
    if (plan.has_overlap && i == plan.overlap_at) {
      run_pair_overlapped(table, scts[plan.order[i]], scts[plan.order[i + 1]],
                          reverse_writes);
      ++i;
      continue;
    }
    DirectExecutor ex(table);
    run_sct(scts[plan.order[i]], ex);
  }
  return table.snapshot();
}

}  // namespace

Block make_double_spend_block(const DoubleSpendOptions& options) {
  WorkloadSpec spec;
  spec.contract = ContractMix::Coin;
  spec.shared_items = 3 + options.filler_accounts;
  spec.hash_buckets = options.hash_buckets;
  spec.mint_value = 100;
  spec.seed = 0;

  // The three accounts take the highest key ids, i.e. the tail of their
  // bucket chains: with fillers, each access walks a long chain, which is
  // what gives concurrent validator threads a real window to interleave.
  Value a = spec.shared_items - 3;
  Value b = spec.shared_items - 2;
  Value c = spec.shared_items - 1;

  Block block;
  block.scts.resize(2);
  block.scts[0] = {0, ScFun::CoinSend, {a, b, 50}, SctStatus::Committed};
  block.scts[1] = {1, ScFun::CoinSend, {a, c, 60}, SctStatus::Committed};

  // Two vertices, deliberately no edge between the conflicting sends.
  block.bg.add_vertex(1, 0);
  block.bg.add_vertex(2, 1);

  FabricationPlan plan;
  plan.order = {0, 1};
  plan.overlap_at = 0;
  plan.has_overlap = true;
  block.final_state = fabricate_state(block.scts, mint_state(spec),
                                      spec.hash_buckets, plan,
                                      options.alternate_state);

  block.prev_hash = options.prev_hash;
  block.meta.protocol = Protocol::Svostm;
  block.meta.threads = 2;
  block.meta.contract = spec.contract;
  block.meta.shared_items = spec.shared_items;
  block.meta.hash_buckets = spec.hash_buckets;
  block.meta.workload_seed = spec.seed;
  block.meta.mint_value = spec.mint_value;
  return block;
}

Block make_double_vote_block(const DoubleVoteOptions& options) {
  WorkloadSpec spec;
  spec.contract = ContractMix::Ballot;
  spec.shared_items = 8 + options.filler_items;
  spec.hash_buckets = options.hash_buckets;
  spec.seed = 0;

  KeySpace ks = key_space_for(spec, ContractMix::Ballot);
  std::uint32_t proposals = ballot_proposals(ks);
  if (proposals < 2) throw std::invalid_argument("need two proposals");
  // Highest ids for the same chain-depth reason as the double-spend block.
  Key p0 = ks.physical(proposals - 2);
  Key p1 = ks.physical(proposals - 1);
  Key voter = ks.physical(ks.logical_size - 1);

  Block block;
  block.scts.resize(2);
  block.scts[0] = {0, ScFun::BallotVote,
                   {static_cast<Value>(voter), static_cast<Value>(p0)},
                   SctStatus::Committed};
  block.scts[1] = {1, ScFun::BallotVote,
                   {static_cast<Value>(voter), static_cast<Value>(p1)},
                   SctStatus::Committed};
  block.bg.add_vertex(1, 0);
  block.bg.add_vertex(2, 1);

  FabricationPlan plan;
  plan.order = {0, 1};
  plan.overlap_at = 0;
  plan.has_overlap = true;
  block.final_state = fabricate_state(block.scts, mint_state(spec),
                                      spec.hash_buckets, plan, false);

  block.prev_hash = options.prev_hash;
  block.meta.protocol = Protocol::Svostm;
  block.meta.threads = 2;
  block.meta.contract = spec.contract;
  block.meta.shared_items = spec.shared_items;
  block.meta.hash_buckets = spec.hash_buckets;
  block.meta.workload_seed = spec.seed;
  block.meta.mint_value = spec.mint_value;
  return block;
}

namespace {

struct EdgeRef {
  Ts from;
  Ts to;
};

bool path_exists(const BlockGraph& bg, Ts from, Ts to, const EdgeRef& skip) {
  std::vector<Ts> stack{from};
  std::set<Ts> seen{from};
  while (!stack.empty()) {
    Ts cur = stack.back();
    stack.pop_back();
    if (cur == to) return true;
    const BlockGraph::VertexNode* v = bg.find_vertex(cur);
    BlockGraph::for_each_edge(*v, [&](const BlockGraph::EdgeNode& e) {
      if (cur == skip.from && e.ts == skip.to) return;
      if (e.ts <= to && seen.insert(e.ts).second) stack.push_back(e.ts);
    });
  }
  return false;
}

// Kahn order over the graph-minus-edge that emits the dropped pair
// back to back as soon as both are schedulable; ties otherwise break by ts.
FabricationPlan plan_overlap(const BlockGraph& tampered, Ts drop_from,
                             Ts drop_to) {
  std::map<Ts, std::size_t> indeg;
  tampered.for_each_vertex(
      [&indeg](const BlockGraph::VertexNode& v) { indeg[v.ts] = 0; });
  tampered.for_each_vertex([&indeg](const BlockGraph::VertexNode& v) {
    BlockGraph::for_each_edge(
        v, [&indeg](const BlockGraph::EdgeNode& e) { ++indeg[e.ts]; });
  });
  std::set<Ts> sources;
  for (const auto& [ts, d] : indeg) {
    if (d == 0) sources.insert(ts);
  }

  FabricationPlan plan;
  auto emit = [&](Ts ts) {
    plan.order.push_back(tampered.find_vertex(ts)->sct_id);
    BlockGraph::for_each_edge(*tampered.find_vertex(ts),
                              [&](const BlockGraph::EdgeNode& e) {
                                if (--indeg[e.ts] == 0) sources.insert(e.ts);
                              });
  };
  while (!sources.empty()) {
    if (!plan.has_overlap && sources.count(drop_from) != 0 &&
        sources.count(drop_to) != 0) {
      plan.overlap_at = plan.order.size();
      plan.has_overlap = true;
      sources.erase(drop_from);
      sources.erase(drop_to);
      emit(drop_from);
      emit(drop_to);
      continue;
    }
    Ts ts = *sources.begin();
    sources.erase(sources.begin());
    emit(ts);
  }
  return plan;
}

}  // namespace

Block make_emb_block(const Block& honest, const AttackSpec& spec) {
  std::vector<EdgeRef> edges;
  honest.bg.for_each_vertex([&edges](const BlockGraph::VertexNode& v) {
    BlockGraph::for_each_edge(v, [&edges, &v](const BlockGraph::EdgeNode& e) {
      edges.push_back({v.ts, e.ts});
    });
  });
  if (edges.empty()) {
    throw std::invalid_argument("block has no removable edge");
  }

  // Only edges whose removal really disconnects the pair are attacks; a
  // transitive path would still serialize the two SCTs.
  std::vector<EdgeRef> candidates;
  for (const EdgeRef& e : edges) {
    if (!path_exists(honest.bg, e.from, e.to, e)) candidates.push_back(e);
  }
  if (candidates.empty()) {
    throw std::invalid_argument("every edge has a transitive backup path");
  }

  std::mt19937_64 rng(spec.seed);
  // The fabricated state must come from a schedule where the freed pair
  // actually overlaps; try candidates until one admits such a schedule.
  std::shuffle(candidates.begin(), candidates.end(), rng);
  for (const EdgeRef& drop : candidates) {
    BlockGraph tampered;
    honest.bg.for_each_vertex([&tampered](const BlockGraph::VertexNode& v) {
      tampered.add_vertex(v.ts, v.sct_id);
    });
    honest.bg.for_each_vertex([&](const BlockGraph::VertexNode& v) {
      BlockGraph::for_each_edge(v, [&](const BlockGraph::EdgeNode& e) {
        if (v.ts == drop.from && e.ts == drop.to) return;
        tampered.add_edge(v.ts, e.ts);
      });
    });

    FabricationPlan plan = plan_overlap(tampered, drop.from, drop.to);
    if (!plan.has_overlap) continue;

    Block out;
    out.scts = honest.scts;
    out.final_state = fabricate_state(out.scts, block_init_state(honest),
                                      honest.meta.hash_buckets, plan, false);
    out.bg = std::move(tampered);
    out.prev_hash = honest.prev_hash;
    out.meta = honest.meta;
    return out;
  }
  throw std::invalid_argument("no droppable edge admits an overlapped replay");
}

}  // namespace objsc
