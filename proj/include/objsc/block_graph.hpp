#ifndef OBJSC_BLOCK_GRAPH_HPP
#define OBJSC_BLOCK_GRAPH_HPP

#include <atomic>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "objsc/types.hpp"

namespace objsc {

// Lock-free adjacency-list block graph. Miner threads add vertices and
// edges concurrently through CAS insertion into sorted lists; validator
// threads claim source vertices by swinging their indegree from 0 to -1 and
// release successors by decrementing indegrees. Nothing is ever unlinked
// while a block is being built or replayed, so no reclamation scheme is
// needed.
class BlockGraph {
 public:
  struct VertexNode;

  struct EdgeNode {
    Ts ts;                    // target transaction's timestamp
    VertexNode* target;       // vrtRef: direct pointer for indegree updates
    std::atomic<EdgeNode*> next{nullptr};
    EdgeNode(Ts t, VertexNode* v) : ts(t), target(v) {}
  };

  struct VertexNode {
    Ts ts;
    std::uint32_t sct_id;     // which SCT this vertex executes
    std::atomic<std::int32_t> indegree{0};  // -1 once claimed
    std::atomic<EdgeNode*> edges{nullptr};  // out-edges sorted by ts
    std::atomic<VertexNode*> next{nullptr};
    VertexNode(Ts t, std::uint32_t id) : ts(t), sct_id(id) {}
  };

  enum class AddVertex : std::uint8_t { Added, AlreadyExists };
  enum class AddEdge : std::uint8_t { Added, AlreadyPresent };

  BlockGraph();
  ~BlockGraph();

  BlockGraph(const BlockGraph&) = delete;
  BlockGraph& operator=(const BlockGraph&) = delete;
  BlockGraph(BlockGraph&& other) noexcept;
  BlockGraph& operator=(BlockGraph&& other) noexcept;

  AddVertex add_vertex(Ts ts, std::uint32_t sct_id);
  // Both endpoints must exist and from < to. Increments the target indegree
  // exactly once per distinct edge, no matter how many threads race it.
  AddEdge add_edge(Ts from, Ts to);

  // Ensures vertices for ts and each conflicting ts', then inserts every
  // conflict edge oriented from the lower to the higher timestamp.
  void build_bg(Ts ts, std::uint32_t sct_id,
                const std::vector<Ts>& conflicts,
                const std::vector<std::uint32_t>& conflict_sct_ids);

  VertexNode* find_vertex(Ts ts) const;

  // Claims (indegree 0 -> -1) the first unclaimed source, scanning the
  // vertex list in timestamp order. Null when nothing is claimable now.
  VertexNode* global_search();
  // Claims a previously logged source; entries whose claim is lost are
  // dropped. Null when the log runs dry.
  static VertexNode* local_search(std::vector<VertexNode*>& local_log);
  // Decrements successors' indegrees after v's SCT ran; fresh sources land
  // in the caller's local log.
  static void rem_exec_node(VertexNode* v, std::vector<VertexNode*>& local_log);

  std::size_t vertex_count() const { return vertex_count_.load(); }
  std::size_t edge_count() const { return edge_count_.load(); }

  // Iteration helper for quiescent passes (serialization, checks).
  template <typename F>
  void for_each_vertex(F&& f) const {
    for (VertexNode* v = head_->next.load(std::memory_order_acquire);
         v != tail_; v = v->next.load(std::memory_order_acquire)) {
      f(*v);
    }
  }

  template <typename F>
  static void for_each_edge(const VertexNode& v, F&& f) {
    for (EdgeNode* e = v.edges.load(std::memory_order_acquire); e != nullptr;
         e = e->next.load(std::memory_order_acquire)) {
      f(*e);
    }
  }

  // Deep copy with pristine indegrees (a validation run consumes them).
  BlockGraph clone() const;

  // Quiescent topological order, ties broken by ascending ts.
  // Empty optional if a cycle is detected.
  std::optional<std::vector<Ts>> topo_order() const;

  // Wire format: magic, version byte, |V|, then per vertex
  // (ts, sctId, outDegree, target ts list), all little-endian u32.
  // Indegrees are recomputed on load.
  std::vector<std::uint8_t> serialize() const;
  static BlockGraph deserialize(const std::uint8_t* data, std::size_t size);

  // One "u->v" line per edge, ts order.
  std::string debug_dump() const;

 private:
  void destroy();

  VertexNode* head_;  // sentinel, ts = -inf
  VertexNode* tail_;  // sentinel, ts = +inf
  std::atomic<std::size_t> vertex_count_{0};
  std::atomic<std::size_t> edge_count_{0};
};

struct BgFormatError : std::runtime_error {
  explicit BgFormatError(const std::string& what) : std::runtime_error(what) {}
};

// Block-size model: a block of n SCTs costs 200 bytes per SCT; the graph
// adds 28 bytes per vertex and 20 per edge.
struct BgSizeStats {
  std::uint64_t block_bytes = 0;   // B
  std::uint64_t graph_bytes = 0;   // beta
  double percent = 0.0;            // beta_p
};

BgSizeStats bg_size_stats(std::size_t num_scts, std::size_t num_edges);

}  // namespace objsc

#endif  // OBJSC_BLOCK_GRAPH_HPP
