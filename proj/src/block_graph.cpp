#include "objsc/block_graph.hpp"

#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace objsc {

namespace {
constexpr std::uint32_t kBgMagic = 0x3147424Fu;  // "OBG1"
constexpr std::uint8_t kBgVersion = 1;
}  // namespace

BlockGraph::BlockGraph()
    : head_(new VertexNode(std::numeric_limits<Ts>::min(), 0)),
      tail_(new VertexNode(std::numeric_limits<Ts>::max(), 0)) {
  head_->next.store(tail_, std::memory_order_relaxed);
}

BlockGraph::~BlockGraph() { destroy(); }

void BlockGraph::destroy() {
  if (head_ == nullptr) return;
  VertexNode* v = head_;
  while (v != nullptr) {
    VertexNode* next = v->next.load(std::memory_order_relaxed);
    EdgeNode* e = v->edges.load(std::memory_order_relaxed);
    while (e != nullptr) {
      EdgeNode* en = e->next.load(std::memory_order_relaxed);
      delete e;
      e = en;
    }
    delete v;
    v = next;
  }
  head_ = nullptr;
  tail_ = nullptr;
}

BlockGraph::BlockGraph(BlockGraph&& other) noexcept
    : head_(other.head_),
      tail_(other.tail_),
      vertex_count_(other.vertex_count_.load()),
      edge_count_(other.edge_count_.load()) {
  other.head_ = nullptr;
  other.tail_ = nullptr;
}

BlockGraph& BlockGraph::operator=(BlockGraph&& other) noexcept {
  if (this != &other) {
    destroy();
    head_ = other.head_;
    tail_ = other.tail_;
    vertex_count_.store(other.vertex_count_.load());
    edge_count_.store(other.edge_count_.load());
    other.head_ = nullptr;
    other.tail_ = nullptr;
  }
  return *this;
}

BlockGraph::AddVertex BlockGraph::add_vertex(Ts ts, std::uint32_t sct_id) {
  VertexNode* fresh = nullptr;
  VertexNode* pred = head_;
  for (;;) {
    VertexNode* curr = pred->next.load(std::memory_order_acquire);
    while (curr->ts < ts) {
      pred = curr;
      curr = curr->next.load(std::memory_order_acquire);
    }
    if (curr != tail_ && curr->ts == ts) {
      delete fresh;
      return AddVertex::AlreadyExists;
    }
    if (fresh == nullptr) fresh = new VertexNode(ts, sct_id);
    fresh->next.store(curr, std::memory_order_relaxed);
    if (pred->next.compare_exchange_strong(curr, fresh,
                                           std::memory_order_acq_rel)) {
      vertex_count_.fetch_add(1, std::memory_order_relaxed);
      return AddVertex::Added;
    }
    // Lost the race; resume the search from the current predecessor.
  }
}

BlockGraph::VertexNode* BlockGraph::find_vertex(Ts ts) const {
  VertexNode* v = head_->next.load(std::memory_order_acquire);
  while (v->ts < ts) v = v->next.load(std::memory_order_acquire);
  return (v != tail_ && v->ts == ts) ? v : nullptr;
}

BlockGraph::AddEdge BlockGraph::add_edge(Ts from, Ts to) {
  if (from >= to) {
    throw std::invalid_argument("add_edge: edges go from lower to higher ts");
  }
  VertexNode* src = find_vertex(from);
  VertexNode* dst = find_vertex(to);
  if (src == nullptr || dst == nullptr) {
    throw std::invalid_argument("add_edge: missing vertex");
  }
  EdgeNode* fresh = nullptr;
  std::atomic<EdgeNode*>* link = &src->edges;
  for (;;) {
    EdgeNode* curr = link->load(std::memory_order_acquire);
    while (curr != nullptr && curr->ts < to) {
      link = &curr->next;
      curr = link->load(std::memory_order_acquire);
    }
    if (curr != nullptr && curr->ts == to) {
      delete fresh;
      return AddEdge::AlreadyPresent;
    }
    if (fresh == nullptr) fresh = new EdgeNode(to, dst);
    fresh->next.store(curr, std::memory_order_relaxed);
    if (link->compare_exchange_strong(curr, fresh,
                                      std::memory_order_acq_rel)) {
      dst->indegree.fetch_add(1, std::memory_order_acq_rel);
      edge_count_.fetch_add(1, std::memory_order_relaxed);
      return AddEdge::Added;
    }
  }
}

void BlockGraph::build_bg(Ts ts, std::uint32_t sct_id,
                          const std::vector<Ts>& conflicts,
                          const std::vector<std::uint32_t>& conflict_sct_ids) {
  add_vertex(ts, sct_id);
  for (std::size_t i = 0; i < conflicts.size(); ++i) {
    Ts other = conflicts[i];
    add_vertex(other, conflict_sct_ids[i]);
    if (other > ts) {
      add_edge(ts, other);
    } else {
      add_edge(other, ts);
    }
  }
}

BlockGraph::VertexNode* BlockGraph::global_search() {
  for (VertexNode* v = head_->next.load(std::memory_order_acquire);
       v != tail_; v = v->next.load(std::memory_order_acquire)) {
    std::int32_t zero = 0;
    if (v->indegree.load(std::memory_order_relaxed) == 0 &&
        v->indegree.compare_exchange_strong(zero, -1,
                                            std::memory_order_acq_rel)) {
      return v;
    }
  }
  return nullptr;
}

BlockGraph::VertexNode* BlockGraph::local_search(
    std::vector<VertexNode*>& local_log) {
  while (!local_log.empty()) {
    VertexNode* v = local_log.back();
    local_log.pop_back();
    std::int32_t zero = 0;
    if (v->indegree.compare_exchange_strong(zero, -1,
                                            std::memory_order_acq_rel)) {
      return v;
    }
    // Someone else claimed it; drop the entry.
  }
  return nullptr;
}

void BlockGraph::rem_exec_node(VertexNode* v,
                               std::vector<VertexNode*>& local_log) {
  for (EdgeNode* e = v->edges.load(std::memory_order_acquire); e != nullptr;
       e = e->next.load(std::memory_order_acquire)) {
    std::int32_t before = e->target->indegree.fetch_sub(
        1, std::memory_order_acq_rel);
    if (before == 1) local_log.push_back(e->target);
  }
}

BlockGraph BlockGraph::clone() const {
  BlockGraph out;
  for_each_vertex([&out](const VertexNode& v) {
    out.add_vertex(v.ts, v.sct_id);
  });
  for_each_vertex([&out](const VertexNode& v) {
    for_each_edge(v, [&out, &v](const EdgeNode& e) {
      out.add_edge(v.ts, e.ts);
    });
  });
  return out;
}

std::optional<std::vector<Ts>> BlockGraph::topo_order() const {
  // Indegrees are recomputed so the order also works on consumed graphs.
  std::map<Ts, std::size_t> indeg;
  for_each_vertex([&indeg](const VertexNode& v) { indeg[v.ts] = 0; });
  for_each_vertex([&indeg](const VertexNode& v) {
    for_each_edge(v, [&indeg](const EdgeNode& e) { ++indeg[e.ts]; });
  });
  std::set<Ts> sources;
  for (const auto& [ts, d] : indeg) {
    if (d == 0) sources.insert(ts);
  }
  std::vector<Ts> order;
  order.reserve(indeg.size());
  while (!sources.empty()) {
    Ts ts = *sources.begin();
    sources.erase(sources.begin());
    order.push_back(ts);
    const VertexNode* v = find_vertex(ts);
    for_each_edge(*v, [&indeg, &sources](const EdgeNode& e) {
      if (--indeg[e.ts] == 0) sources.insert(e.ts);
    });
  }
  if (order.size() != indeg.size()) return std::nullopt;  // cycle
  return order;
}

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 24));
}

struct Reader {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t pos = 0;

  std::uint8_t u8() {
    if (pos + 1 > size) throw BgFormatError("truncated block graph");
    return data[pos++];
  }
  std::uint32_t u32() {
    if (pos + 4 > size) throw BgFormatError("truncated block graph");
    std::uint32_t v = static_cast<std::uint32_t>(data[pos]) |
                      (static_cast<std::uint32_t>(data[pos + 1]) << 8) |
                      (static_cast<std::uint32_t>(data[pos + 2]) << 16) |
                      (static_cast<std::uint32_t>(data[pos + 3]) << 24);
    pos += 4;
    return v;
  }
};

}  // namespace

std::vector<std::uint8_t> BlockGraph::serialize() const {
  std::vector<std::uint8_t> out;
  put_u32(out, kBgMagic);
  out.push_back(kBgVersion);
  put_u32(out, static_cast<std::uint32_t>(vertex_count()));
  for_each_vertex([&out](const VertexNode& v) {
    if (v.ts < 0 || v.ts > std::numeric_limits<std::uint32_t>::max()) {
      throw BgFormatError("vertex ts out of wire range");
    }
    put_u32(out, static_cast<std::uint32_t>(v.ts));
    put_u32(out, v.sct_id);
    std::uint32_t deg = 0;
    for_each_edge(v, [&deg](const EdgeNode&) { ++deg; });
    put_u32(out, deg);
    for_each_edge(v, [&out](const EdgeNode& e) {
      put_u32(out, static_cast<std::uint32_t>(e.ts));
    });
  });
  return out;
}

BlockGraph BlockGraph::deserialize(const std::uint8_t* data,
                                   std::size_t size) {
  Reader r{data, size};
  if (r.u32() != kBgMagic) throw BgFormatError("bad block graph magic");
  if (r.u8() != kBgVersion) throw BgFormatError("unknown block graph version");
  std::uint32_t vcount = r.u32();

  BlockGraph out;
  struct Pending {
    Ts from;
    Ts to;
  };
  std::vector<Pending> edges;
  for (std::uint32_t i = 0; i < vcount; ++i) {
    Ts ts = static_cast<Ts>(r.u32());
    std::uint32_t sct_id = r.u32();
    if (out.add_vertex(ts, sct_id) != AddVertex::Added) {
      throw BgFormatError("duplicate vertex");
    }
    std::uint32_t deg = r.u32();
    for (std::uint32_t j = 0; j < deg; ++j) {
      Ts to = static_cast<Ts>(r.u32());
      if (to <= ts) throw BgFormatError("edge does not ascend in ts");
      edges.push_back({ts, to});
    }
  }
  if (r.pos != r.size) throw BgFormatError("trailing bytes after block graph");
  for (const Pending& e : edges) {
    if (out.find_vertex(e.to) == nullptr) {
      throw BgFormatError("edge target is not a vertex");
    }
    out.add_edge(e.from, e.to);
  }
  return out;
}

std::string BlockGraph::debug_dump() const {
  std::ostringstream os;
  for_each_vertex([&os](const VertexNode& v) {
    for_each_edge(v, [&os, &v](const EdgeNode& e) {
      os << v.ts << "->" << e.ts << "\n";
    });
  });
  return os.str();
}

BgSizeStats bg_size_stats(std::size_t num_scts, std::size_t num_edges) {
  BgSizeStats s;
  s.block_bytes = 200ull * num_scts;
  s.graph_bytes = 28ull * num_scts + 20ull * num_edges;
  s.percent = num_scts == 0
                  ? 0.0
                  : 100.0 * static_cast<double>(s.graph_bytes) /
                        static_cast<double>(s.block_bytes);
  return s;
}

}  // namespace objsc
