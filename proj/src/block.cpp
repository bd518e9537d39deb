#include "objsc/block.hpp"

#include <fstream>

#include "objsc/workload.hpp"

namespace objsc {

namespace {

constexpr std::uint32_t kBlockMagic = 0x4243534Fu;  // "OSCB"
constexpr std::uint8_t kBlockVersion = 1;

void put_u8(std::vector<std::uint8_t>& out, std::uint8_t v) {
  out.push_back(v);
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_i64(std::vector<std::uint8_t>& out, std::int64_t v) {
  put_u64(out, static_cast<std::uint64_t>(v));
}

struct Reader {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (pos + n > size) throw BlockFormatError("truncated block");
  }
  std::uint8_t u8() {
    need(1);
    return data[pos++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data[pos + i]) << (8 * i);
    pos += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data[pos + i]) << (8 * i);
    pos += 8;
    return v;
  }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
};

}  // namespace

std::vector<std::uint8_t> serialize_block(const Block& block) {
  std::vector<std::uint8_t> out;
  put_u32(out, kBlockMagic);
  put_u8(out, kBlockVersion);
  put_u8(out, static_cast<std::uint8_t>(block.meta.protocol));
  put_u32(out, block.meta.threads);
  put_u32(out, block.meta.abort_count);
  put_u8(out, static_cast<std::uint8_t>(block.meta.contract));
  put_u32(out, block.meta.shared_items);
  put_u32(out, block.meta.hash_buckets);
  put_u64(out, block.meta.workload_seed);
  put_i64(out, block.meta.mint_value);
  put_u64(out, block.prev_hash);

  put_u32(out, static_cast<std::uint32_t>(block.scts.size()));
  for (const Sct& s : block.scts) {
    put_u32(out, s.id);
    put_u8(out, static_cast<std::uint8_t>(s.fn));
    put_u8(out, static_cast<std::uint8_t>(s.status));
    put_u8(out, static_cast<std::uint8_t>(s.args.size()));
    for (Value a : s.args) put_i64(out, a);
  }

  std::vector<std::uint8_t> bg = block.bg.serialize();
  put_u32(out, static_cast<std::uint32_t>(bg.size()));
  out.insert(out.end(), bg.begin(), bg.end());

  put_u32(out, static_cast<std::uint32_t>(block.final_state.size()));
  for (const FsEntry& e : block.final_state) {
    put_u32(out, e.key);
    put_u8(out, e.present ? 1 : 0);
    put_i64(out, e.value);
  }
  return out;
}

Block parse_block(const std::uint8_t* data, std::size_t size) {
  Reader r{data, size};
  if (r.u32() != kBlockMagic) throw BlockFormatError("bad block magic");
  if (r.u8() != kBlockVersion) throw BlockFormatError("unknown block version");

  Block block;
  std::uint8_t proto = r.u8();
  if (proto > 2) throw BlockFormatError("bad protocol tag");
  block.meta.protocol = static_cast<Protocol>(proto);
  block.meta.threads = r.u32();
  block.meta.abort_count = r.u32();
  std::uint8_t contract = r.u8();
  if (contract > 3) throw BlockFormatError("bad contract tag");
  block.meta.contract = static_cast<ContractMix>(contract);
  block.meta.shared_items = r.u32();
  block.meta.hash_buckets = r.u32();
  block.meta.workload_seed = r.u64();
  block.meta.mint_value = r.i64();
  block.prev_hash = r.u64();

  std::uint32_t n = r.u32();
  block.scts.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    Sct s;
    s.id = r.u32();
    std::uint8_t fn = r.u8();
    if (fn > 5) throw BlockFormatError("bad contract function");
    s.fn = static_cast<ScFun>(fn);
    std::uint8_t status = r.u8();
    if (status > 2) throw BlockFormatError("bad sct status");
    s.status = static_cast<SctStatus>(status);
    std::uint8_t argc = r.u8();
    if (argc != arg_count(s.fn)) {
      throw BlockFormatError("wrong argument count for contract function");
    }
    s.args.reserve(argc);
    for (std::uint8_t j = 0; j < argc; ++j) s.args.push_back(r.i64());
    block.scts.push_back(std::move(s));
  }

  std::uint32_t bg_len = r.u32();
  r.need(bg_len);
  try {
    block.bg = BlockGraph::deserialize(data + r.pos, bg_len);
  } catch (const BgFormatError& e) {
    throw BlockFormatError(e.what());
  }
  r.pos += bg_len;

  std::uint32_t fs_count = r.u32();
  block.final_state.reserve(fs_count);
  Key prev_key = 0;
  for (std::uint32_t i = 0; i < fs_count; ++i) {
    FsEntry e;
    e.key = r.u32();
    e.present = r.u8() != 0;
    e.value = r.i64();
    if (i > 0 && e.key <= prev_key) {
      throw BlockFormatError("final state keys not strictly ascending");
    }
    prev_key = e.key;
    block.final_state.push_back(e);
  }
  if (r.pos != r.size) throw BlockFormatError("trailing bytes after block");
  return block;
}

Block parse_block(const std::vector<std::uint8_t>& bytes) {
  return parse_block(bytes.data(), bytes.size());
}

std::uint64_t block_hash(const Block& block) {
  std::vector<std::uint8_t> bytes = serialize_block(block);
  std::uint64_t h = 14695981039346656037ull;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

FinalState block_init_state(const Block& block) {
  WorkloadSpec spec;
  spec.contract = block.meta.contract;
  spec.shared_items = block.meta.shared_items;
  spec.hash_buckets = block.meta.hash_buckets;
  spec.seed = block.meta.workload_seed;
  spec.mint_value = block.meta.mint_value;
  return mint_state(spec);
}

bool write_block_file(const Block& block, const std::string& path,
                      std::string* error) {
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    if (error != nullptr) *error = "cannot open " + path + " for writing";
    return false;
  }
  std::vector<std::uint8_t> bytes = serialize_block(block);
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!f) {
    if (error != nullptr) *error = "write failed for " + path;
    return false;
  }
  return true;
}

std::optional<Block> read_block_file(const std::string& path,
                                     std::string* error) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    if (error != nullptr) *error = "cannot open " + path;
    return std::nullopt;
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  try {
    return parse_block(bytes.data(), bytes.size());
  } catch (const BlockFormatError& e) {
    if (error != nullptr) *error = e.what();
    return std::nullopt;
  }
}

}  // namespace objsc
