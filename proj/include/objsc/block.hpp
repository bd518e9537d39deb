#ifndef OBJSC_BLOCK_HPP
#define OBJSC_BLOCK_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "objsc/block_graph.hpp"
#include "objsc/sct.hpp"
#include "objsc/types.hpp"

namespace objsc {

struct BlockMeta {
  Protocol protocol = Protocol::Serial;
  std::uint32_t threads = 1;
  std::uint32_t abort_count = 0;
  // Enough workload context for a validator to rebuild the initial state.
  ContractMix contract = ContractMix::Coin;
  std::uint32_t shared_items = 0;
  std::uint32_t hash_buckets = kDefaultBuckets;
  std::uint64_t workload_seed = 0;
  Value mint_value = 0;
};

struct Block {
  std::vector<Sct> scts;
  BlockGraph bg;
  FinalState final_state;  // FS_m, sorted by key
  std::uint64_t prev_hash = 0;
  BlockMeta meta;

  Block() = default;
  Block(Block&&) = default;
  Block& operator=(Block&&) = default;
};

struct BlockFormatError : std::runtime_error {
  explicit BlockFormatError(const std::string& what)
      : std::runtime_error(what) {}
};

std::vector<std::uint8_t> serialize_block(const Block& block);
Block parse_block(const std::uint8_t* data, std::size_t size);
Block parse_block(const std::vector<std::uint8_t>& bytes);

// FNV-1a over the canonical serialization (prevHash included).
std::uint64_t block_hash(const Block& block);

// Initial shared state implied by the block's workload meta.
FinalState block_init_state(const Block& block);

bool write_block_file(const Block& block, const std::string& path,
                      std::string* error);
std::optional<Block> read_block_file(const std::string& path,
                                     std::string* error);

}  // namespace objsc

#endif  // OBJSC_BLOCK_HPP
