#ifndef OBJSC_ADVERSARY_HPP
#define OBJSC_ADVERSARY_HPP

#include <cstdint>

#include "objsc/block.hpp"

namespace objsc {

struct AttackSpec {
  enum class Kind : std::uint8_t { DropEdge = 0, DoubleSpend = 1 };
  Kind kind = Kind::DropEdge;
  std::uint64_t seed = 1;
};

// The canonical double-spend block: accounts A, B, C hold 100 each; one SCT
// sends 50 from A to B, a second sends 60 from A to C; the graph carries no
// edge between them and the stored final state is the outcome of the
// unsynchronized race where both sends read A's original balance.
// filler_accounts pads the mint with extra accounts so bucket chains get
// long enough for validator threads to actually race.
struct DoubleSpendOptions {
  std::uint64_t prev_hash = 0;
  std::uint32_t filler_accounts = 0;
  std::uint32_t hash_buckets = kDefaultBuckets;
  // false -> A ends at 40 (second send's write lands last),
  // true  -> A ends at 50.
  bool alternate_state = false;
};

Block make_double_spend_block(const DoubleSpendOptions& options);

// Ballot double vote: one voter casts ballots for two different proposals;
// honestly the second fails, the fabricated state counts both.
struct DoubleVoteOptions {
  std::uint64_t prev_hash = 0;
  std::uint32_t filler_items = 0;
  std::uint32_t hash_buckets = kDefaultBuckets;
};

Block make_double_vote_block(const DoubleVoteOptions& options);

// Generic edge-missing-graph attack over an honestly mined block: removes
// one conflict edge whose endpoints then race, and recomputes the stored
// final state as the outcome of one representative unsynchronized replay
// (the dropped pair overlaps, everything else follows the graph).
// Throws std::invalid_argument when the block has no removable edge.
Block make_emb_block(const Block& honest, const AttackSpec& spec);

}  // namespace objsc

#endif  // OBJSC_ADVERSARY_HPP
