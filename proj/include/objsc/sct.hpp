#ifndef OBJSC_SCT_HPP
#define OBJSC_SCT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "objsc/types.hpp"

namespace objsc {

// Contract functions executable inside a block.
enum class ScFun : std::uint8_t {
  CoinSend = 0,
  CoinGetBalance = 1,
  BallotVote = 2,
  BallotDelegate = 3,
  AuctionBid = 4,
  AuctionWithdraw = 5,
};

const char* to_string(ScFun f);

// Wire/shape helpers: how many arguments a function takes and which of them
// name shared keys (the rest are amounts).
std::uint8_t arg_count(ScFun f);
bool is_key_arg(ScFun f, std::size_t index);

enum class SctStatus : std::uint8_t { Pending = 0, Committed = 1, Fail = 2 };

// A smart-contract transaction: a contract function plus arguments. The step
// sequence is the function body run against an Executor; it is deterministic
// given the values its lookups return. A Fail outcome (insufficient balance,
// double vote, losing bid) still commits with identity updates; its lookups
// are real conflicts.
struct Sct {
  std::uint32_t id = 0;
  ScFun fn = ScFun::CoinSend;
  std::vector<Value> args;
  SctStatus status = SctStatus::Pending;
};

enum class ContractMix : std::uint8_t {
  Coin = 0,
  Ballot = 1,
  Auction = 2,
  Mix = 3,
};

const char* to_string(ContractMix c);
std::optional<ContractMix> contract_from_string(const std::string& s);

struct WorkloadSpec {
  ContractMix contract = ContractMix::Mix;
  std::uint32_t num_scts = 100;
  std::uint32_t num_threads = 8;
  std::uint32_t shared_items = 500;
  std::uint32_t hash_buckets = kDefaultBuckets;
  std::uint64_t seed = 1;
  Value mint_value = 1000;  // initial coin balance per account

  bool valid() const {
    return num_threads >= 1 && shared_items >= 1 && hash_buckets >= 1;
  }
};

}  // namespace objsc

#endif  // OBJSC_SCT_HPP
