#ifndef OBJSC_CONTRACTS_HPP
#define OBJSC_CONTRACTS_HPP

#include "objsc/executor.hpp"
#include "objsc/sct.hpp"

namespace objsc {

// The four benchmark contracts, written once against the Executor interface
// so the same code runs under the miner's STM and the validators' replay
// memories. All key arguments are physical keys of the shared hash table.

namespace coin {
// Transfers amount from sender to receiver; Fail (no state change) on
// insufficient balance.
SctStatus send(Executor& ex, Key sender, Key receiver, Value amount);
// Exactly one lookup.
Value get_balance(Executor& ex, Key account);
}  // namespace coin

namespace ballot {
// A voter acts at most once per ballot: a second vote/delegate fails and a
// self-delegation fails.
SctStatus vote(Executor& ex, Key voter, Key proposal);
SctStatus delegate_to(Executor& ex, Key from, Key to);

// Voter state packed into one value: weight, acted flag, chosen proposal.
Value pack_voter(std::uint32_t weight, bool acted, Key choice);
std::uint32_t voter_weight(Value packed);
bool voter_acted(Value packed);
Key voter_choice(Value packed);
}  // namespace ballot

namespace auction {
// Shared-object layout within the auction key space: slot 0 holds the
// current maximum bid, slot 1 the maximum bidder, slot 2 the ended flag;
// every other key is a bidder's refundable amount.
inline constexpr std::uint32_t kMaxBidSlot = 0;
inline constexpr std::uint32_t kMaxBidderSlot = 1;
inline constexpr std::uint32_t kEndedSlot = 2;
inline constexpr std::uint32_t kFirstBidder = 3;
inline constexpr Value kNoBidder = -1;

struct Layout {
  Key max_bid;
  Key max_bidder;
  Key ended;
};

SctStatus bid(Executor& ex, const Layout& lay, Key bidder, Value amount);
// Returns the refunded amount (0 when nothing was pending).
Value withdraw(Executor& ex, Key bidder);
}  // namespace auction

// Dispatches an SCT to its contract body; args carry physical keys.
SctStatus run_sct(const Sct& sct, Executor& ex);

}  // namespace objsc

#endif  // OBJSC_CONTRACTS_HPP
