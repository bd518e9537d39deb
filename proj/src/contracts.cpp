#include "objsc/contracts.hpp"

namespace objsc {

const char* to_string(ScFun f) {
  switch (f) {
    case ScFun::CoinSend: return "coin.send";
    case ScFun::CoinGetBalance: return "coin.get_balance";
    case ScFun::BallotVote: return "ballot.vote";
    case ScFun::BallotDelegate: return "ballot.delegate";
    case ScFun::AuctionBid: return "auction.bid";
    case ScFun::AuctionWithdraw: return "auction.withdraw";
  }
  return "?";
}

std::uint8_t arg_count(ScFun f) {
  switch (f) {
    case ScFun::CoinSend: return 3;
    case ScFun::CoinGetBalance: return 1;
    case ScFun::BallotVote: return 2;
    case ScFun::BallotDelegate: return 2;
    case ScFun::AuctionBid: return 5;
    case ScFun::AuctionWithdraw: return 1;
  }
  return 0;
}

bool is_key_arg(ScFun f, std::size_t index) {
  switch (f) {
    case ScFun::CoinSend: return index <= 1;
    case ScFun::CoinGetBalance: return index == 0;
    case ScFun::BallotVote: return true;
    case ScFun::BallotDelegate: return true;
    case ScFun::AuctionBid: return index != 1;
    case ScFun::AuctionWithdraw: return index == 0;
  }
  return false;
}

namespace coin {

SctStatus send(Executor& ex, Key sender, Key receiver, Value amount) {
  Value from = ex.lookup(sender).value_or(0);
  if (from < amount) {
    return SctStatus::Fail;  // sender doesn't have a sufficient balance
  }
  Value to = ex.lookup(receiver).value_or(0);
  ex.insert(sender, from - amount);
  ex.insert(receiver, to + amount);
  return SctStatus::Committed;
}

Value get_balance(Executor& ex, Key account) {
  return ex.lookup(account).value_or(0);
}

}  // namespace coin

namespace ballot {

// Layout: bits 0..31 weight, bit 32 acted, bits 33..62 chosen proposal key.
Value pack_voter(std::uint32_t weight, bool acted, Key choice) {
  return static_cast<Value>(weight) |
         (static_cast<Value>(acted ? 1 : 0) << 32) |
         (static_cast<Value>(choice & 0x3fffffffu) << 33);
}

std::uint32_t voter_weight(Value packed) {
  return static_cast<std::uint32_t>(packed & 0xffffffffll);
}

bool voter_acted(Value packed) { return ((packed >> 32) & 1) != 0; }

Key voter_choice(Value packed) {
  return static_cast<Key>((packed >> 33) & 0x3fffffffll);
}

SctStatus vote(Executor& ex, Key voter, Key proposal) {
  Value v = ex.lookup(voter).value_or(0);
  if (voter_acted(v) || voter_weight(v) == 0) {
    return SctStatus::Fail;  // already voted/delegated, or no right
  }
  Value count = ex.lookup(proposal).value_or(0);
  ex.insert(proposal, count + voter_weight(v));
  ex.insert(voter, pack_voter(voter_weight(v), true, proposal));
  return SctStatus::Committed;
}

SctStatus delegate_to(Executor& ex, Key from, Key to) {
  if (from == to) return SctStatus::Fail;
  Value v = ex.lookup(from).value_or(0);
  if (voter_acted(v) || voter_weight(v) == 0) {
    return SctStatus::Fail;
  }
  Value target = ex.lookup(to).value_or(0);
  if (voter_acted(target)) {
    // Delegate already voted: the weight goes straight onto their proposal.
    Key proposal = voter_choice(target);
    Value count = ex.lookup(proposal).value_or(0);
    ex.insert(proposal, count + voter_weight(v));
  } else {
    ex.insert(to, pack_voter(voter_weight(target) + voter_weight(v), false,
                             voter_choice(target)));
  }
  ex.insert(from, pack_voter(voter_weight(v), true, to));
  return SctStatus::Committed;
}

}  // namespace ballot

namespace auction {

SctStatus bid(Executor& ex, const Layout& lay, Key bidder, Value amount) {
  if (ex.lookup(lay.ended).value_or(0) != 0) {
    return SctStatus::Fail;  // auction already ended
  }
  Value max_bid = ex.lookup(lay.max_bid).value_or(0);
  if (amount <= max_bid) {
    return SctStatus::Fail;
  }
  Value prev = ex.lookup(lay.max_bidder).value_or(kNoBidder);
  if (prev != kNoBidder) {
    // The outbid amount becomes refundable to the previous leader.
    Key prev_key = static_cast<Key>(prev);
    Value pending = ex.lookup(prev_key).value_or(0);
    ex.insert(prev_key, pending + max_bid);
  }
  ex.insert(lay.max_bid, amount);
  ex.insert(lay.max_bidder, static_cast<Value>(bidder));
  return SctStatus::Committed;
}

Value withdraw(Executor& ex, Key bidder) {
  Value pending = ex.lookup(bidder).value_or(0);
  if (pending > 0) {
    ex.erase(bidder);
  }
  return pending;
}

}  // namespace auction

SctStatus run_sct(const Sct& sct, Executor& ex) {
  const auto& a = sct.args;
  switch (sct.fn) {
    case ScFun::CoinSend:
      return coin::send(ex, static_cast<Key>(a[0]), static_cast<Key>(a[1]),
                        a[2]);
    case ScFun::CoinGetBalance:
      coin::get_balance(ex, static_cast<Key>(a[0]));
      return SctStatus::Committed;
    case ScFun::BallotVote:
      return ballot::vote(ex, static_cast<Key>(a[0]), static_cast<Key>(a[1]));
    case ScFun::BallotDelegate:
      return ballot::delegate_to(ex, static_cast<Key>(a[0]),
                                 static_cast<Key>(a[1]));
    case ScFun::AuctionBid: {
      auction::Layout lay{static_cast<Key>(a[2]), static_cast<Key>(a[3]),
                          static_cast<Key>(a[4])};
      return auction::bid(ex, lay, static_cast<Key>(a[0]), a[1]);
    }
    case ScFun::AuctionWithdraw:
      auction::withdraw(ex, static_cast<Key>(a[0]));
      return SctStatus::Committed;
  }
  return SctStatus::Fail;
}

}  // namespace objsc
