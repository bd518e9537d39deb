#include <doctest.h>

#include <set>
#include <utility>

#include "objsc/contracts.hpp"
#include "objsc/workload.hpp"
#include "oracles.hpp"

using namespace objsc;

namespace {

void preload_all(ChainedTable& t,
                 std::initializer_list<std::pair<Key, Value>> kv) {
  for (auto [k, v] : kv) t.preload(k, v);
}

}  // namespace

TEST_CASE("coin send moves the amount and fails on insufficient balance") {
  ChainedTable t(kDefaultBuckets);
  preload_all(t, {{0, 100}, {1, 100}, {2, 100}});
  DirectExecutor ex(t);

  CHECK(coin::send(ex, 0, 1, 50) == SctStatus::Committed);
  CHECK(t.lookup(0) == Value{50});
  CHECK(t.lookup(1) == Value{150});

  // Sender doesn't have a sufficient balance: no state change at all.
  FinalState before = t.snapshot();
  CHECK(coin::send(ex, 0, 2, 160) == SctStatus::Fail);
  CHECK(t.snapshot() == before);

  CHECK(coin::send(ex, 0, 1, 0) == SctStatus::Committed);
  CHECK(t.snapshot() == before);  // zero transfer is identity
}

TEST_CASE("coin get_balance reads the minted and updated balances") {
  ChainedTable t(kDefaultBuckets);
  preload_all(t, {{0, 100}, {1, 100}, {7, 0}});
  DirectExecutor ex(t);
  CHECK(coin::get_balance(ex, 0) == 100);
  CHECK(coin::get_balance(ex, 7) == 0);
  coin::send(ex, 0, 1, 50);
  CHECK(coin::get_balance(ex, 1) == 150);
}

TEST_CASE("ballot voters act at most once and self-delegation fails") {
  ChainedTable t(kDefaultBuckets);
  t.preload(0, 0);                                // proposal 0
  t.preload(1, 0);                                // proposal 1
  t.preload(5, ballot::pack_voter(1, false, 0));  // voter
  t.preload(6, ballot::pack_voter(1, false, 0));  // voter
  DirectExecutor ex(t);

  CHECK(ballot::vote(ex, 5, 0) == SctStatus::Committed);
  CHECK(t.lookup(0) == Value{1});
  CHECK(ballot::voter_acted(*t.lookup(5)));

  CHECK(ballot::vote(ex, 5, 1) == SctStatus::Fail);  // second action
  CHECK(t.lookup(1) == Value{0});

  CHECK(ballot::delegate_to(ex, 6, 6) == SctStatus::Fail);

  // Delegating to a voter who already voted lands on their proposal.
  CHECK(ballot::delegate_to(ex, 6, 5) == SctStatus::Committed);
  CHECK(t.lookup(0) == Value{2});
}

TEST_CASE("ballot delegation accumulates weight on an undecided voter") {
  ChainedTable t(kDefaultBuckets);
  t.preload(0, 0);
  t.preload(5, ballot::pack_voter(1, false, 0));
  t.preload(6, ballot::pack_voter(1, false, 0));
  DirectExecutor ex(t);
  CHECK(ballot::delegate_to(ex, 5, 6) == SctStatus::Committed);
  CHECK(ballot::voter_weight(*t.lookup(6)) == 2);
  CHECK(ballot::vote(ex, 6, 0) == SctStatus::Committed);
  CHECK(t.lookup(0) == Value{2});
}

TEST_CASE("auction bids and withdrawals") {
  ChainedTable t(kDefaultBuckets);
  t.preload(0, 0);                   // maxBid
  t.preload(1, auction::kNoBidder);  // maxBidder
  t.preload(2, 0);                   // ended
  t.preload(3, 0);                   // bidder refunds
  t.preload(4, 0);
  auction::Layout lay{0, 1, 2};
  DirectExecutor ex(t);

  CHECK(auction::bid(ex, lay, 3, 10) == SctStatus::Committed);
  CHECK(t.lookup(0) == Value{10});
  CHECK(t.lookup(1) == Value{3});

  CHECK(auction::bid(ex, lay, 4, 5) == SctStatus::Fail);  // lower bid
  CHECK(t.lookup(0) == Value{10});

  CHECK(auction::bid(ex, lay, 4, 20) == SctStatus::Committed);
  CHECK(t.lookup(3) == Value{10});  // outbid amount refundable

  CHECK(auction::withdraw(ex, 3) == 10);
  CHECK_FALSE(t.lookup(3).has_value());  // refund slot deleted
  CHECK(auction::withdraw(ex, 3) == 0);

  t.insert(2, 1);  // auction ended
  CHECK(auction::bid(ex, lay, 3, 100) == SctStatus::Fail);
}

TEST_CASE("workload generation is deterministic in the seed") {
  WorkloadSpec spec;
  spec.contract = ContractMix::Coin;
  spec.num_scts = 100;
  spec.seed = 7;
  std::vector<Sct> a = generate_workload(spec);
  std::vector<Sct> b = generate_workload(spec);
  REQUIRE(a.size() == 100);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].fn == b[i].fn);
    CHECK(a[i].args == b[i].args);
  }
  spec.seed = 8;
  std::vector<Sct> c = generate_workload(spec);
  bool same = true;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].args != c[i].args) same = false;
  }
  CHECK_FALSE(same);
}

TEST_CASE("mix splits a block into equal proportions round-robin") {
  WorkloadSpec spec;
  spec.contract = ContractMix::Mix;
  spec.num_scts = 300;
  std::vector<Sct> scts = generate_workload(spec);
  int coin = 0, ballot_n = 0, auction_n = 0;
  for (const Sct& s : scts) {
    switch (s.fn) {
      case ScFun::CoinSend:
      case ScFun::CoinGetBalance: ++coin; break;
      case ScFun::BallotVote:
      case ScFun::BallotDelegate: ++ballot_n; break;
      case ScFun::AuctionBid:
      case ScFun::AuctionWithdraw: ++auction_n; break;
    }
  }
  CHECK(coin == 100);
  CHECK(ballot_n == 100);
  CHECK(auction_n == 100);

  spec.num_scts = 0;
  CHECK(generate_workload(spec).empty());
}

TEST_CASE("mix families own disjoint key sets") {
  WorkloadSpec spec;
  spec.contract = ContractMix::Mix;
  spec.shared_items = 500;
  KeySpace coin_ks = key_space_for(spec, ContractMix::Coin);
  KeySpace ballot_ks = key_space_for(spec, ContractMix::Ballot);
  KeySpace auction_ks = key_space_for(spec, ContractMix::Auction);
  std::set<Key> keys;
  std::size_t total = 0;
  for (std::uint32_t j = 0; j < coin_ks.logical_size; ++j, ++total) {
    keys.insert(coin_ks.physical(j));
  }
  for (std::uint32_t j = 0; j < ballot_ks.logical_size; ++j, ++total) {
    keys.insert(ballot_ks.physical(j));
  }
  for (std::uint32_t j = 0; j < auction_ks.logical_size; ++j, ++total) {
    keys.insert(auction_ks.physical(j));
  }
  CHECK(keys.size() == total);
  CHECK(keys.size() == 500);
  for (Key k : keys) CHECK(k < 500);
}

TEST_CASE("replaying an SCT serially twice gives identical results") {
  WorkloadSpec spec;
  spec.contract = ContractMix::Mix;
  spec.num_scts = 60;
  spec.shared_items = 60;
  spec.seed = 11;
  std::vector<Sct> scts = generate_workload(spec);
  FinalState init = mint_state(spec);
  auto order = testing::identity_order(scts.size());
  FinalState a = testing::replay_serial(scts, order, init, spec.hash_buckets);
  FinalState b = testing::replay_serial(scts, order, init, spec.hash_buckets);
  CHECK(a == b);
}

TEST_CASE("committed coin sends conserve the total balance") {
  WorkloadSpec spec;
  spec.contract = ContractMix::Coin;
  spec.num_scts = 200;
  spec.shared_items = 50;
  spec.seed = 3;
  std::vector<Sct> scts = generate_workload(spec);
  FinalState init = mint_state(spec);
  FinalState fs = testing::replay_serial(scts, testing::identity_order(200),
                                         init, spec.hash_buckets);
  Value before = 0, after = 0;
  for (const FsEntry& e : init) before += e.value;
  for (const FsEntry& e : fs) after += e.value;
  CHECK(before == after);
}

TEST_CASE("workload config files parse and reject junk") {
  std::string err;
  auto spec = parse_workload_text(
      "# demo\ncontract = ballot\nscts=40\nthreads = 4\nshared=120\n"
      "buckets=16\nseed=99\nmint=250\n",
      &err);
  REQUIRE(spec.has_value());
  CHECK(spec->contract == ContractMix::Ballot);
  CHECK(spec->num_scts == 40);
  CHECK(spec->num_threads == 4);
  CHECK(spec->shared_items == 120);
  CHECK(spec->hash_buckets == 16);
  CHECK(spec->seed == 99);
  CHECK(spec->mint_value == 250);

  CHECK_FALSE(parse_workload_text("scts\n", &err).has_value());
  CHECK_FALSE(parse_workload_text("contract=warlock\n", &err).has_value());
  CHECK_FALSE(parse_workload_text("shared=0\n", &err).has_value());
}
