#include "objsc/workload.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "objsc/contracts.hpp"

namespace objsc {

const char* to_string(ContractMix c) {
  switch (c) {
    case ContractMix::Coin: return "coin";
    case ContractMix::Ballot: return "ballot";
    case ContractMix::Auction: return "auction";
    case ContractMix::Mix: return "mix";
  }
  return "?";
}

std::optional<ContractMix> contract_from_string(const std::string& s) {
  if (s == "coin") return ContractMix::Coin;
  if (s == "ballot") return ContractMix::Ballot;
  if (s == "auction") return ContractMix::Auction;
  if (s == "mix") return ContractMix::Mix;
  return std::nullopt;
}

const char* to_string(Protocol p) {
  switch (p) {
    case Protocol::Serial: return "serial";
    case Protocol::Svostm: return "svostm";
    case Protocol::Mvostm: return "mvostm";
  }
  return "?";
}

std::optional<Protocol> protocol_from_string(const std::string& s) {
  if (s == "serial") return Protocol::Serial;
  if (s == "svostm") return Protocol::Svostm;
  if (s == "mvostm") return Protocol::Mvostm;
  return std::nullopt;
}

KeySpace key_space_for(const WorkloadSpec& spec, ContractMix family) {
  if (spec.contract != ContractMix::Mix) {
    return {0, 1, spec.shared_items};
  }
  Key offset = 0;
  switch (family) {
    case ContractMix::Coin: offset = 0; break;
    case ContractMix::Ballot: offset = 1; break;
    case ContractMix::Auction: offset = 2; break;
    case ContractMix::Mix: offset = 0; break;
  }
  std::uint32_t size =
      (spec.shared_items > offset) ? (spec.shared_items - offset + 2) / 3 : 0;
  return {offset, 3, size};
}

std::uint32_t ballot_proposals(const KeySpace& ks) {
  std::uint32_t proposals = std::max<std::uint32_t>(1, ks.logical_size / 4);
  if (proposals >= ks.logical_size) proposals = ks.logical_size > 1 ? 1 : 0;
  return proposals;
}

namespace {

struct BallotSplit {
  std::uint32_t proposals;
  std::uint32_t voters;
};

BallotSplit ballot_split(const KeySpace& ks) {
  std::uint32_t proposals = ballot_proposals(ks);
  return {proposals, ks.logical_size - proposals};
}

void mint_family(const WorkloadSpec& spec, ContractMix family,
                 FinalState& out) {
  KeySpace ks = key_space_for(spec, family);
  switch (family) {
    case ContractMix::Coin:
      for (std::uint32_t j = 0; j < ks.logical_size; ++j) {
        out.push_back({ks.physical(j), true, spec.mint_value});
      }
      break;
    case ContractMix::Ballot: {
      BallotSplit split = ballot_split(ks);
      for (std::uint32_t j = 0; j < split.proposals; ++j) {
        out.push_back({ks.physical(j), true, 0});
      }
      for (std::uint32_t j = split.proposals; j < ks.logical_size; ++j) {
        out.push_back({ks.physical(j), true, ballot::pack_voter(1, false, 0)});
      }
      break;
    }
    case ContractMix::Auction:
      for (std::uint32_t j = 0; j < ks.logical_size; ++j) {
        Value v = 0;
        if (j == auction::kMaxBidderSlot) v = auction::kNoBidder;
        out.push_back({ks.physical(j), true, v});
      }
      break;
    case ContractMix::Mix:
      break;
  }
}

Sct make_sct(const WorkloadSpec& spec, ContractMix family, std::uint32_t id,
             std::mt19937_64& rng) {
  KeySpace ks = key_space_for(spec, family);
  auto uniform = [&rng](std::uint32_t lo, std::uint32_t hi) {
    return std::uniform_int_distribution<std::uint32_t>(lo, hi)(rng);
  };
  Sct sct;
  sct.id = id;
  switch (family) {
    case ContractMix::Coin: {
      bool is_send = uniform(0, 99) < 75;
      if (is_send && ks.logical_size >= 2) {
        std::uint32_t from = uniform(0, ks.logical_size - 1);
        std::uint32_t to = uniform(0, ks.logical_size - 2);
        if (to >= from) ++to;
        Value amount = uniform(1, 100);
        sct.fn = ScFun::CoinSend;
        sct.args = {static_cast<Value>(ks.physical(from)),
                    static_cast<Value>(ks.physical(to)), amount};
      } else {
        sct.fn = ScFun::CoinGetBalance;
        sct.args = {static_cast<Value>(
            ks.physical(uniform(0, ks.logical_size - 1)))};
      }
      break;
    }
    case ContractMix::Ballot: {
      BallotSplit split = ballot_split(ks);
      if (split.voters == 0) {
        throw std::invalid_argument("ballot workload needs voters");
      }
      bool is_vote = uniform(0, 99) < 70 || split.voters < 2;
      if (is_vote) {
        std::uint32_t voter = split.proposals + uniform(0, split.voters - 1);
        std::uint32_t proposal = uniform(0, split.proposals - 1);
        sct.fn = ScFun::BallotVote;
        sct.args = {static_cast<Value>(ks.physical(voter)),
                    static_cast<Value>(ks.physical(proposal))};
      } else {
        std::uint32_t from = split.proposals + uniform(0, split.voters - 1);
        std::uint32_t to = split.proposals + uniform(0, split.voters - 2);
        if (to >= from) ++to;
        sct.fn = ScFun::BallotDelegate;
        sct.args = {static_cast<Value>(ks.physical(from)),
                    static_cast<Value>(ks.physical(to))};
      }
      break;
    }
    case ContractMix::Auction: {
      std::uint32_t bidders =
          ks.logical_size > auction::kFirstBidder
              ? ks.logical_size - auction::kFirstBidder
              : 0;
      if (bidders == 0) {
        throw std::invalid_argument("auction workload needs bidders");
      }
      bool is_bid = uniform(0, 99) < 80;
      std::uint32_t bidder = auction::kFirstBidder + uniform(0, bidders - 1);
      if (is_bid) {
        sct.fn = ScFun::AuctionBid;
        sct.args = {static_cast<Value>(ks.physical(bidder)),
                    static_cast<Value>(uniform(1, 1000)),
                    static_cast<Value>(ks.physical(auction::kMaxBidSlot)),
                    static_cast<Value>(ks.physical(auction::kMaxBidderSlot)),
                    static_cast<Value>(ks.physical(auction::kEndedSlot))};
      } else {
        sct.fn = ScFun::AuctionWithdraw;
        sct.args = {static_cast<Value>(ks.physical(bidder))};
      }
      break;
    }
    case ContractMix::Mix:
      break;
  }
  return sct;
}

}  // namespace

FinalState mint_state(const WorkloadSpec& spec) {
  FinalState out;
  if (spec.contract == ContractMix::Mix) {
    mint_family(spec, ContractMix::Coin, out);
    mint_family(spec, ContractMix::Ballot, out);
    mint_family(spec, ContractMix::Auction, out);
  } else {
    mint_family(spec, spec.contract, out);
  }
  std::sort(out.begin(), out.end(),
            [](const FsEntry& a, const FsEntry& b) { return a.key < b.key; });
  return out;
}

std::vector<Sct> generate_workload(const WorkloadSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::vector<Sct> out;
  out.reserve(spec.num_scts);
  static constexpr ContractMix kRoundRobin[3] = {
      ContractMix::Coin, ContractMix::Ballot, ContractMix::Auction};
  for (std::uint32_t i = 0; i < spec.num_scts; ++i) {
    ContractMix family = spec.contract == ContractMix::Mix
                             ? kRoundRobin[i % 3]
                             : spec.contract;
    out.push_back(make_sct(spec, family, i, rng));
  }
  return out;
}

std::optional<WorkloadSpec> parse_workload_text(const std::string& text,
                                                std::string* error) {
  WorkloadSpec spec;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (error != nullptr) {
        *error = "line " + std::to_string(lineno) + ": expected key=value";
      }
      return std::nullopt;
    }
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    try {
      if (key == "contract") {
        auto c = contract_from_string(val);
        if (!c.has_value()) throw std::invalid_argument(val);
        spec.contract = *c;
      } else if (key == "scts") {
        spec.num_scts = static_cast<std::uint32_t>(std::stoul(val));
      } else if (key == "threads") {
        spec.num_threads = static_cast<std::uint32_t>(std::stoul(val));
      } else if (key == "shared") {
        spec.shared_items = static_cast<std::uint32_t>(std::stoul(val));
      } else if (key == "buckets") {
        spec.hash_buckets = static_cast<std::uint32_t>(std::stoul(val));
      } else if (key == "seed") {
        spec.seed = std::stoull(val);
      } else if (key == "mint") {
        spec.mint_value = std::stoll(val);
      } else {
        if (error != nullptr) {
          *error = "line " + std::to_string(lineno) + ": unknown key '" +
                   key + "'";
        }
        return std::nullopt;
      }
    } catch (const std::exception&) {
      if (error != nullptr) {
        *error = "line " + std::to_string(lineno) + ": bad value for '" +
                 key + "'";
      }
      return std::nullopt;
    }
  }
  if (!spec.valid()) {
    if (error != nullptr) *error = "invalid workload spec (all counts >= 1)";
    return std::nullopt;
  }
  return spec;
}

std::optional<WorkloadSpec> parse_workload_file(const std::string& path,
                                                std::string* error) {
  std::ifstream f(path);
  if (!f) {
    if (error != nullptr) *error = "cannot open " + path;
    return std::nullopt;
  }
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_workload_text(ss.str(), error);
}

}  // namespace objsc
