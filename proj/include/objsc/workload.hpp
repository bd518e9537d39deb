#ifndef OBJSC_WORKLOAD_HPP
#define OBJSC_WORKLOAD_HPP

#include <optional>
#include <string>
#include <vector>

#include "objsc/sct.hpp"
#include "objsc/types.hpp"

namespace objsc {

// Key-space layout for one contract family. Under Mix the three families
// interleave the physical key space with stride 3 so that every family keeps
// its own shared objects inside the same hash table.
struct KeySpace {
  Key offset = 0;
  Key stride = 1;
  std::uint32_t logical_size = 0;

  Key physical(std::uint32_t logical) const { return offset + stride * logical; }
};

KeySpace key_space_for(const WorkloadSpec& spec, ContractMix family);

// Ballot key space: the first quarter (at least one) are proposals, the
// rest voters.
std::uint32_t ballot_proposals(const KeySpace& ks);

// Pre-created accounts/voters/proposals/bidders: the initial state loaded
// into miner and validator stores before timing starts.
FinalState mint_state(const WorkloadSpec& spec);

// Deterministic in spec.seed. Mix interleaves Coin, Ballot, Auction
// round-robin, which splits the block into equal proportions.
std::vector<Sct> generate_workload(const WorkloadSpec& spec);

// key=value config file ('#' comments). Keys: contract, scts, threads,
// shared, buckets, seed, mint. Returns an error message on failure.
std::optional<WorkloadSpec> parse_workload_file(const std::string& path,
                                                std::string* error);
std::optional<WorkloadSpec> parse_workload_text(const std::string& text,
                                                std::string* error);

}  // namespace objsc

#endif  // OBJSC_WORKLOAD_HPP
