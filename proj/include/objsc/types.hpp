#ifndef OBJSC_TYPES_HPP
#define OBJSC_TYPES_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace objsc {

using Key = std::uint32_t;
using Value = std::int64_t;

// Transaction timestamps. Signed so that "no committed access yet" can be
// encoded as -1 without colliding with a scripted T0.
using Ts = std::int64_t;

inline constexpr Ts kNoTs = -1;
inline constexpr std::size_t kDefaultBuckets = 30;

enum class Protocol : std::uint8_t { Serial = 0, Svostm = 1, Mvostm = 2 };

const char* to_string(Protocol p);
std::optional<Protocol> protocol_from_string(const std::string& s);

// One key/value pair of a final-state snapshot. Deleted keys stay in the
// snapshot with present=false so miner and validator states compare exactly.
struct FsEntry {
  Key key = 0;
  bool present = false;
  Value value = 0;

  friend bool operator==(const FsEntry&, const FsEntry&) = default;
};

using FinalState = std::vector<FsEntry>;  // sorted by key

// Result of a single STM operation.
struct OpStatus {
  enum class Kind : std::uint8_t { Ok, NotFound, Abort };
  Kind kind = Kind::Ok;
  Value value = 0;

  bool ok() const { return kind == Kind::Ok; }
  bool aborted() const { return kind == Kind::Abort; }

  static OpStatus okv(Value v) { return {Kind::Ok, v}; }
  static OpStatus not_found() { return {Kind::NotFound, 0}; }
  static OpStatus abort() { return {Kind::Abort, 0}; }
};

enum class TxnState : std::uint8_t { Live, Committed, Aborted };

}  // namespace objsc

#endif  // OBJSC_TYPES_HPP
