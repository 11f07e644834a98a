#pragma once

#include <filesystem>
#include <functional>

#include "fspq/stateful_signer.hpp"

namespace fspq {

// Durable persistence for evolving signer state. The on-disk container:
//
//   magic "FSPQ" (4) | format version u8 | scheme id (u32 length + octets)
//   | hash suite id u8 | kappa u32 LE | capacity u64 LE | period u64 LE
//   | payload (u32 length + octets, scheme-defined) | integrity digest (32)
//
// The digest covers every preceding octet, keyed by the named suite. It
// guards against corruption, not against tampering by the file's holder.
inline constexpr uint8_t kStateFormatVersion = 1;
inline constexpr uint32_t kStateKappa = 128;

struct StateMeta {
  std::string scheme_id;
  HashSuite suite = HashSuite::Sha256;
  uint64_t capacity = 0;
  uint64_t period = 0;
};

// Save pipeline boundaries, exposed so tests can simulate a crash (throw
// from the injector) at each one and audit what a restart recovers.
enum class SavePoint {
  kBeforeTempWrite,
  kAfterTempWrite,  // temp file durable, state path still the old version
  kAfterRename,     // new state visible; old inode orphaned but held open
  kAfterZeroize,    // old version's octets overwritten
  kAfterHwm,        // high-water-mark sidecar advanced
};
using FaultInjector = std::function<void(SavePoint)>;

// Atomic durable replace of `path`: write temp, fsync, rename over, then
// overwrite the previous version's octets with zeros through a held
// descriptor (best effort; journaling and copy-on-write filesystems may keep
// stale copies). A ".hwm" sidecar records the highest period ever saved.
// On any failure the old state file is intact.
void save_state(const StatefulSigner& signer, const std::filesystem::path& path,
                const FaultInjector& fault = {});

// Full validation: magic, version, integrity digest, header/payload
// agreement, and the rollback sidecar (sidecar period above the file's
// period raises RollbackHazard).
StatefulSigner load_state(const std::filesystem::path& path, CostCounters* counters = nullptr);

// Header fields only; no secrets are parsed. Still digest-checked.
StateMeta inspect_state(const std::filesystem::path& path);

// Exclusive advisory lock guarding a state path for signing. Lives on a
// ".lock" sibling so the atomic rename never swaps the locked inode.
// Concurrent verification needs no lock. Throws IoError when already held.
class StateLock {
 public:
  explicit StateLock(const std::filesystem::path& state_path);
  ~StateLock();
  StateLock(StateLock&& other) noexcept;
  StateLock& operator=(StateLock&&) = delete;
  StateLock(const StateLock&) = delete;
  StateLock& operator=(const StateLock&) = delete;

 private:
  int fd_ = -1;
};

}  // namespace fspq
