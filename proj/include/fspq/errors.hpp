#pragma once

#include <stdexcept>
#include <string>

namespace fspq {

// Error taxonomy shared by the whole toolkit. Verification failures are NOT
// exceptions (verify returns false); exceptions mark API misuse, exhausted
// keys, and storage problems.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Every signing period of the instance has been consumed.
struct Exhausted : Error {
  explicit Exhausted(const std::string& what = "signing capacity exhausted") : Error(what) {}
};

// A one-time key was asked to sign a second message.
struct OneTimeKeyReuse : Error {
  explicit OneTimeKeyReuse(const std::string& what = "one-time key reuse") : Error(what) {}
};

// An already-passed period was requested; its secrets are gone by design.
struct PeriodPassed : Error {
  explicit PeriodPassed(const std::string& what = "period already passed") : Error(what) {}
};

struct CorruptState : Error {
  explicit CorruptState(const std::string& what = "state file corrupt") : Error(what) {}
};

struct VersionMismatch : Error {
  explicit VersionMismatch(const std::string& what = "unsupported format version") : Error(what) {}
};

struct UnknownScheme : Error {
  explicit UnknownScheme(const std::string& what = "unknown scheme id") : Error(what) {}
};

// A sidecar high-water mark exceeds the state's period: the state file was
// rolled back (restored from backup, copied, ...) and signing must not proceed.
struct RollbackHazard : Error {
  explicit RollbackHazard(const std::string& what = "state rollback detected") : Error(what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace fspq
