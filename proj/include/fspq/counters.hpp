#pragma once

#include <cstdint>

namespace fspq {

// Monotone operation tallies threaded through every keyed operation. They
// mirror the cost model used throughout the design notes: base_* count
// invocations of the underlying one-time scheme, hash_count counts
// composition-layer structural hashes (message digests, tree nodes,
// certification payloads). Two informational tallies sit alongside:
// prf_count for seed derivations and pk_derive_count for keygen-time
// public-commitment derivations, which are deliberately not base keygens
// (no signing keypair is materialized).
struct CostCounters {
  uint64_t base_keygen_count = 0;
  uint64_t base_sign_count = 0;
  uint64_t base_verify_count = 0;
  uint64_t hash_count = 0;
  uint64_t prf_count = 0;
  uint64_t pk_derive_count = 0;

  CostCounters operator-(const CostCounters& o) const {
    CostCounters d;
    d.base_keygen_count = base_keygen_count - o.base_keygen_count;
    d.base_sign_count = base_sign_count - o.base_sign_count;
    d.base_verify_count = base_verify_count - o.base_verify_count;
    d.hash_count = hash_count - o.hash_count;
    d.prf_count = prf_count - o.prf_count;
    d.pk_derive_count = pk_derive_count - o.pk_derive_count;
    return d;
  }
  bool operator==(const CostCounters&) const = default;
};

}  // namespace fspq
