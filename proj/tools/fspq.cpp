// fspq: operator tool for forward-secure signing key lifecycles.
//
// Exit codes are a stable scripting contract:
//   0 success / signature accepted
//   1 signature rejected
//   2 bad arguments or refused operation
//   3 storage or I/O problem (missing, corrupt, locked, version skew)
//   4 signing capacity exhausted
//   5 rollback hazard: state file is older than its high-water mark

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "fspq/state_store.hpp"

using namespace fspq;
namespace fs = std::filesystem;

namespace {

// Argument-level problems discovered after CLI11 parsing; always exit 2.
struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

Bytes read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw IoError("cannot read " + path.string());
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed for " + path.string());
  return data;
}

void write_file(const fs::path& path, BytesView data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out.good()) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  out.flush();
  if (!out.good()) throw IoError("write failed for " + path.string());
}

Seed seed_from_hex(const std::string& hex, const char* origin) {
  auto raw = from_hex(hex);
  if (!raw || raw->size() != kSeedSize)
    throw UsageError(std::string(origin) + " must be " + std::to_string(2 * kSeedSize) +
                     " hex digits");
  return Seed::from(as_view(*raw));
}

void require_mock_consent(const std::string& scheme_id, bool allow_mock) {
  if (StatefulSigner::scheme_uses_mock(scheme_id) && !allow_mock)
    throw UsageError(scheme_id +
                     " uses a mock base scheme with no security; pass --allow-mock to "
                     "use it for size and cost experiments only");
}

void print_mock_warning(const std::string& scheme_id) {
  if (StatefulSigner::scheme_uses_mock(scheme_id))
    std::cerr << "WARNING: " << scheme_id
              << " is a size-faithful mock, not a secure signature scheme\n";
}

int cmd_keygen(const std::string& scheme, uint32_t capacity, const fs::path& out,
               const fs::path& pk_path, const std::string& seed_hex, bool allow_mock,
               bool allow_env_seed) {
  const auto& ids = StatefulSigner::scheme_ids();
  if (std::find(ids.begin(), ids.end(), scheme) == ids.end()) {
    std::string known;
    for (const auto& id : ids) known += "\n  " + id;
    throw UsageError("unknown scheme '" + scheme + "'; known schemes:" + known);
  }
  require_mock_consent(scheme, allow_mock);

  // Refuse to overwrite: clobbering a state destroys a live key, and a stale
  // high-water sidecar from the old key would brand the new one rolled back.
  for (const char* suffix : {"", ".hwm"}) {
    fs::path p = out;
    p += suffix;
    if (fs::exists(p))
      throw UsageError(p.string() + " already exists; remove the old state explicitly first");
  }

  Seed master;
  const char* env_seed = std::getenv("FSPQ_SEED");
  if (env_seed != nullptr && !allow_env_seed)
    throw UsageError("FSPQ_SEED is set; refusing to generate keys in a seeded environment "
                     "without --allow-env-seed (test determinism only)");
  if (!seed_hex.empty()) {
    master = seed_from_hex(seed_hex, "--seed-hex");
  } else if (env_seed != nullptr) {
    master = seed_from_hex(env_seed, "FSPQ_SEED");
  } else {
    master = Seed::random();
  }

  StatefulSigner signer(scheme, capacity, master);
  save_state(signer, out);
  write_file(pk_path, signer.public_key().view());

  print_mock_warning(scheme);
  const SchemeDescriptor& base = signer.base().descriptor();
  std::cout << "scheme:          " << scheme << "\n"
            << "hash suite:      " << suite_name(signer.suite()) << "\n"
            << "capacity:        " << signer.capacity() << " signatures\n"
            << "public key:      " << pk_path.string() << " (" << kDigestSize << " octets)\n"
            << "state:           " << out.string() << " (" << fs::file_size(out) << " octets)\n"
            << "base signature:  " << base.sig_size << " octets\n"
            << "base public key: " << base.pk_size << " octets\n";
  return 0;
}

int cmd_sign(const fs::path& state_path, const fs::path& msg_path, const fs::path& sig_path,
             bool allow_mock) {
  StateLock lock(state_path);
  StatefulSigner signer = load_state(state_path);
  require_mock_consent(signer.scheme_id(), allow_mock);

  Bytes message = read_file(msg_path);
  const uint64_t period = signer.period();
  Bytes signature = signer.sign(message);

  // durability before release: the advanced state hits disk, then the
  // signature leaves the process
  save_state(signer, state_path);
  write_file(sig_path, as_view(signature));

  print_mock_warning(signer.scheme_id());
  std::cout << "period:    " << period << "\n"
            << "signature: " << sig_path.string() << " (" << signature.size() << " octets)\n"
            << "remaining: " << signer.capacity() - signer.period() << " signatures\n";
  return 0;
}

int cmd_verify(const fs::path& pk_path, const fs::path& msg_path, const fs::path& sig_path,
               bool allow_mock) {
  Bytes pk_raw = read_file(pk_path);
  if (pk_raw.size() != kDigestSize)
    throw IoError(pk_path.string() + " is not a public key (expected exactly " +
                  std::to_string(kDigestSize) + " octets)");
  Digest pk = Digest::from(as_view(pk_raw));
  Bytes message = read_file(msg_path);
  Bytes signature = read_file(sig_path);

  if (signature.size() > 2) {
    // the third wire octet names the base scheme; honor the mock gate on the
    // verification side too, so forged-by-design results are opt-in
    try {
      std::string base = base_scheme_from_wire_id(signature[2]);
      if (base_scheme_is_mock(base) && !allow_mock)
        throw UsageError("signature uses the mock base scheme '" + base +
                         "'; pass --allow-mock to evaluate it anyway");
    } catch (const UnknownScheme&) {
      // unknown base octet: fall through, verification rejects it
    }
  }

  if (any_verify(pk, as_view(message), as_view(signature))) {
    std::cout << "accept\n";
    return 0;
  }
  std::cout << "reject\n";
  return 1;
}

int cmd_info(const fs::path& state_path) {
  StateMeta meta = inspect_state(state_path);
  print_mock_warning(meta.scheme_id);
  std::cout << "scheme:     " << meta.scheme_id << "\n"
            << "hash suite: " << suite_name(meta.suite) << "\n"
            << "period:     " << meta.period << "\n"
            << "capacity:   " << meta.capacity << "\n"
            << "remaining:  " << meta.capacity - meta.period << " signatures\n"
            << "state size: " << fs::file_size(state_path) << " octets\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"forward-secure post-quantum signing tool"};
  app.require_subcommand(1);

  std::string scheme, seed_hex;
  uint32_t capacity = 0;
  fs::path state_path, pk_path, msg_path, sig_path;
  bool allow_mock = false, allow_env_seed = false;

  CLI::App* keygen = app.add_subcommand("keygen", "create a new signing state and public key");
  keygen->add_option("--scheme", scheme, "scheme id, e.g. frog-wots-sha256")->required();
  keygen
      ->add_option("--capacity", capacity,
                   "capacity exponent L: at least 2^L - 1 signatures before exhaustion")
      ->required()
      ->check(CLI::Range(1u, 64u));
  keygen->add_option("--out", state_path, "state file to create")->required();
  keygen->add_option("--pk", pk_path, "public key file to create (32 raw octets)")->required();
  keygen->add_option("--seed-hex", seed_hex, "deterministic master seed (testing only)");
  keygen->add_flag("--allow-mock", allow_mock, "permit mock base schemes (no security)");
  keygen->add_flag("--allow-env-seed", allow_env_seed, "permit seeding from FSPQ_SEED");

  CLI::App* sign = app.add_subcommand("sign", "sign a message and advance the state");
  sign->add_option("--state", state_path, "state file to use and advance")->required();
  sign->add_option("--in", msg_path, "message file")->required();
  sign->add_option("--sig-out", sig_path, "signature file to write")->required();
  sign->add_flag("--allow-mock", allow_mock, "permit mock base schemes (no security)");

  CLI::App* verify = app.add_subcommand("verify", "check a signature against a public key");
  verify->add_option("--pk", pk_path, "public key file (32 raw octets)")->required();
  verify->add_option("--in", msg_path, "message file")->required();
  verify->add_option("--sig", sig_path, "signature file")->required();
  verify->add_flag("--allow-mock", allow_mock, "permit mock base schemes (no security)");

  CLI::App* info = app.add_subcommand("info", "print state header fields");
  info->add_option("--state", state_path, "state file to inspect")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (keygen->parsed())
      return cmd_keygen(scheme, capacity, state_path, pk_path, seed_hex, allow_mock,
                        allow_env_seed);
    if (sign->parsed()) return cmd_sign(state_path, msg_path, sig_path, allow_mock);
    if (verify->parsed()) return cmd_verify(pk_path, msg_path, sig_path, allow_mock);
    return cmd_info(state_path);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Exhausted& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const RollbackHazard& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    // CorruptState, VersionMismatch, UnknownScheme from files, IoError, ...
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
