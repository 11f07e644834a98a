#include "fspq/state_store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace fspq {

namespace {

constexpr char kMagic[4] = {'F', 'S', 'P', 'Q'};

std::string errno_text(const char* what, const std::filesystem::path& path) {
  return std::string(what) + " " + path.string() + ": " + std::strerror(errno);
}

void fire(const FaultInjector& fault, SavePoint point) {
  if (fault) fault(point);
}

// Whole-file write with durability; 0600 since states hold private keys.
void write_file_durable(const std::filesystem::path& path, BytesView content) {
  int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0600);
  if (fd < 0) throw IoError(errno_text("cannot create", path));
  size_t off = 0;
  while (off < content.size()) {
    ssize_t n = ::write(fd, content.data() + off, content.size() - off);
    if (n < 0) {
      ::close(fd);
      throw IoError(errno_text("write failed for", path));
    }
    off += static_cast<size_t>(n);
  }
  if (::fsync(fd) != 0) {
    ::close(fd);
    throw IoError(errno_text("fsync failed for", path));
  }
  ::close(fd);
}

Bytes read_file(const std::filesystem::path& path) {
  int fd = ::open(path.c_str(), O_RDONLY);
  if (fd < 0) throw IoError(errno_text("cannot open", path));
  Bytes out;
  uint8_t buf[1 << 16];
  for (;;) {
    ssize_t n = ::read(fd, buf, sizeof buf);
    if (n < 0) {
      ::close(fd);
      throw IoError(errno_text("read failed for", path));
    }
    if (n == 0) break;
    out.insert(out.end(), buf, buf + n);
  }
  ::close(fd);
  return out;
}

void fsync_directory(const std::filesystem::path& dir) {
  int fd = ::open(dir.empty() ? "." : dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd < 0) return;  // best effort; some filesystems refuse directory fds
  ::fsync(fd);
  ::close(fd);
}

struct FdGuard {
  int fd = -1;
  ~FdGuard() {
    if (fd >= 0) ::close(fd);
  }
};

std::filesystem::path hwm_path(const std::filesystem::path& p) {
  auto q = p;
  q += ".hwm";
  return q;
}

std::optional<uint64_t> read_hwm(const std::filesystem::path& state_path) {
  auto p = hwm_path(state_path);
  if (!std::filesystem::exists(p)) return std::nullopt;
  Bytes b = read_file(p);
  if (b.size() != 8) throw CorruptState("malformed high-water-mark sidecar");
  return get_u64_le(b.data());
}

Bytes build_container(const StatefulSigner& signer) {
  ByteWriter w;
  w.raw(BytesView(reinterpret_cast<const uint8_t*>(kMagic), 4));
  w.u8(kStateFormatVersion);
  const std::string& id = signer.scheme_id();
  w.blob(BytesView(reinterpret_cast<const uint8_t*>(id.data()), id.size()));
  w.u8(static_cast<uint8_t>(signer.suite()));
  w.u32(kStateKappa);
  w.u64(signer.capacity());
  w.u64(signer.period());
  w.blob(as_view(signer.serialize_payload()));
  Digest tag = hash(signer.suite(), tag::kIntegrity, as_view(w.data()));
  w.raw(tag.view());
  return w.take();
}

struct ParsedContainer {
  StateMeta meta;
  Bytes payload;
};

ParsedContainer parse_container(const std::filesystem::path& path) {
  Bytes raw = read_file(path);
  try {
    ByteReader r(as_view(raw));
    Bytes magic = r.bytes(4);
    if (std::memcmp(magic.data(), kMagic, 4) != 0)
      throw CorruptState("not a signer state file");
    if (r.u8() != kStateFormatVersion) throw VersionMismatch("unsupported state file version");
    Bytes id = r.blob(64);
    const uint8_t suite_id = r.u8();
    if (suite_id != static_cast<uint8_t>(HashSuite::Sha256) &&
        suite_id != static_cast<uint8_t>(HashSuite::Shake256))
      throw CorruptState("unknown hash suite in state file");
    HashSuite suite = static_cast<HashSuite>(suite_id);
    if (r.u32() != kStateKappa) throw CorruptState("unsupported security parameter");
    ParsedContainer out;
    out.meta.scheme_id.assign(id.begin(), id.end());
    out.meta.suite = suite;
    out.meta.capacity = r.u64();
    out.meta.period = r.u64();
    out.payload = r.blob(1u << 24);
    if (r.remaining() != kDigestSize) throw CorruptState("trailing octets in state file");
    const size_t digest_off = raw.size() - kDigestSize;
    Digest stored = Digest::from(r.raw(kDigestSize));
    Digest computed = hash(suite, tag::kIntegrity, BytesView(raw.data(), digest_off));
    if (!(stored == computed)) throw CorruptState("state file integrity digest mismatch");
    return out;
  } catch (const ParseError&) {
    throw CorruptState("truncated state file");
  }
}

}  // namespace

void save_state(const StatefulSigner& signer, const std::filesystem::path& path,
                const FaultInjector& fault) {
  Bytes container = build_container(signer);
  auto tmp = path;
  tmp += ".tmp";

  fire(fault, SavePoint::kBeforeTempWrite);
  write_file_durable(tmp, as_view(container));
  fire(fault, SavePoint::kAfterTempWrite);

  // hold the old version open so its octets can be cleared after the swap
  FdGuard old;
  old.fd = ::open(path.c_str(), O_RDWR);
  off_t old_size = 0;
  if (old.fd >= 0) {
    struct stat st {};
    if (::fstat(old.fd, &st) == 0) old_size = st.st_size;
  }

  if (::rename(tmp.c_str(), path.c_str()) != 0) throw IoError(errno_text("cannot replace", path));
  fire(fault, SavePoint::kAfterRename);

  if (old.fd >= 0) {
    // best effort: journaling or copy-on-write filesystems may retain copies
    Bytes zeros(static_cast<size_t>(old_size), 0);
    ssize_t n = ::pwrite(old.fd, zeros.data(), zeros.size(), 0);
    if (n >= 0) ::fsync(old.fd);
  }
  fire(fault, SavePoint::kAfterZeroize);

  fsync_directory(path.parent_path());

  uint64_t hwm = signer.period();
  if (auto prev = read_hwm(path); prev && *prev > hwm) hwm = *prev;
  uint8_t le[8];
  put_u64_le(le, hwm);
  auto hwm_tmp = hwm_path(path);
  hwm_tmp += ".tmp";
  write_file_durable(hwm_tmp, BytesView(le, 8));
  if (::rename(hwm_tmp.c_str(), hwm_path(path).c_str()) != 0)
    throw IoError(errno_text("cannot replace", hwm_path(path)));
  fsync_directory(path.parent_path());
  fire(fault, SavePoint::kAfterHwm);
}

StatefulSigner load_state(const std::filesystem::path& path, CostCounters* counters) {
  ParsedContainer c = parse_container(path);
  if (auto hwm = read_hwm(path); hwm && *hwm > c.meta.period)
    throw RollbackHazard("state file is older than the recorded high-water mark");
  StatefulSigner signer = StatefulSigner::from_payload(c.meta.scheme_id, as_view(c.payload),
                                                       counters);
  if (signer.period() != c.meta.period || signer.capacity() != c.meta.capacity ||
      signer.suite() != c.meta.suite)
    throw CorruptState("state file header disagrees with its payload");
  return signer;
}

StateMeta inspect_state(const std::filesystem::path& path) {
  return parse_container(path).meta;
}

StateLock::StateLock(const std::filesystem::path& state_path) {
  auto lock = state_path;
  lock += ".lock";
  fd_ = ::open(lock.c_str(), O_RDWR | O_CREAT, 0600);
  if (fd_ < 0) throw IoError(errno_text("cannot open lock file", lock));
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(fd_);
    fd_ = -1;
    throw IoError("state is locked by another signer: " + lock.string());
  }
}

StateLock::~StateLock() {
  if (fd_ >= 0) ::close(fd_);
}

StateLock::StateLock(StateLock&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }

}  // namespace fspq
