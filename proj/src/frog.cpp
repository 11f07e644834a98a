#include "fspq/frog.hpp"

#include <algorithm>
#include <bit>

namespace fspq {

namespace {

BytesView lab(const char* s) {
  return {reinterpret_cast<const uint8_t*>(s), std::char_traits<char>::length(s)};
}

ChainAddress upper_addr(uint64_t leaf) { return {addr_domain::kUpperLeaf, 0, leaf}; }
ChainAddress lower_addr(uint32_t tree, uint64_t leaf) {
  return {addr_domain::kLowerLeaf, tree, leaf};
}

bool all_zero(BytesView v) {
  return std::all_of(v.begin(), v.end(), [](uint8_t b) { return b == 0; });
}

constexpr size_t kHeaderSize = 24;

}  // namespace

FrogParams FrogParams::from_tree_count(uint32_t count) {
  if (count < 1 || count > 128) throw Error("tree count out of range");
  FrogParams p;
  p.tree_count = count;
  p.upper_height = count == 1 ? 0 : std::bit_width(count - 1u);
  p.max_lower_height = count - 1;
  p.capacity = count >= 64 ? UINT64_MAX : (1ull << count) - 1;
  return p;
}

FrogParams FrogParams::for_capacity(uint64_t periods) {
  if (periods == 0) throw Error("capacity must be positive");
  return from_tree_count(static_cast<uint32_t>(std::bit_width(periods)));
}

FrogPeriod frog_locate(uint64_t period) {
  FrogPeriod p;
  p.tree = static_cast<uint32_t>(std::bit_width(period + 1) - 1);
  p.leaf = (period + 1) - (1ull << p.tree);
  return p;
}

size_t frog_signature_size(const FrogParams& params, const SchemeDescriptor& base) {
  auto record = [&](uint32_t height) {
    size_t path = height > 0 ? (height - 1) * kDigestSize : 0;
    return base.sig_size + 2 * base.pk_size + path + kDigestSize;
  };
  return kHeaderSize + 4 + record(params.upper_height) + 4 + record(params.max_lower_height);
}

FrogSigner::FrogSigner(FrogParams params, std::shared_ptr<BaseScheme> base, HashSuite suite,
                       CostCounters* counters, FrogOptions options)
    : params_(params),
      base_(std::move(base)),
      suite_(suite),
      counters_(counters),
      options_(options) {}

FrogSigner::FrogSigner(const FrogParams& params, std::shared_ptr<BaseScheme> base,
                       HashSuite suite, const Seed& master, CostCounters* counters,
                       FrogOptions options)
    : FrogSigner(params, std::move(base), suite, counters, options) {
  // public salt: published with every signature, never reveals the master
  Seed salt = sderive(master, "frog/p");
  pub_seed_ = shash(tag::kPrf, {salt.view()});

  upper_head_ = sderive(master, "frog/u");
  upper_head_index_ = 0;
  lower_head_ = sderive(master, "frog/v");
  lower_head_index_ = 0;

  // upper leaf 0 is materialized now; its certification happens at the first
  // signature so key generation itself signs nothing
  upper_kp_ = leaf_keygen(sderive(*upper_head_, "key"), upper_addr(0));

  const uint64_t padded = 1ull << params_.upper_height;
  if (params_.upper_height == 0) {
    root_ = shash(tag::kNode, {as_view(upper_kp_->pk)});
  } else {
    // remaining upper leaves contribute only their public commitments
    std::vector<Bytes> pks(padded);
    pks[0] = upper_kp_->pk;
    Seed walk = *upper_head_;
    for (uint64_t k = 1; k < padded; ++k) {
      walk = sderive(walk, "adv");
      pks[k] = leaf_public(sderive(walk, "key"), upper_addr(k));
    }
    upper_nodes_.resize(params_.upper_height);
    upper_nodes_[0].resize(padded / 2);
    for (uint64_t q = 0; q < padded / 2; ++q)
      upper_nodes_[0][q] = shash(tag::kNode, {as_view(pks[2 * q]), as_view(pks[2 * q + 1])});
    for (uint32_t l = 1; l < params_.upper_height; ++l) {
      upper_nodes_[l].resize(upper_nodes_[l - 1].size() / 2);
      for (uint64_t q = 0; q < upper_nodes_[l].size(); ++q)
        upper_nodes_[l][q] = shash(
            tag::kNode, {upper_nodes_[l - 1][2 * q].view(), upper_nodes_[l - 1][2 * q + 1].view()});
    }
    root_ = upper_nodes_[params_.upper_height - 1][0];
  }
  upper_head_ = sderive(*upper_head_, "adv");
  upper_head_index_ = 1;

  // tree 0: a single leaf, materialized now
  Seed t0 = sderive(*lower_head_, "tree");
  lower_head_ = sderive(*lower_head_, "adv");
  lower_head_index_ = 1;
  BaseKeyPair kp = leaf_keygen(t0, lower_addr(0, 0));
  active_index_ = 0;
  active_.height = 0;
  active_.root = shash(tag::kNode, {as_view(kp.pk)});
  active_.buffer.emplace(0, std::move(kp));

  if (params_.tree_count > 1) init_staging(1);
}

Digest FrogSigner::shash(uint8_t t, std::initializer_list<BytesView> parts) const {
  if (counters_ != nullptr) ++counters_->hash_count;
  return hash(suite_, t, parts);
}

Seed FrogSigner::sderive(const Seed& s, const char* label) const {
  if (counters_ != nullptr) ++counters_->prf_count;
  return prf_derive(suite_, s, lab(label));
}

Bytes FrogSigner::leaf_public(const Seed& s, const ChainAddress& addr) const {
  return base_->public_from_seed(s, pub_seed_, addr, counters_);
}

BaseKeyPair FrogSigner::leaf_keygen(const Seed& s, const ChainAddress& addr) const {
  return base_->keygen(s, pub_seed_, addr, counters_);
}

void FrogSigner::init_staging(uint32_t tree_index) {
  Staging st;
  st.height = tree_index;
  st.root_seed = sderive(*lower_head_, "tree");
  lower_head_ = sderive(*lower_head_, "adv");
  ++lower_head_index_;
  st.pending.resize(tree_index);
  Seed s = *st.root_seed;
  for (uint32_t l = tree_index; l > 0; --l) {
    st.pending[l - 1] = sderive(s, "r");
    s = sderive(s, "l");
  }
  st.cur_seed = s;
  st.nodes.resize(tree_index);
  st.filled.assign(tree_index, 0);
  for (uint32_t l = 0; l < tree_index; ++l) st.nodes[l].resize(1ull << (tree_index - 1 - l));
  staging_ = std::move(st);
}

void FrogSigner::stage_leaves(uint64_t n) {
  auto& st = *staging_;
  const uint64_t total = 1ull << st.height;
  const uint64_t retain = std::min<uint64_t>(2 * st.height, total);
  while (n > 0 && st.cursor < total) {
    --n;
    BaseKeyPair kp = leaf_keygen(*st.cur_seed, lower_addr(st.height, st.cursor));
    Bytes pk = kp.pk;
    if (st.cursor < retain) {
      st.buffer.emplace(st.cursor, std::move(kp));
    } else {
      secure_wipe(kp.sk);
    }
    if ((st.cursor & 1) == 0) {
      st.pk_pending = std::move(pk);
    } else {
      uint64_t q = st.cursor >> 1;
      st.nodes[0][q] = shash(tag::kNode, {as_view(*st.pk_pending), as_view(pk)});
      st.pk_pending.reset();
      st.filled[0] = q + 1;
      uint32_t l = 0;
      while ((q & 1) == 1 && l + 1 < st.height) {
        q >>= 1;
        st.nodes[l + 1][q] =
            shash(tag::kNode, {st.nodes[l][2 * q].view(), st.nodes[l][2 * q + 1].view()});
        st.filled[l + 1] = q + 1;
        ++l;
      }
    }
    // advance the staging walk
    st.cur_seed.reset();
    const uint64_t done = st.cursor++;
    if (st.cursor >= total) break;
    const uint32_t z = static_cast<uint32_t>(std::countr_one(done));
    Seed s = *st.pending[z];
    st.pending[z].reset();
    for (uint32_t l = z; l > 0; --l) {
      st.pending[l - 1] = sderive(s, "r");
      s = sderive(s, "l");
    }
    st.cur_seed = s;
  }
  if (st.cursor == total && !st.complete) {
    st.complete = true;
    st.root = st.nodes[st.height - 1][0];
  }
}

void FrogSigner::advance_walk(LowerTree& t) {
  t.cur_seed.reset();
  const uint64_t done = t.next_leaf++;
  if (t.next_leaf >= (1ull << t.height)) return;
  const uint32_t z = static_cast<uint32_t>(std::countr_one(done));
  Seed s = *t.pending[z];
  t.pending[z].reset();
  for (uint32_t l = z; l > 0; --l) {
    t.pending[l - 1] = sderive(s, "r");
    s = sderive(s, "l");
  }
  t.cur_seed = s;
}

void FrogSigner::turnover(uint32_t tree_index) {
  if (!staging_ || staging_->height != tree_index || tree_index != active_index_ + 1)
    throw Error("internal: staging out of step with the period");
  if (!staging_->complete) {
    // only reachable with amortized staging off
    stage_leaves(1ull << staging_->height);
  }
  LowerTree nt;
  nt.height = tree_index;
  nt.root = staging_->root;
  nt.nodes = std::move(staging_->nodes);
  nt.buffer = std::move(staging_->buffer);
  nt.pending.resize(tree_index);
  Seed s = *staging_->root_seed;
  for (uint32_t l = tree_index; l > 0; --l) {
    nt.pending[l - 1] = sderive(s, "r");
    s = sderive(s, "l");
  }
  nt.cur_seed = s;
  staging_.reset();

  // the outgoing tree is fully spent; drop it wholesale
  active_ = std::move(nt);
  active_index_ = tree_index;
  cert_record_.reset();
  if (upper_kp_) {
    secure_wipe(upper_kp_->sk);
    upper_kp_.reset();
  }
  if (tree_index + 1 < params_.tree_count) init_staging(tree_index + 1);
}

void FrogSigner::ensure_cert() {
  if (cert_record_) return;
  const uint32_t i = active_index_;
  if (!upper_kp_) {
    if (upper_head_index_ != i) throw Error("internal: upper chain out of step");
    upper_kp_ = leaf_keygen(sderive(*upper_head_, "key"), upper_addr(i));
    upper_head_ = sderive(*upper_head_, "adv");
    ++upper_head_index_;
  }
  uint8_t nums[16];
  put_u64_le(nums, 1ull << i);
  put_u64_le(nums + 8, i);
  Digest payload = shash(tag::kCert, {active_.root.view(), BytesView(nums, sizeof nums)});
  Bytes sig = base_->sign(*upper_kp_, payload, pub_seed_, upper_addr(i), counters_);

  Bytes sibling;
  if (params_.upper_height > 0) {
    if ((i & 1) == 0) {
      // the sibling leaf is unspent; its commitment comes from the chain head
      if (upper_head_index_ != i + 1) throw Error("internal: upper chain out of step");
      sibling = leaf_public(sderive(*upper_head_, "key"), upper_addr(i + 1));
      retained_upper_pk_ = upper_kp_->pk;
    } else {
      if (!retained_upper_pk_) throw Error("internal: missing retained sibling commitment");
      sibling = std::move(*retained_upper_pk_);
      retained_upper_pk_.reset();
    }
  }

  ByteWriter w;
  w.raw(as_view(sig));
  w.raw(as_view(upper_kp_->pk));
  if (sibling.empty()) {
    w.zeros(base_->descriptor().pk_size);
  } else {
    w.raw(as_view(sibling));
  }
  for (uint32_t l = 0; l + 1 < params_.upper_height; ++l)
    w.raw(upper_nodes_[l][(i >> (l + 1)) ^ 1].view());
  w.raw(active_.root.view());
  cert_record_ = w.take();
  upper_kp_.reset();  // spent, sk already wiped by sign
}

Bytes FrogSigner::sign(BytesView message) {
  if (exhausted()) throw Exhausted("all signing periods spent");
  const FrogPeriod pos = frog_locate(period_);
  if (pos.tree != active_index_) turnover(pos.tree);
  ensure_cert();

  if (active_.next_leaf != pos.leaf) throw Error("internal: walk out of step");
  BaseKeyPair kp;
  if (auto it = active_.buffer.find(pos.leaf); it != active_.buffer.end()) {
    kp = std::move(it->second);
    active_.buffer.erase(it);
  } else {
    kp = leaf_keygen(*active_.cur_seed, lower_addr(pos.tree, pos.leaf));
  }
  Digest target = shash(tag::kMessage, {message});
  Bytes sig = base_->sign(kp, target, pub_seed_, lower_addr(pos.tree, pos.leaf), counters_);
  advance_walk(active_);

  Bytes sibling;
  if (active_.height > 0) {
    if ((pos.leaf & 1) == 0) {
      if (auto it = active_.buffer.find(pos.leaf + 1); it != active_.buffer.end()) {
        sibling = it->second.pk;
      } else {
        sibling = leaf_public(*active_.cur_seed, lower_addr(pos.tree, pos.leaf + 1));
      }
      active_.retained_pk = kp.pk;  // the odd sibling will need it
    } else {
      if (!active_.retained_pk) throw Error("internal: missing retained sibling commitment");
      sibling = std::move(*active_.retained_pk);
      active_.retained_pk.reset();
    }
  }

  if (staging_ && !staging_->complete && options_.amortized_staging) stage_leaves(2);

  const auto& d = base_->descriptor();
  ByteWriter w;
  w.u8(kWireVersion);
  w.u8(wire_kind::kFrog);
  w.u8(base_scheme_wire_id(d.name));
  w.u8(static_cast<uint8_t>(suite_));
  w.u8(static_cast<uint8_t>(params_.tree_count));
  w.u8(static_cast<uint8_t>(params_.upper_height));
  w.u8(static_cast<uint8_t>(params_.max_lower_height));
  w.u8(0);
  w.u64(period_);
  w.zeros(8);

  w.blob(as_view(*cert_record_));

  ByteWriter rec;
  rec.raw(as_view(sig));
  rec.raw(as_view(kp.pk));
  if (sibling.empty()) {
    rec.zeros(d.pk_size);
  } else {
    rec.raw(as_view(sibling));
  }
  uint32_t written = 0;
  for (uint32_t l = 0; l + 1 < active_.height; ++l, ++written)
    rec.raw(active_.nodes[l][(pos.leaf >> (l + 1)) ^ 1].view());
  if (params_.max_lower_height > 0)
    rec.zeros((params_.max_lower_height - 1 - written) * kDigestSize);
  rec.raw(pub_seed_.view());
  w.blob(as_view(rec.data()));

  ++period_;
  return w.take();
}

bool frog_verify(const Digest& pk, BytesView message, BytesView signature, CostCounters* cc) {
  try {
    ByteReader r(signature);
    if (r.u8() != kWireVersion) return false;
    if (r.u8() != wire_kind::kFrog) return false;
    const std::string base_name = base_scheme_from_wire_id(r.u8());
    HashSuite suite;
    if (!suite_from_id(r.u8(), suite)) return false;
    const uint32_t count = r.u8();
    const uint32_t hup = r.u8();
    const uint32_t hlow = r.u8();
    if (r.u8() != 0) return false;
    const FrogParams params = FrogParams::from_tree_count(count);
    if (hup != params.upper_height || hlow != params.max_lower_height) return false;
    const uint64_t period = r.u64();
    if (!all_zero(r.raw(8))) return false;
    if (period >= params.capacity) return false;
    const FrogPeriod pos = frog_locate(period);

    auto base = make_base_scheme(base_name);
    const auto& d = base->descriptor();
    const Bytes upper = r.blob();
    const Bytes lower = r.blob();
    if (!r.finished()) return false;
    const size_t upath = hup > 0 ? (hup - 1) * kDigestSize : 0;
    const size_t lpath = hlow > 0 ? (hlow - 1) * kDigestSize : 0;
    if (upper.size() != d.sig_size + 2 * d.pk_size + upath + kDigestSize) return false;
    if (lower.size() != d.sig_size + 2 * d.pk_size + lpath + kDigestSize) return false;

    auto h = [&](uint8_t t, std::initializer_list<BytesView> parts) {
      if (cc != nullptr) ++cc->hash_count;
      return hash(suite, t, parts);
    };

    ByteReader lr(as_view(lower));
    const Bytes lsig = lr.bytes(d.sig_size);
    const Bytes lpk = lr.bytes(d.pk_size);
    const Bytes lsib = lr.bytes(d.pk_size);
    std::vector<Digest> lower_path(hlow > 0 ? hlow - 1 : 0);
    for (auto& dg : lower_path) dg = Digest::from(lr.raw(kDigestSize));
    const Digest pub_seed = Digest::from(lr.raw(kDigestSize));

    Digest target = h(tag::kMessage, {message});
    if (!base->verify(lpk, target, lsig, pub_seed, lower_addr(pos.tree, pos.leaf), cc))
      return false;

    Digest lroot;
    uint32_t used = 0;
    if (pos.tree == 0) {
      if (!all_zero(as_view(lsib))) return false;
      lroot = h(tag::kNode, {as_view(lpk)});
    } else {
      lroot = (pos.leaf & 1) == 0 ? h(tag::kNode, {as_view(lpk), as_view(lsib)})
                                  : h(tag::kNode, {as_view(lsib), as_view(lpk)});
      uint64_t idx = pos.leaf >> 1;
      for (; used + 1 < pos.tree; ++used) {
        const Digest& sib = lower_path[used];
        lroot = (idx & 1) ? h(tag::kNode, {sib.view(), lroot.view()})
                          : h(tag::kNode, {lroot.view(), sib.view()});
        idx >>= 1;
      }
    }
    for (uint32_t l = used; l < lower_path.size(); ++l)
      if (!all_zero(lower_path[l].view())) return false;

    ByteReader ur(as_view(upper));
    const Bytes usig = ur.bytes(d.sig_size);
    const Bytes upk = ur.bytes(d.pk_size);
    const Bytes usib = ur.bytes(d.pk_size);
    std::vector<Digest> upper_path(hup > 0 ? hup - 1 : 0);
    for (auto& dg : upper_path) dg = Digest::from(ur.raw(kDigestSize));
    const Digest carried_root = Digest::from(ur.raw(kDigestSize));
    if (!(carried_root == lroot)) return false;

    uint8_t nums[16];
    put_u64_le(nums, 1ull << pos.tree);
    put_u64_le(nums + 8, pos.tree);
    Digest payload = h(tag::kCert, {lroot.view(), BytesView(nums, sizeof nums)});
    if (!base->verify(upk, payload, usig, pub_seed, upper_addr(pos.tree), cc)) return false;

    Digest uroot;
    if (hup == 0) {
      if (!all_zero(as_view(usib))) return false;
      uroot = h(tag::kNode, {as_view(upk)});
    } else {
      uroot = (pos.tree & 1) == 0 ? h(tag::kNode, {as_view(upk), as_view(usib)})
                                  : h(tag::kNode, {as_view(usib), as_view(upk)});
      uint64_t idx = pos.tree >> 1;
      for (uint32_t l = 0; l + 1 < hup; ++l) {
        const Digest& sib = upper_path[l];
        uroot = (idx & 1) ? h(tag::kNode, {sib.view(), uroot.view()})
                          : h(tag::kNode, {uroot.view(), sib.view()});
        idx >>= 1;
      }
    }
    return uroot == pk;
  } catch (const ParseError&) {
    return false;
  } catch (const Error&) {
    return false;
  }
}

namespace {

// state serialization helpers

void put_seed_opt(ByteWriter& w, const std::optional<Seed>& s) {
  w.u8(s ? 1 : 0);
  if (s) w.raw(s->view());
}

std::optional<Seed> get_seed_opt(ByteReader& r) {
  if (r.u8() == 0) return std::nullopt;
  return Seed::from(r.raw(kSeedSize));
}

void put_bytes_opt(ByteWriter& w, const std::optional<Bytes>& b) {
  w.u8(b ? 1 : 0);
  if (b) w.blob(as_view(*b));
}

std::optional<Bytes> get_bytes_opt(ByteReader& r, size_t max_len) {
  if (r.u8() == 0) return std::nullopt;
  return r.blob(max_len);
}

void put_levels(ByteWriter& w, const std::vector<std::vector<Digest>>& levels) {
  w.u8(static_cast<uint8_t>(levels.size()));
  for (const auto& level : levels) {
    w.u64(level.size());
    for (const auto& dg : level) w.raw(dg.view());
  }
}

std::vector<std::vector<Digest>> get_levels(ByteReader& r) {
  std::vector<std::vector<Digest>> levels(r.u8());
  for (auto& level : levels) {
    const uint64_t n = r.u64();
    if (n > (1ull << 25)) throw CorruptState("digest level too large");
    level.resize(n);
    for (auto& dg : level) dg = Digest::from(r.raw(kDigestSize));
  }
  return levels;
}

void put_pending(ByteWriter& w, const std::vector<std::optional<Seed>>& pending) {
  w.u8(static_cast<uint8_t>(pending.size()));
  for (const auto& p : pending) put_seed_opt(w, p);
}

std::vector<std::optional<Seed>> get_pending(ByteReader& r) {
  std::vector<std::optional<Seed>> pending(r.u8());
  for (auto& p : pending) p = get_seed_opt(r);
  return pending;
}

void put_buffer(ByteWriter& w, const std::map<uint64_t, BaseKeyPair>& buffer) {
  w.u32(static_cast<uint32_t>(buffer.size()));
  for (const auto& [leaf, kp] : buffer) {
    w.u64(leaf);
    w.blob(as_view(kp.sk));
    w.blob(as_view(kp.pk));
  }
}

std::map<uint64_t, BaseKeyPair> get_buffer(ByteReader& r, const SchemeDescriptor& d) {
  const uint32_t n = r.u32();
  if (n > 4096) throw CorruptState("keypair buffer too large");
  std::map<uint64_t, BaseKeyPair> buffer;
  for (uint32_t k = 0; k < n; ++k) {
    const uint64_t leaf = r.u64();
    BaseKeyPair kp;
    kp.sk = r.blob(d.sk_size);
    kp.pk = r.blob(d.pk_size);
    if (kp.sk.size() != d.sk_size || kp.pk.size() != d.pk_size)
      throw CorruptState("keypair has wrong size");
    buffer.emplace(leaf, std::move(kp));
  }
  return buffer;
}

}  // namespace

Bytes FrogSigner::serialize_state() const {
  ByteWriter w;
  w.u8(static_cast<uint8_t>(params_.tree_count));
  w.u8(base_scheme_wire_id(base_->descriptor().name));
  w.u8(static_cast<uint8_t>(suite_));
  w.raw(pub_seed_.view());
  w.raw(root_.view());
  w.u64(period_);

  put_seed_opt(w, upper_head_);
  w.u32(upper_head_index_);
  w.u8(upper_kp_ ? 1 : 0);
  if (upper_kp_) {
    w.blob(as_view(upper_kp_->sk));
    w.blob(as_view(upper_kp_->pk));
  }
  put_bytes_opt(w, retained_upper_pk_);
  put_levels(w, upper_nodes_);
  put_bytes_opt(w, cert_record_);

  put_seed_opt(w, lower_head_);
  w.u32(lower_head_index_);
  w.u32(active_index_);

  w.u8(static_cast<uint8_t>(active_.height));
  w.raw(active_.root.view());
  put_levels(w, active_.nodes);
  put_buffer(w, active_.buffer);
  w.u64(active_.next_leaf);
  put_pending(w, active_.pending);
  put_seed_opt(w, active_.cur_seed);
  put_bytes_opt(w, active_.retained_pk);

  w.u8(staging_ ? 1 : 0);
  if (staging_) {
    const auto& st = *staging_;
    w.u8(static_cast<uint8_t>(st.height));
    put_seed_opt(w, st.root_seed);
    w.u64(st.cursor);
    put_pending(w, st.pending);
    put_seed_opt(w, st.cur_seed);
    w.u8(static_cast<uint8_t>(st.filled.size()));
    for (size_t l = 0; l < st.filled.size(); ++l) {
      w.u64(st.filled[l]);
      for (uint64_t q = 0; q < st.filled[l]; ++q) w.raw(st.nodes[l][q].view());
    }
    put_buffer(w, st.buffer);
    put_bytes_opt(w, st.pk_pending);
    w.u8(st.complete ? 1 : 0);
    if (st.complete) w.raw(st.root.view());
  }
  return w.take();
}

FrogSigner FrogSigner::restore(BytesView state, CostCounters* counters, FrogOptions options) {
  ByteReader r(state);
  const uint32_t count = r.u8();
  const std::string base_name = base_scheme_from_wire_id(r.u8());
  HashSuite suite;
  if (!suite_from_id(r.u8(), suite)) throw CorruptState("unknown hash suite in state");
  FrogParams params = FrogParams::from_tree_count(count);
  FrogSigner s(params, make_base_scheme(base_name), suite, counters, options);
  const auto& d = s.base_->descriptor();

  s.pub_seed_ = Digest::from(r.raw(kDigestSize));
  s.root_ = Digest::from(r.raw(kDigestSize));
  s.period_ = r.u64();

  s.upper_head_ = get_seed_opt(r);
  s.upper_head_index_ = r.u32();
  if (r.u8() != 0) {
    BaseKeyPair kp;
    kp.sk = r.blob(d.sk_size);
    kp.pk = r.blob(d.pk_size);
    if (kp.sk.size() != d.sk_size || kp.pk.size() != d.pk_size)
      throw CorruptState("upper keypair has wrong size");
    s.upper_kp_ = std::move(kp);
  }
  s.retained_upper_pk_ = get_bytes_opt(r, d.pk_size);
  s.upper_nodes_ = get_levels(r);
  s.cert_record_ = get_bytes_opt(r, 1u << 20);

  s.lower_head_ = get_seed_opt(r);
  s.lower_head_index_ = r.u32();
  s.active_index_ = r.u32();
  if (s.active_index_ >= params.tree_count) throw CorruptState("active tree out of range");

  s.active_.height = r.u8();
  s.active_.root = Digest::from(r.raw(kDigestSize));
  s.active_.nodes = get_levels(r);
  s.active_.buffer = get_buffer(r, d);
  s.active_.next_leaf = r.u64();
  s.active_.pending = get_pending(r);
  s.active_.cur_seed = get_seed_opt(r);
  s.active_.retained_pk = get_bytes_opt(r, d.pk_size);
  if (s.active_.height != s.active_index_) throw CorruptState("tree height mismatch");

  if (r.u8() != 0) {
    Staging st;
    st.height = r.u8();
    st.root_seed = get_seed_opt(r);
    st.cursor = r.u64();
    st.pending = get_pending(r);
    st.cur_seed = get_seed_opt(r);
    const uint8_t level_count = r.u8();
    if (level_count != st.height) throw CorruptState("staging level count mismatch");
    st.nodes.resize(st.height);
    st.filled.assign(st.height, 0);
    for (uint32_t l = 0; l < st.height; ++l) {
      st.nodes[l].resize(1ull << (st.height - 1 - l));
      st.filled[l] = r.u64();
      if (st.filled[l] > st.nodes[l].size()) throw CorruptState("staging fill out of range");
      for (uint64_t q = 0; q < st.filled[l]; ++q) st.nodes[l][q] = Digest::from(r.raw(kDigestSize));
    }
    st.buffer = get_buffer(r, d);
    st.pk_pending = get_bytes_opt(r, d.pk_size);
    st.complete = r.u8() != 0;
    if (st.complete) st.root = Digest::from(r.raw(kDigestSize));
    if (st.height != s.active_index_ + 1 || st.height >= params.tree_count)
      throw CorruptState("staging height mismatch");
    s.staging_ = std::move(st);
  }
  if (!r.finished()) throw CorruptState("trailing octets in state");
  return s;
}

void FrogSigner::serialize_secrets(ByteWriter& out) const {
  if (upper_head_) out.raw(upper_head_->view());
  if (upper_kp_ && !upper_kp_->used) out.raw(as_view(upper_kp_->sk));
  if (lower_head_) out.raw(lower_head_->view());
  for (const auto& [leaf, kp] : active_.buffer) out.raw(as_view(kp.sk));
  for (const auto& p : active_.pending)
    if (p) out.raw(p->view());
  if (active_.cur_seed) out.raw(active_.cur_seed->view());
  if (staging_) {
    const auto& st = *staging_;
    if (st.root_seed) out.raw(st.root_seed->view());
    for (const auto& p : st.pending)
      if (p) out.raw(p->view());
    if (st.cur_seed) out.raw(st.cur_seed->view());
    for (const auto& [leaf, kp] : st.buffer) out.raw(as_view(kp.sk));
  }
}

}  // namespace fspq
