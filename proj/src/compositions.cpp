#include "fspq/compositions.hpp"

#include <bit>
#include <utility>

namespace fspq {

namespace {

BytesView lab(const char* s) {
  return {reinterpret_cast<const uint8_t*>(s), std::char_traits<char>::length(s)};
}

Digest chash(const CompositionContext& ctx, uint8_t t, std::initializer_list<BytesView> parts) {
  if (ctx.counters != nullptr) ++ctx.counters->hash_count;
  return hash(ctx.suite, t, parts);
}

Seed cderive(const CompositionContext& ctx, const Seed& s, const char* label) {
  if (ctx.counters != nullptr) ++ctx.counters->prf_count;
  return prf_derive(ctx.suite, s, lab(label));
}

Digest leaf_digest(const CompositionContext& ctx, BytesView pk_bytes) {
  return chash(ctx, tag::kNode, {pk_bytes});
}

Digest node_digest(const CompositionContext& ctx, const Digest& l, const Digest& r) {
  return chash(ctx, tag::kNode, {l.view(), r.view()});
}

Digest cert_payload(const CompositionContext& ctx, const Digest& lower_pk, uint64_t lower_cap,
                    uint64_t upper_period) {
  uint8_t nums[16];
  put_u64_le(nums, lower_cap);
  put_u64_le(nums + 8, upper_period);
  return chash(ctx, tag::kCert, {lower_pk.view(), BytesView(nums, sizeof nums)});
}

// Composite capacities saturate instead of overflowing; UINT64_MAX periods
// are not reachable by sequential signing anyway.
uint64_t sat_add(uint64_t a, uint64_t b) { return a > UINT64_MAX - b ? UINT64_MAX : a + b; }
uint64_t sat_mul(uint64_t a, uint64_t b) {
  return (b != 0 && a > UINT64_MAX / b) ? UINT64_MAX : a * b;
}

// State stream helpers shared by the restore constructors.
struct RestoreTag {};

bool read_flag(ByteReader& r) {
  uint8_t v = r.u8();
  if (v > 1) throw CorruptState("bad flag octet in composite state");
  return v == 1;
}

void put_opt_seed(ByteWriter& w, const std::optional<Seed>& s) {
  w.u8(s ? 1 : 0);
  if (s) w.raw(s->view());
}

std::optional<Seed> get_opt_seed(ByteReader& r) {
  if (!read_flag(r)) return std::nullopt;
  return Seed::from(r.bytes(kSeedSize));
}

Digest get_digest(ByteReader& r) { return Digest::from(r.bytes(kDigestSize)); }

Bytes get_sized_blob(ByteReader& r, size_t exact) {
  Bytes b = r.blob(exact);
  if (b.size() != exact) throw CorruptState("truncated key material in composite state");
  return b;
}

}  // namespace

uint64_t product_lower_pid(HashSuite suite, uint64_t pid, uint64_t ordinal) {
  uint8_t nums[16];
  put_u64_le(nums, pid);
  put_u64_le(nums + 8, ordinal);
  Digest d = hash(suite, tag::kPrf, {BytesView(nums, sizeof nums), lab("pid")});
  // top bit set keeps hash-derived ids disjoint from the doubling path ids
  return get_u64_le(d.bytes.data()) | (1ull << 63);
}

namespace {

class LeafScheme final : public EvolvingScheme {
 public:
  LeafScheme(CompositionContext ctx, uint64_t pid, const Seed& seed)
      : ctx_(std::move(ctx)), pid_(pid) {
    kp_ = ctx_.base->keygen(seed, ctx_.pub_seed, addr(), ctx_.counters);
    pk_digest_ = leaf_digest(ctx_, as_view(kp_.pk));
  }
  LeafScheme(CompositionContext ctx, uint64_t pid, ByteReader& r, RestoreTag)
      : ctx_(std::move(ctx)), pid_(pid) {
    spent_ = read_flag(r);
    pk_digest_ = get_digest(r);
    const auto& d = ctx_.base->descriptor();
    kp_.sk = spent_ ? get_sized_blob(r, 0) : get_sized_blob(r, d.sk_size);
    kp_.pk = get_sized_blob(r, d.pk_size);
    kp_.used = spent_;
  }
  ~LeafScheme() override { secure_wipe(kp_.sk); }

  uint64_t capacity() const override { return 1; }
  uint64_t period() const override { return spent_ ? 1 : 0; }
  Digest public_key() const override { return pk_digest_; }

  void append_signature(const Digest& target, ByteWriter& out, uint8_t& record_count) override {
    if (spent_) throw Exhausted("one-time leaf spent");
    Bytes sig = ctx_.base->sign(kp_, target, ctx_.pub_seed, addr(), ctx_.counters);
    ByteWriter rec;
    rec.u8(wire_rec::kLeaf);
    rec.raw(as_view(sig));
    rec.raw(as_view(kp_.pk));
    out.blob(as_view(rec.data()));
    ++record_count;
    spent_ = true;
  }

  void skip() override {
    if (spent_) throw Exhausted("one-time leaf spent");
    secure_wipe(kp_.sk);
    kp_.sk.clear();
    kp_.used = true;
    spent_ = true;
  }

  void serialize_secrets(ByteWriter& out) const override { out.raw(as_view(kp_.sk)); }

  void serialize_state(ByteWriter& out) const override {
    out.u8(spent_ ? 1 : 0);
    out.raw(pk_digest_.view());
    out.blob(as_view(kp_.sk));
    out.blob(as_view(kp_.pk));
  }

 private:
  ChainAddress addr() const { return {addr_domain::kComposite, pid_, 0}; }

  CompositionContext ctx_;
  uint64_t pid_;
  BaseKeyPair kp_;
  Digest pk_digest_;
  bool spent_ = false;
};

// Iterated sum: a binary tree of one-time leaves sharing one root digest.
// The digest tree is built eagerly (fine for the heights this layer serves);
// secret seeds follow the current path only, so spent leaves are gone.
class TreeScheme final : public EvolvingScheme {
 public:
  TreeScheme(CompositionContext ctx, uint64_t pid, uint32_t height, const Seed& seed)
      : ctx_(std::move(ctx)), pid_(pid), height_(height), pending_(height) {
    if (height_ > 25) throw Error("iterated sum height too large for the eager digest tree");
    const uint64_t n = 1ull << height_;
    levels_.resize(height_ + 1);
    levels_[0].resize(n);
    for (uint64_t j = 0; j < n; ++j) {
      Seed ls = leaf_seed(seed, j);
      if (j == 0) {
        kp_ = ctx_.base->keygen(ls, ctx_.pub_seed, addr(0), ctx_.counters);
        levels_[0][0] = leaf_digest(ctx_, as_view(kp_->pk));
      } else {
        Bytes pk = ctx_.base->public_from_seed(ls, ctx_.pub_seed, addr(j), ctx_.counters);
        levels_[0][j] = leaf_digest(ctx_, as_view(pk));
      }
    }
    for (uint32_t l = 1; l <= height_; ++l) {
      levels_[l].resize(1ull << (height_ - l));
      for (uint64_t q = 0; q < levels_[l].size(); ++q)
        levels_[l][q] = node_digest(ctx_, levels_[l - 1][2 * q], levels_[l - 1][2 * q + 1]);
    }
    Seed s = seed;
    for (uint32_t l = height_; l > 0; --l) {
      pending_[l - 1] = cderive(ctx_, s, "r");
      s = cderive(ctx_, s, "l");
    }
  }

  TreeScheme(CompositionContext ctx, uint64_t pid, uint32_t height, ByteReader& r, RestoreTag)
      : ctx_(std::move(ctx)), pid_(pid), height_(height), pending_(height) {
    if (r.u8() != height_) throw CorruptState("iterated sum height mismatch");
    cur_ = r.u64();
    if (cur_ > capacity()) throw CorruptState("iterated sum period out of range");
    levels_.resize(height_ + 1);
    for (uint32_t l = 0; l <= height_; ++l) {
      levels_[l].resize(1ull << (height_ - l));
      for (auto& d : levels_[l]) d = get_digest(r);
    }
    for (auto& p : pending_) p = get_opt_seed(r);
    cur_seed_ = get_opt_seed(r);
    if (read_flag(r)) {
      const auto& d = ctx_.base->descriptor();
      BaseKeyPair kp;
      kp.sk = get_sized_blob(r, d.sk_size);
      kp.pk = get_sized_blob(r, d.pk_size);
      kp_ = std::move(kp);
    }
    if (!exhausted() && !cur_seed_ && !kp_)
      throw CorruptState("iterated sum lost its current leaf");
  }

  ~TreeScheme() override {
    if (kp_) secure_wipe(kp_->sk);
  }

  uint64_t capacity() const override { return 1ull << height_; }
  uint64_t period() const override { return cur_; }
  Digest public_key() const override { return levels_[height_][0]; }

  void append_signature(const Digest& target, ByteWriter& out, uint8_t& record_count) override {
    if (exhausted()) throw Exhausted("iterated sum exhausted");
    ensure_keypair();
    Bytes sig = ctx_.base->sign(*kp_, target, ctx_.pub_seed, addr(cur_), ctx_.counters);
    ByteWriter rec;
    rec.u8(wire_rec::kPath);
    rec.u8(static_cast<uint8_t>(height_));
    rec.u64(cur_);
    rec.raw(as_view(sig));
    rec.raw(as_view(kp_->pk));
    for (uint32_t l = 0; l < height_; ++l) rec.raw(levels_[l][(cur_ >> l) ^ 1].view());
    out.blob(as_view(rec.data()));
    ++record_count;
    advance();
  }

  void skip() override {
    if (exhausted()) throw Exhausted("iterated sum exhausted");
    advance();
  }

  void serialize_secrets(ByteWriter& out) const override {
    for (const auto& p : pending_)
      if (p) out.raw(p->view());
    if (cur_seed_) out.raw(cur_seed_->view());
    if (kp_) out.raw(as_view(kp_->sk));
  }

  void serialize_state(ByteWriter& out) const override {
    out.u8(static_cast<uint8_t>(height_));
    out.u64(cur_);
    for (const auto& level : levels_)
      for (const auto& d : level) out.raw(d.view());
    for (const auto& p : pending_) put_opt_seed(out, p);
    put_opt_seed(out, cur_seed_);
    out.u8(kp_ ? 1 : 0);
    if (kp_) {
      out.blob(as_view(kp_->sk));
      out.blob(as_view(kp_->pk));
    }
  }

 private:
  ChainAddress addr(uint64_t leaf) const { return {addr_domain::kComposite, pid_, leaf}; }

  Seed leaf_seed(const Seed& root, uint64_t j) const {
    Seed s = root;
    for (uint32_t l = height_; l > 0; --l)
      s = cderive(ctx_, s, ((j >> (l - 1)) & 1) ? "r" : "l");
    return s;
  }

  void ensure_keypair() {
    if (kp_) return;
    kp_ = ctx_.base->keygen(*cur_seed_, ctx_.pub_seed, addr(cur_), ctx_.counters);
    cur_seed_.reset();
  }

  void advance() {
    if (kp_) {
      secure_wipe(kp_->sk);
      kp_.reset();
    }
    cur_seed_.reset();
    const uint64_t j = cur_++;
    if (cur_ >= capacity()) return;
    const uint32_t z = static_cast<uint32_t>(std::countr_one(j));
    Seed s = *pending_[z];
    pending_[z].reset();
    for (uint32_t l = z; l > 0; --l) {
      pending_[l - 1] = cderive(ctx_, s, "r");
      s = cderive(ctx_, s, "l");
    }
    cur_seed_ = s;
  }

  CompositionContext ctx_;
  uint64_t pid_;
  uint32_t height_;
  std::vector<std::optional<Seed>> pending_;  // right-sibling subtree seeds
  std::vector<std::vector<Digest>> levels_;   // digest tree, level 0 = leaves
  uint64_t cur_ = 0;
  std::optional<Seed> cur_seed_;
  std::optional<BaseKeyPair> kp_;
};

class SumScheme final : public EvolvingScheme {
 public:
  SumScheme(CompositionContext ctx, uint64_t pid, const SchemeBlueprint& left,
            SchemeBlueprint right, const Seed& seed)
      : ctx_(std::move(ctx)),
        pid_(pid),
        left_cap_(left.capacity),
        right_cap_(right.capacity),
        right_bp_(std::move(right)) {
    Seed ls = cderive(ctx_, seed, "sum/l");
    right_seed_ = cderive(ctx_, seed, "sum/r");
    active_ = left.make(ls, sum_child_pid(pid_, 0));
    sibling_ = right_bp_.derive_pk(*right_seed_, sum_child_pid(pid_, 1));
    pk_ = node_digest(ctx_, active_->public_key(), sibling_);
  }

  SumScheme(CompositionContext ctx, uint64_t pid, const SchemeBlueprint& left,
            SchemeBlueprint right, ByteReader& r, RestoreTag)
      : ctx_(std::move(ctx)),
        pid_(pid),
        left_cap_(left.capacity),
        right_cap_(right.capacity),
        right_bp_(std::move(right)) {
    side_ = read_flag(r) ? 1 : 0;
    sibling_ = get_digest(r);
    pk_ = get_digest(r);
    right_seed_ = get_opt_seed(r);
    if ((side_ == 0) != right_seed_.has_value())
      throw CorruptState("sum side and pending seed disagree");
    active_ = side_ == 0 ? left.restore(r, sum_child_pid(pid_, 0))
                         : right_bp_.restore(r, sum_child_pid(pid_, 1));
  }

  uint64_t capacity() const override { return sat_add(left_cap_, right_cap_); }
  uint64_t period() const override {
    return side_ == 0 ? active_->period() : left_cap_ + active_->period();
  }
  Digest public_key() const override { return pk_; }

  void append_signature(const Digest& target, ByteWriter& out, uint8_t& record_count) override {
    if (exhausted()) throw Exhausted("sum exhausted");
    cross_over_if_due();
    ByteWriter rec;
    rec.u8(wire_rec::kSum);
    rec.u8(side_);
    rec.u64(side_ == 0 ? right_cap_ : left_cap_);
    rec.raw(sibling_.view());
    out.blob(as_view(rec.data()));
    ++record_count;
    active_->append_signature(target, out, record_count);
  }

  void skip() override {
    if (exhausted()) throw Exhausted("sum exhausted");
    cross_over_if_due();
    active_->skip();
  }

  void serialize_secrets(ByteWriter& out) const override {
    if (right_seed_) out.raw(right_seed_->view());
    active_->serialize_secrets(out);
  }

  void serialize_state(ByteWriter& out) const override {
    out.u8(side_);
    out.raw(sibling_.view());
    out.raw(pk_.view());
    put_opt_seed(out, right_seed_);
    active_->serialize_state(out);
  }

 private:
  void cross_over_if_due() {
    if (side_ == 1 || !active_->exhausted()) return;
    // left child is spent; all its secrets died with its periods
    Digest left_pk = active_->public_key();
    active_ = right_bp_.make(*right_seed_, sum_child_pid(pid_, 1));
    right_seed_.reset();
    sibling_ = left_pk;
    side_ = 1;
  }

  CompositionContext ctx_;
  uint64_t pid_;
  uint64_t left_cap_;
  uint64_t right_cap_;
  SchemeBlueprint right_bp_;
  std::unique_ptr<EvolvingScheme> active_;
  std::optional<Seed> right_seed_;
  Digest sibling_;  // inactive side's public digest
  Digest pk_;
  uint8_t side_ = 0;
};

class ProductScheme final : public EvolvingScheme {
 public:
  ProductScheme(CompositionContext ctx, uint64_t pid, const SchemeBlueprint& upper,
                SchemeBlueprint lower, bool lazy_lower, const Seed& seed)
      : ctx_(std::move(ctx)),
        pid_(pid),
        upper_cap_(upper.capacity),
        lower_cap_(lower.capacity),
        lower_bp_(std::move(lower)),
        lazy_(lazy_lower) {
    upper_ = upper.make(cderive(ctx_, seed, "prod/u"), product_upper_pid(pid_));
    chain_ = cderive(ctx_, seed, "prod/v");
    if (!lazy_) materialize_lower();
    recertify();
  }

  ProductScheme(CompositionContext ctx, uint64_t pid, const SchemeBlueprint& upper,
                SchemeBlueprint lower, bool lazy_lower, ByteReader& r, RestoreTag)
      : ctx_(std::move(ctx)),
        pid_(pid),
        upper_cap_(upper.capacity),
        lower_cap_(lower.capacity),
        lower_bp_(std::move(lower)),
        lazy_(lazy_lower) {
    ordinal_ = r.u64();
    if (ordinal_ >= upper_cap_) throw CorruptState("product ordinal out of range");
    chain_ = get_opt_seed(r);
    if (!chain_) throw CorruptState("product lost its ordinal chain");
    cert_lower_pk_ = get_digest(r);
    cert_upper_period_ = r.u64();
    cert_inner_count_ = r.u8();
    cert_records_ = r.blob(1u << 22);
    const bool has_lower = read_flag(r);
    upper_ = upper.restore(r, product_upper_pid(pid_));
    if (has_lower) lower_ = lower_bp_.restore(r, lower_pid());
    if (upper_->period() != ordinal_ + 1)
      throw CorruptState("product certification out of step");
  }

  uint64_t capacity() const override { return sat_mul(upper_cap_, lower_cap_); }
  uint64_t period() const override {
    return ordinal_ * lower_cap_ + (lower_ ? lower_->period() : 0);
  }
  Digest public_key() const override { return upper_->public_key(); }

  void append_signature(const Digest& target, ByteWriter& out, uint8_t& record_count) override {
    if (exhausted()) throw Exhausted("product exhausted");
    roll_if_due();
    ByteWriter rec;
    rec.u8(wire_rec::kCert);
    rec.u64(lower_cap_);
    rec.u64(cert_upper_period_);
    rec.raw(cert_lower_pk_.view());
    rec.u8(cert_inner_count_);
    rec.raw(as_view(cert_records_));
    out.blob(as_view(rec.data()));
    ++record_count;
    if (!lower_) materialize_lower();
    lower_->append_signature(target, out, record_count);
  }

  void skip() override {
    if (exhausted()) throw Exhausted("product exhausted");
    roll_if_due();
    if (!lower_) materialize_lower();
    lower_->skip();
  }

  void serialize_secrets(ByteWriter& out) const override {
    upper_->serialize_secrets(out);
    out.raw(chain_->view());
    if (lower_) lower_->serialize_secrets(out);
  }

  void serialize_state(ByteWriter& out) const override {
    out.u64(ordinal_);
    put_opt_seed(out, chain_);
    out.raw(cert_lower_pk_.view());
    out.u64(cert_upper_period_);
    out.u8(cert_inner_count_);
    out.blob(as_view(cert_records_));
    out.u8(lower_ ? 1 : 0);
    upper_->serialize_state(out);
    if (lower_) lower_->serialize_state(out);
  }

 private:
  uint64_t lower_pid() const { return product_lower_pid(ctx_.suite, pid_, ordinal_); }

  void materialize_lower() {
    lower_ = lower_bp_.make(cderive(ctx_, *chain_, "key"), lower_pid());
  }

  void roll_if_due() {
    if (!lower_ || !lower_->exhausted()) return;
    ++ordinal_;
    chain_ = cderive(ctx_, *chain_, "adv");
    lower_.reset();
    if (!lazy_) materialize_lower();
    recertify();
  }

  void recertify() {
    Digest lpk = lower_ ? lower_->public_key()
                        : lower_bp_.derive_pk(cderive(ctx_, *chain_, "key"), lower_pid());
    const uint64_t up = upper_->period();
    if (up != ordinal_) throw Error("product upper period out of step");
    Digest payload = cert_payload(ctx_, lpk, lower_cap_, up);
    ByteWriter inner;
    uint8_t inner_count = 0;
    upper_->append_signature(payload, inner, inner_count);
    cert_lower_pk_ = lpk;
    cert_upper_period_ = up;
    cert_inner_count_ = inner_count;
    cert_records_ = inner.take();
  }

  CompositionContext ctx_;
  uint64_t pid_;
  uint64_t upper_cap_;
  uint64_t lower_cap_;
  SchemeBlueprint lower_bp_;
  bool lazy_;
  std::unique_ptr<EvolvingScheme> upper_;
  std::unique_ptr<EvolvingScheme> lower_;  // absent while lazily deferred
  std::optional<Seed> chain_;              // seed chain over lower ordinals
  uint64_t ordinal_ = 0;
  Digest cert_lower_pk_;
  uint64_t cert_upper_period_ = 0;
  uint8_t cert_inner_count_ = 0;
  Bytes cert_records_;
};

Digest tree_root_from_seed(const CompositionContext& ctx, const Seed& seed, uint64_t pid,
                           uint32_t height) {
  const uint64_t n = 1ull << height;
  std::vector<Digest> level(n);
  for (uint64_t j = 0; j < n; ++j) {
    Seed s = seed;
    for (uint32_t l = height; l > 0; --l)
      s = cderive(ctx, s, ((j >> (l - 1)) & 1) ? "r" : "l");
    Bytes pk = ctx.base->public_from_seed(s, ctx.pub_seed,
                                          {addr_domain::kComposite, pid, j}, ctx.counters);
    level[j] = leaf_digest(ctx, as_view(pk));
  }
  for (uint32_t l = 0; l < height; ++l) {
    for (uint64_t q = 0; q < (level.size() >> 1); ++q)
      level[q] = node_digest(ctx, level[2 * q], level[2 * q + 1]);
    level.resize(level.size() >> 1);
  }
  return level[0];
}

}  // namespace

SchemeBlueprint leaf_blueprint(CompositionContext ctx) {
  SchemeBlueprint bp;
  bp.capacity = 1;
  bp.make = [ctx](const Seed& s, uint64_t pid) -> std::unique_ptr<EvolvingScheme> {
    return std::make_unique<LeafScheme>(ctx, pid, s);
  };
  bp.derive_pk = [ctx](const Seed& s, uint64_t pid) {
    Bytes pk = ctx.base->public_from_seed(s, ctx.pub_seed, {addr_domain::kComposite, pid, 0},
                                          ctx.counters);
    return leaf_digest(ctx, as_view(pk));
  };
  bp.restore = [ctx](ByteReader& r, uint64_t pid) -> std::unique_ptr<EvolvingScheme> {
    return std::make_unique<LeafScheme>(ctx, pid, r, RestoreTag{});
  };
  return bp;
}

SchemeBlueprint sum_blueprint(CompositionContext ctx, SchemeBlueprint left,
                              SchemeBlueprint right) {
  SchemeBlueprint bp;
  bp.capacity = sat_add(left.capacity, right.capacity);
  auto left_ptr = std::make_shared<SchemeBlueprint>(std::move(left));
  auto right_ptr = std::make_shared<SchemeBlueprint>(std::move(right));
  bp.make = [ctx, left_ptr, right_ptr](const Seed& s,
                                       uint64_t pid) -> std::unique_ptr<EvolvingScheme> {
    return std::make_unique<SumScheme>(ctx, pid, *left_ptr, *right_ptr, s);
  };
  bp.derive_pk = [ctx, left_ptr, right_ptr](const Seed& s, uint64_t pid) {
    Digest l = left_ptr->derive_pk(cderive(ctx, s, "sum/l"), sum_child_pid(pid, 0));
    Digest r = right_ptr->derive_pk(cderive(ctx, s, "sum/r"), sum_child_pid(pid, 1));
    return node_digest(ctx, l, r);
  };
  bp.restore = [ctx, left_ptr, right_ptr](ByteReader& r,
                                          uint64_t pid) -> std::unique_ptr<EvolvingScheme> {
    return std::make_unique<SumScheme>(ctx, pid, *left_ptr, *right_ptr, r, RestoreTag{});
  };
  return bp;
}

SchemeBlueprint tree_blueprint(CompositionContext ctx, uint32_t height) {
  if (height > 25) throw Error("iterated sum height too large for the eager digest tree");
  SchemeBlueprint bp;
  bp.capacity = 1ull << height;
  bp.make = [ctx, height](const Seed& s, uint64_t pid) -> std::unique_ptr<EvolvingScheme> {
    return std::make_unique<TreeScheme>(ctx, pid, height, s);
  };
  bp.derive_pk = [ctx, height](const Seed& s, uint64_t pid) {
    return tree_root_from_seed(ctx, s, pid, height);
  };
  bp.restore = [ctx, height](ByteReader& r, uint64_t pid) -> std::unique_ptr<EvolvingScheme> {
    return std::make_unique<TreeScheme>(ctx, pid, height, r, RestoreTag{});
  };
  return bp;
}

SchemeBlueprint product_blueprint(CompositionContext ctx, SchemeBlueprint upper,
                                  SchemeBlueprint lower, bool lazy_lower) {
  SchemeBlueprint bp;
  bp.capacity = sat_mul(upper.capacity, lower.capacity);
  auto upper_ptr = std::make_shared<SchemeBlueprint>(std::move(upper));
  auto lower_ptr = std::make_shared<SchemeBlueprint>(std::move(lower));
  bp.make = [ctx, upper_ptr, lower_ptr, lazy_lower](
                const Seed& s, uint64_t pid) -> std::unique_ptr<EvolvingScheme> {
    return std::make_unique<ProductScheme>(ctx, pid, *upper_ptr, *lower_ptr, lazy_lower, s);
  };
  bp.derive_pk = [ctx, upper_ptr](const Seed& s, uint64_t pid) {
    return upper_ptr->derive_pk(cderive(ctx, s, "prod/u"), product_upper_pid(pid));
  };
  bp.restore = [ctx, upper_ptr, lower_ptr, lazy_lower](
                   ByteReader& r, uint64_t pid) -> std::unique_ptr<EvolvingScheme> {
    return std::make_unique<ProductScheme>(ctx, pid, *upper_ptr, *lower_ptr, lazy_lower, r,
                                           RestoreTag{});
  };
  return bp;
}

Bytes composite_sign_message(EvolvingScheme& scheme, const CompositionContext& ctx, uint8_t kind,
                             BytesView message) {
  if (scheme.exhausted()) throw Exhausted();
  const uint64_t p = scheme.period();
  Digest target = chash(ctx, tag::kMessage, {message});
  ByteWriter rec;
  uint8_t count = 0;
  scheme.append_signature(target, rec, count);
  ByteWriter w;
  w.u8(kWireVersion);
  w.u8(kind);
  w.u8(base_scheme_wire_id(ctx.base->descriptor().name));
  w.u8(static_cast<uint8_t>(ctx.suite));
  w.raw(ctx.pub_seed.view());
  w.u64(p);
  w.u8(count);
  w.raw(as_view(rec.data()));
  return w.take();
}

Bytes composite_sign_message_at(EvolvingScheme& scheme, const CompositionContext& ctx,
                                uint8_t kind, uint64_t period, BytesView message) {
  if (period >= scheme.capacity()) throw Exhausted("period beyond capacity");
  if (period < scheme.period())
    throw PeriodPassed("period " + std::to_string(period) + " already passed");
  while (scheme.period() < period) scheme.skip();
  return composite_sign_message(scheme, ctx, kind, message);
}

namespace {

struct RejectSignature {};

struct VerifyCtx {
  std::unique_ptr<BaseScheme> base;
  HashSuite suite;
  Digest pub_seed;
  CostCounters* cc;
  size_t frames = 0;

  Digest vhash(uint8_t t, std::initializer_list<BytesView> parts) {
    if (cc != nullptr) ++cc->hash_count;
    return hash(suite, t, parts);
  }
};

struct Folded {
  Digest pk;
  uint64_t period;
  uint64_t capacity;
};

Folded verify_one(VerifyCtx& v, ByteReader& r, uint64_t pid, const Digest& target) {
  Bytes rec = r.blob();
  ++v.frames;
  ByteReader rr(as_view(rec));
  const uint8_t type = rr.u8();
  const auto& d = v.base->descriptor();
  switch (type) {
    case wire_rec::kLeaf: {
      Bytes sig = rr.bytes(d.sig_size);
      Bytes pk = rr.bytes(d.pk_size);
      if (!rr.finished()) throw RejectSignature{};
      if (!v.base->verify(pk, target, sig, v.pub_seed, {addr_domain::kComposite, pid, 0}, v.cc))
        throw RejectSignature{};
      return {v.vhash(tag::kNode, {as_view(pk)}), 0, 1};
    }
    case wire_rec::kSum: {
      const uint8_t side = rr.u8();
      const uint64_t sib_cap = rr.u64();
      Digest sib = Digest::from(rr.raw(kDigestSize));
      if (side > 1 || sib_cap == 0 || !rr.finished()) throw RejectSignature{};
      Folded child = verify_one(v, r, sum_child_pid(pid, side), target);
      if (child.capacity > UINT64_MAX - sib_cap) throw RejectSignature{};
      Digest parent = side == 0 ? v.vhash(tag::kNode, {child.pk.view(), sib.view()})
                                : v.vhash(tag::kNode, {sib.view(), child.pk.view()});
      return {parent, side == 0 ? child.period : sib_cap + child.period,
              child.capacity + sib_cap};
    }
    case wire_rec::kPath: {
      const uint8_t h = rr.u8();
      const uint64_t j = rr.u64();
      if (h > 63 || j >= (1ull << h)) throw RejectSignature{};
      Bytes sig = rr.bytes(d.sig_size);
      Bytes pk = rr.bytes(d.pk_size);
      std::vector<Digest> path(h);
      for (auto& dg : path) dg = Digest::from(rr.raw(kDigestSize));
      if (!rr.finished()) throw RejectSignature{};
      if (!v.base->verify(pk, target, sig, v.pub_seed, {addr_domain::kComposite, pid, j}, v.cc))
        throw RejectSignature{};
      Digest cur = v.vhash(tag::kNode, {as_view(pk)});
      for (uint8_t l = 0; l < h; ++l)
        cur = ((j >> l) & 1) ? v.vhash(tag::kNode, {path[l].view(), cur.view()})
                             : v.vhash(tag::kNode, {cur.view(), path[l].view()});
      return {cur, j, 1ull << h};
    }
    case wire_rec::kCert: {
      const uint64_t lower_cap = rr.u64();
      const uint64_t upper_period = rr.u64();
      Digest lower_pk = Digest::from(rr.raw(kDigestSize));
      const uint8_t inner_count = rr.u8();
      Bytes inner = rr.bytes(rr.remaining());
      if (lower_cap == 0) throw RejectSignature{};
      uint8_t nums[16];
      put_u64_le(nums, lower_cap);
      put_u64_le(nums + 8, upper_period);
      Digest payload = v.vhash(tag::kCert, {lower_pk.view(), BytesView(nums, sizeof nums)});
      ByteReader ir(as_view(inner));
      const size_t frames_before = v.frames;
      Folded upper = verify_one(v, ir, product_upper_pid(pid), payload);
      if (!ir.finished() || v.frames - frames_before != inner_count) throw RejectSignature{};
      v.frames = frames_before;  // inner frames are covered by inner_count
      if (upper.period != upper_period || upper_period >= upper.capacity)
        throw RejectSignature{};
      Folded lower =
          verify_one(v, r, product_lower_pid(v.suite, pid, upper_period), target);
      if (!(lower.pk == lower_pk) || lower.capacity != lower_cap) throw RejectSignature{};
      if (lower_cap != 0 && upper.capacity > UINT64_MAX / lower_cap) throw RejectSignature{};
      return {upper.pk, upper_period * lower_cap + lower.period, upper.capacity * lower_cap};
    }
    default:
      throw RejectSignature{};
  }
}

}  // namespace

bool composite_verify(const Digest& pk, BytesView message, BytesView wire, CostCounters* cc) {
  try {
    ByteReader r(wire);
    if (r.u8() != kWireVersion) return false;
    const uint8_t kind = r.u8();
    if (kind != wire_kind::kSum && kind != wire_kind::kIterSum &&
        kind != wire_kind::kProduct && kind != wire_kind::kFrogStar)
      return false;
    const std::string base_name = base_scheme_from_wire_id(r.u8());
    HashSuite suite;
    if (!suite_from_id(r.u8(), suite)) return false;
    VerifyCtx v{make_base_scheme(base_name), suite, Digest::from(r.raw(kDigestSize)), cc, 0};
    const uint64_t period = r.u64();
    const uint8_t count = r.u8();
    Digest target = v.vhash(tag::kMessage, {message});
    Folded f = verify_one(v, r, kRootPid, target);
    if (!r.finished() || v.frames != count) return false;
    return f.pk == pk && f.period == period && period < f.capacity;
  } catch (const RejectSignature&) {
    return false;
  } catch (const ParseError&) {
    return false;
  } catch (const UnknownScheme&) {
    return false;
  }
}

CompositeSummary composite_inspect(BytesView wire) {
  ByteReader r(wire);
  CompositeSummary out;
  out.version = r.u8();
  out.kind = r.u8();
  out.base_name = base_scheme_from_wire_id(r.u8());
  if (!suite_from_id(r.u8(), out.suite)) throw ParseError("bad suite id");
  r.raw(kDigestSize);
  out.period = r.u64();
  out.total_records = r.u8();

  std::function<void(ByteReader&)> walk = [&](ByteReader& rr) {
    while (!rr.finished()) {
      Bytes rec = rr.blob();
      ByteReader ir(as_view(rec));
      switch (ir.u8()) {
        case wire_rec::kLeaf:
        case wire_rec::kPath:
          ++out.leaf_records;
          break;
        case wire_rec::kSum:
          ++out.sum_records;
          break;
        case wire_rec::kCert: {
          ++out.cert_records;
          ir.u64();
          ir.u64();
          ir.raw(kDigestSize);
          ir.u8();
          Bytes inner = ir.bytes(ir.remaining());
          ByteReader nested(as_view(inner));
          walk(nested);
          break;
        }
        default:
          throw ParseError("unknown record type");
      }
    }
  };
  walk(r);
  return out;
}

}  // namespace fspq
