#include "fspq/stateful_signer.hpp"

namespace fspq {

namespace {

struct SchemeId {
  bool star = false;
  std::string base;
};

SchemeId parse_scheme_id(const std::string& id) {
  SchemeId out;
  if (id.rfind("frogstar-", 0) == 0) {
    out.star = true;
    out.base = id.substr(9);
  } else if (id.rfind("frog-", 0) == 0) {
    out.base = id.substr(5);
  } else {
    throw UnknownScheme("unknown scheme id: " + id);
  }
  make_base_scheme(out.base);  // validates, throws UnknownScheme
  return out;
}

}  // namespace

StatefulSigner::StatefulSigner(std::string scheme_id, FrogSigner signer)
    : scheme_id_(std::move(scheme_id)), impl_(std::move(signer)) {}

StatefulSigner::StatefulSigner(std::string scheme_id, FrogStarSigner signer)
    : scheme_id_(std::move(scheme_id)), impl_(std::move(signer)) {}

StatefulSigner::StatefulSigner(const std::string& scheme_id, uint32_t capacity_exponent,
                               const Seed& master, CostCounters* counters)
    : scheme_id_(scheme_id),
      impl_([&]() -> std::variant<FrogSigner, FrogStarSigner> {
        if (capacity_exponent < 1 || capacity_exponent > 64)
          throw Error("capacity exponent must be between 1 and 64");
        SchemeId id = parse_scheme_id(scheme_id);
        auto base = make_base_scheme(id.base);
        HashSuite suite = base_scheme_suite(id.base);
        FrogParams frog = FrogParams::from_tree_count(capacity_exponent);
        if (id.star) {
          FrogStarParams params = FrogStarParams::for_capacity(frog.capacity);
          return FrogStarSigner(params, std::move(base), suite, master, counters);
        }
        return FrogSigner(frog, std::move(base), suite, master, counters);
      }()) {}

StatefulSigner StatefulSigner::from_payload(const std::string& scheme_id, BytesView payload,
                                            CostCounters* counters) {
  SchemeId id = parse_scheme_id(scheme_id);
  if (id.star) {
    FrogStarSigner s = FrogStarSigner::restore(payload, counters);
    if (s.base().descriptor().name != id.base)
      throw CorruptState("payload base scheme disagrees with the scheme id");
    return StatefulSigner(scheme_id, std::move(s));
  }
  FrogSigner s = FrogSigner::restore(payload, counters);
  if (s.base().descriptor().name != id.base)
    throw CorruptState("payload base scheme disagrees with the scheme id");
  return StatefulSigner(scheme_id, std::move(s));
}

const std::vector<std::string>& StatefulSigner::scheme_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> out;
    for (const char* family : {"frog", "frogstar"})
      for (const auto& base : base_scheme_names()) out.push_back(std::string(family) + "-" + base);
    return out;
  }();
  return ids;
}

bool StatefulSigner::scheme_uses_mock(const std::string& scheme_id) {
  return base_scheme_is_mock(parse_scheme_id(scheme_id).base);
}

HashSuite StatefulSigner::suite() const {
  return std::visit([](const auto& s) { return s.suite(); }, impl_);
}

const BaseScheme& StatefulSigner::base() const {
  return std::visit([](const auto& s) -> const BaseScheme& { return s.base(); }, impl_);
}

Digest StatefulSigner::public_key() const {
  return std::visit([](const auto& s) { return s.public_key(); }, impl_);
}

uint64_t StatefulSigner::period() const {
  return std::visit([](const auto& s) { return s.period(); }, impl_);
}

uint64_t StatefulSigner::capacity() const {
  return std::visit([](const auto& s) { return s.params().capacity; }, impl_);
}

Bytes StatefulSigner::sign(BytesView message) {
  return std::visit([&](auto& s) { return s.sign(message); }, impl_);
}

Bytes StatefulSigner::serialize_payload() const {
  return std::visit([](const auto& s) { return s.serialize_state(); }, impl_);
}

void StatefulSigner::serialize_secrets(ByteWriter& out) const {
  std::visit([&](const auto& s) { s.serialize_secrets(out); }, impl_);
}

bool any_verify(const Digest& pk, BytesView message, BytesView signature, CostCounters* cc) {
  if (signature.size() < 2 || signature[0] != kWireVersion) return false;
  if (signature[1] == wire_kind::kFrog) return frog_verify(pk, message, signature, cc);
  return composite_verify(pk, message, signature, cc);
}

}  // namespace fspq
