#include "kdt/store.hpp"

#include <algorithm>
#include <cmath>

namespace kdt {

TreeStore::TreeStore() {
  nodes_.push_back(NodeRec{0, 0, kNoValue, Tag::White});
  nodes_.push_back(NodeRec{1, 1, kNoValue, Tag::Black});
}

NodeRef TreeStore::intern(Tag t, NodeRef l, NodeRef r, double v) {
  Key key{std::uint8_t(t), l, r, 0};
  std::memcpy(&key.vbits, &v, sizeof v);
  auto it = interned_.find(key);
  if (it != interned_.end()) return it->second;
  NodeRef ref = NodeRef(nodes_.size());
  nodes_.push_back(NodeRec{l, r, v, t});
  interned_.emplace(key, ref);
  return ref;
}

NodeRef TreeStore::black_val(double v) {
  if (std::isnan(v)) fail(Errc::ValueOutOfRange, "functional value is NaN");
  return intern(Tag::BlackVal, 0, 0, v);
}

NodeRef TreeStore::internal(NodeRef l, NodeRef r) {
  if (l == r && is_terminal(l) && !is_valued(l)) return l;
  return internal_raw(l, r);
}

NodeRef TreeStore::internal_val(NodeRef l, NodeRef r) {
  if (l == r && is_terminal(l)) return l; // equal valued leaves fold too
  return internal_val_raw(l, r);
}

NodeRef TreeStore::internal_raw(NodeRef l, NodeRef r) {
  return intern(Tag::Internal, l, r, kNoValue);
}

NodeRef TreeStore::internal_val_raw(NodeRef l, NodeRef r) {
  if (l == kWhite && r == kWhite) return intern(Tag::Internal, l, r, kNoValue);
  return intern(Tag::InternalVal, l, r, std::max(value(l), value(r)));
}

NodeRef TreeStore::fission(NodeRef n) const {
  if (!is_terminal(n)) fail(Errc::FissionOfLeafless, "fission applies to leaves only");
  // Bypass normalization on purpose: fission is the inverse of merge.
  auto* self = const_cast<TreeStore*>(this);
  if (tag(n) == Tag::BlackVal) return self->internal_val_raw(n, n);
  return self->internal_raw(n, n);
}

NodeRef TreeStore::merge(NodeRef n) {
  if (is_terminal(n)) return n;
  NodeRef l = left(n), r = right(n);
  if (l == r && is_terminal(l)) {
    if (is_valued(l) || !is_valued(n)) return l;
  }
  return n;
}

NodeRef TreeStore::normalize(NodeRef n) {
  if (is_terminal(n)) return n;
  auto it = norm_memo_.find(n);
  if (it != norm_memo_.end()) return it->second;
  NodeRef l = normalize(left(n));
  NodeRef r = normalize(right(n));
  NodeRef out = is_valued(n) ? internal_val(l, r) : internal(l, r);
  norm_memo_.emplace(n, out);
  return out;
}

} // namespace kdt
