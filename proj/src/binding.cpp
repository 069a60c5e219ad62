#include "cem/binding.hpp"

namespace cem {

const Binding& BindingStore::add(std::vector<PointRef> key, std::vector<PointRef> values,
                                 std::int32_t bonus, bool ordered) {
  Binding b;
  b.key.reserve(key.size());
  for (auto& r : key) {
    PointRef ref = r;
    ref.quoted = false;  // quotes protect refs in transit, keys store them bare
    bool dup = false;
    for (auto& existing : b.key) {
      if (same_point(existing, ref)) {
        existing.remove_on_match |= ref.remove_on_match;
        dup = true;
        break;
      }
    }
    if (!dup) b.key.push_back(ref);
  }
  b.values = std::move(values);
  b.bonus = bonus;
  b.ordered = ordered;
  b.serial = next_serial_++;
  b.ref_number = next_ref_++;
  binds_.push_back(std::move(b));
  std::uint32_t idx = static_cast<std::uint32_t>(binds_.size() - 1);
  for (const auto& r : binds_.back().key) index_[r.id].push_back(idx);
  return binds_.back();
}

std::span<const std::uint32_t> BindingStore::with_key_point(PointId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return {};
  return it->second;
}

Weight binding_weight(const PointTable& pts, const Binding& b) {
  Weight w;
  w.count = static_cast<std::int64_t>(b.key.size()) + b.bonus;
  for (const auto& r : b.key) {
    const Point& p = pts.at(r.id);
    if (p.has_time && p.time_magnitude > w.time_mag) w.time_mag = p.time_magnitude;
  }
  w.serial = b.serial;
  return w;
}

std::string format_binding(const PointTable& pts, const Binding& b) {
  std::string out = "[";
  for (std::size_t i = 0; i < b.key.size(); ++i) {
    if (i) out += ' ';
    out += pts.format(b.key[i]);
  }
  out += "] = ";
  for (std::size_t i = 0; i < b.values.size(); ++i) {
    if (i) out += ',';
    out += pts.format(b.values[i]);
  }
  return out;
}

}  // namespace cem
