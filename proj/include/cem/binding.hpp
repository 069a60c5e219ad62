#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "cem/points.hpp"

namespace cem {

// Key-set -> value-list association, the sole storage primitive (§2.1).
// Keys are canonical: duplicate (id,variant) refs collapse, order is the
// caller's order of first occurrence (display follows it).
struct Binding {
  std::vector<PointRef> key;
  std::vector<PointRef> values;
  std::int32_t bonus = 0;
  bool ordered = false;       // slash form; participates only in AS-pair matching
  std::uint64_t serial = 0;   // creation order, ties break toward the latest
  std::uint32_t ref_number = 0;  // display number for trace lines

  bool key_has(const PointRef& r) const {
    for (const auto& k : key)
      if (same_point(k, r)) return true;
    return false;
  }
};

// (count+bonus, time magnitude, serial), compared lexicographically.
struct Weight {
  std::int64_t count = 0;
  std::uint64_t time_mag = 0;
  std::uint64_t serial = 0;

  friend bool operator<(const Weight& a, const Weight& b) {
    if (a.count != b.count) return a.count < b.count;
    if (a.time_mag != b.time_mag) return a.time_mag < b.time_mag;
    return a.serial < b.serial;
  }
  friend bool operator==(const Weight& a, const Weight& b) {
    return a.count == b.count && a.time_mag == b.time_mag && a.serial == b.serial;
  }
};

class BindingStore {
 public:
  // Canonicalizes the key (dedup by id+variant, merging remove flags) and
  // indexes the binding under every key point id.
  const Binding& add(std::vector<PointRef> key, std::vector<PointRef> values,
                     std::int32_t bonus = 0, bool ordered = false);

  const std::deque<Binding>& all() const { return binds_; }
  std::size_t size() const { return binds_.size(); }
  const Binding& operator[](std::size_t i) const { return binds_[i]; }

  // Indexes of bindings whose key contains the given point id (any variant).
  std::span<const std::uint32_t> with_key_point(PointId id) const;

  std::uint64_t revision() const { return next_serial_; }

 private:
  // deque: references returned by add() stay valid as the store grows
  std::deque<Binding> binds_;
  std::unordered_map<PointId, std::vector<std::uint32_t>> index_;
  std::uint64_t next_serial_ = 0;
  std::uint32_t next_ref_ = 32;  // paper listings start user bindings near #32
};

Weight binding_weight(const PointTable& pts, const Binding& b);

std::string format_binding(const PointTable& pts, const Binding& b);

}  // namespace cem
