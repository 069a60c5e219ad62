#pragma once

#include <span>
#include <unordered_set>
#include <vector>

#include "cem/binding.hpp"
#include "cem/points.hpp"

namespace cem {

// Explicit points plus the is-a closure over them, with the clock's time.
// Rebuilt fresh for each evaluation; removal cascade (§2.7) follows from that.
class Context {
 public:
  std::uint64_t clock = 1;

  bool contains(PointId id) const { return set_.count(id) != 0; }
  bool insert(PointId id) {
    if (set_.insert(id).second) {
      all_.push_back(id);
      return true;
    }
    return false;
  }
  const std::vector<PointId>& all() const { return all_; }

 private:
  std::vector<PointId> all_;  // insertion order: explicit first, then implicit
  std::unordered_set<PointId> set_;
};

struct EvalOutcome {
  const Binding* matched = nullptr;
  std::vector<PointRef> values;
  bool complete = false;  // key matched without help from the context (§2.4)

  bool ok() const { return matched != nullptr; }
};

// True when `ref` is usable from the query key K or the context: variants only
// match query refs, time points match when the clock has reached them.
bool key_ref_covered(const PointTable& pts, const PointRef& ref,
                     std::span<const PointRef> query, const Context& ctx);

// E_s (Eq. 4): the unique binding whose key set equals `key` exactly.
EvalOutcome eval_simple(const BindingStore& store, std::span<const PointRef> key);

// E_c (Eq. 6/7): heaviest binding with key ⊆ query ∪ context and query ⊆ key.
// Ordered (slash) bindings never match here; they are AS-reduction forms.
EvalOutcome eval_contextual(const PointTable& pts, const BindingStore& store,
                            const Context& ctx, std::span<const PointRef> key);

// All valid direct is-a results for p (§2.7); groups differing only in their
// time point collapse to the highest-time binding.
std::vector<PointId> eval_isa_all(const PointTable& pts, const BindingStore& store,
                                  const Context& ctx, PointId p);

// Fixed point of eval_isa_all over the explicit points (deterministic:
// insertion order, repeated passes until stable).
Context expand_context(const PointTable& pts, const BindingStore& store,
                       std::span<const PointId> explicit_pts, std::uint64_t clock);

}  // namespace cem
