#include "cem/eval.hpp"

#include <algorithm>
#include <map>

namespace cem {

bool key_ref_covered(const PointTable& pts, const PointRef& ref,
                     std::span<const PointRef> query, const Context& ctx) {
  for (const auto& q : query)
    if (same_point(q, ref)) return true;
  if (ref.variant != Variant::Base) return false;
  const Point& p = pts.at(ref.id);
  if (p.has_time) return ctx.clock >= p.time_magnitude;
  return ctx.contains(ref.id);
}

EvalOutcome eval_simple(const BindingStore& store, std::span<const PointRef> key) {
  EvalOutcome out;
  if (key.empty()) return out;
  for (std::uint32_t idx : store.with_key_point(key[0].id)) {
    const Binding& b = store[idx];
    if (b.key.size() != key.size()) continue;
    bool same = true;
    for (const auto& k : key)
      if (!b.key_has(k)) {
        same = false;
        break;
      }
    if (!same) continue;
    out.matched = &b;
    out.values = b.values;
    out.complete = true;
    return out;
  }
  return out;
}

namespace {

// Candidate indices for a query. A matching binding must use the first query
// ref somewhere in its key (directly or through the query point's is-a
// closure), so the index union over that cover is complete. The null key set
// falls back to a scan of the whole store.
std::vector<std::uint32_t> candidates_for(const BindingStore& store,
                                          std::span<const PointRef> key,
                                          const std::unordered_set<PointId>& cover0) {
  std::vector<std::uint32_t> out;
  if (key.empty()) {
    out.resize(store.size());
    for (std::uint32_t i = 0; i < store.size(); ++i) out[i] = i;
    return out;
  }
  std::unordered_set<std::uint32_t> seen;
  auto take = [&](PointId id) {
    for (std::uint32_t idx : store.with_key_point(id))
      if (seen.insert(idx).second) out.push_back(idx);
  };
  take(key[0].id);
  for (PointId id : cover0) take(id);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

EvalOutcome eval_contextual(const PointTable& pts, const BindingStore& store,
                            const Context& ctx, std::span<const PointRef> key) {
  EvalOutcome out;

  // Query points match key refs through their is-a closure: [canFly.v
  // Seabiscuit] reaches [canFly.v horse] because Seabiscuit is-a horse (§3.4).
  std::vector<std::unordered_set<PointId>> covers(key.size());
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (key[i].variant != Variant::Base) continue;
    auto& cover = covers[i];
    std::vector<PointId> queue{key[i].id};
    cover.insert(key[i].id);
    for (std::size_t qi = 0; qi < queue.size(); ++qi)
      for (PointId q : eval_isa_all(pts, store, ctx, queue[qi]))
        if (cover.insert(q).second) queue.push_back(q);
  }
  auto q_matches = [&](std::size_t qi, const PointRef& r) {
    if (same_point(key[qi], r)) return true;
    return key[qi].variant == Variant::Base && r.variant == Variant::Base &&
           covers[qi].count(r.id) != 0;
  };

  const Binding* best = nullptr;
  Weight best_w;
  static const std::unordered_set<PointId> kEmptyCover;
  for (std::uint32_t idx :
       candidates_for(store, key, key.empty() ? kEmptyCover : covers[0])) {
    const Binding& b = store[idx];
    if (b.ordered) continue;
    bool ok = true;
    // Every query ref must land on some key ref.
    for (std::size_t qi = 0; qi < key.size() && ok; ++qi) {
      bool hit = false;
      for (const auto& r : b.key)
        if (q_matches(qi, r)) {
          hit = true;
          break;
        }
      ok = hit;
    }
    if (!ok) continue;
    // Every key ref must come from the query, a reached time point or the context.
    for (const auto& r : b.key) {
      bool covered = false;
      for (std::size_t qi = 0; qi < key.size(); ++qi)
        if (q_matches(qi, r)) {
          covered = true;
          break;
        }
      if (!covered) covered = key_ref_covered(pts, r, {}, ctx);
      if (!covered) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    Weight w = binding_weight(pts, b);
    if (!best || best_w < w) {
      best = &b;
      best_w = w;
    }
  }
  if (best) {
    out.matched = best;
    out.values = best->values;
    out.complete = best->key.size() == key.size();
  }
  return out;
}

std::vector<PointId> eval_isa_all(const PointTable& pts, const BindingStore& store,
                                  const Context& ctx, PointId p) {
  PointRef q{p, Variant::Isa, false, false};
  std::span<const PointRef> query(&q, 1);

  // All valid twines count; only time-keyed twines that differ solely in
  // their time point collapse, keeping the highest magnitude (§2.7 —
  // untimed twines like man<Harry and father<Harry all survive).
  struct Pick {
    const Binding* b = nullptr;
    std::uint64_t mag = 0;
  };
  std::map<std::vector<std::uint64_t>, Pick> timed_groups;
  std::vector<const Binding*> untimed;
  for (std::uint32_t idx : store.with_key_point(p)) {
    const Binding& b = store[idx];
    if (b.ordered) continue;
    if (!b.key_has(q)) continue;
    bool ok = true;
    bool has_time = false;
    std::uint64_t mag = 0;
    std::vector<std::uint64_t> shape;
    for (const auto& r : b.key) {
      if (!key_ref_covered(pts, r, query, ctx)) {
        ok = false;
        break;
      }
      const Point& rp = pts.at(r.id);
      if (rp.has_time) {
        has_time = true;
        mag = std::max(mag, rp.time_magnitude);
      } else {
        shape.push_back((static_cast<std::uint64_t>(r.id) << 2) |
                        static_cast<std::uint64_t>(r.variant));
      }
    }
    if (!ok) continue;
    if (!has_time) {
      untimed.push_back(&b);
      continue;
    }
    std::sort(shape.begin(), shape.end());
    auto& pick = timed_groups[shape];
    if (!pick.b || pick.mag < mag ||
        (pick.mag == mag && pick.b->serial < b.serial)) {
      pick.b = &b;
      pick.mag = mag;
    }
  }

  std::vector<const Binding*> chosen = untimed;
  for (auto& [shape, pick] : timed_groups) chosen.push_back(pick.b);
  std::sort(chosen.begin(), chosen.end(),
            [](const Binding* a, const Binding* b) { return a->serial < b->serial; });

  std::vector<PointId> out;
  std::unordered_set<PointId> seen;
  for (const Binding* b : chosen)
    for (const auto& v : b->values)
      if (seen.insert(v.id).second) out.push_back(v.id);
  return out;
}

Context expand_context(const PointTable& pts, const BindingStore& store,
                       std::span<const PointId> explicit_pts, std::uint64_t clock) {
  Context ctx;
  ctx.clock = clock;
  for (PointId p : explicit_pts) ctx.insert(p);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < ctx.all().size(); ++i) {
      for (PointId q : eval_isa_all(pts, store, ctx, ctx.all()[i]))
        changed |= ctx.insert(q);
    }
  }
  return ctx;
}

}  // namespace cem
