#include <algorithm>

#include "cem/engine.hpp"
#include "cem/patterns.hpp"

namespace cem {

namespace {

bool is_chiral(const PointTable& pts, PointId id) {
  return is_chiral_left(pts, id) || is_chiral_right(pts, id);
}

// threw_L -> threw_R and vice versa; kNoPoint when the mate was never made.
PointId chiral_mate(const PointTable& pts, PointId id) {
  std::string l = pts.at(id).label;
  if (l.size() < 2) return kNoPoint;
  l[l.size() - 1] = (l[l.size() - 1] == 'L') ? 'R' : 'L';
  return pts.find(l);
}

}  // namespace

std::vector<PointId> Engine::thought_children(PointId t) const {
  return plain_isa_values(t);
}

std::vector<PointId> Engine::plain_isa_values(PointId p) const {
  std::vector<PointId> out;
  PointRef key{p, Variant::Isa, false, false};
  for (std::uint32_t idx : store.with_key_point(p)) {
    const Binding& b = store[idx];
    if (b.key.size() != 1 || !same_point(b.key[0], key)) continue;
    for (const auto& v : b.values)
      if (std::find(out.begin(), out.end(), v.id) == out.end()) out.push_back(v.id);
  }
  return out;
}

// The language-to-thought parser (§7.4 / opLUPARSE).
struct LttRun {
  Engine& e;
  PointTable& pts;
  std::unordered_map<PointId, bool> attached_l, attached_r;

  bool is_sur(const PointRef& r) const { return pts.at(r.id).is_surrogate; }
  bool any_attached(PointId s) {
    auto l = attached_l.find(s);
    auto r = attached_r.find(s);
    return (l != attached_l.end() && l->second) || (r != attached_r.end() && r->second);
  }

  void attach(PointId sur, PointId chiralpt) {
    e.create_tagged_isa(sur, chiralpt);
    if (is_chiral_left(pts, chiralpt)) attached_l[sur] = true;
    if (is_chiral_right(pts, chiralpt)) attached_r[sur] = true;
  }

  // Phase 1: words become surrogates (grounded) or chiral halves; determiner
  // words vanish.
  void load(const std::vector<PointRef>& words) {
    for (const auto& w : words) {
      Context ctx = e.ps_context({&w.id, 1});
      auto cover = e.isa_cover(ctx, w.id, true);
      if (cover.count(pts.determiner)) continue;
      if (cover.count(pts.grounded)) {
        PointId s = pts.make_surrogate();
        e.create_plain_isa(s, w.id);
        e.as.push_back(base_ref(s));
      } else {
        const std::string& l = pts.at(w.id).label;
        e.as.push_back(base_ref(pts.get_or_make(l + "_L")));
        e.as.push_back(base_ref(pts.get_or_make(l + "_R")));
      }
    }
  }

  // Evaluate [surAction] for a surrogate pair; interveners join the coverage.
  PointId sur_action_result(PointId left, PointId right,
                            const std::vector<PointId>& between) {
    std::vector<PointId> extra{left, right, pts.parse};
    for (PointId b : between) extra.push_back(b);
    Context ctx = e.ps_context(extra);
    auto lcov = e.isa_cover(ctx, left, false);
    auto rcov = e.isa_cover(ctx, right, false);
    PointRef query{pts.sur_action, Variant::Base, false, false};
    const Binding* best = nullptr;
    Weight best_w;
    for (std::uint32_t idx : e.store.with_key_point(pts.sur_action)) {
      const Binding& b = e.store[idx];
      if (b.ordered) continue;
      bool ok = b.key_has(query);
      if (!ok) continue;
      for (const auto& r : b.key) {
        if (same_point(r, query)) continue;
        if (r.variant != Variant::Base) {
          ok = false;
          break;
        }
        if (!lcov.count(r.id) && !rcov.count(r.id) &&
            std::find(between.begin(), between.end(), r.id) == between.end() &&
            !ctx.contains(r.id)) {
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
    if (!best || best->values.empty()) return kNoPoint;
    return best->values[0].id;
  }

  // Phase 2: join strictly adjacent chiral-free surrogates, link surrogate
  // pairs separated only by free chiral points (consuming those points).
  bool pairs_pass() {
    bool changed = false;
  restart:
    std::vector<std::size_t> surs;
    for (std::size_t i = 0; i < e.as.size(); ++i)
      if (is_sur(e.as[i])) surs.push_back(i);
    for (std::size_t k = 0; k + 1 < surs.size(); ++k) {
      std::size_t li = surs[k], ri = surs[k + 1];
      PointId left = e.as[li].id, right = e.as[ri].id;
      std::vector<PointId> between;
      for (std::size_t j = li + 1; j < ri; ++j) between.push_back(e.as[j].id);
      PointId act = sur_action_result(left, right, between);
      if (act == kNoPoint) continue;
      const Point& ap = pts.at(act);
      if (ap.is_opcode && ap.opcode == Opcode::LUJOIN) {
        if (!between.empty() || any_attached(left) || any_attached(right)) continue;
        for (PointId v : e.plain_isa_values(right)) e.create_plain_isa(left, v);
        e.as.erase(e.as.begin() + ri);
        changed = true;
        goto restart;
      }
      if (ap.is_opcode && ap.opcode == Opcode::LULINK) {
        e.create_plain_isa(left, right);
        e.as.erase(e.as.begin() + li + 1, e.as.begin() + ri + 1);
        changed = true;
        goto restart;
      }
    }
    return changed;
  }

  // Phase 3: drop p_L right after p_R; twine p_R onto a following surrogate
  // without a left half; twine p_L onto the preceding surrogate unless some
  // surAction binding claims the word's right half.
  bool chiral_pass() {
    bool changed = false;
    for (std::size_t i = 0; i + 1 < e.as.size();) {
      if (is_chiral_right(pts, e.as[i].id) && is_chiral_left(pts, e.as[i + 1].id)) {
        e.as.erase(e.as.begin() + i + 1);
        changed = true;
        continue;
      }
      ++i;
    }
    for (std::size_t i = 0; i + 1 < e.as.size();) {
      if (is_chiral_right(pts, e.as[i].id) && is_sur(e.as[i + 1]) &&
          !attached_l[e.as[i + 1].id]) {
        attach(e.as[i + 1].id, e.as[i].id);
        e.as.erase(e.as.begin() + i);
        changed = true;
        continue;
      }
      ++i;
    }
    for (std::size_t i = 0; i + 1 < e.as.size();) {
      if (is_sur(e.as[i]) && is_chiral_left(pts, e.as[i + 1].id) &&
          !grammaticalized(e.as[i + 1].id)) {
        attach(e.as[i].id, e.as[i + 1].id);
        e.as.erase(e.as.begin() + i + 1);
        changed = true;
        continue;
      }
      ++i;
    }
    return changed;
  }

  // A left half whose right mate appears in some surAction binding key is a
  // grammaticalized relator; its leftward attachment is suppressed.
  bool grammaticalized(PointId left_half) {
    PointId mate = chiral_mate(pts, left_half);
    if (mate == kNoPoint) return false;
    PointRef sa{pts.sur_action, Variant::Base, false, false};
    for (std::uint32_t idx : e.store.with_key_point(mate)) {
      const Binding& b = e.store[idx];
      if (b.key_has(sa) && b.key_has(base_ref(mate))) return true;
    }
    return false;
  }

  void run(const std::vector<PointRef>& words) {
    e.as.clear();
    load(words);
    for (int guard = 0; guard < 1000; ++guard) {
      bool c2 = pairs_pass();
      bool c3 = chiral_pass();
      bool all_sur = std::all_of(e.as.begin(), e.as.end(),
                                 [&](const PointRef& r) { return is_sur(r); });
      if (all_sur) break;
      if (!c2 && !c3) {
        std::erase_if(e.as, [&](const PointRef& r) { return !is_sur(r); });
        break;
      }
    }
    pairs_pass();  // final contiguous-surrogate check
    for (const auto& r : e.as) e.create_plain_isa(e.r_t, r.id);
    e.as.clear();
  }
};

void Engine::ltt_parse() {
  auto words = pop_until_eoa("opLUPARSE");
  if (halted_on_error()) return;
  LttRun run{*this, pts};
  run.run(words);
  touch();
}

void Engine::create_plain_isa(PointId owner, PointId value) {
  create_binding({PointRef{owner, Variant::Isa, false, false}}, {base_ref(value)}, 0,
                 false, "opLUPARSE", false);
}

void Engine::create_tagged_isa(PointId owner, PointId value) {
  create_binding({PointRef{owner, Variant::Isa, false, false}, base_ref(pts.parse)},
                 {base_ref(value)}, 0, false, "opLUPARSE", false);
}

// ---------------------------------------------------------------------------
// Surrogate resolution (§9.2).

std::optional<PointId> Engine::resolve_surrogate(PointId sur) const {
  std::vector<PointId> attrs;
  for (PointId a : plain_isa_values(sur))
    if (!is_chiral(pts, a)) attrs.push_back(a);
  if (attrs.empty()) return std::nullopt;

  // The surrogate's own thought bounds the backward search.
  std::size_t own = thoughts.size();
  for (std::size_t ti = 0; ti < thoughts.size(); ++ti) {
    auto kids = thought_children(thoughts[ti]);
    if (std::find(kids.begin(), kids.end(), sur) != kids.end()) own = ti;
  }

  for (std::size_t ti = own; ti-- > 0;) {
    PointId t = thoughts[ti];
    for (PointId c : thought_children(t)) {
      std::vector<PointId> extra{t, c};
      Context ctx = ps_context(extra);
      auto cover = isa_cover(ctx, c, true);
      bool all = true;
      for (PointId a : attrs)
        if (!cover.count(a)) {
          all = false;
          break;
        }
      if (all) return c;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Consequence links (§10.4).

PointId Engine::make_link(std::vector<PointId> key_ids, std::vector<PointId> cause,
                          std::vector<PointId> effect) {
  std::vector<PointId> canon = key_ids;
  std::sort(canon.begin(), canon.end());
  canon.erase(std::unique(canon.begin(), canon.end()), canon.end());
  if (auto it = link_by_key_.find(canon); it != link_by_key_.end()) return it->second;

  PointId link = pts.make_anonymous();
  std::vector<PointRef> key;
  for (PointId k : canon) key.push_back(base_ref(k));
  create_binding(std::move(key), {base_ref(link)}, 0, false, "bind", false);
  PointId cause_pt = pts.get_or_make("cause");
  PointId effect_pt = pts.get_or_make("effect");
  for (PointId c : cause)
    create_binding({PointRef{link, Variant::Isa, false, false}, base_ref(cause_pt)},
                   {base_ref(c)}, 0, false, "bind", false);
  for (PointId ef : effect)
    create_binding({PointRef{link, Variant::Isa, false, false}, base_ref(effect_pt)},
                   {base_ref(ef)}, 0, false, "bind", false);
  link_by_key_[canon] = link;
  link_info_[link] = LinkInfo{std::move(cause), std::move(effect)};
  return link;
}

std::vector<PointId> Engine::derive_links(PointId t_before, PointId t_after) {
  auto before = thought_children(t_before);
  auto after = thought_children(t_after);
  std::vector<bool> b_used(before.size(), false), a_used(after.size(), false);
  std::vector<PointId> links;

  auto split = [&](PointId s, std::vector<PointId>& desc, std::vector<PointId>& chir) {
    for (PointId a : plain_isa_values(s)) {
      if (is_chiral(pts, a))
        chir.push_back(a);
      else
        desc.push_back(a);
    }
  };

  for (std::size_t ai = 0; ai < after.size(); ++ai) {
    std::vector<PointId> a_desc, a_chir;
    split(after[ai], a_desc, a_chir);
    if (a_desc.empty()) continue;
    for (std::size_t bi = 0; bi < before.size(); ++bi) {
      if (b_used[bi]) continue;
      std::vector<PointId> extra{t_before, before[bi]};
      Context ctx = ps_context(extra);
      auto cover = isa_cover(ctx, before[bi], true);
      bool all = true;
      for (PointId a : a_desc)
        if (!cover.count(a)) {
          all = false;
          break;
        }
      if (!all) continue;
      std::vector<PointId> b_desc, b_chir;
      split(before[bi], b_desc, b_chir);
      std::vector<PointId> key = b_chir;
      key.insert(key.end(), a_chir.begin(), a_chir.end());
      links.push_back(make_link(std::move(key), b_chir, a_chir));
      b_used[bi] = true;
      a_used[ai] = true;
      break;
    }
  }
  for (std::size_t bi = 0; bi < before.size(); ++bi) {
    if (b_used[bi]) continue;
    auto attrs = plain_isa_values(before[bi]);
    if (attrs.empty()) continue;
    links.push_back(make_link(attrs, attrs, {}));
  }
  for (std::size_t ai = 0; ai < after.size(); ++ai) {
    if (a_used[ai]) continue;
    auto attrs = plain_isa_values(after[ai]);
    if (attrs.empty()) continue;
    links.push_back(make_link(attrs, {}, attrs));
  }
  return links;
}

std::vector<std::uint32_t> Engine::learn_consequences(
    const std::vector<std::vector<PointId>>& link_samples, int min_points,
    int min_occurs) {
  std::vector<std::vector<std::uint32_t>> samples;
  samples.reserve(link_samples.size());
  for (const auto& s : link_samples) samples.emplace_back(s.begin(), s.end());
  pat::Params params;
  params.min_points = min_points;
  params.min_occurs = min_occurs;
  auto found = pat::learn(samples, params);

  PointId cons = pts.get_or_make("cons");
  std::vector<std::uint32_t> created;
  for (const auto& p : found.patterns) {
    std::vector<PointId> ordered(p.key.begin(), p.key.end());
    std::sort(ordered.begin(), ordered.end());  // link creation order

    std::vector<PointRef> key{PointRef{cons, Variant::Value, false, false}};
    std::vector<PointRef> values;
    for (PointId link : ordered) {
      auto it = link_info_.find(link);
      if (it == link_info_.end()) continue;
      const LinkInfo& info = it->second;
      for (PointId c : info.cause)
        if (is_chiral(pts, c)) key.push_back(base_ref(c));
      if (info.effect.empty()) continue;  // cause-only links only gate the twine
      if (!info.cause.empty())
        values.push_back(PointRef{info.cause.front(), Variant::Value, false, false});
      for (PointId ef : info.effect) values.push_back(base_ref(ef));
      values.push_back(base_ref(pts.eoa));
      values.push_back(base_ref(pts.opcode_id(Opcode::SURISA)));
    }
    if (values.empty()) continue;
    const Binding& b = create_binding(std::move(key), std::move(values), 0, false,
                                      "bind", false);
    created.push_back(b.ref_number);
  }
  return created;
}

}  // namespace cem
