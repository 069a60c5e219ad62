#include "cem/engine.hpp"

#include <algorithm>
#include <cassert>

namespace cem {

namespace {

const char* opcode_label(Opcode op) {
  switch (op) {
    case Opcode::ACTX: return "opACTX";
    case Opcode::ADDPQ: return "opADDPQ";
    case Opcode::BIND: return "opBIND";
    case Opcode::CLRPQ: return "opCLRPQ";
    case Opcode::EVAL: return "opEVAL";
    case Opcode::INCCTP: return "opINCCTP";
    case Opcode::INCT: return "opINCT";
    case Opcode::ISATOAS: return "opISATOAS";
    case Opcode::LASM: return "opLASM";
    case Opcode::LUJOIN: return "opLUJOIN";
    case Opcode::LULINK: return "opLULINK";
    case Opcode::LUPARSE: return "opLUPARSE";
    case Opcode::LWM1: return "opLWM1";
    case Opcode::NEW: return "opNEW";
    case Opcode::NEWSUR: return "opNEWSUR";
    case Opcode::NEWT: return "opNEWT";
    case Opcode::OUTPQ: return "opOUTPQ";
    case Opcode::PSISAS: return "opPSISAS";
    case Opcode::RAS: return "opRAS";
    case Opcode::RASM: return "opRASM";
    case Opcode::RCTX: return "opRCTX";
    case Opcode::STATE: return "opSTATE";
    case Opcode::SURISA: return "opSURISA";
    case Opcode::TWISA: return "opTWISA";
    case Opcode::TWVAL: return "opTWVAL";
    case Opcode::VAL: return "opVAL";
  }
  return "op?";
}

}  // namespace

bool is_chiral_left(const PointTable& pts, PointId id) {
  const std::string& l = pts.at(id).label;
  return l.size() > 2 && l.compare(l.size() - 2, 2, "_L") == 0;
}

bool is_chiral_right(const PointTable& pts, PointId id) {
  const std::string& l = pts.at(id).label;
  return l.size() > 2 && l.compare(l.size() - 2, 2, "_R") == 0;
}

Engine::Engine(PointTable& pts_, BindingStore& store_) : pts(pts_), store(store_) {
  // Idiom support: sequences clear a pushed evalFail with `evalFail,opVAL`.
  store.add({PointRef{pts.eval_fail, Variant::Value, false, false}},
            {base_ref(pts.null_pt)});
  // The predefined alphabet: letter<"a" ... letter<"z".
  for (char c = 'a'; c <= 'z'; ++c) {
    std::string lbl = "\"";
    lbl += c;
    lbl += '"';
    PointId letter_pt = pts.find(lbl);
    store.add({PointRef{letter_pt, Variant::Isa, false, false}},
              {base_ref(pts.letter)});
  }
  // The engine starts with an initial thought point.
  r_t = pts.make_thought();
  thoughts.push_back(r_t);
}

void Engine::load_ps(std::vector<PointRef> refs) {
  ps.clear();
  pq.clear();
  // Pushing in reverse leaves the first listed ref on top, scan order equal
  // to command order.
  for (auto it = refs.rbegin(); it != refs.rend(); ++it) push_top(*it);
  touch();
}

void Engine::push_top(PointRef ref) {
  PsEntry e;
  e.ref = ref;
  ps.insert(ps.begin(), e);
  dedup_except(ref, 0);
  touch();
}

bool Engine::dedupable(const PointRef& ref) const {
  if (ref.quoted) return false;
  const Point& p = pts.at(ref.id);
  if (p.is_opcode || p.is_register) return false;
  if (ref.id == pts.eoa || ref.id == pts.asph || ref.id == pts.null_pt) return false;
  return true;
}

void Engine::dedup_except(const PointRef& ref, std::size_t keep_idx) {
  if (!dedupable(ref)) return;
  for (std::size_t j = ps.size(); j-- > 0;) {
    if (j == keep_idx) continue;
    if (!ps[j].ref.quoted && same_point(ps[j].ref, ref)) ps.erase(ps.begin() + j);
  }
}

PointId Engine::register_value(Register r) {
  switch (r) {
    case Register::CTP: return pts.time_point(clock, true);
    case Register::TCTX: return pts.time_point(twine_time, true);
    case Register::NEW_: return r_new;
    case Register::EVAL: return r_eval;
    case Register::WM1: return r_wm1;
    case Register::T: return r_t;
  }
  return kNoPoint;
}

void Engine::substitute_register(std::size_t idx) {
  Register r = pts.at(ps[idx].ref.id).reg;
  PointId v = register_value(r);
  if (v == kNoPoint) {
    diag(std::string("? register ") + pts.at(ps[idx].ref.id).label + " has no value");
    ps.erase(ps.begin() + idx);
    return;
  }
  ps[idx].ref = base_ref(v);
  ps[idx].quiesce_gen = 0;
  ps[idx].isa_cache.clear();
  dedup_except(ps[idx].ref, idx);
}

std::optional<PointRef> Engine::pop_top(const char* who) {
  if (ps.empty()) {
    diag(std::string("? ") + who + ": stack underflow");
    error_ = true;
    return std::nullopt;
  }
  PointRef r = ps.front().ref;
  ps.erase(ps.begin());
  r.quoted = false;
  return r;
}

std::vector<PointRef> Engine::pop_until_eoa(const char* who) {
  std::vector<PointRef> out;
  for (;;) {
    auto r = pop_top(who);
    if (!r) break;
    if (r->id == pts.eoa && r->variant == Variant::Base) break;
    out.push_back(*r);
  }
  return out;
}

void Engine::place_values(std::size_t var_idx, const std::vector<PointRef>& vals) {
  // A lone null result pushes nothing (§3.1.1 footnote).
  if (vals.size() == 1 && !vals[0].quoted && vals[0].variant == Variant::Base &&
      vals[0].id == pts.null_pt) {
    ps.erase(ps.begin() + var_idx);
    return;
  }
  // Results go to the top of the PS in list order; when the point just below
  // the variant is a pending opcode (a value slot, e.g. `...,eoa,pos.v,opBIND`)
  // they stay at the variant's position instead.
  bool in_place = false;
  if (var_idx + 1 < ps.size()) {
    const PointRef& below = ps[var_idx + 1].ref;
    if (!below.quoted && below.variant == Variant::Base && pts.at(below.id).is_opcode)
      in_place = true;
  }
  ps.erase(ps.begin() + var_idx);
  std::size_t pos = in_place ? var_idx : 0;
  for (const auto& v : vals) {
    PsEntry e;
    e.ref = v;
    ps.insert(ps.begin() + pos, e);
    if (dedupable(v)) {
      for (std::size_t j = ps.size(); j-- > 0;) {
        if (j == pos) continue;
        if (!ps[j].ref.quoted && same_point(ps[j].ref, v)) {
          ps.erase(ps.begin() + j);
          if (j < pos) --pos;
        }
      }
    }
    ++pos;
  }
}

Context Engine::ps_context(std::span<const PointId> extra,
                           std::uint64_t clock_override) const {
  std::vector<PointId> explicits;
  explicits.reserve(ps.size() + extra.size());
  for (const auto& e : ps)
    if (!e.ref.quoted && e.ref.variant == Variant::Base) explicits.push_back(e.ref.id);
  for (PointId p : extra) explicits.push_back(p);
  return expand_context(pts, store, explicits, clock_override ? clock_override : clock);
}

EvalOutcome Engine::eval_key(std::span<const PointRef> key) const {
  std::vector<PointId> extra;
  for (const auto& k : key)
    if (k.variant == Variant::Base) extra.push_back(k.id);
  Context ctx = ps_context(extra);
  return eval_contextual(pts, store, ctx, key);
}

Engine::VvResult Engine::eval_value_variant(PointId p) {
  VvResult res;
  Context ctx = ps_context();

  // During AS value execution the matched pair and the AS are searched first;
  // [p.v] is the root point whose direct is-a set holds p (§3.2.1).
  if (in_as_exec_) {
    Context actx = ctx;
    for (PointId r : as_exec_roots_) actx.insert(r);
    for (const auto& r : as)
      if (!r.quoted && r.variant == Variant::Base) actx.insert(r.id);
    std::vector<PointId> roots = as_exec_roots_;
    for (const auto& r : as)
      if (!r.quoted && r.variant == Variant::Base) roots.push_back(r.id);
    for (PointId root : roots) {
      auto direct = eval_isa_all(pts, store, actx, root);
      if (std::find(direct.begin(), direct.end(), p) != direct.end()) {
        res.ok = true;
        res.values = {base_ref(root)};
        return res;
      }
    }
  }

  // §3.3: scan PS entries top-down, breadth-first through each is-a tree, for
  // a point whose direct is-a set holds p.
  for (const auto& e : ps) {
    if (e.ref.quoted || e.ref.variant != Variant::Base) continue;
    std::vector<PointId> queue{e.ref.id};
    std::unordered_set<PointId> seen{e.ref.id};
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      auto direct = eval_isa_all(pts, store, ctx, queue[qi]);
      if (std::find(direct.begin(), direct.end(), p) != direct.end()) {
        res.ok = true;
        res.values = {base_ref(queue[qi])};
        return res;
      }
      for (PointId q : direct)
        if (seen.insert(q).second) queue.push_back(q);
    }
  }

  PointRef key{p, Variant::Value, false, false};
  EvalOutcome out = eval_contextual(pts, store, ctx, std::span<const PointRef>(&key, 1));
  if (out.ok()) {
    res.ok = true;
    res.values = out.values;
    return res;
  }
  // Would it succeed once the clock catches up with a future time point?
  Context relaxed = ps_context({}, ~0ull);
  EvalOutcome retry = eval_contextual(pts, store, relaxed, std::span<const PointRef>(&key, 1));
  res.time_blocked = retry.ok();
  return res;
}

bool Engine::scan_pass() {
  for (std::size_t i = 0; i < ps.size(); ++i) {
    PsEntry& e = ps[i];
    if (e.ref.quoted) continue;
    const Point& p = pts.at(e.ref.id);
    if (e.ref.variant == Variant::Base) {
      if (p.is_opcode) {
        Opcode op = p.opcode;
        bool traced = opcode_traced(op, false);
        ps.erase(ps.begin() + i);
        exec_opcode(op, traced);
        touch();
        return true;
      }
      if (p.is_register) {
        substitute_register(i);
        touch();
        return true;
      }
      continue;
    }
    if (e.ref.variant == Variant::Value) {
      if (e.quiesce_gen == change_gen()) continue;
      bool seq_traced = false;
      if (!trace_seq_prefixes.empty() && !p.label.empty()) {
        for (const auto& pre : trace_seq_prefixes)
          if (p.label.rfind(pre, 0) == 0) seq_traced = true;
      }
      VvResult r = eval_value_variant(e.ref.id);
      if (r.ok) {
        if (trace_eval || seq_traced) {
          std::string line = "eval: [" + pts.format(e.ref) + "] =>";
          for (const auto& v : r.values) line += ' ' + pts.format(v);
          out(line);
        }
        place_values(i, r.values);
        touch();
        return true;
      }
      e.quiesce_gen = change_gen();
      e.time_blocked = r.time_blocked;
      continue;
    }
  }
  return false;
}

bool Engine::run() {
  error_ = false;
  std::uint64_t steps = 0;
  for (;;) {
    if (error_) return true;
    if (++steps > step_budget) {
      diag("? run: step budget exceeded, non-terminating program");
      return false;
    }
    if (scan_pass()) continue;
    bool wake = false;
    for (const auto& e : ps)
      if (e.ref.variant == Variant::Value && !e.ref.quoted &&
          e.quiesce_gen == change_gen() && e.time_blocked) {
        wake = true;
        break;
      }
    if (!wake) break;
    ++clock;
    touch();
  }
  return true;
}

bool Engine::opcode_traced(Opcode op, bool force) const {
  if (force) return true;
  return trace_ops.count(opcode_label(op)) != 0;
}

void Engine::diag(const std::string& msg) { out(msg); }

const Binding& Engine::create_binding(std::vector<PointRef> key,
                                      std::vector<PointRef> values, std::int32_t bonus,
                                      bool ordered, const char* op_prefix,
                                      bool op_traced) {
  const Binding& b = store.add(std::move(key), std::move(values), bonus, ordered);
  std::string fmt = "#" + std::to_string(b.ref_number) + ": " + format_binding(pts, b);
  if (op_traced && op_prefix)
    out(std::string(op_prefix) + ": " + fmt);
  else if (trace_bind)
    out("bind: " + fmt);
  else if (trace_twine && op_prefix &&
           (std::string(op_prefix) == "opTWVAL" || std::string(op_prefix) == "opTWISA"))
    out("twine: " + fmt);
  return b;
}

void Engine::make_twine(PointId owner, Variant variant, PointRef value,
                        const char* op_prefix, bool traced) {
  // Key display order per the traces: TC points, the variant, the time point.
  std::vector<PointRef> key;
  for (const auto& t : tc) key.push_back(t);
  key.push_back(PointRef{owner, variant, false, false});
  std::uint64_t mag = std::max(clock, twine_time);
  key.push_back(base_ref(pts.time_point(mag, true)));
  create_binding(std::move(key), {value}, 0, false, op_prefix, traced);
}

void Engine::exec_opcode(Opcode op, bool force_trace) {
  bool traced = opcode_traced(op, force_trace);
  bool was_inct = last_op_was_inct_;
  last_op_was_inct_ = false;
  ++op_counts_[opcode_label(op)];
  switch (op) {
    case Opcode::ACTX: {
      auto p = pop_top("opACTX");
      if (!p) return;
      bool present = false;
      for (const auto& t : tc)
        if (same_point(t, *p)) present = true;
      if (!present) tc.push_back(*p);
      break;
    }
    case Opcode::RCTX:
      tc.clear();
      break;
    case Opcode::ADDPQ: {
      auto p = pop_top("opADDPQ");
      if (!p) return;
      pq.push_back(p->id);
      break;
    }
    case Opcode::CLRPQ:
      pq.clear();
      break;
    case Opcode::OUTPQ: {
      std::string line = "PQ(" + std::to_string(clock) + "):";
      for (PointId id : pq) line += ' ' + pts.format(id);
      out(line);
      break;
    }
    case Opcode::BIND: {
      auto key = pop_until_eoa("opBIND");
      auto value = pop_top("opBIND");
      if (error_ || !value) return;
      create_binding(std::move(key), {*value}, 0, false, "bind", traced);
      break;
    }
    case Opcode::EVAL: {
      auto key = pop_until_eoa("opEVAL");
      if (error_) return;
      EvalOutcome r = eval_key(key);
      std::string keyfmt = "[";
      for (std::size_t i = 0; i < key.size(); ++i) {
        if (i) keyfmt += ' ';
        keyfmt += pts.format(key[i]);
      }
      keyfmt += ']';
      if (r.ok()) {
        r_eval = r.values.empty() ? pts.null_pt : r.values[0].id;
        if (traced)
          out("opEVAL: " + keyfmt + " => #" + std::to_string(r.matched->ref_number) +
              ": " + format_binding(pts, *r.matched));
      } else {
        r_eval = pts.null_pt;
        push_top(base_ref(pts.eval_fail));
        if (traced) out("opEVAL: " + keyfmt + " failed, ps: " + format_ps());
      }
      break;
    }
    case Opcode::VAL: {
      auto p = pop_top("opVAL");
      if (!p) return;
      push_top(PointRef{p->id, Variant::Value, false, false});
      break;
    }
    case Opcode::NEW:
      r_new = pts.make_anonymous();
      break;
    case Opcode::NEWSUR:
      r_new = pts.make_surrogate();
      break;
    case Opcode::NEWT:
      r_t = pts.make_thought();
      thoughts.push_back(r_t);
      break;
    case Opcode::LWM1: {
      auto p = pop_top("opLWM1");
      if (!p) return;
      r_wm1 = p->id;
      break;
    }
    case Opcode::INCCTP:
      ++clock;
      break;
    case Opcode::INCT:
      twine_time = was_inct ? twine_time + 1 : clock + 1;
      last_op_was_inct_ = true;
      break;
    case Opcode::TWVAL: {
      auto a = pop_top("opTWVAL");
      auto b = pop_top("opTWVAL");
      if (!a || !b) return;
      make_twine(a->id, Variant::Value, *b, "opTWVAL", traced);
      break;
    }
    case Opcode::TWISA: {
      auto a = pop_top("opTWISA");
      auto b = pop_top("opTWISA");
      if (!a || !b) return;
      // `x,owner,opTWISA` twines x as an is-a of owner: [owner.i ...] = x.
      make_twine(b->id, Variant::Isa, *a, "opTWISA", traced);
      break;
    }
    case Opcode::SURISA: {
      PointId sur = pts.make_surrogate();
      auto members = pop_until_eoa("opSURISA");
      if (error_) return;
      for (const auto& m : members)
        create_binding({PointRef{sur, Variant::Isa, false, false}}, {m}, 0, false,
                       "opSURISA", false);
      if (r_t != kNoPoint)
        create_binding({PointRef{r_t, Variant::Isa, false, false}},
                       {base_ref(sur)}, 0, false, "opSURISA", false);
      break;
    }
    case Opcode::PSISAS: {
      Context ctx = ps_context();
      for (auto& e : ps) {
        e.isa_cache.clear();
        if (e.ref.quoted || e.ref.variant != Variant::Base) continue;
        std::vector<PointId> queue{e.ref.id};
        std::unordered_set<PointId> seen{e.ref.id};
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
          for (PointId q : eval_isa_all(pts, store, ctx, queue[qi]))
            if (seen.insert(q).second) {
              queue.push_back(q);
              e.isa_cache.push_back(q);
            }
        }
      }
      break;
    }
    case Opcode::ISATOAS: {
      auto p = pop_top("opISATOAS");
      if (!p) return;
      Context ctx = ps_context({&p->id, 1});
      for (PointId q : eval_isa_all(pts, store, ctx, p->id)) as.push_back(base_ref(q));
      as.push_back(base_ref(pts.asph));
      break;
    }
    case Opcode::LASM: {
      auto members = pop_until_eoa("opLASM");
      if (error_) return;
      for (const auto& m : members) as.push_back(m);
      break;
    }
    case Opcode::RAS: {
      if (!reduce_cycle()) push_top(base_ref(pts.ras_fail));
      break;
    }
    case Opcode::RASM: {
      if (as.empty()) {
        push_top(base_ref(pts.ras_fail));
        break;
      }
      while (reduce_cycle()) {
      }
      break;
    }
    case Opcode::LUPARSE:
      ltt_parse();
      break;
    case Opcode::LUJOIN:
    case Opcode::LULINK:
      diag(std::string("? ") + opcode_label(op) + " is only valid within opLUPARSE");
      break;
    case Opcode::STATE:
      print_state();
      break;
  }
}

std::string Engine::format_ps() const {
  if (ps.empty()) return "*empty*";
  std::string line;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (i) line += ", ";
    line += pts.format(ps[i].ref);
    if (!ps[i].isa_cache.empty()) {
      line += "+<";
      for (std::size_t j = 0; j < ps[i].isa_cache.size(); ++j) {
        if (j) line += ',';
        line += pts.format(ps[i].isa_cache[j]);
      }
      line += '>';
    }
  }
  return line;
}

std::string Engine::format_opcode_counts() const {
  if (op_counts_.empty()) return "*none*";
  std::string line;
  for (const auto& [name, n] : op_counts_) {
    if (!line.empty()) line += ", ";
    line += name + "=" + std::to_string(n);
  }
  return line;
}

std::string Engine::format_point_list(std::span<const PointId> ids) const {
  if (ids.empty()) return "*empty*";
  std::string line;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) line += ", ";
    line += pts.format(ids[i]);
  }
  return line;
}

void Engine::print_state() {
  out("state: ps: " + format_ps());
  if (!as.empty()) {
    std::string line = "aggset: ";
    for (std::size_t i = 0; i < as.size(); ++i) {
      if (i) line += ", ";
      line += pts.format(as[i]);
    }
    out(line);
  }
  out("  pq: " + format_point_list(pq));
  out("  prNEW: " + (r_new == kNoPoint ? std::string("*none*") : pts.format(r_new)));
  out("  prEVAL: " + (r_eval == kNoPoint ? std::string("*none*") : pts.format(r_eval)));
  std::string tcx;
  if (tc.empty()) {
    tcx = "*empty*";
  } else {
    for (std::size_t i = 0; i < tc.size(); ++i) {
      if (i) tcx += ", ";
      tcx += pts.format(tc[i]);
    }
  }
  out("  tCTX: " + tcx);
  out("  ctp: *CTP*(" + std::to_string(clock) + ")");
  out("  tCTP: *CTP*(" + std::to_string(twine_time) + ")");
}

// ---------------------------------------------------------------------------
// AS reduction (§3.2.1).

// Is-a cover of one point: the point plus its closure; child surrogates stay
// opaque to pair matching unless expand_surrogates is set.
std::unordered_set<PointId> Engine::isa_cover(const Context& ctx, PointId root,
                                              bool expand_surrogates) const {
  std::unordered_set<PointId> cover{root};
  std::vector<PointId> queue{root};
  for (std::size_t i = 0; i < queue.size(); ++i) {
    PointId x = queue[i];
    if (!expand_surrogates && x != root && pts.at(x).is_surrogate) continue;
    for (PointId q : eval_isa_all(pts, store, ctx, x))
      if (cover.insert(q).second) queue.push_back(q);
  }
  return cover;
}

std::optional<Engine::PairMatch> Engine::best_pair_match() {
  std::optional<PairMatch> best;
  for (std::size_t i = 0; i + 1 < as.size(); ++i) {
    PointId left = as[i].id;
    PointId right = as[i + 1].id;
    Context ctx = ps_context(std::vector<PointId>{left, right});
    auto lcov = isa_cover(ctx, left, false);
    auto rcov = isa_cover(ctx, right, false);

    for (std::size_t bi = 0; bi < store.size(); ++bi) {
      const Binding& b = store[bi];
      bool ok = true;
      if (b.ordered) {
        if (b.key.size() != 2) continue;
        ok = lcov.count(b.key[0].id) != 0 && rcov.count(b.key[1].id) != 0 &&
             b.key[0].variant == Variant::Base && b.key[1].variant == Variant::Base;
      } else {
        for (const auto& r : b.key) {
          if (r.variant != Variant::Base) {
            ok = false;
            break;
          }
          const Point& rp = pts.at(r.id);
          if (rp.has_time) {
            if (clock < rp.time_magnitude) {
              ok = false;
              break;
            }
            continue;
          }
          if (!ctx.contains(r.id) && !lcov.count(r.id) && !rcov.count(r.id)) {
            ok = false;
            break;
          }
        }
      }
      if (!ok) continue;
      Weight w = binding_weight(pts, b);
      if (!best || best->w < w) best = PairMatch{&b, w, i, i + 1};
    }
  }
  return best;
}

void Engine::exec_value_list(std::span<const PointRef> vals, bool traced) {
  for (const auto& v : vals) {
    if (!v.quoted && v.variant == Variant::Base) {
      const Point& p = pts.at(v.id);
      if (p.is_opcode) {
        exec_opcode(p.opcode, opcode_traced(p.opcode, false));
        continue;
      }
      if (p.is_register) {
        PointId rv = register_value(p.reg);
        if (rv != kNoPoint) push_top(base_ref(rv));
        continue;
      }
    }
    if (!v.quoted && v.variant == Variant::Value) {
      VvResult r = eval_value_variant(v.id);
      if (r.ok) {
        for (const auto& rv : r.values) push_top(rv);
      } else if (trace_reduce || traced) {
        out("reduce: [" + pts.format(v) + "] failed during value execution");
      }
      continue;
    }
    push_top(v);
  }
}

bool Engine::reduce_cycle() {
  auto m = best_pair_match();
  if (!m) {
    if (trace_reduce) out("reduce: no pair matched");
    return false;
  }
  const Binding& b = *m->b;
  PointId left = as[m->left].id;
  PointId right = as[m->right].id;
  if (trace_reduce)
    out("reduce: (" + pts.format(left) + ", " + pts.format(right) + ") matched #" +
        std::to_string(b.ref_number) + ": " + format_binding(pts, b));

  // Minus-flagged key refs delete the AS point that matched them (step 4).
  Context ctx = ps_context(std::vector<PointId>{left, right});
  auto lcov = isa_cover(ctx, left, false);
  bool remove_left = false, remove_right = false;
  if (b.ordered) {
    remove_left = b.key[0].remove_on_match;
    remove_right = b.key[1].remove_on_match;
  } else {
    for (const auto& r : b.key)
      if (r.remove_on_match) {
        if (lcov.count(r.id))
          remove_left = true;
        else
          remove_right = true;
      }
  }
  std::size_t insert_pos = m->left + (remove_left ? 0 : 1);
  if (remove_right) as.erase(as.begin() + m->right);
  if (remove_left) as.erase(as.begin() + m->left);

  // Step 5: execute the values against the PS, then pull the top point back
  // and place it at the match site unless it is null.
  in_as_exec_ = true;
  as_exec_roots_ = {left, right};
  std::size_t ps_before = ps.size();
  exec_value_list(b.values, false);
  in_as_exec_ = false;
  as_exec_roots_.clear();

  // Only pull a point the value list actually left behind.
  if (ps.size() > ps_before) {
    PointRef last = ps.front().ref;
    ps.erase(ps.begin());
    if (last.id != pts.null_pt) {
      insert_pos = std::min(insert_pos, as.size());
      as.insert(as.begin() + insert_pos, last);
    }
  }
  touch();
  return true;
}

}  // namespace cem
