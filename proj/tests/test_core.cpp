#include <algorithm>
#include <random>

#include "cem/eval.hpp"
#include "doctest.h"

using namespace cem;

namespace {

std::vector<PointRef> refs(std::initializer_list<PointRef> rs) { return rs; }

PointRef isa(PointId id) { return PointRef{id, Variant::Isa, false, false}; }
PointRef val(PointId id) { return PointRef{id, Variant::Value, false, false}; }

}  // namespace

TEST_CASE("binding weight: count, bonus and time magnitude") {
  PointTable pts;
  BindingStore store;
  PointId choc = pts.make("chocolate"), tastes = pts.make("tastes"),
          good = pts.make("good"), bad = pts.make("bad"),
          john = pts.make("johnThinks");

  const Binding& b1 = store.add(refs({base_ref(choc), base_ref(tastes)}),
                                {base_ref(good)});
  const Binding& b2 =
      store.add(refs({base_ref(john), base_ref(choc), base_ref(tastes)}),
                {base_ref(bad)});
  CHECK(binding_weight(pts, b2).count == 3);
  CHECK(binding_weight(pts, b1).count == 2);
  CHECK(binding_weight(pts, b1) < binding_weight(pts, b2));

  // Identical shapes split on the time magnitude.
  PointId a = pts.make("a"), x = pts.make("x"), y = pts.make("y");
  const Binding& t300 =
      store.add(refs({base_ref(a), base_ref(pts.time_point(300))}), {base_ref(x)});
  const Binding& t400 =
      store.add(refs({base_ref(a), base_ref(pts.time_point(400))}), {base_ref(y)});
  CHECK(binding_weight(pts, t300) < binding_weight(pts, t400));

  // Single-point key.
  const Binding& single = store.add(refs({base_ref(a)}), {base_ref(x)});
  CHECK(binding_weight(pts, single).count == 1);
  CHECK(binding_weight(pts, single).time_mag == 0);
}

TEST_CASE("eval_simple finds the identical key set only") {
  PointTable pts;
  BindingStore store;
  PointId fact = pts.make("factorial"), five = pts.make("5"),
          out = pts.make("120");
  store.add(refs({base_ref(fact), base_ref(five)}), {base_ref(out)});

  auto hit = eval_simple(store, refs({base_ref(fact), base_ref(five)}));
  REQUIRE(hit.ok());
  CHECK(hit.values[0].id == out);
  CHECK(hit.complete);

  // Key sets are order-insensitive.
  auto rev = eval_simple(store, refs({base_ref(five), base_ref(fact)}));
  REQUIRE(rev.ok());
  CHECK(rev.values[0].id == out);

  BindingStore empty;
  CHECK_FALSE(eval_simple(empty, refs({base_ref(fact)})).ok());
}

TEST_CASE("contextual evaluation prefers the heaviest covered binding") {
  PointTable pts;
  BindingStore store;
  PointId choc = pts.make("chocolate"), tastes = pts.make("tastes"),
          good = pts.make("good"), bad = pts.make("bad"),
          john = pts.make("johnThinks");
  store.add(refs({base_ref(choc), base_ref(tastes)}), {base_ref(good)});
  store.add(refs({base_ref(john), base_ref(choc), base_ref(tastes)}), {base_ref(bad)});

  Context empty_ctx = expand_context(pts, store, {}, 1);
  auto r1 = eval_contextual(pts, store, empty_ctx,
                            refs({base_ref(choc), base_ref(tastes)}));
  REQUIRE(r1.ok());
  CHECK(r1.values[0].id == good);
  CHECK(r1.complete);

  std::vector<PointId> with_john{john};
  Context jctx = expand_context(pts, store, with_john, 1);
  auto r2 = eval_contextual(pts, store, jctx, refs({base_ref(choc), base_ref(tastes)}));
  REQUIRE(r2.ok());
  CHECK(r2.values[0].id == bad);
  CHECK_FALSE(r2.complete);
}

TEST_CASE("Fido: incomplete beats complete when heavier") {
  PointTable pts;
  BindingStore store;
  PointId what = pts.make("whatIs"), fido = pts.make("Fido"), dog = pts.make("dog"),
          prof = pts.make("profKnowItAll"), beagle = pts.make("beagle"),
          lecture = pts.make("biologyLecture"), canis = pts.make("CanisLupusFamiliaris");
  store.add(refs({base_ref(what), base_ref(fido)}), {base_ref(dog)});
  store.add(refs({base_ref(what), base_ref(fido), base_ref(prof)}), {base_ref(beagle)});
  store.add(refs({base_ref(what), base_ref(fido), base_ref(prof), base_ref(lecture)}),
            {base_ref(canis)});

  auto query = refs({base_ref(what), base_ref(fido)});
  Context none = expand_context(pts, store, {}, 1);
  CHECK(eval_contextual(pts, store, none, query).values[0].id == dog);

  std::vector<PointId> p1{prof};
  Context c1 = expand_context(pts, store, p1, 1);
  CHECK(eval_contextual(pts, store, c1, query).values[0].id == beagle);

  std::vector<PointId> p2{prof, lecture};
  Context c2 = expand_context(pts, store, p2, 1);
  CHECK(eval_contextual(pts, store, c2, query).values[0].id == canis);
}

TEST_CASE("time points gate matching and rank by magnitude") {
  PointTable pts;
  BindingStore store;
  PointId ms = pts.make("maritalStatus"), john = pts.make("John");
  PointId single = pts.make("single"), married = pts.make("married"),
          divorced = pts.make("divorced"), remarried = pts.make("remarried");
  auto tw = [&](std::uint64_t t, PointId v) {
    store.add(refs({val(ms), base_ref(john), base_ref(pts.time_point(t))}),
              {base_ref(v)});
  };
  tw(100, single);
  tw(200, married);
  tw(300, divorced);
  tw(400, remarried);

  auto query = refs({val(ms), base_ref(john)});
  std::vector<PointId> j{john};
  Context c1000 = expand_context(pts, store, j, 1000);
  CHECK(eval_contextual(pts, store, c1000, query).values[0].id == remarried);
  Context c350 = expand_context(pts, store, j, 350);
  CHECK(eval_contextual(pts, store, c350, query).values[0].id == divorced);
  // Time monotonicity: nothing matching at 350 stops matching at 1000.
  Context c99 = expand_context(pts, store, j, 99);
  CHECK_FALSE(eval_contextual(pts, store, c99, query).ok());
}

TEST_CASE("eval_isa_all keeps all results, highest time wins within a shape") {
  PointTable pts;
  BindingStore store;
  PointId harry = pts.make("Harry"), man = pts.make("man"), human = pts.make("human"),
          married = pts.make("married"), single = pts.make("single"),
          father = pts.make("father");
  store.add(refs({isa(harry)}), {base_ref(man)});
  store.add(refs({isa(man)}), {base_ref(human)});
  store.add(refs({isa(harry), base_ref(pts.time_point(100))}), {base_ref(married)});
  store.add(refs({isa(harry), base_ref(pts.time_point(50))}), {base_ref(single)});
  store.add(refs({isa(harry)}), {base_ref(father)});

  std::vector<PointId> h{harry};
  Context ctx = expand_context(pts, store, h, 1000);
  auto isa_pts = eval_isa_all(pts, store, ctx, harry);
  CHECK(std::count(isa_pts.begin(), isa_pts.end(), man) == 1);
  CHECK(std::count(isa_pts.begin(), isa_pts.end(), married) == 1);
  CHECK(std::count(isa_pts.begin(), isa_pts.end(), father) == 1);
  CHECK(std::count(isa_pts.begin(), isa_pts.end(), single) == 0);

  // Fig. 2: full context of {Harry, m(1000)}.
  CHECK(ctx.contains(man));
  CHECK(ctx.contains(human));
  CHECK(ctx.contains(married));
  CHECK(ctx.contains(father));
  CHECK_FALSE(ctx.contains(single));

  // No twines → empty.
  PointId lone = pts.make("lone");
  CHECK(eval_isa_all(pts, store, ctx, lone).empty());
}

TEST_CASE("eval_isa_all: conditional twines return every qualifying shape") {
  PointTable pts;
  BindingStore store;
  PointId b = pts.make("b"), a = pts.make("a"), a2 = pts.make("a2"),
          c = pts.make("c");
  store.add(refs({isa(b)}), {base_ref(a)});
  store.add(refs({isa(b), base_ref(c)}), {base_ref(a2)});

  std::vector<PointId> with_c{b, c};
  Context ctx = expand_context(pts, store, with_c, 1);
  auto r = eval_isa_all(pts, store, ctx, b);
  // Oracle: direct enumeration of the two bindings, both keys covered.
  CHECK(r.size() == 2);
  CHECK(std::count(r.begin(), r.end(), a) == 1);
  CHECK(std::count(r.begin(), r.end(), a2) == 1);

  std::vector<PointId> no_c{b};
  Context ctx2 = expand_context(pts, store, no_c, 1);
  auto r2 = eval_isa_all(pts, store, ctx2, b);
  CHECK(r2.size() == 1);
  CHECK(r2[0] == a);
}

TEST_CASE("expand_context terminates on is-a cycles") {
  PointTable pts;
  BindingStore store;
  PointId a = pts.make("a"), b = pts.make("b");
  store.add(refs({isa(a)}), {base_ref(b)});
  store.add(refs({isa(b)}), {base_ref(a)});
  std::vector<PointId> start{a};
  Context ctx = expand_context(pts, store, start, 1);
  CHECK(ctx.contains(a));
  CHECK(ctx.contains(b));
  CHECK(ctx.all().size() == 2);
}

TEST_CASE("context cascade: removing an explicit point removes its derived points") {
  PointTable pts;
  BindingStore store;
  PointId a = pts.make("a"), b = pts.make("b"), c = pts.make("c"), d = pts.make("d");
  store.add(refs({isa(a)}), {base_ref(b)});
  store.add(refs({isa(c)}), {base_ref(d)});
  std::vector<PointId> both{a, c};
  Context full = expand_context(pts, store, both, 1);
  CHECK(full.contains(b));
  CHECK(full.contains(d));
  std::vector<PointId> only_c{c};
  Context after = expand_context(pts, store, only_c, 1);
  CHECK_FALSE(after.contains(a));
  CHECK_FALSE(after.contains(b));
  CHECK(after.contains(d));
}

TEST_CASE("property: key permutation invariance and determinism") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    PointTable pts;
    BindingStore store;
    std::vector<PointId> universe;
    for (int i = 0; i < 12; ++i) universe.push_back(pts.make("p" + std::to_string(i)));
    std::uniform_int_distribution<int> pick(0, 11);
    for (int b = 0; b < 8; ++b) {
      std::vector<PointRef> key;
      int n = 1 + pick(rng) % 3;
      for (int k = 0; k < n; ++k) key.push_back(base_ref(universe[pick(rng)]));
      store.add(std::move(key), {base_ref(universe[pick(rng)])});
    }
    std::vector<PointRef> query;
    int qn = 1 + pick(rng) % 2;
    for (int k = 0; k < qn; ++k) query.push_back(base_ref(universe[pick(rng)]));
    std::vector<PointId> ctx_pts;
    for (int k = 0; k < 3; ++k) ctx_pts.push_back(universe[pick(rng)]);

    Context ctx = expand_context(pts, store, ctx_pts, 1);
    auto r1 = eval_contextual(pts, store, ctx, query);
    std::vector<PointRef> shuffled = query;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    auto r2 = eval_contextual(pts, store, ctx, shuffled);
    CHECK(r1.ok() == r2.ok());
    if (r1.ok()) {
      CHECK(r1.matched == r2.matched);
      // Determinism: same inputs, same outcome.
      auto r3 = eval_contextual(pts, store, ctx, query);
      CHECK(r3.matched == r1.matched);
    }
  }
}

TEST_CASE("weight dominance: adding a key point never lightens a binding") {
  PointTable pts;
  BindingStore store;
  PointId a = pts.make("a"), b = pts.make("b"), v = pts.make("v");
  const Binding& small = store.add(refs({base_ref(a)}), {base_ref(v)});
  const Binding& big = store.add(refs({base_ref(a), base_ref(b)}), {base_ref(v)});
  CHECK(binding_weight(pts, small).count < binding_weight(pts, big).count);
}
