#include "cem/engine.hpp"
#include "doctest.h"

using namespace cem;

namespace {

struct Fix {
  PointTable pts;
  BindingStore store;
  Engine eng{pts, store};
  std::vector<std::string> lines;
  Fix() {
    eng.out = [this](const std::string& l) { lines.push_back(l); };
  }
  PointId def(const std::string& l) { return pts.make(l); }
  PointRef op(Opcode o) { return base_ref(pts.opcode_id(o)); }
  PointRef reg(Register r) { return base_ref(pts.register_id(r)); }
  PointRef v(PointId id) { return PointRef{id, Variant::Value, false, false}; }
};

}  // namespace

TEST_CASE("opBIND builds a key set up to eoa and pops the value") {
  Fix f;
  PointId a = f.def("a"), b = f.def("b"), c = f.def("c"), d = f.def("d");
  f.eng.trace_bind = true;
  std::size_t before = f.store.size();
  f.eng.load_ps({base_ref(a), base_ref(b), base_ref(c), base_ref(f.pts.eoa),
                 base_ref(d), f.op(Opcode::BIND)});
  f.eng.run();
  REQUIRE(f.store.size() == before + 1);
  const Binding& bd = f.store.all().back();
  CHECK(bd.key.size() == 3);
  CHECK(bd.values.size() == 1);
  CHECK(bd.values[0].id == d);
  REQUIRE(f.lines.size() == 1);
  CHECK(f.lines[0].find("bind: #") == 0);
  CHECK(f.lines[0].find("[a b c] = d") != std::string::npos);
  CHECK(f.eng.ps.empty());
}

TEST_CASE("opEVAL: success fills rEVAL, failure pushes evalFail") {
  Fix f;
  PointId a = f.def("a"), b = f.def("b"), c = f.def("c"), d = f.def("d");
  f.store.add({base_ref(a), base_ref(b), base_ref(c)}, {base_ref(d)});

  f.eng.load_ps({base_ref(a), base_ref(b), base_ref(f.pts.eoa), f.op(Opcode::EVAL)});
  f.eng.run();
  CHECK(f.eng.r_eval == f.pts.null_pt);
  REQUIRE(f.eng.ps.size() == 1);
  CHECK(f.eng.ps[0].ref.id == f.pts.eval_fail);

  f.eng.load_ps({base_ref(a), base_ref(b), base_ref(c), base_ref(f.pts.eoa),
                 f.op(Opcode::EVAL)});
  f.eng.run();
  CHECK(f.eng.r_eval == d);
  CHECK(f.eng.ps.empty());
}

TEST_CASE("opVAL converts and the run loop evaluates; null result pushes nothing") {
  Fix f;
  PointId a = f.def("a"), b = f.def("b");
  f.store.add({f.v(a)}, {base_ref(b)});
  f.eng.load_ps({base_ref(a), f.op(Opcode::VAL)});
  f.eng.run();
  REQUIRE(f.eng.ps.size() == 1);
  CHECK(f.eng.ps[0].ref.id == b);

  f.store.add({f.v(b)}, {base_ref(f.pts.null_pt)});
  f.eng.load_ps({base_ref(b), f.op(Opcode::VAL)});
  f.eng.run();
  CHECK(f.eng.ps.empty());
}

TEST_CASE("run leaves inert points alone and halts") {
  Fix f;
  PointId a = f.def("a"), b = f.def("b");
  f.eng.load_ps({base_ref(a), base_ref(b)});
  CHECK(f.eng.run());
  REQUIRE(f.eng.ps.size() == 2);
  CHECK(f.eng.ps[0].ref.id == a);
  // Idempotence on a halted state.
  auto before = f.eng.ps;
  CHECK(f.eng.run());
  CHECK(f.eng.ps.size() == before.size());
}

TEST_CASE("book sequence: PS residue is k, o, b with one o") {
  Fix f;
  PointId sb1 = f.def("sb1"), sb2 = f.def("sb2"), sb3 = f.def("sb3"),
          sb4 = f.def("sb4");
  PointId kb = f.pts.find("\"b\""), ko = f.pts.find("\"o\""), kk = f.pts.find("\"k\"");
  f.store.add({f.v(sb1)}, {base_ref(kb), f.v(sb2)});
  f.store.add({f.v(sb2)}, {base_ref(ko), f.v(sb3)});
  f.store.add({f.v(sb3)}, {base_ref(ko), f.v(sb4)});
  f.store.add({f.v(sb4)}, {base_ref(kk)});
  f.eng.load_ps({f.v(sb1)});
  CHECK(f.eng.run());
  CHECK(f.eng.format_ps() == "\"k\", \"o\", \"b\"");
}

TEST_CASE("value variant resolves through the PS is-a rule (§3.3)") {
  Fix f;
  PointId a = f.def("a"), b = f.def("b"), c = f.def("c"), p = f.def("p");
  f.store.add({PointRef{c, Variant::Isa, false, false}}, {base_ref(p)});
  f.eng.load_ps({base_ref(a), base_ref(b), base_ref(c)});
  auto r = f.eng.eval_value_variant(p);
  REQUIRE(r.ok);
  REQUIRE(r.values.size() == 1);
  CHECK(r.values[0].id == c);
}

TEST_CASE("letter.v finds the direct parent, not the PS root") {
  Fix f;
  PointId b1 = f.def("b1");
  PointId kb = f.pts.find("\"b\"");
  f.store.add({PointRef{b1, Variant::Isa, false, false}}, {base_ref(kb)});
  f.eng.load_ps({base_ref(b1)});
  auto r = f.eng.eval_value_variant(f.pts.letter);
  REQUIRE(r.ok);
  CHECK(r.values[0].id == kb);  // "b", not b1
}

TEST_CASE("no binding and no PS is-a: failure, variant stays quiesced") {
  Fix f;
  PointId p = f.def("p");
  f.eng.load_ps({f.v(p)});
  CHECK(f.eng.run());
  REQUIRE(f.eng.ps.size() == 1);
  CHECK(f.eng.ps[0].ref.variant == Variant::Value);
}

TEST_CASE("future-time twine wakes when the clock reaches it") {
  Fix f;
  PointId a = f.def("a"), b = f.def("b");
  f.store.add({f.v(a), base_ref(f.pts.time_point(5))}, {base_ref(b)});
  f.eng.load_ps({f.v(a)});
  CHECK(f.eng.clock == 1);
  CHECK(f.eng.run());
  CHECK(f.eng.clock == 5);
  REQUIRE(f.eng.ps.size() == 1);
  CHECK(f.eng.ps[0].ref.id == b);
}

TEST_CASE("opTWVAL folds TC and the time point into the key") {
  Fix f;
  PointId a = f.def("a"), b = f.def("b"), c = f.def("c");
  f.eng.trace_ops.insert("opTWVAL");
  f.eng.load_ps({base_ref(a), f.op(Opcode::ACTX), base_ref(b), base_ref(c),
                 f.op(Opcode::TWVAL)});
  f.eng.run();
  REQUIRE(f.lines.size() == 1);
  CHECK(f.lines[0].find("[a b.v rCTP(1)] = c") != std::string::npos);
  CHECK(f.eng.ps.empty());
}

TEST_CASE("opNEWT: thoughts number sequentially, initial thought exists") {
  Fix f;
  CHECK(f.pts.format(f.eng.r_t) == "*T*(1)");
  f.eng.exec_opcode(Opcode::NEWT);
  CHECK(f.pts.format(f.eng.r_t) == "*T*(2)");
}

TEST_CASE("opSURISA builds a surrogate with bare twines under rT") {
  Fix f;
  PointId a = f.def("a"), b = f.def("b");
  f.eng.trace_bind = true;
  f.eng.exec_opcode(Opcode::NEWT);
  f.eng.load_ps({base_ref(a), base_ref(b), base_ref(f.pts.eoa), f.op(Opcode::SURISA)});
  f.eng.run();
  REQUIRE(f.lines.size() == 3);
  CHECK(f.lines[0].find("?.i] = a") != std::string::npos);
  CHECK(f.lines[1].find("?.i] = b") != std::string::npos);
  CHECK(f.lines[2].find("[*T*(2).i] = #") != std::string::npos);
  // No rCTP in opSURISA keys.
  CHECK(f.lines[0].find("rCTP") == std::string::npos);
}

TEST_CASE("opISATOAS loads direct is-a points plus asPH") {
  Fix f;
  PointId big = f.def("big"), red = f.def("red"), ball = f.def("ball"),
          brb = f.def("brb");
  for (PointId x : {big, red, ball})
    f.store.add({PointRef{brb, Variant::Isa, false, false}}, {base_ref(x)});
  f.eng.load_ps({base_ref(brb), f.op(Opcode::ISATOAS)});
  f.eng.run();
  REQUIRE(f.eng.as.size() == 4);
  CHECK(f.eng.as[0].id == big);
  CHECK(f.eng.as[1].id == red);
  CHECK(f.eng.as[2].id == ball);
  CHECK(f.eng.as[3].id == f.pts.asph);
}

TEST_CASE("PS uniqueness holds after every opcode and scan step") {
  Fix f;
  PointId a = f.def("a"), b = f.def("b");
  f.store.add({f.v(a)}, {base_ref(b), base_ref(b)});
  f.eng.load_ps({base_ref(b), f.v(a)});
  f.eng.run();
  int count = 0;
  for (const auto& e : f.eng.ps)
    if (e.ref.id == b) ++count;
  CHECK(count == 1);
}

TEST_CASE("runaway guard trips on a non-terminating program") {
  Fix f;
  PointId a = f.def("a");
  // a.v -> a.v forever.
  f.store.add({f.v(a)}, {f.v(a), base_ref(f.def("junk"))});
  f.eng.step_budget = 500;
  f.eng.load_ps({f.v(a)});
  CHECK_FALSE(f.eng.run());
}
