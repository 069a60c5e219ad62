#include "cem/points.hpp"

#include <array>
#include <cstdio>

namespace cem {

namespace {

struct OpName {
  Opcode op;
  const char* name;
};

constexpr std::array<OpName, 26> kOpNames{{
    {Opcode::ACTX, "opACTX"},       {Opcode::ADDPQ, "opADDPQ"},
    {Opcode::BIND, "opBIND"},       {Opcode::CLRPQ, "opCLRPQ"},
    {Opcode::EVAL, "opEVAL"},       {Opcode::INCCTP, "opINCCTP"},
    {Opcode::INCT, "opINCT"},       {Opcode::ISATOAS, "opISATOAS"},
    {Opcode::LASM, "opLASM"},       {Opcode::LUJOIN, "opLUJOIN"},
    {Opcode::LULINK, "opLULINK"},   {Opcode::LUPARSE, "opLUPARSE"},
    {Opcode::LWM1, "opLWM1"},       {Opcode::NEW, "opNEW"},
    {Opcode::NEWSUR, "opNEWSUR"},   {Opcode::NEWT, "opNEWT"},
    {Opcode::OUTPQ, "opOUTPQ"},     {Opcode::PSISAS, "opPSISAS"},
    {Opcode::RAS, "opRAS"},         {Opcode::RASM, "opRASM"},
    {Opcode::RCTX, "opRCTX"},       {Opcode::STATE, "opSTATE"},
    {Opcode::SURISA, "opSURISA"},   {Opcode::TWISA, "opTWISA"},
    {Opcode::TWVAL, "opTWVAL"},     {Opcode::VAL, "opVAL"},
}};

struct RegName {
  Register reg;
  const char* name;
};

constexpr std::array<RegName, 6> kRegNames{{
    {Register::CTP, "rCTP"},
    {Register::NEW_, "rNEW"},
    {Register::EVAL, "rEVAL"},
    {Register::WM1, "rWM1"},
    {Register::T, "rT"},
    {Register::TCTX, "rTCTX"},
}};

}  // namespace

PointTable::PointTable() {
  // Reserved points first, then opcode and register points, then the
  // predefined quoted letters. Everything here exists in every session.
  null_pt = make("null");
  eoa = make("eoa");
  asph = make("asPH");
  eval_fail = make("evalFail");
  ras_fail = make("rasFail");
  grounded = make("grounded");
  determiner = make("determiner");
  sur_action = make("surAction");
  letter = make("letter");
  parse = make("parse");

  for (const auto& [op, name] : kOpNames) {
    Point p;
    p.label = name;
    p.is_opcode = true;
    p.opcode = op;
    PointId id = push(std::move(p));
    by_label_[name] = id;
    opcode_ids_[static_cast<int>(op)] = id;
  }
  // opLW1 is the appendix-header spelling of opLWM1.
  by_label_["opLW1"] = opcode_ids_[static_cast<int>(Opcode::LWM1)];

  for (const auto& [reg, name] : kRegNames) {
    Point p;
    p.label = name;
    p.is_register = true;
    p.reg = reg;
    PointId id = push(std::move(p));
    by_label_[name] = id;
    register_ids_[static_cast<int>(reg)] = id;
  }

  for (char c = 'a'; c <= 'z'; ++c) {
    std::string lbl = "\"";
    lbl += c;
    lbl += '"';
    make(std::move(lbl));
  }
}

PointId PointTable::push(Point p) {
  pts_.push_back(std::move(p));
  return static_cast<PointId>(pts_.size() - 1);
}

PointId PointTable::make(std::string label, Kind kind) {
  if (auto it = by_label_.find(label); it != by_label_.end()) return it->second;
  Point p;
  p.label = label;
  p.kind = kind;
  PointId id = push(std::move(p));
  by_label_[std::move(label)] = id;
  return id;
}

PointId PointTable::make_anonymous() {
  return push(Point{});
}

PointId PointTable::make_surrogate() {
  Point p;
  p.is_surrogate = true;
  return push(std::move(p));
}

PointId PointTable::make_thought() {
  Point p;
  p.is_thought = true;
  p.thought_index = next_thought_index();
  return push(std::move(p));
}

PointId PointTable::time_point(std::uint64_t magnitude, bool from_rctp) {
  if (auto it = time_by_mag_.find(magnitude); it != time_by_mag_.end()) return it->second;
  Point p;
  p.has_time = true;
  p.time_magnitude = magnitude;
  p.time_from_rctp = from_rctp;
  PointId id = push(std::move(p));
  time_by_mag_[magnitude] = id;
  return id;
}

PointId PointTable::find(std::string_view label) const {
  auto it = by_label_.find(std::string(label));
  return it == by_label_.end() ? kNoPoint : it->second;
}

PointId PointTable::get_or_make(std::string_view label) {
  PointId id = find(label);
  return id != kNoPoint ? id : make(std::string(label));
}

std::string PointTable::format(PointId id) const {
  const Point& p = pts_[id];
  if (p.has_time) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%s(%llu)", p.time_from_rctp ? "rCTP" : "m",
                  static_cast<unsigned long long>(p.time_magnitude));
    return buf;
  }
  if (p.is_thought) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "*T*(%u)", p.thought_index);
    return buf;
  }
  std::string out;
  if (!p.label.empty()) {
    out = p.label;
  } else {
    char buf[24];
    std::snprintf(buf, sizeof buf, "#%x", id);
    out = buf;
  }
  if (p.is_surrogate) out += '?';
  return out;
}

std::string PointTable::format(const PointRef& ref) const {
  std::string out;
  if (ref.quoted) out += '@';
  out += format(ref.id);
  if (ref.variant == Variant::Isa) out += ".i";
  if (ref.variant == Variant::Value) out += ".v";
  return out;
}

}  // namespace cem
