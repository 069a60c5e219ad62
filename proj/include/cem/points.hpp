#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cem {

using PointId = std::uint32_t;
inline constexpr PointId kNoPoint = 0xffffffffu;

enum class Kind : std::uint8_t { Internal, Sensory, Control };
enum class Valence : std::uint8_t { None, Plus, Minus };
enum class Variant : std::uint8_t { Base, Isa, Value };

// Instruction opcodes of the V5 engine (App. B.2 plus opTWISA/opLUJOIN/opLULINK
// which appear only in listings). Trace variants are not separate opcodes; a
// trailing 't' on the label forces tracing for that execution.
enum class Opcode : std::uint8_t {
  ACTX, ADDPQ, BIND, CLRPQ, EVAL, INCCTP, INCT, ISATOAS, LASM,
  LUJOIN, LULINK, LUPARSE, LWM1, NEW, NEWSUR, NEWT, OUTPQ, PSISAS,
  RAS, RASM, RCTX, STATE, SURISA, TWISA, TWVAL, VAL,
};

enum class Register : std::uint8_t { CTP, NEW_, EVAL, WM1, T, TCTX };

struct Point {
  std::string label;            // empty when unlabeled; quoted labels keep their quotes
  Kind kind = Kind::Internal;
  Valence valence = Valence::None;
  bool is_opcode = false;
  bool is_register = false;
  bool is_surrogate = false;
  bool is_thought = false;
  bool has_time = false;
  bool time_from_rctp = false;  // display as rCTP(n) instead of m(n)
  std::uint64_t time_magnitude = 0;
  Opcode opcode = Opcode::ACTX;
  Register reg = Register::CTP;
  std::uint32_t thought_index = 0;  // for *T*(n) display
};

// A point reference as it occurs in keys, values and the PS.
struct PointRef {
  PointId id = kNoPoint;
  Variant variant = Variant::Base;
  bool quoted = false;          // '@' prefix: inert data until consumed
  bool remove_on_match = false; // '-' prefix, meaningful in AS binding keys

  friend bool operator==(const PointRef& a, const PointRef& b) {
    return a.id == b.id && a.variant == b.variant && a.quoted == b.quoted &&
           a.remove_on_match == b.remove_on_match;
  }
};

// id+variant equality, ignoring flags; this is the identity used for key-set
// matching and PS uniqueness.
inline bool same_point(const PointRef& a, const PointRef& b) {
  return a.id == b.id && a.variant == b.variant;
}

inline PointRef base_ref(PointId id) { return PointRef{id, Variant::Base, false, false}; }

// Interning table for every point in a session. Ids are dense and stable.
class PointTable {
 public:
  PointTable();

  PointId make(std::string label, Kind kind = Kind::Internal);
  PointId make_anonymous();                      // unlabeled internal point (#hex display)
  PointId make_surrogate();                      // unlabeled, '?' suffix
  PointId make_thought();                        // *T*(n)
  PointId time_point(std::uint64_t magnitude, bool from_rctp = false);

  PointId find(std::string_view label) const;    // kNoPoint when unknown
  PointId get_or_make(std::string_view label);   // autodef helper

  Point& at(PointId id) { return pts_[id]; }
  const Point& at(PointId id) const { return pts_[id]; }
  std::size_t size() const { return pts_.size(); }

  // Reserved points, created in the constructor.
  PointId null_pt, eoa, asph, eval_fail, ras_fail, grounded, determiner,
      sur_action, letter, parse;

  PointId opcode_id(Opcode op) const { return opcode_ids_[static_cast<int>(op)]; }
  PointId register_id(Register r) const { return register_ids_[static_cast<int>(r)]; }

  // Display form: label, #hex, m(n)/rCTP(n), *T*(n), '?' suffix, .v/.i suffix.
  std::string format(PointId id) const;
  std::string format(const PointRef& ref) const;

  std::uint32_t next_thought_index() { return ++thought_counter_; }

 private:
  PointId push(Point p);

  std::vector<Point> pts_;
  std::unordered_map<std::string, PointId> by_label_;
  std::map<std::uint64_t, PointId> time_by_mag_;
  PointId opcode_ids_[32];
  PointId register_ids_[8];
  std::uint32_t thought_counter_ = 0;
};

}  // namespace cem
