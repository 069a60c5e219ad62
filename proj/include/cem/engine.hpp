#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "cem/binding.hpp"
#include "cem/eval.hpp"
#include "cem/points.hpp"

namespace cem {

struct PsEntry {
  PointRef ref;
  std::uint64_t quiesce_gen = 0;  // change-generation at last failed evaluation
  bool time_blocked = false;      // failure would lift at a later clock
  std::vector<PointId> isa_cache; // display annotation filled by opPSISAS
};

// The V5 virtual machine: PS/AS/PQ/TC, registers, run loop, opcodes,
// AS reduction and the language-to-thought parser.
class Engine {
 public:
  Engine(PointTable& pts, BindingStore& store);

  PointTable& pts;
  BindingStore& store;

  std::function<void(const std::string&)> out = [](const std::string&) {};

  // Trace switches (driven by the interpreter's `trace` command).
  bool trace_bind = false;
  bool trace_eval = false;
  bool trace_twine = false;
  bool trace_reduce = false;
  std::set<std::string> trace_ops;             // opcode labels traced
  std::vector<std::string> trace_seq_prefixes; // trace sequence <prefix>

  std::vector<PsEntry> ps;      // index 0 = top (scan start, pop end)
  std::vector<PointRef> as;     // aggregate set, left to right
  std::vector<PointId> pq;      // print queue
  std::vector<PointRef> tc;     // twine context set

  PointId r_new = kNoPoint;
  PointId r_eval = kNoPoint;
  PointId r_wm1 = kNoPoint;
  PointId r_t = kNoPoint;
  std::uint64_t clock = 1;
  std::uint64_t twine_time = 1;

  std::uint64_t step_budget = 1'000'000;
  std::vector<PointId> thoughts;  // creation order, newest last

  // Loads a fresh program: clears the PS and PQ, then places the refs with
  // the first one on top.
  void load_ps(std::vector<PointRef> refs);
  // Appends one ref at the top (dedup applies).
  void push_top(PointRef ref);

  // Scans until quiescent. Returns false when the step budget runs out.
  bool run();
  // Executes exactly one opcode against the current state (`run opX`).
  void exec_opcode(Opcode op, bool force_trace = false);

  // Context of the current PS (plus extras), is-a closed.
  Context ps_context(std::span<const PointId> extra = {},
                     std::uint64_t clock_override = 0) const;

  // E_c of `key` against the PS context extended with the key's base points.
  EvalOutcome eval_key(std::span<const PointRef> key) const;

  struct VvResult {
    bool ok = false;
    bool time_blocked = false;
    std::vector<PointRef> values;
  };
  // [p.v] per §3.3: AS roots (during reduction), then the PS is-a rule, then E_c.
  VvResult eval_value_variant(PointId p);

  // One AS reduction cycle; true when a pair matched.
  bool reduce_cycle();

  // opLUPARSE.
  void ltt_parse();

  // §9.2 surrogate resolution against prior thoughts.
  std::optional<PointId> resolve_surrogate(PointId sur) const;

  // §10.4: link bindings relating two thoughts; returns the link points.
  std::vector<PointId> derive_links(PointId t_before, PointId t_after);

  // §10.4: learn patterns over link samples and emit cons value twines.
  // Returns the created binding ref numbers.
  std::vector<std::uint32_t> learn_consequences(
      const std::vector<std::vector<PointId>>& link_samples, int min_points,
      int min_occurs);

  // Formatting helpers shared with the interpreter.
  std::string format_ps() const;
  std::string format_point_list(std::span<const PointId> ids) const;
  std::string format_opcode_counts() const;
  void print_state();

  std::uint64_t change_gen() const { return gen_ + store.revision(); }
  void touch() { ++gen_; }

  bool halted_on_error() const { return error_; }

  // Point plus its is-a closure; child surrogates stay opaque unless asked.
  std::unordered_set<PointId> isa_cover(const Context& ctx, PointId root,
                                        bool expand_surrogates) const;
  // Values of untagged [t.i] twines, in creation order.
  std::vector<PointId> thought_children(PointId t) const;
  // Values of [p.i] twines whose key is exactly {p.i} (untagged descriptive set).
  std::vector<PointId> plain_isa_values(PointId p) const;

  struct LinkInfo {
    std::vector<PointId> cause;
    std::vector<PointId> effect;
  };
  const std::unordered_map<PointId, LinkInfo>& link_info() const { return link_info_; }

 private:
  friend struct LttRun;

  bool scan_pass();
  std::optional<PointRef> pop_top(const char* who);
  std::vector<PointRef> pop_until_eoa(const char* who);
  void place_values(std::size_t var_idx, const std::vector<PointRef>& vals);
  void dedup_except(const PointRef& ref, std::size_t keep_idx);
  bool dedupable(const PointRef& ref) const;
  PointId register_value(Register r);
  void substitute_register(std::size_t idx);

  const Binding& create_binding(std::vector<PointRef> key, std::vector<PointRef> values,
                                std::int32_t bonus, bool ordered, const char* op_prefix,
                                bool op_traced);
  void make_twine(PointId owner, Variant variant, PointRef value, const char* op_prefix,
                  bool traced);
  void create_plain_isa(PointId owner, PointId value);
  void create_tagged_isa(PointId owner, PointId value);
  PointId make_link(std::vector<PointId> key_ids, std::vector<PointId> cause,
                    std::vector<PointId> effect);

  bool opcode_traced(Opcode op, bool force) const;
  void diag(const std::string& msg);

  // AS value execution (§3.2.1): push one at a time, opcodes run immediately.
  void exec_value_list(std::span<const PointRef> vals, bool traced);
  struct PairMatch {
    const Binding* b = nullptr;
    Weight w;
    std::size_t left = 0, right = 0;
  };
  std::optional<PairMatch> best_pair_match();

  // Pair roots available to [p.v] during AS value execution.
  std::vector<PointId> as_exec_roots_;
  bool in_as_exec_ = false;

  std::uint64_t gen_ = 0;
  bool error_ = false;
  bool last_op_was_inct_ = false;

  std::map<std::vector<PointId>, PointId> link_by_key_;
  std::unordered_map<PointId, LinkInfo> link_info_;
  std::map<std::string, int> op_counts_;
};

// True when the point's label ends in _L / _R (chiral halves, §9.3).
bool is_chiral_left(const PointTable& pts, PointId id);
bool is_chiral_right(const PointTable& pts, PointId id);

}  // namespace cem
