#include "cem/interp.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace cem::interp {

namespace {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Splits on a separator, honoring double-quoted labels.
std::vector<std::string> split_outside_quotes(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char c : s) {
    if (c == '"') quoted = !quoted;
    if (c == sep && !quoted) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::string> comma_list(const std::string& s) {
  std::vector<std::string> out;
  for (auto& part : split_outside_quotes(s, ',')) {
    std::string p = trim(part);
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

std::vector<std::string> space_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char c : s) {
    if (c == '"') quoted = !quoted;
    if (!quoted && std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) {
        out.push_back(cur);
        cur.clear();
      }
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

Session::Session() : engine(pts, store) {
  engine.out = [this](const std::string& line) { sink(line); };
}

PointId Session::resolve_label(const std::string& label) {
  PointId id = pts.find(label);
  if (id != kNoPoint) return id;
  if (!autodef) throw ParseError("? Unknown point: " + label);
  id = pts.make(label);
  if (trace_autodef) out("autodef: " + label);
  return id;
}

PointRef Session::parse_ref(const std::string& token) {
  std::string t = trim(token);
  PointRef ref;
  for (;;) {
    if (!t.empty() && t[0] == '@') {
      ref.quoted = true;
      t.erase(0, 1);
      continue;
    }
    if (!t.empty() && t[0] == '-') {
      ref.remove_on_match = true;
      t.erase(0, 1);
      continue;
    }
    break;
  }
  if (t.size() > 2 && t.compare(t.size() - 2, 2, ".v") == 0 && t.back() != '"') {
    ref.variant = Variant::Value;
    t.erase(t.size() - 2);
  } else if (t.size() > 2 && t.compare(t.size() - 2, 2, ".i") == 0 && t.back() != '"') {
    ref.variant = Variant::Isa;
    t.erase(t.size() - 2);
  }
  if (t.empty()) throw ParseError("? Empty point reference");

  if (t[0] == '#') {
    std::size_t pos = 0;
    unsigned long id = std::stoul(t.substr(1), &pos, 16);
    if (id >= pts.size()) throw ParseError("? Unknown point reference: " + t);
    ref.id = static_cast<PointId>(id);
    return ref;
  }
  if (t.size() > 2 && (t.rfind("m(", 0) == 0) && t.back() == ')') {
    unsigned long long mag = std::stoull(t.substr(2, t.size() - 3));
    ref.id = pts.time_point(mag);
    return ref;
  }
  ref.id = resolve_label(t);
  return ref;
}

bool Session::execute(const std::string& logical_line) {
  std::string line = trim(logical_line);
  if (line.empty()) return true;
  std::size_t sp = line.find_first_of(" \t");
  std::string cmd = lower(line.substr(0, sp));
  std::string args = sp == std::string::npos ? "" : trim(line.substr(sp + 1));
  try {
    if (cmd == "def")
      cmd_def(args);
    else if (cmd == "bind")
      cmd_bind(args);
    else if (cmd == "twine")
      cmd_twine(args);
    else if (cmd == "eval")
      cmd_eval(args);
    else if (cmd == "ps")
      cmd_ps(args);
    else if (cmd == "run")
      cmd_run(args);
    else if (cmd == "set")
      cmd_set(args);
    else if (cmd == "show")
      cmd_show(args);
    else if (cmd == "trace")
      cmd_trace(args);
    else
      throw ParseError("? Unknown command: " + cmd);
  } catch (const ParseError& e) {
    out(e.what());
    had_error_ = true;
    return false;
  } catch (const std::exception& e) {
    out(std::string("? ") + e.what());
    had_error_ = true;
    return false;
  }
  return true;
}

void Session::cmd_def(const std::string& args) {
  if (args.empty()) throw ParseError("? def: point list expected");
  for (const auto& label : comma_list(args)) {
    if (pts.find(label) != kNoPoint) throw ParseError("? def: already defined: " + label);
    pts.make(label);
  }
}

void Session::cmd_bind(const std::string& args) {
  std::string rest = trim(args);
  std::int32_t bonus = 0;
  if (!rest.empty() && rest[0] == '+') {
    std::size_t pos = 0;
    bonus = std::stoi(rest.substr(1), &pos);
    rest = trim(rest.substr(1 + pos));
  }
  if (rest.empty() || rest[0] != '[') throw ParseError("? bind: key set expected");
  std::size_t close = rest.find(']');
  if (close == std::string::npos) throw ParseError("? bind: missing ]");
  std::string keytext = rest.substr(1, close - 1);
  std::string valtext = trim(rest.substr(close + 1));
  if (!valtext.empty() && valtext[0] == '=') valtext = trim(valtext.substr(1));
  if (valtext.empty()) throw ParseError("? bind: value expected");

  bool ordered = keytext.find('/') != std::string::npos;
  std::vector<PointRef> key;
  std::string normalized = keytext;
  std::replace(normalized.begin(), normalized.end(), '/', ' ');
  for (const auto& tok : space_list(normalized)) key.push_back(parse_ref(tok));
  if (key.empty()) throw ParseError("? bind: empty key set");

  std::vector<PointRef> values;
  for (const auto& tok : comma_list(valtext)) values.push_back(parse_ref(tok));

  const Binding& b = store.add(std::move(key), std::move(values), bonus, ordered);
  if (engine.trace_bind)
    out("bind: #" + std::to_string(b.ref_number) + ": " + format_binding(pts, b));
}

void Session::cmd_twine(const std::string& args) {
  for (const auto& segment : split_outside_quotes(args, ';')) {
    std::string seg = trim(segment);
    if (seg.empty()) continue;
    // Find the twine operator outside quotes.
    std::size_t op_pos = std::string::npos;
    char op = 0;
    bool quoted = false;
    for (std::size_t i = 0; i < seg.size(); ++i) {
      char c = seg[i];
      if (c == '"') quoted = !quoted;
      if (!quoted && (c == '>' || c == '<' || c == ':')) {
        op_pos = i;
        op = c;
        break;
      }
    }
    if (op_pos == std::string::npos) throw ParseError("? twine: missing operator: " + seg);
    std::string left = trim(seg.substr(0, op_pos));
    std::string right = trim(seg.substr(op_pos + 1));
    std::string tail;
    if (auto bar = right.find('|'); bar != std::string::npos) {
      tail = trim(right.substr(bar + 1));
      right = trim(right.substr(0, bar));
    }
    std::vector<PointRef> tail_refs;
    for (const auto& tok : comma_list(tail)) {
      PointRef r = parse_ref(tok);
      // A register in a twine tail captures its current value (rCTP -> m(now)).
      const Point& p = pts.at(r.id);
      if (p.is_register) {
        if (p.reg == Register::CTP)
          r.id = pts.time_point(engine.clock, true);
        else if (p.reg == Register::TCTX)
          r.id = pts.time_point(engine.twine_time, true);
        else
          throw ParseError("? twine: unsupported register in tail");
      }
      tail_refs.push_back(r);
    }

    auto make = [&](PointId owner, Variant variant, std::vector<PointRef> vals) {
      std::vector<PointRef> key{PointRef{owner, variant, false, false}};
      for (const auto& t : tail_refs) key.push_back(t);
      const Binding& b = store.add(std::move(key), std::move(vals));
      if (engine.trace_bind || engine.trace_twine)
        out(std::string(engine.trace_bind ? "bind: #" : "twine: #") +
            std::to_string(b.ref_number) + ": " + format_binding(pts, b));
    };

    if (op == '>') {
      // p > v1,v2,... : one value twine with the full value list.
      auto lhs = comma_list(left);
      if (lhs.size() != 1) throw ParseError("? twine: one owner expected before >");
      PointRef owner = parse_ref(lhs[0]);
      std::vector<PointRef> values;
      for (const auto& tok : comma_list(right)) values.push_back(parse_ref(tok));
      if (values.empty()) throw ParseError("? twine: value expected after >");
      make(owner.id, Variant::Value, std::move(values));
    } else if (op == '<') {
      // v1,v2 < o1,o2 : an is-a twine [o.i]=v per (v, o) pair.
      auto lhs = comma_list(left);
      auto rhs = comma_list(right);
      if (lhs.empty() || rhs.empty()) throw ParseError("? twine: points expected around <");
      for (const auto& otok : rhs) {
        PointRef owner = parse_ref(otok);
        for (const auto& vtok : lhs) make(owner.id, Variant::Isa, {parse_ref(vtok)});
      }
    } else {
      // p : q  ==  [p.v]=q and [q.i]=p
      auto lhs = comma_list(left);
      auto rhs = comma_list(right);
      if (lhs.size() != 1 || rhs.size() != 1)
        throw ParseError("? twine: single points expected around :");
      PointRef p = parse_ref(lhs[0]);
      PointRef q = parse_ref(rhs[0]);
      make(p.id, Variant::Value, {q});
      make(q.id, Variant::Isa, {p});
    }
  }
}

void Session::cmd_eval(const std::string& args) {
  std::string a = trim(args);
  if (a.empty()) throw ParseError("? eval: argument expected");

  auto print_result = [&](const std::vector<PointRef>& values) {
    std::string line = "    result =";
    for (const auto& v : values) line += ' ' + pts.format(v);
    out(line);
  };

  if (a[0] == '[') {
    std::size_t close = a.find(']');
    if (close == std::string::npos) throw ParseError("? eval: missing ]");
    std::vector<PointRef> key;
    for (const auto& tok : space_list(a.substr(1, close - 1))) key.push_back(parse_ref(tok));
    EvalOutcome r = engine.eval_key(key);
    if (r.ok())
      print_result(r.values);
    else
      out("? No result found");
    return;
  }

  PointRef ref = parse_ref(a);
  const Point& p = pts.at(ref.id);
  if (ref.variant == Variant::Base && p.is_opcode) {
    engine.exec_opcode(p.opcode, false);
    return;
  }
  if (ref.variant == Variant::Base && p.is_register) {
    PointId v = kNoPoint;
    switch (p.reg) {
      case Register::CTP: v = pts.time_point(engine.clock, true); break;
      case Register::TCTX: v = pts.time_point(engine.twine_time, true); break;
      case Register::NEW_: v = engine.r_new; break;
      case Register::EVAL: v = engine.r_eval; break;
      case Register::WM1: v = engine.r_wm1; break;
      case Register::T: v = engine.r_t; break;
    }
    if (v == kNoPoint) {
      int opnum = 500 + static_cast<int>(p.reg) + 1;
      out("? Internal register (op=" + std::to_string(opnum) + ") has no value");
    } else {
      out("  Register " + p.label + " = " + pts.format(v));
    }
    return;
  }
  if (ref.variant == Variant::Value) {
    auto r = engine.eval_value_variant(ref.id);
    if (r.ok)
      print_result(r.values);
    else
      out("? No result found");
    return;
  }
  if (ref.variant == Variant::Isa) {
    Context ctx = engine.ps_context({&ref.id, 1});
    auto isa = eval_isa_all(pts, store, ctx, ref.id);
    if (isa.empty()) {
      out("? No result found");
    } else {
      std::string line = "    result =";
      for (PointId q : isa) line += ' ' + pts.format(q);
      out(line);
    }
    return;
  }
  if (p.is_surrogate) {
    auto res = engine.resolve_surrogate(ref.id);
    if (res)
      out("    " + pts.format(ref.id) + " resolves to " + pts.format(*res));
    else
      out("? " + pts.format(ref.id) + " is unresolved");
    return;
  }
  // Plain point: evaluate [p].
  std::vector<PointRef> key{ref};
  EvalOutcome r = engine.eval_key(key);
  if (r.ok())
    print_result(r.values);
  else
    out("? No result found");
}

void Session::cmd_ps(const std::string& args) {
  std::vector<PointRef> refs;
  for (const auto& tok : comma_list(args)) refs.push_back(parse_ref(tok));
  engine.load_ps(std::move(refs));
}

void Session::cmd_run(const std::string& args) {
  std::string a = trim(args);
  if (a.empty()) {
    engine.run();
    return;
  }
  PointRef ref = parse_ref(a);
  const Point& p = pts.at(ref.id);
  if (!p.is_opcode) throw ParseError("? run: opcode expected: " + a);
  bool force_trace = false;
  engine.exec_opcode(p.opcode, force_trace);
}

void Session::cmd_set(const std::string& args) {
  auto toks = space_list(lower(args));
  if (toks.size() == 2 && toks[0] == "autodef") {
    autodef = toks[1] == "on";
    return;
  }
  if (toks.size() == 1 && toks[0] == "newthought") {
    engine.exec_opcode(Opcode::NEWT, false);
    return;
  }
  throw ParseError("? set: unknown parameter: " + args);
}

void Session::cmd_show(const std::string& args) {
  std::string what = lower(trim(args));
  if (what == "ps") {
    out("ps: " + engine.format_ps());
    return;
  }
  if (what == "aggset" || what == "as") {
    if (engine.as.empty()) {
      out("aggset: *empty*");
    } else {
      std::string line = "aggset: ";
      for (std::size_t i = 0; i < engine.as.size(); ++i) {
        if (i) line += ", ";
        line += pts.format(engine.as[i]);
      }
      out(line);
    }
    return;
  }
  if (what == "tcs") {
    std::string line = "tcs: ";
    if (engine.tc.empty()) {
      line += "*empty*";
    } else {
      for (std::size_t i = 0; i < engine.tc.size(); ++i) {
        if (i) line += ", ";
        line += pts.format(engine.tc[i]);
      }
    }
    out(line);
    return;
  }
  if (what == "opcodes") {
    out("opcodes: " + engine.format_opcode_counts());
    return;
  }
  throw ParseError("? show: unknown target: " + args);
}

void Session::cmd_trace(const std::string& args) {
  auto toks = space_list(trim(args));
  if (toks.empty()) throw ParseError("? trace: argument expected");
  std::string what = toks[0];
  std::string lw = lower(what);
  if (lw == "off") {
    engine.trace_bind = engine.trace_eval = engine.trace_twine = engine.trace_reduce =
        false;
    trace_autodef = false;
    engine.trace_ops.clear();
    engine.trace_seq_prefixes.clear();
    return;
  }
  if (lw == "bind" || lw == "binding") {
    engine.trace_bind = true;
    return;
  }
  if (lw == "eval") {
    engine.trace_eval = true;
    return;
  }
  if (lw == "twine") {
    engine.trace_twine = true;
    return;
  }
  if (lw == "reduce") {
    engine.trace_reduce = true;
    return;
  }
  if (lw == "autodef") {
    trace_autodef = true;
    return;
  }
  if (lw == "sequence" && toks.size() >= 2) {
    engine.trace_seq_prefixes.push_back(toks[1]);
    return;
  }
  if (what.rfind("op", 0) == 0) {
    engine.trace_ops.insert(what);
    return;
  }
  throw ParseError("? trace: unknown target: " + args);
}

void Session::feed_line(const std::string& physical_line) {
  std::string line = physical_line;
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.pop_back();
  if (echo) out(line);

  // Strip /* ... */ comments, tracking spans across lines.
  std::string stripped;
  std::size_t i = 0;
  while (i < line.size()) {
    if (in_comment_) {
      if (auto e = line.find("*/", i); e != std::string::npos) {
        in_comment_ = false;
        i = e + 2;
      } else {
        i = line.size();
      }
      continue;
    }
    if (line.compare(i, 2, "/*") == 0) {
      in_comment_ = true;
      i += 2;
      continue;
    }
    stripped += line[i++];
  }

  bool continuation =
      !stripped.empty() && std::isspace(static_cast<unsigned char>(stripped[0])) != 0 &&
      have_pending_;
  if (continuation) {
    pending_ += " " + trim(stripped);
    return;
  }
  if (have_pending_) {
    std::string cmd = pending_;
    pending_.clear();
    have_pending_ = false;
    execute(cmd);
  }
  std::string t = trim(stripped);
  if (!t.empty()) {
    pending_ = t;
    have_pending_ = true;
  }
}

void Session::finish() {
  if (have_pending_) {
    std::string cmd = pending_;
    pending_.clear();
    have_pending_ = false;
    execute(cmd);
  }
}

bool Session::run_stream(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    feed_line(line);
    if (strict && had_error_) return false;
  }
  finish();
  return !(strict && had_error_);
}

bool Session::run_text(const std::string& text) {
  std::istringstream in(text);
  return run_stream(in);
}

ScriptResult run_script_file(const std::string& path, bool strict) {
  ScriptResult result;
  std::ifstream in(path);
  if (!in) {
    result.transcript = "? cannot open script: " + path + "\n";
    return result;
  }
  Session s;
  s.strict = strict;
  std::string transcript;
  s.sink = [&](const std::string& line) {
    transcript += line;
    transcript += '\n';
  };
  bool ok = s.run_stream(in);
  result.transcript = std::move(transcript);
  result.ok = ok;
  return result;
}

int repl(std::istream& in, std::ostream& os) {
  Session s;
  s.echo = false;
  s.sink = [&](const std::string& line) { os << line << "\n"; };
  std::string line;
  os << "V5> " << std::flush;
  while (std::getline(in, line)) {
    // REPL lines execute immediately; no continuation buffering.
    s.feed_line(line);
    s.finish();
    os << "V5> " << std::flush;
  }
  os << "\n";
  return 0;
}

}  // namespace cem::interp
