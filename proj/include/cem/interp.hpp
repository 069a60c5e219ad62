#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "cem/engine.hpp"

namespace cem::interp {

// One V5 session: point table, binding store, engine and the command layer.
class Session {
 public:
  Session();

  PointTable pts;
  BindingStore store;
  Engine engine;

  bool autodef = false;
  bool strict = false;          // abort scripts on syntax errors
  bool trace_autodef = false;
  bool echo = true;             // echo fed lines into the transcript

  // Every transcript line (command echoes and output) goes through the sink.
  std::function<void(const std::string&)> sink = [](const std::string&) {};

  // Executes one logical command line (comments already stripped).
  // Returns false on a syntax/lookup error (already reported through sink).
  bool execute(const std::string& logical_line);

  // Script feed: physical lines; leading whitespace continues the previous
  // command; /* ... */ comments may span lines. Echoes each physical line.
  void feed_line(const std::string& physical_line);
  void finish();

  // Convenience: run a whole stream/script/text, returns false in strict mode
  // when a command failed.
  bool run_stream(std::istream& in);
  bool run_text(const std::string& text);

  bool had_error() const { return had_error_; }

 private:
  friend struct CommandParser;

  void out(const std::string& line) { sink(line); }

  void cmd_def(const std::string& args);
  void cmd_bind(const std::string& args);
  void cmd_twine(const std::string& args);
  void cmd_eval(const std::string& args);
  void cmd_ps(const std::string& args);
  void cmd_run(const std::string& args);
  void cmd_set(const std::string& args);
  void cmd_show(const std::string& args);
  void cmd_trace(const std::string& args);

  PointRef parse_ref(const std::string& token);
  PointId resolve_label(const std::string& label);

  std::string pending_;
  bool in_comment_ = false;
  bool have_pending_ = false;
  bool had_error_ = false;
};

// Reads a script file and returns its transcript (commands + outputs).
// IoError surfaces as a nonzero status with a message on the transcript.
struct ScriptResult {
  std::string transcript;
  bool ok = false;
};
ScriptResult run_script_file(const std::string& path, bool strict = false);

// Interactive REPL over stdin/stdout with a V5> prompt.
int repl(std::istream& in, std::ostream& os);

}  // namespace cem::interp
