#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace cem::gold {

// Canonicalizes volatile tokens so transcripts compare across sessions:
// #hex ids (and #hex? surrogates), *T*(n) indices, binding reference numbers
// and the absolute magnitudes in PQ(n)/m(n)/rCTP(n)/*CTP*(n). The per-token
// renaming is a bijection per transcript; normalize() throws on a collision.
std::string normalize(const std::string& transcript);

struct Diff {
  bool ok = false;
  int line = 0;  // first divergent line (1-based), 0 when ok
  std::string expected, actual;
};
Diff compare(const std::string& golden_text, const std::string& actual_text);

struct CaseResult {
  std::string name;
  bool pass = false;
  std::string message;
};

// Runs <script>.v5 and diffs its normalized transcript against the adjacent
// <script>.golden.txt.
CaseResult run_case(const std::filesystem::path& script);

// Runs every *.v5 under dir (sorted); returns 0 iff all pass.
int run_dir(const std::filesystem::path& dir, std::ostream& report);

// Raw transcript of a script run (unnormalized).
std::string transcript_of(const std::filesystem::path& script);

}  // namespace cem::gold
