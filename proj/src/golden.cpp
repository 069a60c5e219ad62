#include "cem/golden.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "cem/interp.hpp"

namespace cem::gold {

namespace {

bool is_hex(char c) {
  return std::isdigit(static_cast<unsigned char>(c)) || (c >= 'a' && c <= 'f');
}

struct Renamer {
  std::map<std::string, std::string> map;
  std::map<std::string, std::string> reverse;
  int next = 0;

  std::string rename(const std::string& raw, const std::string& prefix,
                     const std::string& suffix) {
    auto it = map.find(raw);
    if (it != map.end()) return it->second;
    std::string canon = prefix + std::to_string(++next) + suffix;
    if (auto rit = reverse.find(canon); rit != reverse.end() && rit->second != raw)
      throw std::runtime_error("normalization collision on " + canon);
    map[raw] = canon;
    reverse[canon] = raw;
    return canon;
  }
};

}  // namespace

std::string normalize(const std::string& transcript) {
  Renamer ids;  // #hex and #hex?
  std::map<std::string, Renamer> stamps;  // one counter per stamp prefix
  Renamer thoughts;

  std::string out;
  std::size_t i = 0;
  const std::size_t n = transcript.size();
  auto starts = [&](const char* s) {
    return transcript.compare(i, std::strlen(s), s) == 0;
  };
  while (i < n) {
    char c = transcript[i];
    if (c == '#') {
      std::size_t j = i + 1;
      while (j < n && is_hex(transcript[j])) ++j;
      if (j > i + 1) {
        bool sur = j < n && transcript[j] == '?';
        std::string raw = transcript.substr(i, j - i + (sur ? 1 : 0));
        out += ids.rename(raw, sur ? "#S" : "#P", sur ? "?" : "");
        i = j + (sur ? 1 : 0);
        continue;
      }
    }
    if (starts("*T*(")) {
      std::size_t j = transcript.find(')', i);
      if (j != std::string::npos) {
        out += thoughts.rename(transcript.substr(i, j - i + 1), "*T*(t", ")");
        i = j + 1;
        continue;
      }
    }
    for (const char* prefix : {"PQ(", "m(", "rCTP(", "*CTP*("}) {
      if (starts(prefix)) {
        std::size_t start = i + std::strlen(prefix);
        std::size_t j = start;
        while (j < n && std::isdigit(static_cast<unsigned char>(transcript[j]))) ++j;
        if (j > start && j < n && transcript[j] == ')') {
          std::string raw = transcript.substr(i, j - i + 1);
          out += stamps[prefix].rename(raw, std::string(prefix) + "@", ")");
          i = j + 1;
          goto next_char;
        }
      }
    }
    out += c;
    ++i;
  next_char:;
  }
  return out;
}

Diff compare(const std::string& golden_text, const std::string& actual_text) {
  Diff d;
  std::string g = normalize(golden_text);
  std::string a = normalize(actual_text);
  std::istringstream gs(g), as(a);
  std::string gl, al;
  int line = 0;
  for (;;) {
    bool gok = static_cast<bool>(std::getline(gs, gl));
    bool aok = static_cast<bool>(std::getline(as, al));
    ++line;
    if (!gok && !aok) {
      d.ok = true;
      return d;
    }
    if (gok != aok || gl != al) {
      d.line = line;
      d.expected = gok ? gl : "<end of golden>";
      d.actual = aok ? al : "<end of transcript>";
      return d;
    }
  }
}

std::string transcript_of(const std::filesystem::path& script) {
  auto result = interp::run_script_file(script.string());
  return result.transcript;
}

CaseResult run_case(const std::filesystem::path& script) {
  CaseResult res;
  res.name = script.stem().string();
  std::filesystem::path golden = script;
  golden.replace_extension(".golden.txt");
  std::ifstream gf(golden);
  if (!gf) {
    res.message = "missing golden: " + golden.string();
    return res;
  }
  std::stringstream gbuf;
  gbuf << gf.rdbuf();
  std::string actual = transcript_of(script);
  Diff d = compare(gbuf.str(), actual);
  if (d.ok) {
    res.pass = true;
    return res;
  }
  res.message = "line " + std::to_string(d.line) + ": expected \"" + d.expected +
                "\", got \"" + d.actual + "\"";
  return res;
}

int run_dir(const std::filesystem::path& dir, std::ostream& report) {
  std::vector<std::filesystem::path> scripts;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.path().extension() == ".v5") scripts.push_back(e.path());
  std::sort(scripts.begin(), scripts.end());
  int failures = 0;
  for (const auto& s : scripts) {
    CaseResult r = run_case(s);
    report << (r.pass ? "[PASS] " : "[FAIL] ") << r.name;
    if (!r.pass) {
      report << " — " << r.message;
      ++failures;
    }
    report << "\n";
  }
  if (scripts.empty()) {
    report << "no .v5 scripts under " << dir << "\n";
    return 1;
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace cem::gold
