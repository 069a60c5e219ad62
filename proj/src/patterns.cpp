#include "cem/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>
#include <unordered_map>

#include "cem/engine.hpp"
#include "cem/eval.hpp"

namespace cem::pat {

namespace {

std::vector<std::uint32_t> sorted_unique(std::vector<std::uint32_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

bool subset_of(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

LearnResult learn(const std::vector<std::vector<std::uint32_t>>& samples,
                  const Params& params) {
  LearnResult result;
  std::vector<std::vector<std::uint32_t>> original;
  original.reserve(samples.size());
  for (const auto& s : samples) original.push_back(sorted_unique(s));

  std::vector<std::vector<std::uint32_t>> current = original;
  for (int pass = 1; pass <= params.max_iterations; ++pass) {
    result.passes = pass;
    std::map<std::vector<std::uint32_t>, int> tally;
    for (std::size_t i = 0; i < current.size(); ++i) {
      for (std::size_t j = i + 1; j < current.size(); ++j) {
        std::vector<std::uint32_t> inter;
        std::set_intersection(current[i].begin(), current[i].end(), current[j].begin(),
                              current[j].end(), std::back_inserter(inter));
        if (static_cast<int>(inter.size()) >= params.min_points) ++tally[inter];
      }
    }
    if (tally.empty()) return result;

    // Validation recounts containment over the original samples.
    std::vector<Learned> found;
    for (const auto& [key, n] : tally) {
      int support = 0;
      for (const auto& s : original)
        if (subset_of(key, s)) ++support;
      if (support >= params.min_occurs) found.push_back(Learned{key, support});
    }
    if (!found.empty()) {
      result.patterns = std::move(found);
      result.tally = std::move(tally);
      return result;
    }
    current.clear();
    for (const auto& [key, n] : tally) current.push_back(key);
  }
  return result;
}

std::vector<BoundPattern> learn_and_bind(PointTable& pts, BindingStore& store,
                                         const std::vector<std::vector<PointId>>& samples,
                                         const Params& params) {
  std::vector<std::vector<std::uint32_t>> raw;
  raw.reserve(samples.size());
  for (const auto& s : samples) raw.emplace_back(s.begin(), s.end());
  LearnResult r = learn(raw, params);

  std::vector<BoundPattern> out;
  for (const auto& p : r.patterns) {
    BoundPattern bp;
    bp.value = pts.make_anonymous();
    bp.key.assign(p.key.begin(), p.key.end());
    bp.support = p.support;
    std::vector<PointRef> key;
    for (PointId id : bp.key) key.push_back(base_ref(id));
    store.add(std::move(key), {base_ref(bp.value)});
    out.push_back(std::move(bp));
  }
  return out;
}

std::vector<std::pair<PointId, PointId>> detect_embedded(
    PointTable& pts, BindingStore& store, std::span<const BoundPattern> patterns) {
  std::vector<std::pair<PointId, PointId>> out;
  for (const auto& sub : patterns) {
    for (const auto& main : patterns) {
      if (sub.value == main.value) continue;
      if (sub.key.size() >= main.key.size()) continue;
      std::vector<PointId> a = sub.key, b = main.key;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      if (!std::includes(b.begin(), b.end(), a.begin(), a.end())) continue;
      // a_sub : a_main  ==  [a_sub.v] = a_main and [a_main.i] = a_sub
      store.add({PointRef{sub.value, Variant::Value, false, false}},
                {base_ref(main.value)});
      store.add({PointRef{main.value, Variant::Isa, false, false}},
                {base_ref(sub.value)});
      out.emplace_back(sub.value, main.value);
    }
  }
  return out;
}

bool recognize(Engine& eng) {
  Context ctx = eng.ps_context();
  EvalOutcome r = eval_contextual(eng.pts, eng.store, ctx, {});
  if (!r.ok() || r.values.empty()) return false;
  eng.push_top(PointRef{r.values[0].id, Variant::Value, false, false});
  return true;
}

std::optional<std::set<int>> encode_fft_frame(
    std::span<const std::pair<double, double>> bins) {
  double total = 0;
  for (const auto& [f, mag] : bins)
    if (mag > 0) total += mag;
  if (total <= 0) return std::nullopt;

  // Documented reading of the paper's ambiguous formula:
  //   f_code = clamp(floor(10*log10(f) + 0.5), 0, 99)        (f >= 1, else 0)
  //   m_code = clamp(floor(10*(log10(1000*mag/total) + 0.05)), 0, 99)
  // code = f_code*100 + m_code; zero-magnitude bins are skipped.
  std::set<int> codes;
  for (const auto& [f, mag] : bins) {
    if (mag <= 0) continue;
    int fc = 0;
    if (f >= 1.0)
      fc = std::clamp(static_cast<int>(std::floor(10.0 * std::log10(f) + 0.5)), 0, 99);
    double m = 10.0 * (std::log10(1000.0 * mag / total) + 0.05);
    int mc = std::clamp(static_cast<int>(std::floor(m)), 0, 99);
    codes.insert(fc * 100 + mc);
  }
  return codes;
}

MatchRateReport match_rate(const std::vector<std::vector<int>>& train_frames,
                           const std::vector<std::vector<int>>& test_frames,
                           const Params& params) {
  MatchRateReport report;
  report.frames = static_cast<int>(test_frames.size());

  // Codes become points through a dictionary; patterns become bindings; a test
  // frame matches when the null key set evaluates against its context.
  PointTable pts;
  BindingStore store;
  std::unordered_map<int, PointId> dict;
  auto point_of = [&](int code) {
    auto it = dict.find(code);
    if (it != dict.end()) return it->second;
    PointId id = pts.make("c" + std::to_string(code), Kind::Sensory);
    dict[code] = id;
    return id;
  };

  std::vector<std::vector<PointId>> samples;
  for (const auto& f : train_frames) {
    std::vector<PointId> s;
    for (int c : f) s.push_back(point_of(c));
    samples.push_back(std::move(s));
  }
  auto patterns = learn_and_bind(pts, store, samples, params);
  report.patterns_learned = static_cast<int>(patterns.size());

  for (const auto& f : test_frames) {
    std::vector<PointId> explicits;
    for (int c : f) {
      auto it = dict.find(c);
      if (it != dict.end()) explicits.push_back(it->second);
    }
    Context ctx = expand_context(pts, store, explicits, 1);
    EvalOutcome r = eval_contextual(pts, store, ctx, {});
    if (r.ok()) ++report.matches;
  }
  report.percent =
      report.frames == 0
          ? 0
          : static_cast<int>(std::llround(100.0 * report.matches / report.frames));
  report.log = std::to_string(report.matches) + " matches (" +
               std::to_string(report.percent) + "%)";
  return report;
}

std::vector<std::vector<std::uint32_t>> parse_sample_file(std::istream& in) {
  std::vector<std::vector<std::uint32_t>> out;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::uint32_t> row;
    std::string num;
    for (char c : line) {
      if (std::isdigit(static_cast<unsigned char>(c))) {
        num += c;
      } else {
        if (!num.empty()) {
          row.push_back(static_cast<std::uint32_t>(std::stoul(num)));
          num.clear();
        }
      }
    }
    if (!num.empty()) row.push_back(static_cast<std::uint32_t>(std::stoul(num)));
    if (!row.empty()) out.push_back(std::move(row));
  }
  return out;
}

FftFile parse_fft_file(std::istream& in) {
  FftFile file;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '!') {
      file.source = line.substr(1);
      continue;
    }
    bool continuation = std::isspace(static_cast<unsigned char>(line[0])) != 0;
    if (!continuation || file.frames.empty()) file.frames.emplace_back();
    auto& frame = file.frames.back();
    std::string num;
    for (char c : line) {
      if (std::isdigit(static_cast<unsigned char>(c))) {
        num += c;
      } else {
        if (!num.empty()) {
          frame.push_back(std::stoi(num));
          num.clear();
        }
      }
    }
    if (!num.empty()) frame.push_back(std::stoi(num));
  }
  return file;
}

std::vector<std::vector<int>> drop_singleton_codes(
    const std::vector<std::vector<int>>& frames) {
  std::unordered_map<int, int> counts;
  for (const auto& f : frames)
    for (int c : f) ++counts[c];
  std::vector<std::vector<int>> out;
  for (const auto& f : frames) {
    std::vector<int> kept;
    for (int c : f)
      if (counts[c] > 1) kept.push_back(c);
    out.push_back(std::move(kept));
  }
  return out;
}

}  // namespace cem::pat
