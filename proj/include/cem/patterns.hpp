#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cem/binding.hpp"
#include "cem/points.hpp"

namespace cem {
class Engine;
}

namespace cem::pat {

struct Params {
  int min_points = 1;
  int min_occurs = 2;
  int max_iterations = 3;
};

struct Learned {
  std::vector<std::uint32_t> key;  // sorted
  int support = 0;                 // containment count over the original samples
};

struct LearnResult {
  std::vector<Learned> patterns;
  // Deduplicated intersection tally of the pass that produced the patterns
  // (Fig. 6b's "Times" column).
  std::map<std::vector<std::uint32_t>, int> tally;
  int passes = 0;
};

// §5.1: pairwise intersections, candidate tally, validation by direct recount
// over the ORIGINAL samples; re-runs on the intersected sets when no candidate
// validates.
LearnResult learn(const std::vector<std::vector<std::uint32_t>>& samples,
                  const Params& params);

// Engine-facing wrapper: bind each learned pattern key to a fresh point.
struct BoundPattern {
  PointId value = kNoPoint;
  std::vector<PointId> key;
  int support = 0;
};
std::vector<BoundPattern> learn_and_bind(PointTable& pts, BindingStore& store,
                                         const std::vector<std::vector<PointId>>& samples,
                                         const Params& params);

// §5.3: for key(sub) ⊂ key(main) create the double twine a_sub : a_main.
// Returns the created (sub, main) pairs.
std::vector<std::pair<PointId, PointId>> detect_embedded(
    PointTable& pts, BindingStore& store, std::span<const BoundPattern> patterns);

// §5.4: evaluate the null key set against the engine's full context; insert
// the recognized point's value variant into the PS. False when nothing fired.
bool recognize(Engine& eng);

// Eq. 8 encoder; one (frequency, magnitude) pair per bin. Empty optional when
// every magnitude is zero. Reading documented in the implementation.
std::optional<std::set<int>> encode_fft_frame(
    std::span<const std::pair<double, double>> bins);

struct MatchRateReport {
  int matches = 0;
  int frames = 0;
  int percent = 0;
  int patterns_learned = 0;
  std::string log;  // "N matches (P%)"
};
// Learns on train frames, then counts test frames whose code set triggers a
// recognition through the contextual evaluator.
MatchRateReport match_rate(const std::vector<std::vector<int>>& train_frames,
                           const std::vector<std::vector<int>>& test_frames,
                           const Params& params);

// Text formats: one sample per line, whitespace/comma separated integers,
// '{' '}' wrapping tolerated; '#' or item prefixes ignored.
std::vector<std::vector<std::uint32_t>> parse_sample_file(std::istream& in);

struct FftFile {
  std::string source;                   // the "!path" header
  std::vector<std::vector<int>> frames;
};
// Fig. 11 format: '!' header line, comma separated 4-digit codes, continuation
// lines join to the previous frame.
FftFile parse_fft_file(std::istream& in);

// §5.5 second pass: drop codes that occur only once across the file.
std::vector<std::vector<int>> drop_singleton_codes(
    const std::vector<std::vector<int>>& frames);

}  // namespace cem::pat
