#include <fstream>
#include <sstream>
#include <random>
#include <set>

#include "cem/engine.hpp"
#include "cem/patterns.hpp"
#include "doctest.h"

using namespace cem;
using pat::Params;

namespace {

std::vector<std::vector<std::uint32_t>> appendix_c() {
  std::ifstream in(std::string(CEM_DATA_DIR) + "/fixtures/appendix_c.txt");
  REQUIRE(in.good());
  return pat::parse_sample_file(in);
}

// Independent oracle: level-wise meet closure over std::set, first level with
// a validated member wins. Mirrors the §5.1 contract with none of the
// implementation's machinery.
std::set<std::set<std::uint32_t>> oracle_learn(
    const std::vector<std::vector<std::uint32_t>>& samples, const Params& p) {
  std::vector<std::set<std::uint32_t>> orig;
  for (const auto& s : samples) orig.emplace_back(s.begin(), s.end());
  std::set<std::set<std::uint32_t>> level;
  for (std::size_t i = 0; i < orig.size(); ++i)
    for (std::size_t j = i + 1; j < orig.size(); ++j) {
      std::set<std::uint32_t> meet;
      for (auto v : orig[i])
        if (orig[j].count(v)) meet.insert(v);
      if (static_cast<int>(meet.size()) >= p.min_points) level.insert(meet);
    }
  for (int pass = 1; pass <= p.max_iterations; ++pass) {
    std::set<std::set<std::uint32_t>> valid;
    for (const auto& cand : level) {
      int support = 0;
      for (const auto& s : orig) {
        bool sub = true;
        for (auto v : cand)
          if (!s.count(v)) {
            sub = false;
            break;
          }
        if (sub) ++support;
      }
      if (support >= p.min_occurs) valid.insert(cand);
    }
    if (!valid.empty() || level.empty()) return valid;
    std::set<std::set<std::uint32_t>> next;
    std::vector<std::set<std::uint32_t>> cur(level.begin(), level.end());
    for (std::size_t i = 0; i < cur.size(); ++i)
      for (std::size_t j = i + 1; j < cur.size(); ++j) {
        std::set<std::uint32_t> meet;
        for (auto v : cur[i])
          if (cur[j].count(v)) meet.insert(v);
        if (static_cast<int>(meet.size()) >= p.min_points) next.insert(meet);
      }
    level = std::move(next);
  }
  return {};
}

}  // namespace

TEST_CASE("Appendix C: one pattern, support 5, intersection tally 7") {
  auto samples = appendix_c();
  REQUIRE(samples.size() == 40);
  Params p{5, 5, 3};
  auto r = pat::learn(samples, p);
  REQUIRE(r.patterns.size() == 1);
  std::vector<std::uint32_t> expected{101, 211, 307, 401, 503, 601};
  CHECK(r.patterns[0].key == expected);
  CHECK(r.patterns[0].support == 5);
  REQUIRE(r.tally.count(expected) == 1);
  CHECK(r.tally.at(expected) == 7);  // Fig. 6b
  CHECK(r.passes == 1);
}

TEST_CASE("identical samples: the sample itself is the pattern") {
  std::vector<std::vector<std::uint32_t>> samples(5, {1, 2, 3, 4, 5});
  auto r = pat::learn(samples, Params{5, 5, 3});
  REQUIRE(r.patterns.size() == 1);
  CHECK(r.patterns[0].key == std::vector<std::uint32_t>{1, 2, 3, 4, 5});
  CHECK(r.patterns[0].support == 5);
}

TEST_CASE("below threshold: no pattern") {
  std::vector<std::vector<std::uint32_t>> samples(3, {1, 2, 3, 4, 5});
  auto r = pat::learn(samples, Params{5, 5, 3});
  CHECK(r.patterns.empty());
}

TEST_CASE("oracle equivalence on random instances") {
  std::mt19937 rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<int> nsamp(4, 15), npt(5, 25), len(3, 12);
    int universe = npt(rng);
    int count = nsamp(rng);
    std::vector<std::vector<std::uint32_t>> samples;
    for (int i = 0; i < count; ++i) {
      std::set<std::uint32_t> s;
      int l = len(rng);
      for (int k = 0; k < l; ++k)
        s.insert(static_cast<std::uint32_t>(rng() % universe));
      samples.emplace_back(s.begin(), s.end());
    }
    Params p;
    p.min_points = 2 + static_cast<int>(rng() % 3);
    p.min_occurs = 2 + static_cast<int>(rng() % 2);
    p.max_iterations = 3;

    auto got = pat::learn(samples, p);
    auto want = oracle_learn(samples, p);
    std::set<std::set<std::uint32_t>> got_keys;
    for (const auto& g : got.patterns)
      got_keys.insert(std::set<std::uint32_t>(g.key.begin(), g.key.end()));
    CHECK(got_keys == want);

    // Soundness: both §5.1 conditions hold by recount.
    for (const auto& g : got.patterns) {
      CHECK(static_cast<int>(g.key.size()) >= p.min_points);
      CHECK(g.support >= p.min_occurs);
    }
  }
}

TEST_CASE("sample order never changes the result") {
  auto samples = appendix_c();
  Params p{5, 5, 3};
  auto base = pat::learn(samples, p);
  std::mt19937 rng(3);
  std::shuffle(samples.begin(), samples.end(), rng);
  auto shuffled = pat::learn(samples, p);
  REQUIRE(base.patterns.size() == shuffled.patterns.size());
  CHECK(base.patterns[0].key == shuffled.patterns[0].key);
  CHECK(base.patterns[0].support == shuffled.patterns[0].support);
}

TEST_CASE("containment tally covers support*(support-1)/2 pairs") {
  auto samples = appendix_c();
  Params p{5, 5, 3};
  auto r = pat::learn(samples, p);
  REQUIRE(r.patterns.size() == 1);
  const auto& key = r.patterns[0].key;
  int containing = 0;
  for (const auto& [set_, n] : r.tally) {
    bool super = std::includes(set_.begin(), set_.end(), key.begin(), key.end());
    if (super) containing += n;
  }
  int n = r.patterns[0].support;
  CHECK(containing >= n * (n - 1) / 2);
  CHECK(containing == 10);  // the paper's final count
}

TEST_CASE("embedded patterns create the double twine") {
  PointTable pts;
  BindingStore store;
  std::vector<PointId> u;
  for (int i = 0; i < 8; ++i) u.push_back(pts.make("s" + std::to_string(i)));

  std::vector<pat::BoundPattern> bound(2);
  bound[0].value = pts.make("a_sub");
  bound[0].key = {u[0], u[1]};
  bound[1].value = pts.make("a_main");
  bound[1].key = {u[0], u[1], u[2], u[3]};
  auto made = pat::detect_embedded(pts, store, bound);
  REQUIRE(made.size() == 1);
  CHECK(made[0].first == bound[0].value);
  CHECK(made[0].second == bound[1].value);
  // [a_sub.v] = a_main and [a_main.i] = a_sub exist.
  PointRef vq{bound[0].value, Variant::Value, false, false};
  auto hit = eval_simple(store, std::span<const PointRef>(&vq, 1));
  REQUIRE(hit.ok());
  CHECK(hit.values[0].id == bound[1].value);

  // Disjoint keys: nothing.
  std::vector<pat::BoundPattern> disjoint(2);
  disjoint[0].value = pts.make("x1");
  disjoint[0].key = {u[4]};
  disjoint[1].value = pts.make("x2");
  disjoint[1].key = {u[5], u[6]};
  CHECK(pat::detect_embedded(pts, store, disjoint).empty());
}

TEST_CASE("recognition inserts the value variant and never removes PS points") {
  PointTable pts;
  BindingStore store;
  Engine eng(pts, store);
  eng.out = [](const std::string&) {};
  PointId w1 = pts.make("w1"), w2 = pts.make("w2"), w3 = pts.make("w3");
  PointId word = pts.make("word");
  store.add({base_ref(w1), base_ref(w2), base_ref(w3)}, {base_ref(word)});

  eng.load_ps({base_ref(w1), base_ref(w2), base_ref(w3)});
  std::size_t before = eng.ps.size();
  REQUIRE(pat::recognize(eng));
  CHECK(eng.ps.size() == before + 1);
  CHECK(eng.ps[0].ref.id == word);
  CHECK(eng.ps[0].ref.variant == Variant::Value);

  // Focus gating: a pattern keyed on an absent focus point does not fire.
  PointTable pts2;
  BindingStore store2;
  Engine eng2(pts2, store2);
  eng2.out = [](const std::string&) {};
  PointId f_v = pts2.make("f_v"), v1 = pts2.make("v1"), obj = pts2.make("o_v");
  store2.add({base_ref(f_v), base_ref(v1)}, {base_ref(obj)});
  eng2.load_ps({base_ref(v1)});
  CHECK_FALSE(pat::recognize(eng2));
}

TEST_CASE("fft frame encoding: documented reading, frozen fixture") {
  // Two-tone synthetic spectrum; expected codes computed once with the
  // documented formula and frozen here.
  std::vector<std::pair<double, double>> bins{
      {100.0, 5.0}, {250.0, 10.0}, {1000.0, 2.5}, {4000.0, 0.5}, {8000.0, 0.0}};
  auto codes = pat::encode_fft_frame(bins);
  REQUIRE(codes.has_value());
  std::set<int> expected{2024, 2427, 3021, 3614};
  CHECK(*codes == expected);

  // Decode shape: code = f*100 + m.
  for (int c : *codes) {
    CHECK(c / 100 <= 99);
    CHECK(c % 100 <= 99);
  }

  // All-zero magnitudes: EmptyFrame.
  std::vector<std::pair<double, double>> zeros{{100.0, 0.0}, {200.0, 0.0}};
  CHECK_FALSE(pat::encode_fft_frame(zeros).has_value());
}

TEST_CASE("match rate: self-match is 100%, disjoint universes 0%") {
  std::vector<std::vector<int>> train;
  for (int i = 0; i < 6; ++i) {
    std::vector<int> frame{1906, 2507, 2608, 3106, 3207};
    frame.push_back(5000 + i);  // per-frame noise
    train.push_back(frame);
  }
  Params p{4, 4, 3};
  auto self = pat::match_rate(train, train, p);
  CHECK(self.patterns_learned > 0);
  CHECK(self.percent == 100);

  std::vector<std::vector<int>> other(4, std::vector<int>{9901, 9902, 9903, 9904, 9905});
  auto cross = pat::match_rate(train, other, p);
  CHECK(cross.percent == 0);
  CHECK(cross.log == "0 matches (0%)");
}

TEST_CASE("fft file parsing joins wrapped lines; singleton pass drops one-offs") {
  std::istringstream in(
      "!\\fft\\samples\\see_ya.wav\n"
      "1906,2507,2608\n"
      "    2609,2709\n"
      "0006,2306\n");
  auto file = pat::parse_fft_file(in);
  CHECK(file.source == "\\fft\\samples\\see_ya.wav");
  REQUIRE(file.frames.size() == 2);
  CHECK(file.frames[0] == std::vector<int>{1906, 2507, 2608, 2609, 2709});
  CHECK(file.frames[1] == std::vector<int>{6, 2306});

  std::vector<std::vector<int>> frames{{1, 2, 3}, {2, 3, 4}, {3, 9}};
  auto filtered = pat::drop_singleton_codes(frames);
  CHECK(filtered[0] == std::vector<int>{2, 3});
  CHECK(filtered[1] == std::vector<int>{2, 3});
  CHECK(filtered[2] == std::vector<int>{3});
}
