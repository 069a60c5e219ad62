#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cem/binding.hpp"
#include "cem/points.hpp"

namespace cem::mot {

// splitmix64: portable, seed-deterministic across platforms.
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform() { return (next() >> 11) * (1.0 / 9007199254740992.0); }
};

// Eq. 9: Σ, its smoothed average and their difference.
struct Tally {
  double s = 0.1;  // smoothing factor
  std::int64_t sigma = 0;
  double sigma_bar = 0.0;
  double delta = 0.0;

  void update(std::int64_t sigma_now) {
    sigma = sigma_now;
    sigma_bar = s * static_cast<double>(sigma) + (1.0 - s) * sigma_bar;
    delta = static_cast<double>(sigma) - sigma_bar;
  }
};

// Σ over the valence-tagged points of a PS-like point list.
std::int64_t valence_sum(const PointTable& pts, std::span<const PointId> ids);

// Scan period multiplier, monotone increasing in Σ: base * 2^(sigma/k).
double clock_period(std::int64_t sigma, double base = 1.0, double k = 4.0);

enum class Action : std::uint8_t { Left, Straight, Right };

struct SeekerConfig {
  double theta = 10.0;        // turn increment, degrees
  double step = 1.0;
  double start_x = 0.0, start_y = 0.0, start_heading = 0.0;
  double target_x = 12.0, target_y = 8.0;
  double smoothing = 0.1;
  int sensor_strength = 3;    // plus points injected per aligned sensor
};

struct SeekerState {
  double x = 0, y = 0, heading = 0;
  Action prior = Action::Straight;
  Tally tally;
};

// Fig. 7 sensor fan: offsets within ±45°, denser toward the center.
std::span<const double> seeker_sensor_offsets();

int seeker_aligned_sensors(const SeekerState& st, const SeekerConfig& cfg);
Action seeker_decide(double delta, Action prior, Rng& rng);
void step_seeker(SeekerState& st, const SeekerConfig& cfg, Rng& rng);

struct PenConfig {
  double size = 40.0;        // square pen, [0,size]^2
  double proximity = 3.0;
  double step = 1.0;
  double jitter = 10.0;      // random heading change per step, degrees
  double smoothing = 0.1;
  bool learning = false;
};

// The pen intity senses through an actual binding store: proximity points are
// neutral, contact injects a pain point, and with learning on a negative Δ
// binds the neutral points present to a recognition pain point.
struct PenState {
  PenState();
  double x = 20, y = 20, heading = 90;
  Tally tally;
  int hits = 0;
  PointTable pts;
  BindingStore store;
  PointId prox[4];   // N E S W proximity sense points
  PointId pain;      // contact pain (minus)
  PointId pain_rec;  // learned recognition point (minus)
};

struct StepEvent {
  bool hit = false;
  bool reversed = false;
  bool learned = false;
};
StepEvent step_pen(PenState& st, const PenConfig& cfg, Rng& rng);

struct SimConfig {
  enum class World { Seeker, Pen } world = World::Seeker;
  std::uint64_t seed = 1;
  int steps = 5000;
  SeekerConfig seeker;
  PenConfig pen;
};

struct SimRow {
  int step;
  double x, y, heading;
  std::int64_t sigma;
  double sigma_bar, delta;
  std::string event;
};

std::vector<SimRow> run_sim(const SimConfig& cfg);
void write_csv(std::ostream& out, const std::vector<SimRow>& rows);

}  // namespace cem::mot
