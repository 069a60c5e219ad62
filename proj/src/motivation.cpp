#include "cem/motivation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "cem/eval.hpp"

namespace cem::mot {

namespace {

constexpr double kPi = 3.14159265358979323846;

double wrap_deg(double a) {
  while (a > 180.0) a -= 360.0;
  while (a < -180.0) a += 360.0;
  return a;
}

constexpr std::array<double, 21> kSensorOffsets = {
    -35.0, -25.0, -20.0, -15.0, -10.0, -7.5, -5.0, -4.0, -2.5, -1.0, 0.0,
    1.0,   2.5,   4.0,   5.0,   7.5,   10.0, 15.0, 20.0, 25.0, 35.0};

}  // namespace

std::int64_t valence_sum(const PointTable& pts, std::span<const PointId> ids) {
  std::int64_t sum = 0;
  for (PointId id : ids) {
    switch (pts.at(id).valence) {
      case Valence::Plus: ++sum; break;
      case Valence::Minus: --sum; break;
      case Valence::None: break;
    }
  }
  return sum;
}

double clock_period(std::int64_t sigma, double base, double k) {
  return base * std::pow(2.0, static_cast<double>(sigma) / k);
}

std::span<const double> seeker_sensor_offsets() { return kSensorOffsets; }

int seeker_aligned_sensors(const SeekerState& st, const SeekerConfig& cfg) {
  double bearing =
      std::atan2(cfg.target_y - st.y, cfg.target_x - st.x) * 180.0 / kPi;
  int aligned = 0;
  for (double off : kSensorOffsets)
    if (std::fabs(wrap_deg(bearing - (st.heading + off))) <= 1.0) ++aligned;
  return aligned;
}

Action seeker_decide(double delta, Action prior, Rng& rng) {
  if (delta < -5.0) {
    if (prior == Action::Left) return Action::Right;
    if (prior == Action::Right) return Action::Left;
    return rng.uniform() < 0.5 ? Action::Left : Action::Right;
  }
  if (delta > 5.0) return prior;
  double u = rng.uniform();
  if (u < 0.5) return Action::Left;
  if (u < 0.75) return Action::Right;
  return Action::Straight;
}

void step_seeker(SeekerState& st, const SeekerConfig& cfg, Rng& rng) {
  std::int64_t sigma =
      static_cast<std::int64_t>(cfg.sensor_strength) * seeker_aligned_sensors(st, cfg);
  st.tally.update(sigma);
  Action a = seeker_decide(st.tally.delta, st.prior, rng);
  if (a == Action::Left) st.heading += cfg.theta;
  if (a == Action::Right) st.heading -= cfg.theta;
  st.heading = wrap_deg(st.heading);
  st.x += cfg.step * std::cos(st.heading * kPi / 180.0);
  st.y += cfg.step * std::sin(st.heading * kPi / 180.0);
  st.prior = a;
}

PenState::PenState() {
  prox[0] = pts.make("proxN", Kind::Sensory);
  prox[1] = pts.make("proxE", Kind::Sensory);
  prox[2] = pts.make("proxS", Kind::Sensory);
  prox[3] = pts.make("proxW", Kind::Sensory);
  pain = pts.make("pain", Kind::Sensory);
  pts.at(pain).valence = Valence::Minus;
  pain_rec = pts.make("painRec");
  pts.at(pain_rec).valence = Valence::Minus;
}

StepEvent step_pen(PenState& st, const PenConfig& cfg, Rng& rng) {
  StepEvent ev;

  // Roam: random heading jitter, then a unit step clamped to the pen. Contact
  // with a wall is the painful jolt.
  st.heading = st.heading + cfg.jitter * (2.0 * rng.uniform() - 1.0);
  st.heading = wrap_deg(st.heading);
  double nx = st.x + cfg.step * std::cos(st.heading * kPi / 180.0);
  double ny = st.y + cfg.step * std::sin(st.heading * kPi / 180.0);
  bool contact = nx < 0 || nx > cfg.size || ny < 0 || ny > cfg.size;
  st.x = std::clamp(nx, 0.0, cfg.size);
  st.y = std::clamp(ny, 0.0, cfg.size);

  // Sensory points for this step.
  std::vector<PointId> ctx_pts;
  if (cfg.size - st.y < cfg.proximity) ctx_pts.push_back(st.prox[0]);
  if (cfg.size - st.x < cfg.proximity) ctx_pts.push_back(st.prox[1]);
  if (st.y < cfg.proximity) ctx_pts.push_back(st.prox[2]);
  if (st.x < cfg.proximity) ctx_pts.push_back(st.prox[3]);
  std::vector<PointId> neutral = ctx_pts;
  if (contact) {
    ctx_pts.push_back(st.pain);
    ++st.hits;
    ev.hit = true;
  }

  // Null key set evaluation; any result re-enters the context (§6.2).
  Context ctx = expand_context(st.pts, st.store, ctx_pts, 1);
  EvalOutcome r = eval_contextual(st.pts, st.store, ctx, {});
  if (r.ok())
    for (const auto& v : r.values) ctx_pts.push_back(v.id);

  st.tally.update(valence_sum(st.pts, ctx_pts));

  if (st.tally.sigma < 0) {
    st.heading = wrap_deg(st.heading + 180.0);
    ev.reversed = true;
  }

  // Learning: a negative Δ binds the neutral points present to a pain point.
  if (cfg.learning && st.tally.delta < 0 && !neutral.empty()) {
    std::vector<PointRef> key;
    for (PointId p : neutral) key.push_back(base_ref(p));
    if (!eval_simple(st.store, key).ok()) {
      st.store.add(std::move(key), {base_ref(st.pain_rec)});
      ev.learned = true;
    }
  }
  return ev;
}

std::vector<SimRow> run_sim(const SimConfig& cfg) {
  std::vector<SimRow> rows;
  Rng rng(cfg.seed);
  if (cfg.world == SimConfig::World::Seeker) {
    SeekerState st;
    st.x = cfg.seeker.start_x;
    st.y = cfg.seeker.start_y;
    st.heading = cfg.seeker.start_heading;
    st.tally.s = cfg.seeker.smoothing;
    for (int i = 0; i < cfg.steps; ++i) {
      step_seeker(st, cfg.seeker, rng);
      double dx = cfg.seeker.target_x - st.x, dy = cfg.seeker.target_y - st.y;
      bool reached = std::sqrt(dx * dx + dy * dy) < 1.0;
      rows.push_back(SimRow{i + 1, st.x, st.y, st.heading, st.tally.sigma,
                            st.tally.sigma_bar, st.tally.delta,
                            reached ? "target" : ""});
    }
  } else {
    PenState st;
    st.x = cfg.pen.size / 2;
    st.y = cfg.pen.size / 2;
    st.heading = 90.0;
    st.tally.s = cfg.pen.smoothing;
    for (int i = 0; i < cfg.steps; ++i) {
      StepEvent ev = step_pen(st, cfg.pen, rng);
      std::string event;
      if (ev.hit) event = "hit";
      else if (ev.reversed) event = "reverse";
      else if (ev.learned) event = "learn";
      rows.push_back(SimRow{i + 1, st.x, st.y, st.heading, st.tally.sigma,
                            st.tally.sigma_bar, st.tally.delta, event});
    }
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<SimRow>& rows) {
  out << "step,x,y,heading,sigma,sigma_bar,delta,event\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%.3f,%.3f,%.3f,%lld,%.6f,%.6f,%s\n", r.step,
                  r.x, r.y, r.heading, static_cast<long long>(r.sigma), r.sigma_bar,
                  r.delta, r.event.c_str());
    out << buf;
  }
}

}  // namespace cem::mot
