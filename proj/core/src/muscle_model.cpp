#include "muvsim/muscle_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "json_codec.hpp"
#include "muvsim/errors.hpp"

namespace muvsim {

namespace {

constexpr int kMaxResamples = 10000;

void check_range(Range r, const char* what) {
  if (!(std::isfinite(r.lo) && std::isfinite(r.hi)) || r.lo > r.hi) {
    std::ostringstream msg;
    msg << what << ": invalid range [" << r.lo << ", " << r.hi << "]";
    throw ParameterError(msg.str());
  }
}

struct Candidate {
  double t;
  bool synced;
};

}  // namespace

FiringTrain sample_firing_train(Rng& rng, Range fr_range_hz, double duration_s,
                                const FiringOptions& options) {
  check_range(fr_range_hz, "firing rate");
  if (fr_range_hz.lo <= 0.0) throw ParameterError("firing rate range must be positive");
  if (!(duration_s > 0.0)) throw ParameterError("duration must be positive");
  if (options.ipi_cv < 0.0 || options.refractory_s < 0.0) {
    throw ParameterError("IPI jitter and refractory floor must be nonnegative");
  }

  FiringTrain train;
  train.nominal_rate_hz = rng.uniform(fr_range_hz.lo, fr_range_hz.hi);
  const double period = 1.0 / train.nominal_rate_hz;
  const double sigma = options.ipi_cv * period;
  if (sigma == 0.0 && period < options.refractory_s) {
    throw ParameterError("firing period below refractory floor with jitter disabled");
  }

  const double first =
      options.first_firing_s >= 0.0 ? options.first_firing_s : rng.uniform(0.0, period);

  // t_n = first + n/FR + sum of jitters, so the zero-jitter case lands on
  // exact multiples of the period instead of accumulating rounding error.
  double jitter_sum = 0.0;
  for (std::int64_t n = 0;; ++n) {
    const double t = first + static_cast<double>(n) * period + jitter_sum;
    if (t >= duration_s) break;
    train.times_s.push_back(t);

    double jitter = 0.0;
    if (sigma > 0.0) {
      int tries = 0;
      do {
        if (++tries > kMaxResamples) {
          throw ParameterError("refractory floor rejects nearly every IPI draw");
        }
        jitter = rng.normal(0.0, sigma);
      } while (period + jitter < options.refractory_s);
    }
    jitter_sum += jitter;
  }
  return train;
}

SyncOutcome apply_synchronization(const std::vector<FiringTrain>& trains, double sync_fraction,
                                  Rng& rng, double duration_s, double refractory_s,
                                  double jitter_s) {
  if (!(sync_fraction >= 0.0 && sync_fraction <= kMaxSyncFraction)) {
    throw ParameterError("sync fraction must lie in [0, 0.10]");
  }
  SyncOutcome out;
  out.trains = trains;
  if (sync_fraction == 0.0) return out;
  if (trains.size() < 2) {
    out.single_train_noop = true;
    return out;
  }

  // Draw every decision first, then place: a moved firing anchors on the
  // nearest firing of its target unit that is itself staying put, so it never
  // lands on a spot its partner is about to leave.
  struct Move {
    bool selected = false;
    std::size_t target = 0;
    double jitter = 0.0;
  };
  const auto n_units = static_cast<std::int64_t>(trains.size());
  std::vector<std::vector<Move>> moves(trains.size());
  for (std::int64_t u = 0; u < n_units; ++u) {
    moves[u].resize(trains[u].times_s.size());
    for (auto& m : moves[u]) {
      if (!rng.bernoulli(sync_fraction)) continue;
      std::int64_t v = rng.uniform_int(0, n_units - 2);
      if (v >= u) ++v;
      m = {true, static_cast<std::size_t>(v), rng.normal(0.0, jitter_s)};
    }
  }
  std::vector<std::vector<double>> anchors(trains.size());
  for (std::size_t v = 0; v < trains.size(); ++v) {
    for (std::size_t k = 0; k < trains[v].times_s.size(); ++k) {
      if (!moves[v][k].selected) anchors[v].push_back(trains[v].times_s[k]);
    }
  }

  for (std::int64_t u = 0; u < n_units; ++u) {
    std::vector<Candidate> candidates;
    candidates.reserve(trains[u].times_s.size());
    for (std::size_t k = 0; k < trains[u].times_s.size(); ++k) {
      const double t = trains[u].times_s[k];
      Candidate c{t, false};
      const Move& m = moves[u][k];
      const auto& target = anchors[m.target];
      if (m.selected && !target.empty()) {
        auto it = std::lower_bound(target.begin(), target.end(), t);
        double nearest;
        if (it == target.end()) {
          nearest = target.back();
        } else if (it == target.begin()) {
          nearest = *it;
        } else {
          nearest = (*it - t) < (t - *std::prev(it)) ? *it : *std::prev(it);
        }
        const double moved = nearest + m.jitter;
        if (moved >= 0.0 && moved < duration_s) c = {moved, true};
      }
      candidates.push_back(c);
    }

    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return a.t < b.t; });

    // Re-enforce the refractory floor; in a conflict the synchronized firing wins.
    std::vector<Candidate> kept;
    kept.reserve(candidates.size());
    for (const auto& c : candidates) {
      if (kept.empty()) {
        kept.push_back(c);
        continue;
      }
      const double gap = c.t - kept.back().t;
      if (gap >= refractory_s && gap > 0.0) {
        kept.push_back(c);
      } else if (c.synced && !kept.back().synced) {
        kept.back() = c;
      }
    }

    auto& times = out.trains[u].times_s;
    times.clear();
    for (const auto& c : kept) {
      times.push_back(c.t);
      if (c.synced) ++out.moved;
    }
  }
  return out;
}

Territory sample_territory(Rng& rng, double fov_width_mm, double fov_height_mm,
                           Range diameter_mm) {
  check_range(diameter_mm, "territory diameter");
  if (diameter_mm.lo < 0.0) throw ParameterError("territory diameter must be nonnegative");
  if (diameter_mm.hi > std::min(fov_width_mm, fov_height_mm)) {
    throw ParameterError("territory diameter range exceeds the field of view");
  }
  Territory t;
  t.diameter_mm = rng.uniform(diameter_mm.lo, diameter_mm.hi);
  const double r = 0.5 * t.diameter_mm;
  t.center.x_mm = rng.uniform(r, fov_width_mm - r);
  t.center.y_mm = rng.uniform(r, fov_height_mm - r);
  return t;
}

double twitch_velocity(double t_s, const TwitchParams& p) {
  if (t_s < 0.0) return 0.0;
  const double x = t_s / p.contraction_time_s;
  return (p.peak_displacement / p.contraction_time_s) * std::exp(1.0 - x) * (1.0 - x);
}

double twitch_displacement(double t_s, const TwitchParams& p) {
  if (t_s < 0.0) return 0.0;
  const double x = t_s / p.contraction_time_s;
  return p.peak_displacement * x * std::exp(1.0 - x);
}

int sample_unit_count(Rng& rng, int lo, int hi) {
  if (lo < 1 || hi < lo) throw ParameterError("unit count range must satisfy 1 <= lo <= hi");
  return static_cast<int>(rng.uniform_int(lo, hi));
}

MuscleScene build_scene(Rng& rng, int n_units, const MuscleConfig& config) {
  if (n_units < 1) throw ParameterError("a scene needs at least one motor unit");
  check_range(config.peak_displacement, "peak displacement");
  check_range(config.contraction_time_s, "contraction time");
  check_range(config.sync_fraction, "sync fraction");
  if (config.peak_displacement.lo <= 0.0) throw ParameterError("peak displacement must be > 0");
  if (config.contraction_time_s.lo <= 0.0) throw ParameterError("contraction time must be > 0");
  if (config.sync_fraction.lo < 0.0 || config.sync_fraction.hi > kMaxSyncFraction) {
    throw ParameterError("sync fraction range must lie in [0, 0.10]");
  }

  MuscleScene scene;
  scene.fov_width_mm = config.fov_width_mm;
  scene.fov_height_mm = config.fov_height_mm;
  scene.duration_s = config.duration_s;
  Rng scene_rng = rng.fork(1);
  scene.sync_fraction = scene_rng.uniform(config.sync_fraction.lo, config.sync_fraction.hi);

  std::vector<FiringTrain> trains;
  trains.reserve(static_cast<std::size_t>(n_units));
  for (int i = 0; i < n_units; ++i) {
    const Rng unit_rng = rng.fork(1000 + static_cast<std::uint64_t>(i));
    Rng territory_rng = unit_rng.fork(1);
    Rng twitch_rng = unit_rng.fork(2);
    Rng firing_rng = unit_rng.fork(3);

    MotorUnitSpec unit;
    unit.id = i;
    const Territory territory =
        sample_territory(territory_rng, config.fov_width_mm, config.fov_height_mm,
                         config.diameter_mm);
    unit.center = territory.center;
    unit.diameter_mm = territory.diameter_mm;

    if (config.amplitude_mode == AmplitudeMode::size_principle) {
      const double span = config.diameter_mm.width();
      const double frac = span > 0.0 ? (unit.diameter_mm - config.diameter_mm.lo) / span : 0.5;
      unit.twitch.peak_displacement =
          config.peak_displacement.lo + frac * config.peak_displacement.width();
    } else {
      unit.twitch.peak_displacement =
          twitch_rng.uniform(config.peak_displacement.lo, config.peak_displacement.hi);
    }
    unit.twitch.contraction_time_s =
        twitch_rng.uniform(config.contraction_time_s.lo, config.contraction_time_s.hi);

    trains.push_back(
        sample_firing_train(firing_rng, config.firing_rate_hz, config.duration_s, config.firing));
    scene.units.push_back(std::move(unit));
  }

  Rng sync_rng = rng.fork(2);
  auto synced = apply_synchronization(trains, scene.sync_fraction, sync_rng, config.duration_s,
                                      config.firing.refractory_s, config.sync_jitter_s);
  for (std::size_t i = 0; i < scene.units.size(); ++i) {
    scene.units[i].firing = std::move(synced.trains[i]);
  }
  return scene;
}

void validate_scene(const MuscleScene& scene, const MuscleConfig& config) {
  auto fail = [](const std::string& what) { throw ParameterError("invalid scene: " + what); };
  if (!(scene.sync_fraction >= 0.0 && scene.sync_fraction <= kMaxSyncFraction)) {
    fail("sync fraction outside [0, 0.10]");
  }
  std::set<int> ids;
  for (const auto& u : scene.units) {
    const std::string tag = "unit " + std::to_string(u.id) + ": ";
    if (!ids.insert(u.id).second) fail(tag + "duplicate id");
    if (!config.diameter_mm.contains(u.diameter_mm)) fail(tag + "diameter out of range");
    const double r = 0.5 * u.diameter_mm;
    constexpr double eps = 1e-9;
    if (u.center.x_mm - r < -eps || u.center.x_mm + r > scene.fov_width_mm + eps ||
        u.center.y_mm - r < -eps || u.center.y_mm + r > scene.fov_height_mm + eps) {
      fail(tag + "territory leaves the field of view");
    }
    if (!(u.twitch.peak_displacement > 0.0)) fail(tag + "nonpositive peak displacement");
    if (!config.contraction_time_s.contains(u.twitch.contraction_time_s)) {
      fail(tag + "contraction time out of range");
    }
    if (!config.firing_rate_hz.contains(u.firing.nominal_rate_hz)) {
      fail(tag + "nominal rate out of range");
    }
    const auto& t = u.firing.times_s;
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (t[k] < 0.0 || t[k] >= scene.duration_s) fail(tag + "firing outside the sequence");
      if (k > 0 && !(t[k] - t[k - 1] >= config.firing.refractory_s && t[k] > t[k - 1])) {
        fail(tag + "refractory floor violated");
      }
    }
  }
}

namespace detail {

Json scene_to_document(const MuscleScene& scene) {
  Json doc;
  doc["fov_mm"] = {scene.fov_width_mm, scene.fov_height_mm};
  doc["duration_s"] = scene.duration_s;
  doc["sync_fraction"] = scene.sync_fraction;
  Json units = Json::array();
  for (const auto& u : scene.units) {
    Json ju;
    ju["id"] = u.id;
    ju["center_mm"] = {u.center.x_mm, u.center.y_mm};
    ju["diameter_mm"] = u.diameter_mm;
    ju["twitch"] = {{"peak_displacement", u.twitch.peak_displacement},
                    {"contraction_time_s", u.twitch.contraction_time_s}};
    ju["firing"] = {{"nominal_rate_hz", u.firing.nominal_rate_hz},
                    {"times_s", u.firing.times_s}};
    units.push_back(std::move(ju));
  }
  doc["units"] = std::move(units);
  return doc;
}

MuscleScene scene_from_document(const Json& doc) {
  try {
    MuscleScene scene;
    scene.fov_width_mm = doc.at("fov_mm").at(0).get<double>();
    scene.fov_height_mm = doc.at("fov_mm").at(1).get<double>();
    scene.duration_s = doc.at("duration_s").get<double>();
    scene.sync_fraction = doc.at("sync_fraction").get<double>();
    for (const auto& ju : doc.at("units")) {
      MotorUnitSpec u;
      u.id = ju.at("id").get<int>();
      u.center = {ju.at("center_mm").at(0).get<double>(), ju.at("center_mm").at(1).get<double>()};
      u.diameter_mm = ju.at("diameter_mm").get<double>();
      u.twitch.peak_displacement = ju.at("twitch").at("peak_displacement").get<double>();
      u.twitch.contraction_time_s = ju.at("twitch").at("contraction_time_s").get<double>();
      u.firing.nominal_rate_hz = ju.at("firing").at("nominal_rate_hz").get<double>();
      u.firing.times_s = ju.at("firing").at("times_s").get<std::vector<double>>();
      scene.units.push_back(std::move(u));
    }
    return scene;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed scene document: ") + e.what());
  }
}

Json db_to_json(double db) {
  if (std::isinf(db) && db > 0) return "inf";
  return db;
}

double db_from_json(const Json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    throw FormatError("noise level must be a number or \"inf\"");
  }
  if (!j.is_number()) throw FormatError("noise level must be a number or \"inf\"");
  return j.get<double>();
}

}  // namespace detail

std::string scene_to_json(const MuscleScene& scene, int indent) {
  return detail::scene_to_document(scene).dump(indent);
}

MuscleScene scene_from_json(const std::string& text) {
  detail::Json doc;
  try {
    doc = detail::Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("scene is not valid JSON: ") + e.what());
  }
  return detail::scene_from_document(doc);
}

}  // namespace muvsim
