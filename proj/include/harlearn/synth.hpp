#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "harlearn/activity.hpp"
#include "harlearn/dataset.hpp"
#include "harlearn/rng.hpp"

namespace harlearn {

/// Desk-scale benchmark generator. Each subject performs the seven activities
/// in fixed order as one continuous 50 Hz stream per body position. Subjects
/// differ in pace, gain, orientation bias and phase; in addition every
/// subject performs one activity in a personal style halfway toward another
/// activity's signature, so user-independent models misread part of the
/// stream until personalization corrects it.
struct SynthParams {
  std::size_t included_subjects = 6;
  bool with_excluded_subject = true;   // extra subject flagged exclude in the manifest
  std::size_t windows_per_class = 28;  // drives segment length per activity
  double drift_mix_low = 0.25;         // drift sweeps between these two blends,
  double drift_mix_high = 0.85;        // crossing the ambiguity point of its pair
  double drift_sweep_period_s = 12.0;
  double drift_noise_boost = 1.6;
  double amp_wander = 0.07;            // slow within-segment amplitude modulation
  double rate_wander = 0.03;           // slow within-segment cadence modulation
  std::uint64_t seed = 20240801;
};

namespace synth_detail {

struct ActivityProfile {
  double freq;
  std::array<double, 3> acc_amp;
  std::array<double, 3> gyro_amp;
  std::array<double, 3> acc_bias;
  double noise;
  double harmonic;  // relative amplitude of the second harmonic
};

inline const std::array<ActivityProfile, kActivityCount>& base_profiles() {
  static const std::array<ActivityProfile, kActivityCount> profiles = {{
      // walking
      {2.00, {1.1, 0.7, 1.4}, {0.9, 1.1, 0.7}, {0.4, 0.2, 9.6}, 0.09, 0.50},
      // sitting
      {0.3, {0.05, 0.05, 0.06}, {0.03, 0.02, 0.03}, {0.3, 4.8, 8.4}, 0.04, 0.10},
      // standing
      {0.25, {0.08, 0.06, 0.07}, {0.04, 0.03, 0.03}, {0.1, 0.5, 9.75}, 0.05, 0.10},
      // jogging
      {3.50, {3.2, 2.3, 3.9}, {1.9, 2.3, 1.5}, {0.9, 0.5, 8.9}, 0.16, 0.55},
      // biking
      {0.95, {0.45, 0.85, 0.35}, {1.7, 0.5, 2.1}, {1.8, 3.4, 8.3}, 0.10, 0.20},
      // upstairs
      {1.35, {1.5, 2.1, 1.0}, {0.7, 1.8, 0.6}, {0.8, 1.9, 8.6}, 0.10, 0.60},
      // downstairs
      {2.70, {2.6, 1.0, 2.2}, {1.8, 0.8, 1.3}, {1.7, 0.5, 9.4}, 0.11, 0.25},
  }};
  return profiles;
}

/// (drifted activity, decoy signature) per subject index, cycled. Pairs are
/// adjacent in cadence so the blended signature falls between the two
/// classes rather than on top of a third one, and no two subjects drift into
/// the same inter-class gap from opposite sides (that would teach the pooled
/// model conflicting labels for the same region).
inline constexpr std::array<std::pair<ActivityClass, ActivityClass>, 6> kDriftPairs = {{
    {ActivityClass::jogging, ActivityClass::downstairs},
    {ActivityClass::upstairs, ActivityClass::walking},
    {ActivityClass::biking, ActivityClass::upstairs},
    {ActivityClass::downstairs, ActivityClass::walking},
    {ActivityClass::biking, ActivityClass::sitting},
    {ActivityClass::sitting, ActivityClass::standing},
}};

struct SubjectTraits {
  double rate;                      // cadence multiplier
  double gain;                      // overall amplitude multiplier
  std::array<double, 6> chan_gain;  // per-channel jitter
  std::array<double, 3> acc_bias_shift;
  std::array<double, 6> phase;
  ActivityClass drifted;
  ActivityClass decoy;
  // per-activity personal leans, as multipliers on amplitude and cadence
  std::array<double, kActivityCount> act_amp_lean;
  std::array<double, kActivityCount> act_rate_lean;
};

inline SubjectTraits subject_traits(std::size_t subject_index, std::uint64_t seed) {
  Rng rng(derive_seed(seed, {0x51, subject_index}));
  SubjectTraits t;
  t.rate = 0.95 + 0.10 * rng.uniform01();
  t.gain = 0.92 + 0.20 * rng.uniform01();
  for (auto& g : t.chan_gain) g = 0.91 + 0.18 * rng.uniform01();
  for (auto& b : t.acc_bias_shift) b = -0.30 + 0.60 * rng.uniform01();
  for (auto& p : t.phase) p = 2.0 * 3.14159265358979323846 * rng.uniform01();
  const auto& pair = kDriftPairs[subject_index % kDriftPairs.size()];
  t.drifted = pair.first;
  t.decoy = pair.second;
  for (auto& a : t.act_amp_lean) a = 0.86 + 0.28 * rng.uniform01();
  for (auto& r : t.act_rate_lean) r = 0.96 + 0.08 * rng.uniform01();
  return t;
}

struct PositionTraits {
  double acc_gain;
  double gyro_gain;
  double noise_gain;
  std::array<double, 3> bias_shift;
};

inline PositionTraits position_traits(BodyPosition p) {
  switch (p) {
    case BodyPosition::arm: return {1.10, 1.30, 1.05, {0.2, -0.3, -0.2}};
    case BodyPosition::waist: return {0.85, 0.70, 0.90, {0.0, 0.1, 0.1}};
    case BodyPosition::wrist: return {1.25, 1.45, 1.05, {-0.3, 0.4, -0.4}};
  }
  return {1.0, 1.0, 1.0, {0.0, 0.0, 0.0}};
}

inline ActivityProfile lerp(const ActivityProfile& a, const ActivityProfile& b,
                            double mix) {
  ActivityProfile out = a;
  auto m = [mix](double x, double y) { return (1.0 - mix) * x + mix * y; };
  out.freq = m(a.freq, b.freq);
  for (int i = 0; i < 3; ++i) {
    out.acc_amp[i] = m(a.acc_amp[i], b.acc_amp[i]);
    out.gyro_amp[i] = m(a.gyro_amp[i], b.gyro_amp[i]);
    out.acc_bias[i] = m(a.acc_bias[i], b.acc_bias[i]);
  }
  out.noise = m(a.noise, b.noise);
  out.harmonic = m(a.harmonic, b.harmonic);
  return out;
}

}  // namespace synth_detail

/// Generates the raw stream for one subject/position pair.
inline RawRecording synth_recording(std::size_t subject_index,
                                    const std::string& subject_id, BodyPosition position,
                                    const SynthParams& params,
                                    bool anomalous_orientation = false) {
  using namespace synth_detail;
  const auto traits = subject_traits(subject_index, params.seed);
  const auto pos_traits = position_traits(position);
  const std::size_t seg_samples = 70 * (params.windows_per_class + 2);

  RawRecording rec;
  rec.subject_id = subject_id;
  rec.position = position;
  rec.sample_rate_hz = 50.0;

  Rng noise_rng(derive_seed(params.seed,
                            {0x97, subject_index, hash_string(to_string(position))}));

  static constexpr double kTwoPi = 2.0 * 3.14159265358979323846;
  std::size_t t_global = 0;
  for (ActivityClass activity : kAllActivities) {
    const std::size_t act = static_cast<std::size_t>(activity);
    const ActivityProfile base = base_profiles()[act];
    ActivityProfile prof = base;
    const bool drifting = activity == traits.drifted;
    const double noise_mul = drifting ? params.drift_noise_boost : 1.0;

    // slow step-to-step wander: amplitude and cadence drift over ~15-25 s
    Rng wander_rng(derive_seed(params.seed, {0x77, subject_index, act}));
    const double wander_period_a = (14.0 + 10.0 * wander_rng.uniform01()) * 50.0;
    const double wander_period_r = (16.0 + 10.0 * wander_rng.uniform01()) * 50.0;
    const double wander_phase_a = kTwoPi * wander_rng.uniform01();
    const double wander_phase_r = kTwoPi * wander_rng.uniform01();

    const double rate_scale = traits.rate * traits.act_rate_lean[act] / 50.0;
    double phase_t = kTwoPi * base.freq * rate_scale * static_cast<double>(t_global);
    for (std::size_t t = 0; t < seg_samples; ++t, ++t_global) {
      const double amp_mod =
          traits.act_amp_lean[act] *
          (1.0 + params.amp_wander *
                     std::sin(kTwoPi * static_cast<double>(t) / wander_period_a +
                              wander_phase_a));
      const double rate_mod =
          1.0 + params.rate_wander *
                    std::sin(kTwoPi * static_cast<double>(t) / wander_period_r +
                             wander_phase_r);
      if (drifting) {
        const ActivityProfile decoy =
            base_profiles()[static_cast<std::size_t>(traits.decoy)];
        const double sweep =
            0.5 + 0.5 * std::sin(kTwoPi * static_cast<double>(t) /
                                     (params.drift_sweep_period_s * 50.0) +
                                 wander_phase_a * 1.7);
        prof = lerp(base, decoy,
                    params.drift_mix_low +
                        (params.drift_mix_high - params.drift_mix_low) * sweep);
      }
      phase_t += kTwoPi * prof.freq * rate_scale * rate_mod;
      double v[6];
      for (int c = 0; c < 3; ++c) {
        const double amp = prof.acc_amp[c] * traits.gain * traits.chan_gain[c] *
                           pos_traits.acc_gain * amp_mod;
        const double bias = prof.acc_bias[c] + traits.acc_bias_shift[c] +
                            pos_traits.bias_shift[c];
        v[c] = bias + amp * (std::sin(phase_t + traits.phase[c]) +
                             prof.harmonic * std::sin(2.0 * phase_t + 1.3 * traits.phase[c])) +
               noise_rng.normal() * prof.noise * noise_mul * pos_traits.noise_gain;
      }
      for (int c = 0; c < 3; ++c) {
        const double amp = prof.gyro_amp[c] * traits.gain * traits.chan_gain[3 + c] *
                           pos_traits.gyro_gain * amp_mod;
        v[3 + c] = amp * (std::cos(phase_t + traits.phase[3 + c]) +
                          prof.harmonic * std::cos(2.0 * phase_t + 0.7 * traits.phase[3 + c])) +
                   noise_rng.normal() * prof.noise * noise_mul * pos_traits.noise_gain;
      }
      if (anomalous_orientation) {
        // device mounted differently: axes permuted and flipped
        std::swap(v[0], v[2]);
        v[1] = -v[1];
        std::swap(v[3], v[4]);
        v[5] = -v[5];
      }
      for (int c = 0; c < 6; ++c) rec.channels[c].push_back(v[c]);
      rec.labels.push_back(activity);
    }
  }
  return rec;
}

inline std::string synth_subject_id(std::size_t index) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "s%02zu", index + 1);
  return buf;
}

/// Writes `<subject>_<position>.csv` for every subject and position plus
/// `manifest.cfg`. The optional extra subject has an anomalous device
/// orientation and is listed as excluded.
inline void write_synth_dataset(const std::filesystem::path& dir,
                                const SynthParams& params = {}) {
  std::filesystem::create_directories(dir);
  const std::size_t total =
      params.included_subjects + (params.with_excluded_subject ? 1 : 0);
  std::ofstream manifest(dir / "manifest.cfg", std::ios::binary);
  if (!manifest) throw IoError("cannot write manifest in " + dir.string());
  manifest << "# synthetic activity benchmark\n";
  manifest << "positions = arm,waist,wrist\n";

  for (std::size_t s = 0; s < total; ++s) {
    const bool excluded = params.with_excluded_subject && s == total - 1;
    const std::string id = synth_subject_id(s);
    manifest << id
             << (excluded ? " = exclude: device orientation differs from cohort\n"
                          : " = include\n");
    for (BodyPosition pos : kAllPositions) {
      const RawRecording rec = synth_recording(s, id, pos, params, excluded);
      std::ofstream csv(dir / (id + "_" + std::string(to_string(pos)) + ".csv"),
                        std::ios::binary);
      if (!csv) throw IoError("cannot write recording csv in " + dir.string());
      csv << "timestamp_ms,acc_x,acc_y,acc_z,gyro_x,gyro_y,gyro_z,activity\n";
      char line[256];
      for (std::size_t t = 0; t < rec.length(); ++t) {
        std::snprintf(line, sizeof(line), "%zu,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,",
                      t * 20, rec.channels[0][t], rec.channels[1][t],
                      rec.channels[2][t], rec.channels[3][t], rec.channels[4][t],
                      rec.channels[5][t]);
        csv << line << to_string(rec.labels[t]) << '\n';
      }
    }
  }
}

}  // namespace harlearn
