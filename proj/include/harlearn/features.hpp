#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "harlearn/dataset.hpp"
#include "harlearn/errors.hpp"
#include "harlearn/feature_matrix.hpp"

namespace harlearn {

/// 4.2 s windows with a 1.4 s slide at 50 Hz.
struct WindowSpec {
  double window_length_s = 4.2;
  double slide_s = 1.4;
  std::size_t window_length_samples = 210;
  std::size_t slide_samples = 70;
};

struct LabeledWindow {
  std::size_t start = 0;  // first sample index
  ActivityClass label = ActivityClass::walking;
};

/// Window i covers samples [slide*i, slide*i + length - 1]. A window spanning
/// an activity change takes the majority label; exact ties are dropped.
inline std::vector<LabeledWindow> sliding_windows(const RawRecording& rec,
                                                  const WindowSpec& spec = {}) {
  const std::size_t len = spec.window_length_samples;
  const std::size_t slide = spec.slide_samples;
  if (rec.length() < len)
    throw RecordingTooShort(rec.subject_id + ": " + std::to_string(rec.length()) +
                            " samples, need " + std::to_string(len));
  const std::size_t count = (rec.length() - len) / slide + 1;
  std::vector<LabeledWindow> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t start = i * slide;
    std::array<std::uint32_t, kActivityCount> counts{};
    for (std::size_t t = start; t < start + len; ++t)
      counts[static_cast<std::size_t>(rec.labels[t])]++;
    std::size_t best = 0;
    for (std::size_t c = 1; c < kActivityCount; ++c)
      if (counts[c] > counts[best]) best = c;
    bool tie = false;
    for (std::size_t c = 0; c < kActivityCount; ++c)
      if (c != best && counts[c] == counts[best]) tie = true;
    if (tie) continue;
    out.push_back({start, static_cast<ActivityClass>(best)});
  }
  return out;
}

inline constexpr std::size_t kDerivedChannelCount = 14;

inline constexpr std::array<const char*, kDerivedChannelCount> kChannelNames = {
    "acc_x",  "acc_y",  "acc_z",  "gyro_x",  "gyro_y",  "gyro_z",  "acc_mag",
    "gyro_mag", "acc_xy", "acc_xz", "acc_yz", "gyro_xy", "gyro_xz", "gyro_yz"};

/// The 14 per-window signals: 6 raw channels, 2 vector magnitudes, and the 6
/// pairwise square-sums (x²+y², x²+z², y²+z² for each sensor).
struct DerivedSignalSet {
  std::size_t length = 0;
  std::array<std::vector<double>, kDerivedChannelCount> channels;
};

inline DerivedSignalSet derive_signals(
    const std::array<std::span<const double>, 6>& raw) {
  DerivedSignalSet out;
  const std::size_t n = raw[0].size();
  out.length = n;
  for (std::size_t c = 0; c < 6; ++c)
    out.channels[c].assign(raw[c].begin(), raw[c].end());
  for (auto c : {6, 7, 8, 9, 10, 11, 12, 13}) out.channels[c].resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double ax = raw[0][t], ay = raw[1][t], az = raw[2][t];
    const double gx = raw[3][t], gy = raw[4][t], gz = raw[5][t];
    out.channels[6][t] = std::sqrt(ax * ax + ay * ay + az * az);
    out.channels[7][t] = std::sqrt(gx * gx + gy * gy + gz * gz);
    out.channels[8][t] = ax * ax + ay * ay;
    out.channels[9][t] = ax * ax + az * az;
    out.channels[10][t] = ay * ay + az * az;
    out.channels[11][t] = gx * gx + gy * gy;
    out.channels[12][t] = gx * gx + gz * gz;
    out.channels[13][t] = gy * gy + gz * gz;
  }
  return out;
}

/// Linear-interpolation percentile at sorted position p/100 * (n-1).
inline double percentile(std::span<const double> values, double p) {
  if (values.empty()) throw EmptyInput("percentile of empty sequence");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = p / 100.0 * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

struct PercentileAggregates {
  double sum_above = 0.0;
  double sum_below = 0.0;
  double sqsum_above = 0.0;
  double sqsum_below = 0.0;
  double cross_above = 0.0;
  double cross_below = 0.0;
};

/// Sums/square-sums of values strictly above/below the threshold, plus the
/// count of strict sign changes of (v - t) between consecutive samples.
/// Samples equal to t carry the previous non-equal sign.
inline PercentileAggregates percentile_aggregates_at(std::span<const double> values,
                                                     double threshold) {
  if (values.empty()) throw EmptyInput("aggregates of empty sequence");
  PercentileAggregates agg;
  for (double v : values) {
    if (v > threshold) {
      agg.sum_above += v;
      agg.sqsum_above += v * v;
    } else if (v < threshold) {
      agg.sum_below += v;
      agg.sqsum_below += v * v;
    }
  }
  int prev_sign = 0;
  std::size_t crossings = 0;
  for (double v : values) {
    const int sign = v > threshold ? 1 : (v < threshold ? -1 : 0);
    if (sign == 0) continue;
    if (prev_sign != 0 && sign != prev_sign) ++crossings;
    prev_sign = sign;
  }
  agg.cross_above = agg.cross_below = static_cast<double>(crossings);
  return agg;
}

inline PercentileAggregates percentile_aggregates(std::span<const double> values,
                                                  double p) {
  return percentile_aggregates_at(values, percentile(values, p));
}

inline constexpr std::size_t kFrequencyFeatureCount = 8;

/// Spectral descriptors of the mean-removed, untapered DFT magnitude
/// spectrum over bins 1..N/2: dominant bin frequency and magnitude, total
/// energy, entropy (nats), and band energies [0,1), [1,3), [3,6), [6,10) Hz.
/// A zero spectrum yields all-zero features.
inline std::array<double, kFrequencyFeatureCount> frequency_features(
    std::span<const double> signal, double sample_rate_hz = 50.0) {
  const std::size_t n = signal.size();
  if (n == 0) throw EmptyInput("frequency features of empty signal");
  double mean = 0.0;
  for (double v : signal) mean += v;
  mean /= static_cast<double>(n);

  static constexpr double kTwoPi = 2.0 * 3.14159265358979323846;
  const std::size_t half = n / 2;
  // twiddle table: angle(k*t) = 2*pi*((k*t) mod n)/n
  std::vector<double> cos_tab(n), sin_tab(n), centered(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double a = kTwoPi * static_cast<double>(m) / static_cast<double>(n);
    cos_tab[m] = std::cos(a);
    sin_tab[m] = std::sin(a);
  }
  for (std::size_t t = 0; t < n; ++t) centered[t] = signal[t] - mean;

  std::vector<double> power(half + 1, 0.0);  // index by bin, 1..half used
  for (std::size_t k = 1; k <= half; ++k) {
    double re = 0.0, im = 0.0;
    std::size_t idx = 0;
    for (std::size_t t = 0; t < n; ++t) {
      re += centered[t] * cos_tab[idx];
      im -= centered[t] * sin_tab[idx];
      idx += k;
      if (idx >= n) idx -= n;
    }
    power[k] = re * re + im * im;
  }

  double energy = 0.0;
  std::size_t dom = 0;
  for (std::size_t k = 1; k <= half; ++k) {
    energy += power[k];
    if (dom == 0 || power[k] > power[dom]) dom = k;
  }

  std::array<double, kFrequencyFeatureCount> f{};
  if (energy <= 0.0) return f;

  const double bin_hz = sample_rate_hz / static_cast<double>(n);
  f[0] = static_cast<double>(dom) * bin_hz;
  f[1] = std::sqrt(power[dom]);
  f[2] = energy;
  double entropy = 0.0;
  for (std::size_t k = 1; k <= half; ++k) {
    const double p = power[k] / energy;
    if (p > 0.0) entropy -= p * std::log(p);
  }
  f[3] = entropy;
  static constexpr double kBands[4][2] = {{0, 1}, {1, 3}, {3, 6}, {6, 10}};
  for (int b = 0; b < 4; ++b) {
    double e = 0.0;
    for (std::size_t k = 1; k <= half; ++k) {
      const double hz = static_cast<double>(k) * bin_hz;
      if (hz >= kBands[b][0] && hz < kBands[b][1]) e += power[k];
    }
    f[4 + b] = e;
  }
  return f;
}

inline constexpr std::array<double, 4> kAggregatePercentiles = {10, 25, 75, 90};

inline constexpr std::size_t kExtractorsPerChannel =
    8 + kAggregatePercentiles.size() * 6 + kFrequencyFeatureCount;  // 40

struct FeatureCatalogEntry {
  std::string name;
  std::size_t channel = 0;
  std::string extractor;
};

/// Fixed, ordered list of every feature the pipeline emits. The catalog is
/// the single source of truth for column meaning and count.
class FeatureCatalog {
 public:
  static FeatureCatalog standard() {
    FeatureCatalog cat;
    for (std::size_t c = 0; c < kDerivedChannelCount; ++c) {
      auto add = [&](const std::string& extractor) {
        cat.entries_.push_back({std::string(kChannelNames[c]) + "_" + extractor, c,
                                extractor});
      };
      for (const char* e : {"std", "min", "max", "median", "p10", "p25", "p75", "p90"})
        add(e);
      for (double p : kAggregatePercentiles) {
        const std::string suffix = "_p" + std::to_string(static_cast<int>(p));
        add("sum_above" + suffix);
        add("sum_below" + suffix);
        add("sqsum_above" + suffix);
        add("sqsum_below" + suffix);
        add("cross_above" + suffix);
        add("cross_below" + suffix);
      }
      for (const char* e : {"freq_dominant_hz", "freq_dominant_mag", "freq_energy",
                            "freq_entropy", "freq_band_0_1", "freq_band_1_3",
                            "freq_band_3_6", "freq_band_6_10"})
        add(e);
    }
    return cat;
  }

  std::size_t total_count() const { return entries_.size(); }
  const FeatureCatalogEntry& entry(std::size_t i) const { return entries_[i]; }
  const std::vector<FeatureCatalogEntry>& entries() const { return entries_; }

 private:
  std::vector<FeatureCatalogEntry> entries_;
};

/// Extracts one catalog-ordered feature vector from a 6-channel raw window.
/// Throws NonFiniteFeature if any extractor produces NaN or infinity.
inline std::vector<double> extract_features(
    const std::array<std::span<const double>, 6>& window,
    const FeatureCatalog& catalog) {
  const DerivedSignalSet derived = derive_signals(window);
  std::vector<double> out;
  out.reserve(catalog.total_count());

  std::vector<double> sorted;
  for (std::size_t c = 0; c < kDerivedChannelCount; ++c) {
    const std::vector<double>& sig = derived.channels[c];
    const std::size_t n = sig.size();
    sorted.assign(sig.begin(), sig.end());
    std::sort(sorted.begin(), sorted.end());
    auto sorted_pct = [&](double p) {
      const double pos = p / 100.0 * static_cast<double>(n - 1);
      const std::size_t lo = static_cast<std::size_t>(pos);
      const std::size_t hi = std::min(lo + 1, n - 1);
      return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
    };

    double mean = 0.0;
    for (double v : sig) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : sig) ss += (v - mean) * (v - mean);
    const double stddev = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;

    out.push_back(stddev);
    out.push_back(sorted.front());
    out.push_back(sorted.back());
    out.push_back(sorted_pct(50));
    out.push_back(sorted_pct(10));
    out.push_back(sorted_pct(25));
    out.push_back(sorted_pct(75));
    out.push_back(sorted_pct(90));
    for (double p : kAggregatePercentiles) {
      const PercentileAggregates agg = percentile_aggregates_at(sig, sorted_pct(p));
      out.push_back(agg.sum_above);
      out.push_back(agg.sum_below);
      out.push_back(agg.sqsum_above);
      out.push_back(agg.sqsum_below);
      out.push_back(agg.cross_above);
      out.push_back(agg.cross_below);
    }
    const auto freq = frequency_features(sig);
    out.insert(out.end(), freq.begin(), freq.end());
  }

  if (out.size() != catalog.total_count())
    throw DimensionMismatch("extractor emitted " + std::to_string(out.size()) +
                            " features, catalog has " +
                            std::to_string(catalog.total_count()));
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!std::isfinite(out[i]))
      throw NonFiniteFeature("feature '" + catalog.entry(i).name + "' is not finite");
  }
  return out;
}

/// Full pipeline for one recording: windows -> features, with provenance.
inline FeatureMatrix extract_matrix(const RawRecording& rec,
                                    const FeatureCatalog& catalog,
                                    const WindowSpec& spec = {}) {
  const auto windows = sliding_windows(rec, spec);
  FeatureMatrix m(catalog.total_count());
  for (std::size_t w = 0; w < windows.size(); ++w) {
    std::array<std::span<const double>, 6> view;
    for (std::size_t c = 0; c < 6; ++c)
      view[c] = std::span<const double>(rec.channels[c])
                    .subspan(windows[w].start, spec.window_length_samples);
    const auto features = extract_features(view, catalog);
    m.append_row(features, windows[w].label,
                 RowProvenance{rec.subject_id, kNoPart, static_cast<std::uint32_t>(w)});
  }
  return m;
}

}  // namespace harlearn
