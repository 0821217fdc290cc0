/* Copyright 2025 The s5kit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "s5kit/features.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>

#include "fft.h"
#include "s5kit/error.h"

namespace s5kit {
namespace {

std::vector<double> MakeWindow(WindowType type, std::size_t size) {
  std::vector<double> w(size, 1.0);
  if (type == WindowType::kHann) {
    // Periodic Hann, the usual choice for overlapping analysis frames.
    for (std::size_t n = 0; n < size; ++n) {
      w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                  static_cast<double>(size));
    }
  }
  return w;
}

void RequirePower(const FeatureMatrix& m, std::string_view op) {
  if (m.kind() != FeatureKind::kPowerSpectrogram) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(op) + " needs a power spectrogram, got " +
                    std::string(FeatureKindName(m.kind())));
  }
}

double BinFrequency(std::size_t bin, int sample_rate, std::size_t fft_size) {
  return static_cast<double>(bin) * sample_rate / static_cast<double>(fft_size);
}

}  // namespace

void StftConfig::Validate() const {
  if (!internal::IsPowerOfTwo(fft_size)) {
    throw Error(ErrorCode::kInvalidArgument,
                "fft_size must be a power of two, got " + std::to_string(fft_size));
  }
  if (hop_size == 0 || hop_size > window_size || window_size > fft_size) {
    throw Error(ErrorCode::kInvalidArgument,
                "need 0 < hop_size <= window_size <= fft_size (hop " +
                    std::to_string(hop_size) + ", window " +
                    std::to_string(window_size) + ", fft " +
                    std::to_string(fft_size) + ")");
  }
}

std::string_view FeatureKindName(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kPowerSpectrogram: return "power_spectrogram";
    case FeatureKind::kMel: return "mel";
    case FeatureKind::kRolloff: return "rolloff";
    case FeatureKind::kChroma: return "chroma";
  }
  return "unknown";
}

FeatureKind ParseFeatureKind(std::string_view name) {
  for (auto kind : {FeatureKind::kPowerSpectrogram, FeatureKind::kMel,
                    FeatureKind::kRolloff, FeatureKind::kChroma}) {
    if (FeatureKindName(kind) == name) return kind;
  }
  throw Error(ErrorCode::kParse, "unknown feature kind '" + std::string(name) + "'");
}

FeatureMatrix::FeatureMatrix(FeatureKind kind, std::size_t frames,
                             std::size_t bins, std::vector<double> values,
                             double frame_rate, int sample_rate,
                             std::size_t fft_size, std::vector<double> bin_labels)
    : kind_(kind),
      frames_(frames),
      bins_(bins),
      values_(std::move(values)),
      frame_rate_(frame_rate),
      sample_rate_(sample_rate),
      fft_size_(fft_size),
      bin_labels_(std::move(bin_labels)) {
  if (values_.size() != frames_ * bins_) {
    throw Error(ErrorCode::kValidation, "feature matrix has " +
                                            std::to_string(values_.size()) +
                                            " values for " + std::to_string(frames_) +
                                            "x" + std::to_string(bins_));
  }
  if (!bin_labels_.empty() && bin_labels_.size() != bins_) {
    throw Error(ErrorCode::kValidation, "bin label count does not match bins");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kValidation, "non-finite feature value");
    }
  }
  if (kind_ == FeatureKind::kRolloff) {
    if (bins_ != 1) throw Error(ErrorCode::kValidation, "roll-off needs 1 bin");
    for (double v : values_) {
      if (v < 0.0 || v > nyquist()) {
        throw Error(ErrorCode::kValidation, "roll-off outside [0, Nyquist]");
      }
    }
  }
  if (kind_ == FeatureKind::kChroma) {
    if (bins_ != 12) throw Error(ErrorCode::kValidation, "chroma needs 12 bins");
    for (double v : values_) {
      if (v < 0.0) throw Error(ErrorCode::kValidation, "negative chroma energy");
    }
  }
}

FeatureMatrix StftPower(const AudioClip& clip, int channel,
                        const StftConfig& config) {
  config.Validate();
  const auto samples = clip.channel(channel);
  const std::size_t n = samples.size();
  const std::size_t frames =
      n < config.window_size ? 1 : 1 + (n - config.window_size) / config.hop_size;
  const std::size_t bins = config.fft_size / 2 + 1;

  const internal::Fft fft(config.fft_size);
  const std::vector<double> window = MakeWindow(config.window, config.window_size);
  std::vector<std::complex<double>> buffer(config.fft_size);
  std::vector<double> values(frames * bins);

  for (std::size_t t = 0; t < frames; ++t) {
    std::fill(buffer.begin(), buffer.end(), std::complex<double>{});
    const std::size_t start = t * config.hop_size;
    for (std::size_t i = 0; i < config.window_size && start + i < n; ++i) {
      buffer[i] = static_cast<double>(samples[start + i]) * window[i];
    }
    fft.Forward(buffer);
    for (std::size_t k = 0; k < bins; ++k) values[t * bins + k] = std::norm(buffer[k]);
  }

  std::vector<double> centres(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    centres[k] = BinFrequency(k, clip.sample_rate(), config.fft_size);
  }
  return FeatureMatrix(FeatureKind::kPowerSpectrogram, frames, bins,
                       std::move(values),
                       static_cast<double>(clip.sample_rate()) / config.hop_size,
                       clip.sample_rate(), config.fft_size, std::move(centres));
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::vector<double> MelFilterbank(int sample_rate, std::size_t fft_size,
                                  const MelConfig& config) {
  const double nyquist = sample_rate / 2.0;
  const double fmax = config.fmax > 0.0 ? config.fmax : nyquist;
  if (config.n_mels == 0) {
    throw Error(ErrorCode::kInvalidArgument, "n_mels must be positive");
  }
  if (!(config.fmin >= 0.0 && config.fmin < fmax && fmax <= nyquist)) {
    throw Error(ErrorCode::kInvalidArgument,
                "mel band edges need 0 <= fmin < fmax <= Nyquist (fmin " +
                    std::to_string(config.fmin) + ", fmax " + std::to_string(fmax) +
                    ")");
  }
  const std::size_t bins = fft_size / 2 + 1;
  const double mel_lo = HzToMel(config.fmin);
  const double mel_hi = HzToMel(fmax);
  std::vector<double> edges(config.n_mels + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = MelToHz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                    static_cast<double>(config.n_mels + 1));
  }

  std::vector<double> weights(config.n_mels * bins, 0.0);
  for (std::size_t m = 0; m < config.n_mels; ++m) {
    const double lo = edges[m], centre = edges[m + 1], hi = edges[m + 2];
    double row_sum = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = BinFrequency(k, sample_rate, fft_size);
      double w = 0.0;
      if (f > lo && f < hi) w = f <= centre ? (f - lo) / (centre - lo) : (hi - f) / (hi - centre);
      weights[m * bins + k] = w;
      row_sum += w;
    }
    if (config.normalization == MelNormalization::kUnitSum && row_sum > 0.0) {
      for (std::size_t k = 0; k < bins; ++k) weights[m * bins + k] /= row_sum;
    }
  }
  return weights;
}

FeatureMatrix MelSpectrogram(const FeatureMatrix& power, const MelConfig& config) {
  RequirePower(power, "mel_spectrogram");
  const std::vector<double> fb =
      MelFilterbank(power.sample_rate(), power.fft_size(), config);
  const std::size_t bins = power.bins();
  const std::size_t n_mels = config.n_mels;
  std::vector<double> values(power.frames() * n_mels, 0.0);
  for (std::size_t t = 0; t < power.frames(); ++t) {
    const auto row = power.row(t);
    for (std::size_t m = 0; m < n_mels; ++m) {
      double acc = 0.0;
      for (std::size_t k = 0; k < bins; ++k) acc += fb[m * bins + k] * row[k];
      values[t * n_mels + m] = acc;
    }
  }
  const double fmax = config.fmax > 0.0 ? config.fmax : power.nyquist();
  std::vector<double> centres(n_mels);
  for (std::size_t m = 0; m < n_mels; ++m) {
    const double lo = HzToMel(config.fmin), hi = HzToMel(fmax);
    centres[m] = MelToHz(lo + (hi - lo) * static_cast<double>(m + 1) /
                                  static_cast<double>(n_mels + 1));
  }
  return FeatureMatrix(FeatureKind::kMel, power.frames(), n_mels, std::move(values),
                       power.frame_rate(), power.sample_rate(), power.fft_size(),
                       std::move(centres));
}

FeatureMatrix SpectralRolloff(const FeatureMatrix& power,
                              const RolloffConfig& config) {
  RequirePower(power, "spectral_rolloff");
  if (!(config.kappa > 0.0 && config.kappa <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "kappa must lie in (0, 1], got " + std::to_string(config.kappa));
  }
  std::vector<double> values(power.frames(), 0.0);
  for (std::size_t t = 0; t < power.frames(); ++t) {
    const auto row = power.row(t);
    double total = 0.0;
    for (double e : row) total += e;
    if (total <= 0.0) continue;
    const double target = config.kappa * total;
    double cumulative = 0.0;
    std::size_t bin = row.size() - 1;
    for (std::size_t k = 0; k < row.size(); ++k) {
      cumulative += row[k];
      if (cumulative >= target) {
        bin = k;
        break;
      }
    }
    values[t] = BinFrequency(bin, power.sample_rate(), power.fft_size());
  }
  return FeatureMatrix(FeatureKind::kRolloff, power.frames(), 1, std::move(values),
                       power.frame_rate(), power.sample_rate(), power.fft_size());
}

int PitchClass(double hz, double reference_a4) {
  const long semitones = std::lround(12.0 * std::log2(hz / reference_a4));
  return static_cast<int>(((semitones + 9) % 12 + 12) % 12);
}

FeatureMatrix Chroma(const FeatureMatrix& power, const ChromaConfig& config) {
  RequirePower(power, "chroma");
  if (!(config.min_freq > 0.0) || !(config.reference_a4 > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "chroma needs positive min_freq and reference_a4");
  }
  const std::size_t bins = power.bins();
  std::vector<int> pitch_class(bins, -1);
  for (std::size_t k = 0; k < bins; ++k) {
    const double f = BinFrequency(k, power.sample_rate(), power.fft_size());
    if (f >= config.min_freq) pitch_class[k] = PitchClass(f, config.reference_a4);
  }

  std::vector<double> values(power.frames() * 12, 0.0);
  for (std::size_t t = 0; t < power.frames(); ++t) {
    const auto row = power.row(t);
    double* out = values.data() + t * 12;
    for (std::size_t k = 0; k < bins; ++k) {
      if (pitch_class[k] >= 0) out[pitch_class[k]] += row[k];
    }
    if (config.normalization == ChromaNormalization::kL2PerFrame) {
      double norm = 0.0;
      for (int c = 0; c < 12; ++c) norm += out[c] * out[c];
      norm = std::sqrt(norm);
      if (norm > 0.0) {
        for (int c = 0; c < 12; ++c) out[c] /= norm;
      }
    }
  }
  std::vector<double> labels(12);
  for (int c = 0; c < 12; ++c) labels[c] = c;
  return FeatureMatrix(FeatureKind::kChroma, power.frames(), 12, std::move(values),
                       power.frame_rate(), power.sample_rate(), power.fft_size(),
                       std::move(labels));
}

std::size_t FeatureSummaryLength(const FeatureBundleConfig& config) {
  return 2 * (config.mel.n_mels + 1 + 12);
}

std::vector<double> FeatureSummary(const AudioClip& clip,
                                   const FeatureBundleConfig& config) {
  if (clip.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "feature summary of an empty clip");
  }
  const FeatureMatrix power = StftPower(clip, config.channel, config.stft);
  const FeatureMatrix mel = MelSpectrogram(power, config.mel);
  const FeatureMatrix rolloff = SpectralRolloff(power, config.rolloff);
  const FeatureMatrix chroma = Chroma(power, config.chroma);

  std::vector<double> out;
  out.reserve(FeatureSummaryLength(config));
  auto append_stats = [&out](const FeatureMatrix& m, bool log_compress) {
    const std::size_t frames = m.frames();
    std::vector<double> mean(m.bins(), 0.0), sq(m.bins(), 0.0);
    for (std::size_t t = 0; t < frames; ++t) {
      for (std::size_t b = 0; b < m.bins(); ++b) {
        const double v = log_compress ? std::log1p(m.at(t, b)) : m.at(t, b);
        mean[b] += v;
        sq[b] += v * v;
      }
    }
    std::vector<double> stddev(m.bins());
    for (std::size_t b = 0; b < m.bins(); ++b) {
      mean[b] /= static_cast<double>(frames);
      stddev[b] = std::sqrt(std::max(0.0, sq[b] / static_cast<double>(frames) -
                                              mean[b] * mean[b]));
    }
    out.insert(out.end(), mean.begin(), mean.end());
    out.insert(out.end(), stddev.begin(), stddev.end());
  };
  append_stats(mel, true);
  append_stats(rolloff, false);
  append_stats(chroma, false);
  return out;
}

}  // namespace s5kit
