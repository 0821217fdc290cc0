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

#ifndef S5KIT_FEATURES_H_
#define S5KIT_FEATURES_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "s5kit/audio.h"

namespace s5kit {

enum class WindowType { kHann, kRectangular };

struct StftConfig {
  std::size_t fft_size = 1024;
  std::size_t window_size = 1024;
  std::size_t hop_size = 320;  // 10 ms at 32 kHz
  WindowType window = WindowType::kHann;

  // Throws kInvalidArgument unless fft_size is a power of two and
  // 0 < hop_size <= window_size <= fft_size.
  void Validate() const;
};

enum class FeatureKind { kPowerSpectrogram, kMel, kRolloff, kChroma };

std::string_view FeatureKindName(FeatureKind kind);
FeatureKind ParseFeatureKind(std::string_view name);

// Time-major frames x bins matrix. `bin_labels` carries the semantic value of
// each bin: centre frequency in Hz for spectrograms, mel band centre in Hz for
// mel, pitch class index for chroma, and is empty for roll-off.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  // Throws kValidation when the kind-specific invariants do not hold.
  FeatureMatrix(FeatureKind kind, std::size_t frames, std::size_t bins,
                std::vector<double> values, double frame_rate, int sample_rate,
                std::size_t fft_size, std::vector<double> bin_labels = {});

  FeatureKind kind() const { return kind_; }
  std::size_t frames() const { return frames_; }
  std::size_t bins() const { return bins_; }
  double frame_rate() const { return frame_rate_; }
  // Sample rate and FFT size of the analysis the matrix derives from.
  int sample_rate() const { return sample_rate_; }
  std::size_t fft_size() const { return fft_size_; }
  double nyquist() const { return sample_rate_ / 2.0; }

  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& bin_labels() const { return bin_labels_; }
  std::span<const double> row(std::size_t frame) const {
    return {values_.data() + frame * bins_, bins_};
  }
  double at(std::size_t frame, std::size_t bin) const {
    return values_[frame * bins_ + bin];
  }

 private:
  FeatureKind kind_ = FeatureKind::kPowerSpectrogram;
  std::size_t frames_ = 0;
  std::size_t bins_ = 0;
  std::vector<double> values_;
  double frame_rate_ = 0.0;
  int sample_rate_ = 0;
  std::size_t fft_size_ = 0;
  std::vector<double> bin_labels_;
};

// Power spectrogram |DFT|^2 of windowed frames. Frame t covers samples
// [t * hop, t * hop + window); clips shorter than one window yield a single
// zero-padded frame. Output has fft_size / 2 + 1 bins.
FeatureMatrix StftPower(const AudioClip& clip, int channel,
                        const StftConfig& config = {});

enum class MelNormalization {
  kUnitSum,  // each filter's weights sum to 1 (filters covering no bin stay 0)
  kNone,     // triangles peak at 1
};

struct MelConfig {
  std::size_t n_mels = 64;
  double fmin = 20.0;
  double fmax = 0.0;  // <= 0 means Nyquist
  MelNormalization normalization = MelNormalization::kUnitSum;
};

double HzToMel(double hz);
double MelToHz(double mel);

// Triangular filterbank (n_mels x (fft_size/2 + 1), row-major) on the HTK mel
// scale, with n_mels + 2 band edges equally spaced between fmin and fmax.
std::vector<double> MelFilterbank(int sample_rate, std::size_t fft_size,
                                  const MelConfig& config);

FeatureMatrix MelSpectrogram(const FeatureMatrix& power, const MelConfig& config);

struct RolloffConfig {
  double kappa = 0.85;
};

// Per frame: centre frequency of the smallest bin whose cumulative energy
// reaches kappa * total energy. Silent frames map to 0 Hz.
FeatureMatrix SpectralRolloff(const FeatureMatrix& power,
                              const RolloffConfig& config = {});

enum class ChromaNormalization { kL2PerFrame, kNone };

struct ChromaConfig {
  double reference_a4 = 440.0;
  double min_freq = 32.7;
  ChromaNormalization normalization = ChromaNormalization::kL2PerFrame;
};

// Pitch class (0 = C ... 9 = A ... 11 = B) nearest to `hz`.
int PitchClass(double hz, double reference_a4 = 440.0);

// Folds the energy of every bin at or above min_freq into its nearest pitch
// class.
FeatureMatrix Chroma(const FeatureMatrix& power, const ChromaConfig& config = {});

struct FeatureBundleConfig {
  StftConfig stft;
  MelConfig mel;
  RolloffConfig rolloff;
  ChromaConfig chroma;
  int channel = 0;
};

// Mean and standard deviation over frames of log(1 + mel), roll-off (Hz) and
// chroma, concatenated in that order. Length = 2 * (n_mels + 1 + 12).
std::vector<double> FeatureSummary(const AudioClip& clip,
                                   const FeatureBundleConfig& config = {});
std::size_t FeatureSummaryLength(const FeatureBundleConfig& config);

}  // namespace s5kit

#endif  // S5KIT_FEATURES_H_
