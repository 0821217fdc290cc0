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

#ifndef S5KIT_AUDIO_H_
#define S5KIT_AUDIO_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace s5kit {

// Multichannel sample buffer. Channels are stored planar, every channel has
// the same number of frames, and every sample is finite. Immutable after
// construction.
class AudioClip {
 public:
  AudioClip() = default;

  // Throws kInvalidArgument if the invariants do not hold.
  AudioClip(std::vector<std::vector<float>> channels, int sample_rate);

  static AudioClip Mono(std::vector<float> samples, int sample_rate);
  static AudioClip Silence(std::size_t frames, int sample_rate,
                           int channel_count = 1);

  int sample_rate() const { return sample_rate_; }
  int channel_count() const { return static_cast<int>(channels_.size()); }
  std::size_t frame_count() const {
    return channels_.empty() ? 0 : channels_.front().size();
  }
  double duration_seconds() const {
    return sample_rate_ > 0 ? static_cast<double>(frame_count()) / sample_rate_
                            : 0.0;
  }
  bool empty() const { return frame_count() == 0; }

  // Throws kInvalidArgument when channel is out of range.
  std::span<const float> channel(int index) const;

  const std::vector<std::vector<float>>& channels() const { return channels_; }

  // Returns a copy scaled by `gain`.
  AudioClip Scaled(double gain) const;

  // True when every sample of every channel is exactly zero.
  bool IsSilent() const;

  friend bool operator==(const AudioClip&, const AudioClip&) = default;

 private:
  std::vector<std::vector<float>> channels_;
  int sample_rate_ = 1;
};

// Root mean square of one channel, accumulated in double. 0 for empty clips.
double Rms(const AudioClip& clip, int channel = 0);
double Rms(std::span<const float> samples);

// 64-bit FNV-1a over the sample rate, channel layout and sample bit patterns.
// Used to recognise audio content that round-trips through a backend.
std::uint64_t Fingerprint(const AudioClip& clip);

}  // namespace s5kit

#endif  // S5KIT_AUDIO_H_
