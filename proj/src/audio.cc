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

#include "s5kit/audio.h"

#include <bit>
#include <cmath>
#include <string>
#include <utility>

#include "s5kit/error.h"

namespace s5kit {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kUnreadableFile: return "unreadable_file";
    case ErrorCode::kUnwritableFile: return "unwritable_file";
    case ErrorCode::kUnsupportedCodec: return "unsupported_codec";
    case ErrorCode::kTruncatedData: return "truncated_data";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kAlignment: return "alignment";
    case ErrorCode::kUnknownClip: return "unknown_clip";
    case ErrorCode::kEmptyInput: return "empty_input";
    case ErrorCode::kInsufficientPool: return "insufficient_pool";
    case ErrorCode::kBackendSpawn: return "backend_spawn";
    case ErrorCode::kProtocol: return "protocol";
    case ErrorCode::kTimeout: return "timeout";
    case ErrorCode::kBackend: return "backend";
  }
  return "unknown";
}

AudioClip::AudioClip(std::vector<std::vector<float>> channels, int sample_rate)
    : channels_(std::move(channels)), sample_rate_(sample_rate) {
  if (sample_rate_ <= 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "sample rate must be positive, got " +
                    std::to_string(sample_rate_));
  }
  if (channels_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "clip needs at least one channel");
  }
  const std::size_t frames = channels_.front().size();
  for (std::size_t c = 0; c < channels_.size(); ++c) {
    if (channels_[c].size() != frames) {
      throw Error(ErrorCode::kInvalidArgument,
                  "channel " + std::to_string(c) + " has " +
                      std::to_string(channels_[c].size()) +
                      " frames, expected " + std::to_string(frames));
    }
    for (float s : channels_[c]) {
      if (!std::isfinite(s)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "non-finite sample in channel " + std::to_string(c));
      }
    }
  }
}

AudioClip AudioClip::Mono(std::vector<float> samples, int sample_rate) {
  std::vector<std::vector<float>> channels;
  channels.push_back(std::move(samples));
  return AudioClip(std::move(channels), sample_rate);
}

AudioClip AudioClip::Silence(std::size_t frames, int sample_rate,
                             int channel_count) {
  if (channel_count <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "channel count must be positive");
  }
  return AudioClip(std::vector<std::vector<float>>(
                       channel_count, std::vector<float>(frames, 0.0f)),
                   sample_rate);
}

std::span<const float> AudioClip::channel(int index) const {
  if (index < 0 || index >= channel_count()) {
    throw Error(ErrorCode::kInvalidArgument,
                "channel " + std::to_string(index) + " out of range (clip has " +
                    std::to_string(channel_count()) + ")");
  }
  return channels_[index];
}

AudioClip AudioClip::Scaled(double gain) const {
  AudioClip out = *this;
  for (auto& ch : out.channels_) {
    for (float& s : ch) s = static_cast<float>(s * gain);
  }
  return out;
}

bool AudioClip::IsSilent() const {
  for (const auto& ch : channels_) {
    for (float s : ch) {
      if (s != 0.0f) return false;
    }
  }
  return true;
}

double Rms(std::span<const float> samples) {
  if (samples.empty()) return 0.0;
  double acc = 0.0;
  for (float s : samples) acc += static_cast<double>(s) * s;
  return std::sqrt(acc / static_cast<double>(samples.size()));
}

double Rms(const AudioClip& clip, int channel) {
  return Rms(clip.channel(channel));
}

std::uint64_t Fingerprint(const AudioClip& clip) {
  constexpr std::uint64_t kOffset = 14695981039346656037ull;
  constexpr std::uint64_t kPrime = 1099511628211ull;
  std::uint64_t h = kOffset;
  auto mix = [&](std::uint64_t word) {
    for (int i = 0; i < 8; ++i) {
      h ^= (word >> (8 * i)) & 0xffu;
      h *= kPrime;
    }
  };
  mix(static_cast<std::uint64_t>(clip.sample_rate()));
  mix(static_cast<std::uint64_t>(clip.channel_count()));
  mix(static_cast<std::uint64_t>(clip.frame_count()));
  for (const auto& ch : clip.channels()) {
    for (float s : ch) {
      // +0.0 and -0.0 are the same sample.
      if (s == 0.0f) s = 0.0f;
      mix(std::bit_cast<std::uint32_t>(s));
    }
  }
  return h;
}

}  // namespace s5kit
