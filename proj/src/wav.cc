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

#include "s5kit/wav.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "s5kit/error.h"
#include "s5kit/file_util.h"

namespace s5kit {
namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatFloat = 0x0003;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t ReadU16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t ReadU32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void PutU16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

struct FmtChunk {
  std::uint16_t format_tag = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits_per_sample = 0;
};

FmtChunk ParseFmt(const unsigned char* p, std::uint32_t size,
                  const std::string& path) {
  if (size < 16) {
    throw Error(ErrorCode::kTruncatedData, path + ": fmt chunk too short");
  }
  FmtChunk fmt;
  fmt.format_tag = ReadU16(p);
  fmt.channels = ReadU16(p + 2);
  fmt.sample_rate = ReadU32(p + 4);
  fmt.block_align = ReadU16(p + 12);
  fmt.bits_per_sample = ReadU16(p + 14);
  if (fmt.format_tag == kFormatExtensible) {
    // cbSize(2) validBits(2) channelMask(4) subFormat GUID(16); the first two
    // GUID bytes carry the actual format tag.
    if (size < 40) {
      throw Error(ErrorCode::kTruncatedData,
                  path + ": extensible fmt chunk too short");
    }
    fmt.format_tag = ReadU16(p + 24);
  }
  return fmt;
}

}  // namespace

AudioClip ReadWav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kUnreadableFile, "cannot open " + path);
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kUnreadableFile, "cannot read " + path);

  if (bytes.size() < 12) {
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), "RIFF", 4) != 0) {
      throw Error(ErrorCode::kUnsupportedCodec, path + ": not a RIFF file");
    }
    throw Error(ErrorCode::kTruncatedData, path + ": RIFF header truncated");
  }
  if (std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error(ErrorCode::kUnsupportedCodec, path + ": not a RIFF/WAVE file");
  }

  FmtChunk fmt;
  bool have_fmt = false;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* header = bytes.data() + pos;
    const std::uint32_t chunk_size = ReadU32(header + 4);
    const std::size_t body = pos + 8;
    const std::size_t available = bytes.size() - body;
    if (std::memcmp(header, "fmt ", 4) == 0) {
      if (chunk_size > available) {
        throw Error(ErrorCode::kTruncatedData, path + ": fmt chunk truncated");
      }
      fmt = ParseFmt(bytes.data() + body, chunk_size, path);
      have_fmt = true;
    } else if (std::memcmp(header, "data", 4) == 0) {
      if (chunk_size > available) {
        throw Error(ErrorCode::kTruncatedData,
                    path + ": data chunk declares " + std::to_string(chunk_size) +
                        " bytes, only " + std::to_string(available) +
                        " present");
      }
      data = bytes.data() + body;
      data_size = chunk_size;
      break;
    }
    pos = body + chunk_size + (chunk_size & 1u);
  }
  if (!have_fmt) {
    throw Error(ErrorCode::kTruncatedData, path + ": missing fmt chunk");
  }
  if (data == nullptr) {
    throw Error(ErrorCode::kTruncatedData, path + ": missing data chunk");
  }

  const bool is_pcm = fmt.format_tag == kFormatPcm &&
                      (fmt.bits_per_sample == 16 || fmt.bits_per_sample == 24);
  const bool is_float = fmt.format_tag == kFormatFloat && fmt.bits_per_sample == 32;
  if (!is_pcm && !is_float) {
    throw Error(ErrorCode::kUnsupportedCodec,
                path + ": unsupported encoding (format tag " +
                    std::to_string(fmt.format_tag) + ", " +
                    std::to_string(fmt.bits_per_sample) + " bits)");
  }
  if (fmt.channels == 0 || fmt.sample_rate == 0) {
    throw Error(ErrorCode::kUnsupportedCodec,
                path + ": zero channels or sample rate");
  }
  const std::size_t bytes_per_sample = fmt.bits_per_sample / 8;
  const std::size_t frame_bytes = bytes_per_sample * fmt.channels;
  if (data_size % frame_bytes != 0) {
    throw Error(ErrorCode::kTruncatedData, path + ": partial trailing frame");
  }
  const std::size_t frames = data_size / frame_bytes;

  std::vector<std::vector<float>> channels(fmt.channels,
                                           std::vector<float>(frames));
  const unsigned char* p = data;
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::size_t c = 0; c < fmt.channels; ++c, p += bytes_per_sample) {
      float value = 0.0f;
      if (is_float) {
        value = std::bit_cast<float>(ReadU32(p));
        if (!std::isfinite(value)) {
          throw Error(ErrorCode::kUnsupportedCodec,
                      path + ": non-finite float sample");
        }
      } else if (bytes_per_sample == 2) {
        value = static_cast<float>(static_cast<std::int16_t>(ReadU16(p)) /
                                   32768.0);
      } else {
        std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
        if (v & 0x800000) v -= 0x1000000;
        value = static_cast<float>(v / 8388608.0);
      }
      channels[c][f] = value;
    }
  }
  return AudioClip(std::move(channels), static_cast<int>(fmt.sample_rate));
}

void WriteWav(const AudioClip& clip, const std::string& path, WavFormat format) {
  const int channels = std::max(clip.channel_count(), 1);
  const std::size_t frames = clip.frame_count();
  std::uint16_t bits = 32;
  std::uint16_t tag = kFormatFloat;
  if (format == WavFormat::kPcm16) {
    bits = 16;
    tag = kFormatPcm;
  } else if (format == WavFormat::kPcm24) {
    bits = 24;
    tag = kFormatPcm;
  }
  const std::uint32_t block_align = channels * (bits / 8);
  const std::uint64_t data_bytes = static_cast<std::uint64_t>(frames) * block_align;
  if (data_bytes > 0xFFFFFF00ull) {
    throw Error(ErrorCode::kUnwritableFile, path + ": clip too large for RIFF");
  }
  const bool is_float = tag == kFormatFloat;
  const std::uint32_t fmt_size = is_float ? 18 : 16;
  const std::uint32_t fact_size = is_float ? 12 : 0;

  std::string out;
  out.reserve(static_cast<std::size_t>(data_bytes) + 64);
  out += "RIFF";
  PutU32(out, static_cast<std::uint32_t>(4 + 8 + fmt_size + fact_size + 8 +
                                         data_bytes));
  out += "WAVE";
  out += "fmt ";
  PutU32(out, fmt_size);
  PutU16(out, tag);
  PutU16(out, static_cast<std::uint16_t>(channels));
  PutU32(out, static_cast<std::uint32_t>(clip.sample_rate()));
  PutU32(out, static_cast<std::uint32_t>(clip.sample_rate()) * block_align);
  PutU16(out, static_cast<std::uint16_t>(block_align));
  PutU16(out, bits);
  if (is_float) {
    PutU16(out, 0);
    out += "fact";
    PutU32(out, 4);
    PutU32(out, static_cast<std::uint32_t>(frames));
  }
  out += "data";
  PutU32(out, static_cast<std::uint32_t>(data_bytes));

  for (std::size_t f = 0; f < frames; ++f) {
    for (int c = 0; c < channels; ++c) {
      const float s = clip.channels()[c][f];
      if (format == WavFormat::kFloat32) {
        PutU32(out, std::bit_cast<std::uint32_t>(s));
      } else if (format == WavFormat::kPcm16) {
        const long q = std::clamp(std::lround(static_cast<double>(s) * 32768.0),
                                  -32768L, 32767L);
        PutU16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
      } else {
        const long q = std::clamp(std::lround(static_cast<double>(s) * 8388608.0),
                                  -8388608L, 8388607L);
        const auto u = static_cast<std::uint32_t>(q);
        out.push_back(static_cast<char>(u & 0xff));
        out.push_back(static_cast<char>((u >> 8) & 0xff));
        out.push_back(static_cast<char>((u >> 16) & 0xff));
      }
    }
  }
  WriteFileAtomic(path, out);
}

}  // namespace s5kit
