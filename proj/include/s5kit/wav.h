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

#ifndef S5KIT_WAV_H_
#define S5KIT_WAV_H_

#include <string>

#include "s5kit/audio.h"

namespace s5kit {

enum class WavFormat { kPcm16, kPcm24, kFloat32 };

// Reads a RIFF/WAVE file holding 16- or 24-bit PCM or 32-bit IEEE float
// (plain or WAVE_FORMAT_EXTENSIBLE). Integer samples are scaled by 2^-(bits-1)
// so full-scale negative maps to -1.0.
//
// Errors: kUnreadableFile (cannot open), kUnsupportedCodec (not RIFF/WAVE,
// or an encoding other than the above), kTruncatedData (header or data chunk
// shorter than declared).
AudioClip ReadWav(const std::string& path);

// Writes `clip` atomically (temp file + rename). PCM output is rounded and
// clamped to the integer range. Throws kUnwritableFile.
void WriteWav(const AudioClip& clip, const std::string& path,
              WavFormat format = WavFormat::kFloat32);

}  // namespace s5kit

#endif  // S5KIT_WAV_H_
