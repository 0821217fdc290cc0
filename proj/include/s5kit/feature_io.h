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

#ifndef S5KIT_FEATURE_IO_H_
#define S5KIT_FEATURE_IO_H_

#include <string>

#include "s5kit/features.h"

namespace s5kit {

// Text matrix dump:
//
//   # s5kit-feature 1
//   # kind <power_spectrogram|mel|rolloff|chroma>
//   # frame_rate <fps>
//   # sample_rate <Hz>
//   # fft_size <n>
//   # frames <T>
//   # bins <B>
//   # bin_labels <B values>        (omitted when there are none)
//   <T lines of B space-separated values>
//
// Values are printed with 17 significant digits so a dump re-reads exactly.
std::string FormatFeatureMatrix(const FeatureMatrix& matrix);
void WriteFeatureMatrix(const FeatureMatrix& matrix, const std::string& path);

// Throws kUnreadableFile or kParse.
FeatureMatrix ParseFeatureMatrix(const std::string& text);
FeatureMatrix ReadFeatureMatrix(const std::string& path);

}  // namespace s5kit

#endif  // S5KIT_FEATURE_IO_H_
