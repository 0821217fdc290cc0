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

#include <filesystem>
#include <iostream>

#include "cli_common.h"
#include "s5kit/feature_io.h"
#include "s5kit/wav.h"

namespace s5kit::cli {

namespace fs = std::filesystem;

int RunFeatures(const GlobalOptions& global, const FeaturesOptions& options) {
  StftConfig stft = options.stft;
  stft.window = options.window == "rectangular" ? WindowType::kRectangular : WindowType::kHann;
  ChromaConfig chroma = options.chroma;
  chroma.normalization = options.chroma_norm == "none" ? ChromaNormalization::kNone
                                                       : ChromaNormalization::kL2PerFrame;
  try {
    stft.Validate();
    if (!(options.rolloff.kappa > 0.0 && options.rolloff.kappa <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "--kappa must lie in (0, 1]");
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  int failures = 0;
  for (const auto& input : options.inputs) {
    try {
      const AudioClip clip = ReadWav(input);
      const FeatureMatrix power = StftPower(clip, options.channel, stft);
      const std::string base =
          (fs::path(options.out_dir) / fs::path(input).stem()).string();
      WriteFeatureMatrix(MelSpectrogram(power, options.mel), base + ".mel.txt");
      WriteFeatureMatrix(SpectralRolloff(power, options.rolloff), base + ".rolloff.txt");
      WriteFeatureMatrix(Chroma(power, chroma), base + ".chroma.txt");
      if (options.dump_power) WriteFeatureMatrix(power, base + ".power.txt");
      Log(global, 1, input + ": " + std::to_string(power.frames()) + " frames");
    } catch (const Error& e) {
      std::cerr << "error: " << input << ": " << e.what() << "\n";
      ++failures;
    }
  }
  EchoConfig(global, options.out_dir);
  return failures == 0 ? kExitOk : kExitData;
}

}  // namespace s5kit::cli
