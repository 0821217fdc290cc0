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

#include "s5kit/feature_io.h"

#include <charconv>
#include <cstdio>
#include <sstream>
#include <vector>

#include "s5kit/error.h"
#include "s5kit/file_util.h"

namespace s5kit {
namespace {

constexpr int kFormatVersion = 1;

void AppendNumber(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

std::string FormatFeatureMatrix(const FeatureMatrix& m) {
  std::string out = "# s5kit-feature " + std::to_string(kFormatVersion) + "\n";
  out += "# kind " + std::string(FeatureKindName(m.kind())) + "\n";
  out += "# frame_rate ";
  AppendNumber(out, m.frame_rate());
  out += "\n# sample_rate " + std::to_string(m.sample_rate()) + "\n";
  out += "# fft_size " + std::to_string(m.fft_size()) + "\n";
  out += "# frames " + std::to_string(m.frames()) + "\n";
  out += "# bins " + std::to_string(m.bins()) + "\n";
  if (!m.bin_labels().empty()) {
    out += "# bin_labels";
    for (double v : m.bin_labels()) {
      out += ' ';
      AppendNumber(out, v);
    }
    out += '\n';
  }
  for (std::size_t t = 0; t < m.frames(); ++t) {
    for (std::size_t b = 0; b < m.bins(); ++b) {
      if (b) out += ' ';
      AppendNumber(out, m.at(t, b));
    }
    out += '\n';
  }
  return out;
}

void WriteFeatureMatrix(const FeatureMatrix& matrix, const std::string& path) {
  WriteFileAtomic(path, FormatFeatureMatrix(matrix));
}

FeatureMatrix ParseFeatureMatrix(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& what) -> Error {
    return Error(ErrorCode::kParse,
                 "feature file line " + std::to_string(line_no) + ": " + what);
  };

  std::string kind_name;
  double frame_rate = 0.0;
  long long sample_rate = 0, fft_size = 0, frames = -1, bins = -1;
  int version = 0;
  std::vector<double> labels, values;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    if (line[0] == '#') {
      std::string hash, key;
      fields >> hash >> key;
      if (key == "s5kit-feature") {
        fields >> version;
      } else if (key == "kind") {
        fields >> kind_name;
      } else if (key == "frame_rate") {
        fields >> frame_rate;
      } else if (key == "sample_rate") {
        fields >> sample_rate;
      } else if (key == "fft_size") {
        fields >> fft_size;
      } else if (key == "frames") {
        fields >> frames;
      } else if (key == "bins") {
        fields >> bins;
      } else if (key == "bin_labels") {
        double v;
        while (fields >> v) labels.push_back(v);
      }
      if (fields.fail() && !fields.eof()) throw fail("malformed header '" + line + "'");
      continue;
    }
    if (version != kFormatVersion) throw fail("missing or unsupported version header");
    std::size_t count = 0;
    std::string token;
    while (fields >> token) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
      if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw fail("bad number '" + token + "'");
      }
      values.push_back(v);
      ++count;
    }
    if (bins >= 0 && count != static_cast<std::size_t>(bins)) {
      throw fail("expected " + std::to_string(bins) + " values, got " +
                 std::to_string(count));
    }
  }
  if (version != kFormatVersion) throw fail("missing or unsupported version header");
  if (frames < 0 || bins < 0 || kind_name.empty()) throw fail("incomplete header");
  if (values.size() != static_cast<std::size_t>(frames * bins)) {
    throw fail("expected " + std::to_string(frames) + " rows");
  }
  return FeatureMatrix(ParseFeatureKind(kind_name), static_cast<std::size_t>(frames),
                       static_cast<std::size_t>(bins), std::move(values), frame_rate,
                       static_cast<int>(sample_rate), static_cast<std::size_t>(fft_size),
                       std::move(labels));
}

FeatureMatrix ReadFeatureMatrix(const std::string& path) {
  return ParseFeatureMatrix(ReadFileToString(path));
}

}  // namespace s5kit
