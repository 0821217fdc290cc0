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

#ifndef S5KIT_SRC_FFT_H_
#define S5KIT_SRC_FFT_H_

#include <complex>
#include <cstddef>
#include <vector>

namespace s5kit::internal {

// In-place iterative radix-2 FFT. `data.size()` must be a power of two.
class Fft {
 public:
  explicit Fft(std::size_t size);

  std::size_t size() const { return size_; }
  void Forward(std::vector<std::complex<double>>& data) const;

 private:
  std::size_t size_;
  std::vector<std::size_t> bit_reverse_;
  std::vector<std::complex<double>> twiddles_;
};

bool IsPowerOfTwo(std::size_t n);

}  // namespace s5kit::internal

#endif  // S5KIT_SRC_FFT_H_
