# Copyright 2025 The s5kit Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Tagging, separation and evaluation tools for sound scene mixtures."""

from ._s5kit import (
    Error,
    agent_correct,
    audit,
    ca_sdri,
    default_vocabulary,
    ensemble_scores,
    evaluate_corpus,
    features,
    fp_penalized_accuracy,
    macro_accuracy,
    make_synthetic_corpus,
    read_wav,
    sdr,
    set_accuracy,
    stft_power,
    write_wav,
)

__all__ = [
    "Error",
    "agent_correct",
    "audit",
    "ca_sdri",
    "default_vocabulary",
    "ensemble_scores",
    "evaluate_corpus",
    "features",
    "fp_penalized_accuracy",
    "macro_accuracy",
    "make_synthetic_corpus",
    "read_wav",
    "sdr",
    "set_accuracy",
    "stft_power",
    "write_wav",
]
