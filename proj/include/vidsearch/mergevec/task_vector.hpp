// Copyright 2026-present the vidsearch authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "vidsearch/mergevec/tensor_archive.hpp"

namespace vidsearch::mergevec {

/// Checks that both sides hold the same names with the same dtype and shape.
/// NameSetMismatch lists the symmetric difference; ShapeMismatch names the
/// first offending tensor.
void check_compatible(const std::map<std::string, TensorInfo>& a, const std::map<std::string, TensorInfo>& b);

/// Elementwise a - b and m + t in f32. NonFiniteResult on overflow unless
/// `allow_nonfinite`.
void subtract_into(std::span<const float> a, std::span<const float> b, std::span<float> out, bool allow_nonfinite,
                   const std::string& name);
void add_into(std::span<const float> m, std::span<const float> t, std::span<float> out, bool allow_nonfinite,
              const std::string& name);

/// Task vector tau = a - b; metadata records both inputs' fingerprints.
TensorArchive tensor_diff(const TensorArchive& a, const TensorArchive& b);
/// m + t; metadata records the base fingerprint and carries t's provenance.
TensorArchive tensor_add(const TensorArchive& m, const TensorArchive& t);

/// "crc32c:xxxxxxxx" of the serialized archive (equal to the file's trailing
/// checksum).
std::string fingerprint(const TensorArchive& archive);

struct TensorNorm {
    std::string name;
    double l2 = 0.0;  // of the f32 task vector, accumulated in double
};

struct MergeReport {
    std::vector<TensorNorm> task_vector_norms;  // name order
    bool written = false;
};

/// out = base + (plus - minus), streamed tensor by tensor. With dry_run the
/// task-vector norms are computed and nothing is written.
MergeReport merge_archives(const std::filesystem::path& base, const std::filesystem::path& plus,
                           const std::filesystem::path& minus, const std::filesystem::path& out, bool dry_run);

}  // namespace vidsearch::mergevec
