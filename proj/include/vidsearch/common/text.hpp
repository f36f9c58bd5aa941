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

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vidsearch {

inline constexpr std::uint64_t kFnvOffsetBasis = 14695981039346656037ULL;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

constexpr std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) noexcept {
    std::uint64_t h = kFnvOffsetBasis;
    for (std::uint8_t b : bytes) {
        h ^= b;
        h *= kFnvPrime;
    }
    return h;
}

constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = kFnvOffsetBasis;
    for (char c : s) {
        h ^= static_cast<std::uint8_t>(c);
        h *= kFnvPrime;
    }
    return h;
}

/// Lowercases ASCII, Latin-1, Latin Extended-A, Greek and Cyrillic letters.
/// Other code points pass through unchanged; invalid UTF-8 bytes are copied.
std::string utf8_lower(std::string_view text);

/// Splits on Unicode whitespace (the White_Space property set); never yields
/// empty tokens.
std::vector<std::string> split_whitespace(std::string_view text);

bool is_blank(std::string_view text);

std::string base64_encode(std::span<const std::uint8_t> bytes);
/// Throws Error(InvalidArgument) on characters outside the standard alphabet.
std::vector<std::uint8_t> base64_decode(std::string_view text);

std::string hex64(std::uint64_t value);

}  // namespace vidsearch
