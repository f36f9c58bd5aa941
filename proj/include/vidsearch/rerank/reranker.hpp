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

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "vidsearch/rerank/llm_client.hpp"

namespace vidsearch::rerank {

inline constexpr std::string_view kRerankPromptVersion = "rerank-v1";
inline constexpr std::size_t kRerankMaxTokens = 256;

struct RerankCandidate {
    std::string video_id;
    std::string transcription;
    std::string description;

    friend bool operator==(const RerankCandidate&, const RerankCandidate&) = default;
};

struct RerankRequest {
    std::string query;
    std::vector<RerankCandidate> candidates;

    /// InvalidArgument when empty or when ids repeat.
    void validate() const;
};

/// Instruction, "Query: {q}", then one "[{i}] transcription: {a} | description: {d}"
/// line per candidate. Line breaks inside a field are flattened to spaces so
/// each candidate stays on one line.
std::string build_rerank_prompt(const RerankRequest& req);

struct ParsedOrder {
    std::vector<std::size_t> order;  // always a permutation of 0..k-1
    bool warning = false;            // no integer array found; order is the identity
};

/// Takes the first JSON array of integers in `text`, drops out-of-range and
/// repeated entries, then appends the missing indices in ascending order.
/// Never throws.
ParsedOrder parse_rerank_output(std::string_view text, std::size_t k) noexcept;

struct RankedCandidate {
    RerankCandidate candidate;
    std::size_t rank_before = 0;  // 1-based
    std::size_t rank_after = 0;   // 1-based
};

struct RerankResult {
    std::vector<RankedCandidate> ranked;
    std::vector<std::size_t> order;
    bool degraded = false;       // backend failed; original order kept
    bool parse_warning = false;  // backend answered without a usable array
    std::string raw_output;
};

/// Never throws on backend failure: falls back to the input order with
/// degraded set. Throws InvalidArgument only for an invalid request.
RerankResult rerank(const RerankRequest& req, const LlmClient& llm);

}  // namespace vidsearch::rerank
