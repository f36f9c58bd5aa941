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

#include <string_view>
#include <vector>

#include "vidsearch/fusion/fused_search.hpp"
#include "vidsearch/rerank/llm_client.hpp"

namespace vidsearch::agents {

struct SearchOutcome {
    std::vector<fusion::ScoredVideo> videos;  // rank reflects the final order
    bool reranked = false;
    bool rerank_degraded = false;
    bool parse_warning = false;
};

/// Fused search, then (when `reranker` is set) one listwise rerank call over
/// the top-k using each document's transcription and description. Scores are
/// kept; only the order and ranks change.
SearchOutcome search_videos(const ingest::Corpus& corpus, std::string_view query, const fusion::FusionConfig& cfg,
                            const rerank::LlmClient* reranker);

}  // namespace vidsearch::agents
