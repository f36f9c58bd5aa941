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

#include "vidsearch/agents/search_tool.hpp"

#include "vidsearch/rerank/reranker.hpp"

namespace vidsearch::agents {

SearchOutcome search_videos(const ingest::Corpus& corpus, std::string_view query, const fusion::FusionConfig& cfg,
                            const rerank::LlmClient* reranker) {
    cfg.validate();
    const auto q = corpus.embedder().embed_text(query);
    SearchOutcome out;
    rerank::RerankRequest req{std::string(query), {}};
    {
        const auto view = corpus.read();
        out.videos = fusion::fused_search(view, q, cfg);
        if (reranker == nullptr || out.videos.empty()) return out;
        for (const auto& v : out.videos) {
            const auto* doc = view.document(v.video_id);
            req.candidates.push_back({v.video_id, doc->transcription, doc->description});
        }
    }
    const auto result = rerank::rerank(req, *reranker);
    std::vector<fusion::ScoredVideo> ordered;
    ordered.reserve(out.videos.size());
    for (std::size_t i : result.order) {
        ordered.push_back(out.videos[i]);
        ordered.back().rank = ordered.size();
    }
    out.videos = std::move(ordered);
    out.reranked = true;
    out.rerank_degraded = result.degraded;
    out.parse_warning = result.parse_warning;
    return out;
}

}  // namespace vidsearch::agents
