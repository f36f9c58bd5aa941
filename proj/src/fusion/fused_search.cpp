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

#include "vidsearch/fusion/fused_search.hpp"

#include <algorithm>
#include <set>

#include "vidsearch/common/error.hpp"

namespace vidsearch::fusion {

void FusionConfig::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) raise(ErrorCode::InvalidArgument, "alpha must lie in [0, 1]");
    if (k == 0) raise(ErrorCode::BadK, "k must be >= 1");
    if (k > m_cand) {
        raise(ErrorCode::BadK, "k (" + std::to_string(k) + ") exceeds the candidate depth " + std::to_string(m_cand));
    }
    if (ef_search && *ef_search == 0) raise(ErrorCode::InvalidArgument, "ef_search must be >= 1");
}

void rank_and_truncate(std::vector<ScoredVideo>& scored, std::size_t k) {
    std::sort(scored.begin(), scored.end(), [](const ScoredVideo& a, const ScoredVideo& b) {
        if (a.fused != b.fused) return a.fused > b.fused;
        return a.video_id < b.video_id;
    });
    if (scored.size() > k) scored.resize(k);
    for (std::size_t i = 0; i < scored.size(); ++i) scored[i].rank = i + 1;
}

std::vector<ScoredVideo> fused_search(const ingest::Corpus::ReadView& view, const embedkit::Embedding& query,
                                      const FusionConfig& cfg) {
    cfg.validate();
    if (view.vision().size() == 0 && view.audio().size() == 0) raise(ErrorCode::EmptyCorpus, "empty corpus");
    if (query.missing) raise(ErrorCode::EmptyQuery, "query has no searchable tokens");

    std::set<std::string> candidates;
    for (const auto* index : {&view.vision(), &view.audio()}) {
        if (index->size() == 0) continue;
        for (auto& hit : index->search(query.values, cfg.m_cand, cfg.ef_search)) candidates.insert(std::move(hit.video_id));
    }

    std::vector<ScoredVideo> scored;
    scored.reserve(candidates.size());
    for (const auto& id : candidates) {
        const auto* doc = view.document(id);
        if (doc == nullptr) continue;
        ScoredVideo s;
        s.video_id = id;
        s.vision = doc->vision.missing ? 0.0 : embedkit::inner_product(doc->vision, query);
        s.audio = doc->audio.missing ? 0.0 : embedkit::inner_product(doc->audio, query);
        s.fused = fuse(cfg.alpha, s.vision, s.audio);
        scored.push_back(std::move(s));
    }
    rank_and_truncate(scored, cfg.k);
    return scored;
}

std::vector<ScoredVideo> fused_search(const ingest::Corpus& corpus, std::string_view query, const FusionConfig& cfg) {
    cfg.validate();
    const auto q = corpus.embedder().embed_text(query);
    return fused_search(corpus.read(), q, cfg);
}

}  // namespace vidsearch::fusion
