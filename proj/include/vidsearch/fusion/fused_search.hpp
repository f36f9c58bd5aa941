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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vidsearch/ingest/corpus.hpp"

namespace vidsearch::fusion {

struct FusionConfig {
    double alpha = 0.5;       // weight of the vision score
    std::size_t m_cand = 100; // candidates taken from each modality index
    std::size_t k = 10;
    /// Beam width for both index searches; the index default when unset.
    std::optional<std::size_t> ef_search;

    /// InvalidArgument for alpha outside [0,1]; BadK for k == 0 or k > m_cand.
    void validate() const;
};

struct ScoredVideo {
    std::string video_id;
    double vision = 0.0;  // <e_f, e_q>, 0 when the vision embedding is missing
    double audio = 0.0;   // <e_a, e_q>, 0 when the audio-text embedding is missing
    double fused = 0.0;
    std::size_t rank = 0;  // 1-based

    friend bool operator==(const ScoredVideo&, const ScoredVideo&) = default;
};

inline double fuse(double alpha, double vision, double audio) { return alpha * vision + (1.0 - alpha) * audio; }

/// Sorts by (fused desc, id asc), truncates to k and numbers ranks from 1.
void rank_and_truncate(std::vector<ScoredVideo>& scored, std::size_t k);

/// Union of the top-m_cand hits of each modality index, both modalities
/// rescored exactly from the stored document vectors, fused and ranked.
/// Throws EmptyCorpus when neither index holds anything and EmptyQuery when
/// the query embeds to nothing.
std::vector<ScoredVideo> fused_search(const ingest::Corpus::ReadView& view, const embedkit::Embedding& query,
                                      const FusionConfig& cfg);
std::vector<ScoredVideo> fused_search(const ingest::Corpus& corpus, std::string_view query, const FusionConfig& cfg);

}  // namespace vidsearch::fusion
