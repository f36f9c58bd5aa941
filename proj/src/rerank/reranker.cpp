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

#include "vidsearch/rerank/reranker.hpp"

#include <numeric>
#include <set>

#include "vidsearch/common/error.hpp"

namespace vidsearch::rerank {

namespace {

std::string one_line(std::string_view text) {
    std::string out(text);
    for (auto& c : out) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    return out;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

/// Parses "[ int (, int)* ]" or "[ ]" starting at text[pos] == '['. Values
/// too large for the candidate range are kept as k (out of range).
bool parse_int_array(std::string_view text, std::size_t pos, std::size_t k, std::vector<std::size_t>& out) {
    out.clear();
    std::size_t i = pos + 1;
    auto skip = [&] {
        while (i < text.size() && is_space(text[i])) ++i;
    };
    skip();
    if (i < text.size() && text[i] == ']') return true;
    while (true) {
        skip();
        bool negative = false;
        if (i < text.size() && text[i] == '-') {
            negative = true;
            ++i;
        }
        const std::size_t start = i;
        std::size_t value = 0;
        bool overflow = false;
        while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
            if (value > k) {
                overflow = true;
            } else {
                value = value * 10 + static_cast<std::size_t>(text[i] - '0');
            }
            ++i;
        }
        if (i == start) return false;
        if (start + 1 < i && text[start] == '0') return false;  // JSON forbids leading zeros
        out.push_back(negative || overflow || value >= k ? k : value);
        skip();
        if (i >= text.size()) return false;
        if (text[i] == ']') return true;
        if (text[i] != ',') return false;
        ++i;
    }
}

}  // namespace

void RerankRequest::validate() const {
    if (candidates.empty()) raise(ErrorCode::InvalidArgument, "rerank needs at least one candidate");
    std::set<std::string_view> ids;
    for (const auto& c : candidates) {
        if (!ids.insert(c.video_id).second) raise(ErrorCode::InvalidArgument, "duplicate candidate '" + c.video_id + "'");
    }
}

std::string build_rerank_prompt(const RerankRequest& req) {
    std::string prompt =
        "You rank video search results by relevance to a user query.\n"
        "Respond with ONLY a JSON array of the 0-based candidate indices, ordered from most to least relevant. "
        "Include every index exactly once and write nothing else.\n"
        "\n"
        "Query: " +
        one_line(req.query) + "\n\nCandidates:\n";
    for (std::size_t i = 0; i < req.candidates.size(); ++i) {
        const auto& c = req.candidates[i];
        prompt += "[" + std::to_string(i) + "] transcription: " + one_line(c.transcription) +
                  " | description: " + one_line(c.description) + "\n";
    }
    return prompt;
}

ParsedOrder parse_rerank_output(std::string_view text, std::size_t k) noexcept {
    ParsedOrder result;
    std::vector<std::size_t> raw;
    bool found = false;
    try {
        for (auto pos = text.find('['); pos != std::string_view::npos; pos = text.find('[', pos + 1)) {
            if (parse_int_array(text, pos, k, raw)) {
                found = true;
                break;
            }
        }
        std::vector<bool> used(k, false);
        if (found) {
            for (const auto v : raw) {
                if (v < k && !used[v]) {
                    used[v] = true;
                    result.order.push_back(v);
                }
            }
        }
        for (std::size_t i = 0; i < k; ++i) {
            if (!used[i]) result.order.push_back(i);
        }
    } catch (...) {
        // Allocation failure is the only possibility; degrade to identity.
        result.order.resize(k);
        std::iota(result.order.begin(), result.order.end(), std::size_t{0});
        found = false;
    }
    result.warning = !found;
    return result;
}

RerankResult rerank(const RerankRequest& req, const LlmClient& llm) {
    req.validate();
    const std::size_t k = req.candidates.size();
    RerankResult result;
    try {
        result.raw_output = llm.complete(build_rerank_prompt(req), kRerankMaxTokens);
        auto parsed = parse_rerank_output(result.raw_output, k);
        result.order = std::move(parsed.order);
        result.parse_warning = parsed.warning;
    } catch (const std::exception&) {
        result.degraded = true;
        result.order.resize(k);
        std::iota(result.order.begin(), result.order.end(), std::size_t{0});
    }
    result.ranked.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        const auto src = result.order[i];
        result.ranked.push_back({req.candidates[src], src + 1, i + 1});
    }
    return result;
}

}  // namespace vidsearch::rerank
