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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vidsearch/agents/session.hpp"
#include "vidsearch/fusion/fused_search.hpp"
#include "vidsearch/ingest/corpus.hpp"
#include "vidsearch/rerank/llm_client.hpp"

namespace vidsearch::agents {

inline constexpr std::string_view kRoutePromptVersion = "route-v1";
inline constexpr std::string_view kChatPromptVersion = "chat-v1";
inline constexpr std::string_view kSummaryPromptVersion = "summary-v1";

enum class RouteTarget { Search, Chat };
const char* to_string(RouteTarget target);

struct RouteDecision {
    RouteTarget target = RouteTarget::Chat;
    std::string raw;
    bool fallback_used = false;
};

/// One backend per agent role. Borrowed; they must outlive the runner.
struct AgentLlms {
    const rerank::LlmClient& routing;
    const rerank::LlmClient& search;  // the rerank tool
    const rerank::LlmClient& chat;
};

struct AgentConfig {
    fusion::FusionConfig fusion;  // k is the size of V-hat
    bool rerank = true;
    std::size_t history_turns = 10;
    std::size_t summary_chars = 400;
    std::size_t route_max_tokens = 8;
    std::size_t chat_max_tokens = 512;
    std::size_t summary_max_tokens = 128;
};

std::string build_route_prompt(std::string_view query, const Session& session);

/// Exact match of "SEARCH" or "CHAT" after trimming, case-insensitive;
/// anything else is Chat with fallback_used.
RouteDecision parse_route(std::string_view text);
/// Never throws: an unavailable backend also yields Chat with fallback_used.
RouteDecision route(std::string_view query, const Session& session, const rerank::LlmClient& llm,
                    std::size_t max_tokens = 8);

/// Selected videos as "video {id}: transcription: {a} | description: {d}"
/// blocks (none when nothing is selected), the last `history_turns` user and
/// assistant messages before the current one, then the query.
std::string build_chat_prompt(std::string_view query, const Session& session, std::size_t history_turns);
std::string build_summary_prompt(std::string_view query, const SessionVideo& video);

/// Truncates to at most `max_chars` bytes without splitting a UTF-8
/// sequence, appending "..." when shortened.
std::string bounded(std::string_view text, std::size_t max_chars);

struct TurnResult {
    RouteDecision route;
    std::string assistant;
    std::vector<SessionVideo> videos;  // set on search turns
    bool rerank_degraded = false;
    bool chat_degraded = false;
};

/// Routing -> Search -> Chat or Routing -> Chat, one turn at a time per
/// session.
class AgentRunner {
public:
    AgentRunner(const ingest::Corpus& corpus, AgentLlms llms, AgentConfig cfg, SessionStore& sessions)
        : corpus_(corpus), llms_(llms), cfg_(std::move(cfg)), sessions_(sessions) {}

    /// Throws UnknownSession, UnknownVideoSelected (before anything is
    /// logged) and InvalidArgument for more than k selections.
    TurnResult handle_message(const std::string& session_id, std::string_view text,
                              const std::optional<std::vector<std::string>>& selected = std::nullopt);

    const AgentConfig& config() const { return cfg_; }

private:
    void run_search_phase(SessionStore::Turn& turn, std::string_view query, TurnResult& result);
    void chat_turn(SessionStore::Turn& turn, std::string_view query, TurnResult& result);

    const ingest::Corpus& corpus_;
    AgentLlms llms_;
    AgentConfig cfg_;
    SessionStore& sessions_;
};

}  // namespace vidsearch::agents
