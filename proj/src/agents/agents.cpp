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

#include "vidsearch/agents/agents.hpp"

#include <algorithm>
#include <set>

#include "vidsearch/common/error.hpp"
#include "vidsearch/common/text.hpp"
#include "vidsearch/rerank/reranker.hpp"

namespace vidsearch::agents {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n\v\f");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n\v\f");
    return s.substr(first, last - first + 1);
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

std::string video_block(const SessionVideo& v) {
    return "video " + v.video_id + ": transcription: " + v.transcription + " | description: " + v.description;
}

nlohmann::json video_json(const fusion::ScoredVideo& s, const ingest::VideoDocument& doc) {
    return {{"video_id", s.video_id}, {"transcription", doc.transcription}, {"description", doc.description},
            {"vision", s.vision},     {"audio", s.audio},                   {"fused", s.fused},
            {"rank", s.rank}};
}

}  // namespace

const char* to_string(RouteTarget target) { return target == RouteTarget::Search ? "search" : "chat"; }

std::string build_route_prompt(std::string_view query, const Session& session) {
    std::string state = "no videos retrieved yet";
    if (!session.results.empty()) {
        state = std::to_string(session.results.size()) + " videos retrieved, " + std::to_string(session.selected.size()) +
                " selected";
    }
    return "You are the routing agent of a video search assistant.\n"
           "Reply with exactly one word: SEARCH if the message needs a new video search, "
           "CHAT if it can be answered from the conversation and the videos already retrieved.\n"
           "\n"
           "Session: " +
           state + "\nMessage: " + std::string(query) + "\n";
}

RouteDecision parse_route(std::string_view text) {
    RouteDecision d;
    d.raw = std::string(text);
    const auto word = trim(text);
    if (iequals(word, "SEARCH")) {
        d.target = RouteTarget::Search;
    } else if (iequals(word, "CHAT")) {
        d.target = RouteTarget::Chat;
    } else {
        d.target = RouteTarget::Chat;
        d.fallback_used = true;
    }
    return d;
}

RouteDecision route(std::string_view query, const Session& session, const rerank::LlmClient& llm,
                    std::size_t max_tokens) {
    try {
        return parse_route(llm.complete(build_route_prompt(query, session), max_tokens));
    } catch (const std::exception&) {
        return {RouteTarget::Chat, "", true};
    }
}

std::string build_chat_prompt(std::string_view query, const Session& session, std::size_t history_turns) {
    std::string prompt = "You are a helpful assistant answering questions about videos.\n";
    if (!session.selected.empty()) {
        prompt += "Ground your answer in the provided video contents.\n\nVideos:\n";
        for (const auto& id : session.selected) {
            const auto it = std::find_if(session.results.begin(), session.results.end(),
                                         [&](const SessionVideo& v) { return v.video_id == id; });
            if (it != session.results.end()) prompt += video_block(*it) + "\n";
        }
    }
    // The current user message is already the last history entry.
    std::vector<const Message*> turns;
    const std::size_t end = session.history.empty() ? 0 : session.history.size() - 1;
    for (std::size_t i = 0; i < end; ++i) {
        if (session.history[i].role != Role::System) turns.push_back(&session.history[i]);
    }
    if (turns.size() > history_turns) turns.erase(turns.begin(), turns.end() - static_cast<std::ptrdiff_t>(history_turns));
    if (!turns.empty()) {
        prompt += "\nConversation:\n";
        for (const auto* m : turns) prompt += std::string(m->role == Role::User ? "User: " : "Assistant: ") + m->text + "\n";
    }
    prompt += "\nUser: " + std::string(query) + "\nAssistant:";
    return prompt;
}

std::string build_summary_prompt(std::string_view query, const SessionVideo& video) {
    return "Summarize the video below in one or two sentences for a search result list.\n"
           "Query: " +
           std::string(query) + "\n" + video_block(video) + "\n";
}

std::string bounded(std::string_view text, std::size_t max_chars) {
    if (text.size() <= max_chars) return std::string(text);
    const std::string_view ellipsis = max_chars > 3 ? "..." : "";
    std::size_t cut = max_chars - ellipsis.size();
    while (cut > 0 && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) --cut;
    return std::string(text.substr(0, cut)) + std::string(ellipsis);
}

TurnResult AgentRunner::handle_message(const std::string& session_id, std::string_view text,
                                       const std::optional<std::vector<std::string>>& selected) {
    auto turn = sessions_.begin(session_id);

    std::optional<std::vector<std::string>> selection;
    if (selected) {
        std::vector<std::string> ids;
        std::set<std::string> seen;
        for (const auto& id : *selected) {
            if (seen.insert(id).second) ids.push_back(id);
        }
        if (ids.size() > cfg_.fusion.k) {
            raise(ErrorCode::InvalidArgument, "at most " + std::to_string(cfg_.fusion.k) + " videos can be selected");
        }
        const auto& results = turn.session().results;
        for (const auto& id : ids) {
            const bool known = std::any_of(results.begin(), results.end(), [&](const SessionVideo& v) { return v.video_id == id; });
            if (!known) raise(ErrorCode::UnknownVideoSelected, "video '" + id + "' is not in the current results");
        }
        selection = std::move(ids);
    }

    turn.record({"user_msg", {{"text", std::string(text)}}});
    if (selection) turn.record({"selection", {{"video_ids", *selection}}});

    TurnResult result;
    result.route = route(text, turn.session(), llms_.routing, cfg_.route_max_tokens);
    turn.record({"route",
                 {{"target", to_string(result.route.target)},
                  {"raw", result.route.raw},
                  {"fallback_used", result.route.fallback_used}}});

    if (result.route.target == RouteTarget::Search) {
        run_search_phase(turn, text, result);
    } else {
        chat_turn(turn, text, result);
    }
    return result;
}

void AgentRunner::run_search_phase(SessionStore::Turn& turn, std::string_view query, TurnResult& result) {
    std::vector<fusion::ScoredVideo> hits;
    nlohmann::json videos = nlohmann::json::array();
    {
        const auto view = corpus_.read();
        try {
            hits = fusion::fused_search(view, corpus_.embedder().embed_text(query), cfg_.fusion);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::EmptyCorpus && e.code() != ErrorCode::EmptyQuery) throw;
            turn.record({"search_results", {{"query", std::string(query)}, {"videos", videos}, {"error", to_string(e.code())}}});
            result.assistant = e.code() == ErrorCode::EmptyCorpus ? "No videos are indexed yet, so there is nothing to search."
                                                                  : "Your message has no searchable words.";
            turn.record({"assistant_msg", {{"text", result.assistant}, {"degraded", false}}});
            return;
        }
        for (const auto& h : hits) videos.push_back(video_json(h, *view.document(h.video_id)));
    }
    turn.record({"search_results", {{"query", std::string(query)}, {"videos", std::move(videos)}}});

    const auto& fused = turn.session().results;
    nlohmann::json rerank_event;
    if (cfg_.rerank && !fused.empty()) {
        rerank::RerankRequest req{std::string(query), {}};
        for (const auto& v : fused) req.candidates.push_back({v.video_id, v.transcription, v.description});
        const auto reranked = rerank::rerank(req, llms_.search);
        rerank_event = {{"enabled", true},
                        {"order", reranked.order},
                        {"degraded", reranked.degraded},
                        {"parse_warning", reranked.parse_warning},
                        {"raw", reranked.raw_output}};
    } else {
        std::vector<std::size_t> identity(fused.size());
        for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = i;
        rerank_event = {{"enabled", false}, {"order", identity}, {"degraded", false}, {"parse_warning", false}, {"raw", ""}};
    }
    turn.record({"rerank", std::move(rerank_event)});
    result.rerank_degraded = turn.session().rerank_degraded;

    // Phase 1: one bounded summary per retrieved video from the chat agent.
    nlohmann::json summaries = nlohmann::json::object();
    std::string reply = "Found " + std::to_string(turn.session().results.size()) + " videos for \"" + std::string(query) + "\".";
    for (const auto& v : turn.session().results) {
        std::string summary;
        try {
            summary = std::string(trim(llms_.chat.complete(build_summary_prompt(query, v), cfg_.summary_max_tokens)));
        } catch (const std::exception&) {
            result.chat_degraded = true;
            summary = v.transcription.empty() ? v.description : v.transcription;
        }
        summary = bounded(summary, cfg_.summary_chars);
        reply += "\n" + std::to_string(v.rank) + ". " + v.video_id + ": " + summary;
        summaries[v.video_id] = summary;
    }
    result.assistant = reply;
    turn.record({"assistant_msg", {{"text", reply}, {"degraded", result.chat_degraded}, {"summaries", summaries}}});
    result.videos = turn.session().results;
}

void AgentRunner::chat_turn(SessionStore::Turn& turn, std::string_view query, TurnResult& result) {
    const auto& session = turn.session();
    if (session.selected.size() > cfg_.fusion.k) {
        raise(ErrorCode::InvalidArgument, "selection exceeds k");
    }
    try {
        result.assistant = std::string(trim(llms_.chat.complete(build_chat_prompt(query, session, cfg_.history_turns),
                                                                cfg_.chat_max_tokens)));
    } catch (const std::exception&) {
        result.chat_degraded = true;
        result.assistant = "Sorry, I cannot answer right now. Please try again in a moment.";
    }
    turn.record({"assistant_msg", {{"text", result.assistant}, {"degraded", result.chat_degraded}}});
}

}  // namespace vidsearch::agents
