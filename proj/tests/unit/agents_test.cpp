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

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <thread>

#include "agent_world.hpp"
#include "test_support.hpp"
#include "vidsearch/agents/agents.hpp"
#include "vidsearch/common/binary_io.hpp"
#include "vidsearch/ingest/pipeline.hpp"
#include "vidsearch/rerank/reranker.hpp"

namespace vidsearch::agents {
namespace {

using rerank::ScriptedLlm;
using vidsearch::testing::data_dir;
using vidsearch::testing::TempDir;
using vidsearch::testing::AgentWorld;
using vidsearch::testing::counting_clock;
using vidsearch::testing::counting_ids;
using vidsearch::testing::rec;

class AgentsTest : public ::testing::Test, public AgentWorld {};


std::string joined(const std::vector<std::string>& lines) {
    std::string out;
    for (const auto& l : lines) out += l + "\n";
    return out;
}

/// Byte comparison against a committed golden; VIDSEARCH_UPDATE_GOLDENS=1
/// rewrites it instead.
void expect_golden(const std::string& name, const std::vector<std::string>& lines) {
    const auto path = data_dir() / "golden" / "agents" / name;
    if (std::getenv("VIDSEARCH_UPDATE_GOLDENS") != nullptr) {
        write_file_atomic(path, joined(lines));
        return;
    }
    EXPECT_EQ(joined(lines), read_text_file(path)) << name;
}

TEST(Route, ExactMatchParsing) {
    EXPECT_EQ(parse_route("SEARCH").target, RouteTarget::Search);
    EXPECT_FALSE(parse_route("SEARCH").fallback_used);
    EXPECT_EQ(parse_route("  search \n").target, RouteTarget::Search);
    const auto chat = parse_route("chat\n");
    EXPECT_EQ(chat.target, RouteTarget::Chat);
    EXPECT_FALSE(chat.fallback_used);
    const auto fuzzy = parse_route("I think maybe search?");
    EXPECT_EQ(fuzzy.target, RouteTarget::Chat);
    EXPECT_TRUE(fuzzy.fallback_used);
    EXPECT_TRUE(parse_route("").fallback_used);
    EXPECT_TRUE(parse_route("SEARCH CHAT").fallback_used);
}

TEST(Route, UnavailableBackendFallsBackToChat) {
    Session s;
    const auto d = route("find cats", s, ScriptedLlm::failing());
    EXPECT_EQ(d.target, RouteTarget::Chat);
    EXPECT_TRUE(d.fallback_used);
}

TEST(Route, PromptCarriesSessionState) {
    Session s;
    EXPECT_NE(build_route_prompt("q", s).find("Session: no videos retrieved yet\nMessage: q\n"), std::string::npos);
    s.results.resize(3);
    s.selected = {"a"};
    EXPECT_NE(build_route_prompt("q", s).find("Session: 3 videos retrieved, 1 selected\n"), std::string::npos);
}

TEST(Bounded, RespectsUtf8) {
    EXPECT_EQ(bounded("short", 10), "short");
    EXPECT_EQ(bounded("abcdefghij", 8), "abcde...");
    const std::string accented = "caf\xC3\xA9 au lait";  // é is two bytes at offsets 3-4
    EXPECT_EQ(bounded(accented, 7), "caf...");
    EXPECT_EQ(bounded("abcdef", 2), "ab");
}

TEST_F(AgentsTest, GoldenSearchWithSummaries) {
    auto agents = runner(routing_, search_, chat_);
    const auto id = sessions_->create();
    const auto result = agents.handle_message(id, "find videos about the flood");
    EXPECT_EQ(result.route.target, RouteTarget::Search);
    ASSERT_EQ(result.videos.size(), 4U);
    EXPECT_FALSE(result.rerank_degraded);
    for (const auto& v : result.videos) EXPECT_FALSE(v.summary.empty()) << v.video_id;
    EXPECT_NE(result.assistant.find("Volunteers ferry residents"), std::string::npos);
    expect_golden("a_search_summaries.jsonl", sessions_->log(id));
}

TEST_F(AgentsTest, GoldenSelectionAndGroundedAnswer) {
    auto agents = runner(routing_, search_, chat_);
    const auto id = sessions_->create();
    agents.handle_message(id, "find videos about the flood");
    const auto answer = agents.handle_message(id, "what happened to the bridge?",
                                              std::vector<std::string>{"flood_bridge", "flood_rescue"});
    EXPECT_EQ(answer.route.target, RouteTarget::Chat);
    EXPECT_NE(answer.assistant.find("the river rose over the bridge and flooded the town"), std::string::npos);
    EXPECT_NE(answer.assistant.find("volunteers carry people to boats during the flood"), std::string::npos);
    EXPECT_EQ(answer.assistant.find("storm warning issued for the coast"), std::string::npos);
    EXPECT_EQ(sessions_->snapshot(id).selected, (std::vector<std::string>{"flood_bridge", "flood_rescue"}));
    expect_golden("b_selection_grounded.jsonl", sessions_->log(id));
}

TEST_F(AgentsTest, GoldenChatWithoutVideos) {
    auto agents = runner(routing_, search_, ScriptedLlm::echo());
    const auto id = sessions_->create();
    const auto result = agents.handle_message(id, "hello there");
    EXPECT_EQ(result.route.target, RouteTarget::Chat);
    EXPECT_FALSE(result.route.fallback_used);
    EXPECT_TRUE(result.videos.empty());
    EXPECT_EQ(result.assistant.find("video "), std::string::npos);
    expect_golden("c_chat_only.jsonl", sessions_->log(id));
}

TEST_F(AgentsTest, GoldenRoutingFallback) {
    auto agents = runner(routing_, search_, chat_);
    const auto id = sessions_->create();
    const auto result = agents.handle_message(id, "hmm, flood pictures maybe");
    EXPECT_EQ(result.route.target, RouteTarget::Chat);
    EXPECT_TRUE(result.route.fallback_used);
    EXPECT_EQ(result.route.raw, "I think maybe search?");
    expect_golden("d_route_fallback.jsonl", sessions_->log(id));
}

TEST(AgentScenarios, SharedRunnerReproducesGoldens) {
    for (const auto& name : vidsearch::testing::golden_scenarios()) {
        EXPECT_EQ(joined(vidsearch::testing::run_golden_scenario(name)),
                  read_text_file(data_dir() / "golden" / "agents" / (name + ".jsonl")))
            << name;
    }
}

TEST_F(AgentsTest, SmallCorpusTruncatesToSize) {
    auto agents = runner(ScriptedLlm::constant("SEARCH"), ScriptedLlm::constant("[]"), ScriptedLlm::constant("ok"));
    const auto id = sessions_->create();
    EXPECT_EQ(agents.handle_message(id, "storm").videos.size(), 4U);
}

TEST_F(AgentsTest, DegradedRerankKeepsFusedOrder) {
    auto agents = runner(ScriptedLlm::constant("SEARCH"), ScriptedLlm::failing(), ScriptedLlm::constant("ok"));
    const auto id = sessions_->create();
    const auto result = agents.handle_message(id, "flood town bridge");
    EXPECT_TRUE(result.rerank_degraded);
    EXPECT_TRUE(sessions_->snapshot(id).rerank_degraded);
    const auto fused = fusion::fused_search(*corpus_, "flood town bridge", {});
    ASSERT_EQ(result.videos.size(), fused.size());
    for (std::size_t i = 0; i < fused.size(); ++i) {
        EXPECT_EQ(result.videos[i].video_id, fused[i].video_id);
        EXPECT_EQ(result.videos[i].rank, fused[i].rank);
    }
}

TEST_F(AgentsTest, RerankPermutesResults) {
    auto agents = runner(ScriptedLlm::constant("SEARCH"), ScriptedLlm::constant("[3, 2, 1, 0]"), ScriptedLlm::constant("ok"));
    const auto id = sessions_->create();
    const auto result = agents.handle_message(id, "flood town bridge");
    const auto fused = fusion::fused_search(*corpus_, "flood town bridge", {});
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(result.videos[i].video_id, fused[3 - i].video_id);
        EXPECT_EQ(result.videos[i].fused_rank, 4 - i);
        EXPECT_EQ(result.videos[i].rank, i + 1);
    }
}

TEST_F(AgentsTest, SelectionMustComeFromResults) {
    auto agents = runner(routing_, search_, chat_);
    const auto id = sessions_->create();
    EXPECT_ERROR_CODE(agents.handle_message(id, "hi", std::vector<std::string>{"flood_bridge"}),
                      ErrorCode::UnknownVideoSelected);
    EXPECT_TRUE(sessions_->log(id).empty());
    agents.handle_message(id, "find videos about the flood");
    const auto before = sessions_->log(id).size();
    EXPECT_ERROR_CODE(agents.handle_message(id, "hi", std::vector<std::string>{"nope"}), ErrorCode::UnknownVideoSelected);
    EXPECT_EQ(sessions_->log(id).size(), before);
    EXPECT_ERROR_CODE(agents.handle_message("missing", "hi"), ErrorCode::UnknownSession);
}

TEST_F(AgentsTest, SelectionLimitedToK) {
    AgentConfig cfg;
    cfg.fusion.k = 2;
    auto agents = runner(routing_, search_, chat_, cfg);
    const auto id = sessions_->create();
    agents.handle_message(id, "find storm videos");
    const auto& results = sessions_->snapshot(id).results;
    ASSERT_EQ(results.size(), 2U);
    EXPECT_ERROR_CODE(agents.handle_message(id, "q", std::vector<std::string>{results[0].video_id, results[1].video_id, "x"}),
                      ErrorCode::InvalidArgument);
}

TEST_F(AgentsTest, NewSearchClearsSelection) {
    auto agents = runner(routing_, search_, chat_);
    const auto id = sessions_->create();
    agents.handle_message(id, "find videos about the flood");
    agents.handle_message(id, "tell me more", std::vector<std::string>{"storm_coast"});
    EXPECT_EQ(sessions_->snapshot(id).selected.size(), 1U);
    agents.handle_message(id, "show cooking");
    EXPECT_TRUE(sessions_->snapshot(id).selected.empty());
}

TEST_F(AgentsTest, ChatPromptUsesLastTenTurns) {
    auto agents = runner(ScriptedLlm::constant("CHAT"), search_, ScriptedLlm::constant("reply"));
    const auto id = sessions_->create();
    for (int i = 0; i < 8; ++i) agents.handle_message(id, "message " + std::to_string(i));
    auto session = sessions_->snapshot(id);
    session.history.push_back({Role::User, "current", ""});
    const auto prompt = build_chat_prompt("current", session, 10);
    EXPECT_EQ(prompt.find("message 2\n"), std::string::npos);
    EXPECT_NE(prompt.find("User: message 3\n"), std::string::npos);
    EXPECT_NE(prompt.find("User: message 7\nAssistant: reply\n\nUser: current\nAssistant:"), std::string::npos);
    EXPECT_EQ(prompt.find("video "), std::string::npos);
}

TEST_F(AgentsTest, EmptyCorpusBecomesAssistantMessage) {
    TempDir empty_dir("agents-empty");
    ingest::CorpusConfig cfg;
    cfg.embedder.dimension = 64;
    auto empty = ingest::Corpus::open(empty_dir.path(), cfg);
    const auto search = ScriptedLlm::constant("SEARCH");
    AgentRunner agents(*empty, {search, search_, chat_}, {}, *sessions_);
    const auto id = sessions_->create();
    const auto result = agents.handle_message(id, "find anything");
    EXPECT_EQ(result.route.target, RouteTarget::Search);
    EXPECT_TRUE(result.videos.empty());
    EXPECT_NE(result.assistant.find("No videos are indexed"), std::string::npos);
}

TEST_F(AgentsTest, ChatFailureApologizes) {
    auto agents = runner(ScriptedLlm::constant("CHAT"), search_, ScriptedLlm::failing());
    const auto id = sessions_->create();
    const auto result = agents.handle_message(id, "hi");
    EXPECT_TRUE(result.chat_degraded);
    EXPECT_NE(result.assistant.find("Sorry"), std::string::npos);
    const auto last = nlohmann::json::parse(sessions_->log(id).back());
    EXPECT_EQ(last.at("type"), "assistant_msg");
    EXPECT_EQ(last.at("degraded"), true);
}

TEST_F(AgentsTest, TurnsFollowStateMachineEdges) {
    auto agents = runner(routing_, search_, chat_);
    const auto id = sessions_->create();
    for (const char* msg : {"find videos about the flood", "hello", "hmm what", "show storm", "thanks"}) {
        agents.handle_message(id, msg);
    }
    std::vector<std::string> types;
    std::string route_target;
    for (const auto& line : sessions_->log(id)) {
        const auto j = nlohmann::json::parse(line);
        const auto type = j.at("type").get<std::string>();
        if (type == "user_msg") {
            route_target.clear();
        } else if (type == "route") {
            route_target = j.at("target");
        } else if (type == "search_results" || type == "rerank") {
            EXPECT_EQ(route_target, "search");
        }
        types.push_back(type);
    }
    // Each turn: user_msg, [selection], route, then search_results, rerank, assistant_msg or assistant_msg.
    for (std::size_t i = 0; i < types.size(); ++i) {
        if (types[i] == "route") {
            ASSERT_GT(i, 0U);
            EXPECT_TRUE(types[i - 1] == "user_msg" || types[i - 1] == "selection");
            ASSERT_LT(i + 1, types.size());
            EXPECT_TRUE(types[i + 1] == "search_results" || types[i + 1] == "assistant_msg");
        }
    }
}

TEST_F(AgentsTest, ReplayReconstructsState) {
    auto agents = runner(routing_, search_, chat_);
    const auto a = sessions_->create();
    const auto b = sessions_->create();
    agents.handle_message(a, "find videos about the flood");
    agents.handle_message(a, "what happened?", std::vector<std::string>{"flood_rescue", "storm_coast"});
    agents.handle_message(b, "hello");
    agents.handle_message(b, "show storm");
    EXPECT_EQ(replay(sessions_->log(a)), sessions_->snapshot(a));
    EXPECT_EQ(replay(sessions_->log(b)), sessions_->snapshot(b));

    const auto reopened = SessionStore::open(dir_.path() / "sessions", counting_clock(), counting_ids());
    EXPECT_EQ(reopened->size(), 2U);
    EXPECT_EQ(reopened->snapshot(a), sessions_->snapshot(a));
    EXPECT_EQ(reopened->log(b), sessions_->log(b));
}

TEST(Replay, RejectsBrokenLogs) {
    EXPECT_ERROR_CODE(replay({"not json"}), ErrorCode::InvalidArgument);
    EXPECT_ERROR_CODE(replay({R"({"seq":2,"session_id":"s","ts":"t","type":"user_msg","text":"x"})"}),
                      ErrorCode::InvalidArgument);
    EXPECT_ERROR_CODE(replay({R"({"seq":1,"session_id":"s","ts":"t","type":"teleport"})"}), ErrorCode::InvalidArgument);
    const auto s = replay({R"({"seq":1,"session_id":"s","ts":"t","type":"user_msg","text":"x"})"});
    EXPECT_EQ(s.history.size(), 1U);
    EXPECT_EQ(s.history[0].timestamp, "t");
}

TEST_F(AgentsTest, ConcurrentSessionsAndSerializedTurns) {
    auto agents = runner(routing_, search_, chat_);
    std::vector<std::string> ids;
    for (int i = 0; i < 6; ++i) ids.push_back(sessions_->create());
    std::vector<std::jthread> threads;
    for (int t = 0; t < 12; ++t) {
        threads.emplace_back([&, t] {
            const auto& id = ids[t % ids.size()];
            for (int i = 0; i < 4; ++i) agents.handle_message(id, i % 2 == 0 ? "find flood" : "and then?");
        });
    }
    threads.clear();
    for (const auto& id : ids) {
        const auto log = sessions_->log(id);
        EXPECT_EQ(replay(log), sessions_->snapshot(id));
        std::size_t users = 0;
        std::size_t assistants = 0;
        for (const auto& line : log) {
            const auto type = nlohmann::json::parse(line).at("type").get<std::string>();
            if (type == "user_msg") {
                EXPECT_EQ(users, assistants) << "turns interleaved in " << id;
                ++users;
            }
            if (type == "assistant_msg") ++assistants;
        }
        EXPECT_EQ(users, 8U);
        EXPECT_EQ(assistants, 8U);
    }
}

TEST(AgentsPlanted, PlantedVideoRanksFirstWithIdentityReranker) {
    TempDir dir("agents-planted");
    ingest::CorpusConfig cfg;
    cfg.embedder.dimension = 256;
    auto corpus = ingest::Corpus::open(dir.path(), cfg);
    const auto glossary = ingest::GlossaryTranslator::from_file(data_dir() / "planted" / "glossary.json");
    ingest::Ingestor(*corpus, glossary).ingest_manifest(ingest::read_manifest(data_dir() / "planted" / "manifest.jsonl"));
    const auto expected = nlohmann::json::parse(std::ifstream(data_dir() / "planted" / "expected_eval.json")).at("planted");

    SessionStore sessions(std::nullopt, counting_clock(), counting_ids());
    const auto routing = ScriptedLlm::constant("SEARCH");
    const auto identity = ScriptedLlm::constant("[]");
    const auto chat = ScriptedLlm::constant("summary");
    AgentRunner agents(*corpus, {routing, identity, chat}, {}, sessions);
    std::ifstream queries(data_dir() / "planted" / "queries.tsv");
    std::size_t checked = 0;
    for (std::string line; std::getline(queries, line);) {
        const auto tab = line.find('\t');
        const auto qid = line.substr(0, tab);
        if (!expected.contains(qid)) continue;
        const auto id = sessions.create();
        const auto result = agents.handle_message(id, line.substr(tab + 1));
        ASSERT_FALSE(result.videos.empty());
        EXPECT_EQ(result.videos.size(), 10U);
        EXPECT_EQ(result.videos[0].video_id, expected.at(qid)) << qid;
        ++checked;
    }
    EXPECT_EQ(checked, 20U);
}

}  // namespace
}  // namespace vidsearch::agents
