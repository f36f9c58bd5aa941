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

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vidsearch/agents/agents.hpp"
#include "vidsearch/common/http_client.hpp"
#include "vidsearch/fusion/fused_search.hpp"
#include "vidsearch/ingest/corpus.hpp"
#include "vidsearch/rerank/llm_client.hpp"

namespace vidsearch::gateway {

enum class TranslatorKind { Identity, Glossary, Remote };

struct TranslatorConfig {
    TranslatorKind kind = TranslatorKind::Identity;
    std::filesystem::path glossary;  // glossary only
    HttpEndpoint endpoint;           // remote only
};

/// Service and CLI settings.
///
/// File format: one `key = value` per line, `#` starts a comment, values may
/// be wrapped in double quotes. Every key can be overridden by an environment
/// variable named VAGENT_ + the key upper-cased with dots replaced by
/// underscores (fusion.m_cand -> VAGENT_FUSION_M_CAND). Unknown keys in
/// either place are Config errors. Relative paths in a file resolve against
/// the file's directory; relative paths from the environment against the
/// working directory.
///
/// Keys:
///   data_dir                      corpus directory (default "data")
///   sessions.dir                  session logs (default <data_dir>/sessions)
///   http.bind                     host:port (default 127.0.0.1:8080)
///   embedder.kind                 reference | remote
///   embedder.dimension            default 256
///   embedder.endpoint             base URL of a remote embedder
///   index.m                       default 16
///   index.ef_construction         default 200
///   index.ef_search               default 100
///   index.seed                    level-assignment seed
///   ingest.frames                 frames sampled per video (default 48)
///   ingest.description            true | false (default true)
///   ingest.workers                embedding threads for manifest ingestion
///   fusion.alpha                  vision weight (default 0.5)
///   fusion.m_cand                 candidates per modality (default 100)
///   fusion.k                      results returned (default 10)
///   search.rerank                 default rerank flag for stateless search
///   agent.rerank                  rerank inside agent sessions (default true)
///   agent.history_turns           chat history window (default 10)
///   agent.summary_chars           per-video summary bound (default 400)
///   llm.<slot>.kind               scripted | remote, slot in routing, search, chat
///   llm.<slot>.model              model name sent to a remote backend
///   llm.<slot>.endpoint           base URL of a remote backend
///   llm.<slot>.script             scripted response table
///   translator.kind               identity | glossary | remote
///   translator.glossary           JSON object of token -> English token
///   translator.endpoint           base URL of a remote translator
///   asr.endpoint                  base URL of a remote transcriber
///   provider.timeout_ms           per-call timeout for every provider (default 5000)
///   provider.retries              retries after the first attempt (default 2)
///   prompt.route, prompt.rerank,  prompt template versions; only the built-in
///   prompt.chat, prompt.summary   version of each is accepted
struct AppConfig {
    std::filesystem::path data_dir = "data";
    std::optional<std::filesystem::path> sessions_dir;
    std::string bind_host = "127.0.0.1";
    int port = 8080;

    ingest::CorpusConfig corpus;
    std::size_t ingest_workers = 1;
    fusion::FusionConfig fusion;
    bool search_rerank = false;
    agents::AgentConfig agent;  // agent.fusion mirrors `fusion`

    rerank::LlmConfig routing_llm;
    rerank::LlmConfig search_llm;
    rerank::LlmConfig chat_llm;
    TranslatorConfig translator;
    std::optional<HttpEndpoint> asr;

    std::chrono::milliseconds provider_timeout{5000};
    int provider_retries = 2;

    /// Applies one key. Throws Config naming the key on an unknown key or a
    /// malformed value.
    void set(std::string_view key, std::string_view value, const std::filesystem::path& base_dir = {});

    /// Copies provider timeout/retries into every endpoint and the fusion
    /// settings into the agent config, then checks ranges. Throws Config.
    void finalize();

    std::filesystem::path effective_sessions_dir() const { return sessions_dir.value_or(data_dir / "sessions"); }

    static const std::vector<std::string_view>& keys();
};

using EnvLookup = std::function<std::vector<std::pair<std::string, std::string>>()>;

/// Every VAGENT_* variable of the process environment.
std::vector<std::pair<std::string, std::string>> process_environment();

/// Defaults, then the file (if any), then the environment, then finalize().
AppConfig load_config(const std::optional<std::filesystem::path>& file, const EnvLookup& env = process_environment);

std::string env_name(std::string_view key);

}  // namespace vidsearch::gateway
