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
#include <memory>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "vidsearch/common/http_client.hpp"

namespace vidsearch::rerank {

/// Text-completion backend shared by the reranker and the agents. Failures
/// (timeouts included) surface as Error(LlmUnavailable).
class LlmClient {
public:
    virtual ~LlmClient() = default;
    virtual std::string complete(std::string_view prompt, std::size_t max_tokens) const = 0;
};

enum class LlmKind { Scripted, Remote };

struct LlmConfig {
    LlmKind kind = LlmKind::Scripted;
    std::string model;
    HttpEndpoint endpoint;                  // remote only
    std::filesystem::path script;           // scripted only; empty means an always-failing backend
};

/// Table-driven backend: a pure function of the prompt.
///
/// Script file:
///   {"rules": [{"prompt_hash": "<fnv1a64 hex>" | "regex": "<ECMAScript>",
///               "action": "respond" | "echo" | "fail", "response": "..."}, ...],
///    "default": {"action": ..., "response": ...}}
/// Rules are tried in order; `regex` uses search semantics. "echo" returns
/// the prompt verbatim; "fail" behaves like a timed-out backend.
class ScriptedLlm final : public LlmClient {
public:
    enum class Action { Respond, Echo, Fail };

    struct Rule {
        std::optional<std::string> prompt_hash;
        std::optional<std::string> pattern;
        Action action = Action::Respond;
        std::string response;
    };

    ScriptedLlm() = default;
    ScriptedLlm(std::vector<Rule> rules, std::optional<Rule> fallback);
    static ScriptedLlm from_file(const std::filesystem::path& path);
    static ScriptedLlm from_json(const std::string& text);

    /// Convenience: every prompt gets `response`.
    static ScriptedLlm constant(std::string response);
    static ScriptedLlm echo();
    static ScriptedLlm failing();

    /// Hash used by prompt_hash rules.
    static std::string prompt_hash(std::string_view prompt);

    std::string complete(std::string_view prompt, std::size_t max_tokens) const override;

private:
    struct CompiledRule {
        Rule rule;
        std::optional<std::regex> regex;
    };
    std::vector<CompiledRule> rules_;
    std::optional<Rule> fallback_;
};

/// POST /complete {"model","prompt","max_tokens"} -> {"text"}
class RemoteLlm final : public LlmClient {
public:
    RemoteLlm(std::string model, HttpEndpoint endpoint) : model_(std::move(model)), endpoint_(std::move(endpoint)) {}
    std::string complete(std::string_view prompt, std::size_t max_tokens) const override;

private:
    std::string model_;
    HttpEndpoint endpoint_;
};

std::unique_ptr<LlmClient> make_llm(const LlmConfig& cfg);

}  // namespace vidsearch::rerank
