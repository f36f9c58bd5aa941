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

#include "vidsearch/rerank/llm_client.hpp"

#include <json.hpp>

#include "vidsearch/common/binary_io.hpp"
#include "vidsearch/common/error.hpp"
#include "vidsearch/common/text.hpp"

namespace vidsearch::rerank {

namespace {

ScriptedLlm::Action parse_action(const std::string& name) {
    if (name == "respond") return ScriptedLlm::Action::Respond;
    if (name == "echo") return ScriptedLlm::Action::Echo;
    if (name == "fail") return ScriptedLlm::Action::Fail;
    raise(ErrorCode::Config, "unknown scripted LLM action '" + name + "'");
}

ScriptedLlm::Rule parse_rule(const nlohmann::json& j) {
    if (!j.is_object()) raise(ErrorCode::Config, "scripted LLM rule must be an object");
    ScriptedLlm::Rule rule;
    if (j.contains("prompt_hash")) rule.prompt_hash = j.at("prompt_hash").get<std::string>();
    if (j.contains("regex")) rule.pattern = j.at("regex").get<std::string>();
    rule.action = parse_action(j.value("action", std::string("respond")));
    rule.response = j.value("response", std::string());
    return rule;
}

}  // namespace

ScriptedLlm::ScriptedLlm(std::vector<Rule> rules, std::optional<Rule> fallback) : fallback_(std::move(fallback)) {
    for (auto& rule : rules) {
        CompiledRule compiled{std::move(rule), std::nullopt};
        if (compiled.rule.pattern) {
            try {
                compiled.regex.emplace(*compiled.rule.pattern, std::regex::ECMAScript);
            } catch (const std::regex_error& e) {
                raise(ErrorCode::Config, "bad scripted LLM regex '" + *compiled.rule.pattern + "': " + e.what());
            }
        }
        rules_.push_back(std::move(compiled));
    }
}

ScriptedLlm ScriptedLlm::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) raise(ErrorCode::Config, "scripted LLM table is not a JSON object");
    try {
        std::vector<Rule> rules;
        for (const auto& r : j.value("rules", nlohmann::json::array())) rules.push_back(parse_rule(r));
        std::optional<Rule> fallback;
        if (j.contains("default")) fallback = parse_rule(j.at("default"));
        return ScriptedLlm(std::move(rules), std::move(fallback));
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::Config, std::string("scripted LLM table: ") + e.what());
    }
}

ScriptedLlm ScriptedLlm::from_file(const std::filesystem::path& path) { return from_json(read_text_file(path)); }

ScriptedLlm ScriptedLlm::constant(std::string response) {
    return ScriptedLlm({}, Rule{std::nullopt, std::nullopt, Action::Respond, std::move(response)});
}

ScriptedLlm ScriptedLlm::echo() { return ScriptedLlm({}, Rule{std::nullopt, std::nullopt, Action::Echo, {}}); }

ScriptedLlm ScriptedLlm::failing() { return ScriptedLlm({}, Rule{std::nullopt, std::nullopt, Action::Fail, {}}); }

std::string ScriptedLlm::prompt_hash(std::string_view prompt) { return hex64(fnv1a64(prompt)); }

std::string ScriptedLlm::complete(std::string_view prompt, std::size_t) const {
    const Rule* chosen = nullptr;
    std::optional<std::string> hash;
    for (const auto& c : rules_) {
        if (c.rule.prompt_hash) {
            if (!hash) hash = prompt_hash(prompt);
            if (*hash != *c.rule.prompt_hash) continue;
        }
        if (c.regex && !std::regex_search(prompt.begin(), prompt.end(), *c.regex)) continue;
        chosen = &c.rule;
        break;
    }
    if (chosen == nullptr && fallback_) chosen = &*fallback_;
    if (chosen == nullptr) raise(ErrorCode::LlmUnavailable, "scripted LLM has no rule for prompt " + prompt_hash(prompt));
    switch (chosen->action) {
        case Action::Echo:
            return std::string(prompt);
        case Action::Fail:
            raise(ErrorCode::LlmUnavailable, "scripted LLM timed out");
        case Action::Respond:
            break;
    }
    return chosen->response;
}

std::string RemoteLlm::complete(std::string_view prompt, std::size_t max_tokens) const {
    nlohmann::json response;
    try {
        response = post_json(endpoint_, "/complete",
                             {{"model", model_}, {"prompt", std::string(prompt)}, {"max_tokens", max_tokens}});
    } catch (const HttpCallError& e) {
        raise(ErrorCode::LlmUnavailable, e.what());
    }
    const auto it = response.find("text");
    if (it == response.end() || !it->is_string()) raise(ErrorCode::LlmUnavailable, "LLM response lacks a text field");
    return it->get<std::string>();
}

std::unique_ptr<LlmClient> make_llm(const LlmConfig& cfg) {
    if (cfg.kind == LlmKind::Remote) {
        if (cfg.endpoint.base_url.empty()) raise(ErrorCode::Config, "remote LLM needs an endpoint");
        return std::make_unique<RemoteLlm>(cfg.model, cfg.endpoint);
    }
    if (cfg.script.empty()) return std::make_unique<ScriptedLlm>(ScriptedLlm::failing());
    return std::make_unique<ScriptedLlm>(ScriptedLlm::from_file(cfg.script));
}

}  // namespace vidsearch::rerank
