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

#include <chrono>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace vidsearch {

struct HttpEndpoint {
    std::string base_url;  // "http://host:port"
    std::chrono::milliseconds timeout{5000};
    int retries = 2;  // additional attempts after the first
};

class HttpCallError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// POSTs a JSON body and returns the parsed JSON response. Each call owns its
/// own connection, so concurrent calls have independent timeouts. Transport
/// errors, non-200 statuses and unparseable bodies are retried, then surface
/// as HttpCallError.
nlohmann::json post_json(const HttpEndpoint& endpoint, const std::string& path, const nlohmann::json& body);

}  // namespace vidsearch
