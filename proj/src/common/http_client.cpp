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

#include "vidsearch/common/http_client.hpp"

#include <httplib.h>

namespace vidsearch {

nlohmann::json post_json(const HttpEndpoint& endpoint, const std::string& path, const nlohmann::json& body) {
    if (endpoint.base_url.empty()) throw HttpCallError("no endpoint configured for " + path);
    const std::string payload = body.dump();
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(endpoint.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(endpoint.timeout - secs);

    std::string last_error;
    for (int attempt = 0; attempt <= std::max(0, endpoint.retries); ++attempt) {
        httplib::Client client(endpoint.base_url);
        client.set_connection_timeout(secs.count(), usecs.count());
        client.set_read_timeout(secs.count(), usecs.count());
        client.set_write_timeout(secs.count(), usecs.count());
        auto res = client.Post(path, payload, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "HTTP status " + std::to_string(res->status);
            continue;
        }
        auto parsed = nlohmann::json::parse(res->body, nullptr, false);
        if (parsed.is_discarded()) {
            last_error = "malformed JSON body";
            continue;
        }
        return parsed;
    }
    throw HttpCallError(endpoint.base_url + path + ": " + last_error);
}

}  // namespace vidsearch
