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

#include <memory>
#include <string>

#include "vidsearch/gateway/app.hpp"

namespace httplib {
class Server;
}

namespace vidsearch::gateway {

/// JSON-over-HTTP front of an App:
///   GET  /health
///   POST /v1/index
///   POST /v1/search
///   POST /v1/sessions
///   POST /v1/sessions/{id}/messages
///   GET  /v1/videos/{id}[?embeddings=1]
class Server {
public:
    explicit Server(App& app);
    ~Server();

    /// Binds without serving; port 0 picks a free port. Returns the bound
    /// port. Throws Io on bind failure.
    int bind(const std::string& host, int port);
    /// Blocks until stop().
    void listen();
    void stop();

private:
    App& app_;
    std::unique_ptr<httplib::Server> http_;
};

}  // namespace vidsearch::gateway
