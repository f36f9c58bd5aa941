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
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "vidsearch/evalkit/metrics.hpp"

namespace vidsearch::evalkit {

/// Query id -> judged videos.
using Qrels = std::map<std::string, GradeMap>;

struct Query {
    std::string id;
    std::string text;

    friend bool operator==(const Query&, const Query&) = default;
};

/// "query_id<TAB>query_text" per line; blank lines are skipped. The text is
/// everything after the first tab. Duplicate ids and lines without a tab are
/// InvalidArgument errors naming "source:line".
std::vector<Query> parse_queries(std::istream& in, const std::string& source = "<queries>");
std::vector<Query> read_queries(const std::filesystem::path& path);

/// TREC "query_id 0 video_id grade", whitespace separated. Grades must be
/// integers >= 0; a repeated (query, video) pair keeps the last grade.
Qrels parse_qrels(std::istream& in, const std::string& source = "<qrels>");
Qrels read_qrels(const std::filesystem::path& path);

}  // namespace vidsearch::evalkit
