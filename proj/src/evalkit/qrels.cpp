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

#include "vidsearch/evalkit/qrels.hpp"

#include <charconv>
#include <fstream>
#include <set>

#include "vidsearch/common/error.hpp"
#include "vidsearch/common/text.hpp"

namespace vidsearch::evalkit {
namespace {

[[noreturn]] void bad_line(const std::string& source, std::size_t line, const std::string& message) {
    raise(ErrorCode::InvalidArgument, source + ":" + std::to_string(line) + ": " + message);
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::Io, "cannot open " + path.string());
    return in;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

std::vector<Query> parse_queries(std::istream& in, const std::string& source) {
    std::vector<Query> queries;
    std::set<std::string> ids;
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
        strip_cr(line);
        if (is_blank(line)) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) bad_line(source, n, "expected query_id<TAB>query_text");
        Query q{line.substr(0, tab), line.substr(tab + 1)};
        if (q.id.empty()) bad_line(source, n, "empty query id");
        if (!ids.insert(q.id).second) bad_line(source, n, "duplicate query id '" + q.id + "'");
        queries.push_back(std::move(q));
    }
    return queries;
}

std::vector<Query> read_queries(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_queries(in, path.string());
}

Qrels parse_qrels(std::istream& in, const std::string& source) {
    Qrels qrels;
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
        const auto fields = split_whitespace(line);
        if (fields.empty()) continue;
        if (fields.size() != 4) bad_line(source, n, "expected 'query_id 0 video_id grade'");
        const auto& g = fields[3];
        int grade = 0;
        const auto [end, ec] = std::from_chars(g.data(), g.data() + g.size(), grade);
        if (ec != std::errc() || end != g.data() + g.size()) bad_line(source, n, "grade '" + g + "' is not an integer");
        if (grade < 0) bad_line(source, n, "grade must be >= 0");
        qrels[fields[0]][fields[2]] = grade;
    }
    return qrels;
}

Qrels read_qrels(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_qrels(in, path.string());
}

}  // namespace vidsearch::evalkit
