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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vidsearch/evalkit/qrels.hpp"
#include "vidsearch/fusion/fused_search.hpp"
#include "vidsearch/rerank/llm_client.hpp"

namespace vidsearch::evalkit {

struct EvalConfig {
    fusion::FusionConfig fusion;
    bool rerank = false;
    Gain gain = Gain::Exponential;
    std::size_t workers = 1;
};

struct QueryMetrics {
    std::string query_id;
    std::vector<std::string> ranking;
    double ndcg = 0.0;
    double recall = 0.0;
    bool rerank_degraded = false;
};

struct SkippedQuery {
    std::string query_id;
    std::string reason;  // "unjudged", "NoRelevant" or "EmptyQuery"
};

struct EvalRun {
    nlohmann::json config;             // snapshot for reproducibility
    std::vector<QueryMetrics> per_query;  // sorted by query id
    std::vector<SkippedQuery> skipped;    // sorted by query id
    std::vector<std::string> missing_queries;  // judged in qrels, absent from the queries file
    std::vector<std::string> unknown_videos;   // judged ids the corpus does not hold
    double mean_ndcg = 0.0;
    double mean_recall = 0.0;
    double wall_clock_seconds = 0.0;

    std::size_t evaluated() const { return per_query.size(); }
};

/// Runs every query (in parallel when workers > 1), scores the top
/// kMetricCutoff and averages over queries with at least one positive grade.
/// `reranker` is required when cfg.rerank is set. Problems with individual
/// queries or judgments are reported in the run, not thrown.
EvalRun run_eval(const ingest::Corpus& corpus, const std::vector<Query>& queries, const Qrels& qrels,
                 const EvalConfig& cfg, const rerank::LlmClient* reranker = nullptr);

nlohmann::json to_json(const EvalRun& run);
/// One line per evaluated query plus a final "mean" line.
std::string to_tsv(const EvalRun& run);

/// One pre-built index directory of the ablation grid.
struct AblationCell {
    std::size_t frames = 0;
    std::string vector_label;  // which retrieval-vector variant built the index
    bool description = true;
    std::filesystem::path data_dir;
};

struct AblationSpec {
    std::vector<AblationCell> cells;
    std::vector<bool> rerank = {false};  // query-time toggle, applied to every cell
    EvalConfig base;
};

struct AblationRow {
    std::size_t frames = 0;
    std::string vector_label;
    bool description = true;
    bool rerank = false;
    std::optional<EvalRun> run;     // empty when the cell is unavailable
    std::string unavailable_reason;
};

/// Rows in cell order, each cell expanded over spec.rerank. A cell whose
/// directory is missing or was built with a different frame count or
/// description setting yields unavailable rows.
std::vector<AblationRow> run_ablation(const AblationSpec& spec, const std::vector<Query>& queries, const Qrels& qrels,
                                      const rerank::LlmClient* reranker = nullptr);

/// Grid file: {"cells": [{"frames", "retrieval_vector", "description", "data"}],
/// "rerank": [bool...]}. Relative data paths resolve against the file's directory.
AblationSpec read_ablation_spec(const std::filesystem::path& path);

/// Columns: frames, retrieval_vector, description, rerank, ndcg@10, recall@10.
std::string to_tsv(const std::vector<AblationRow>& rows);
nlohmann::json to_json(const std::vector<AblationRow>& rows);

}  // namespace vidsearch::evalkit
