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

#include "vidsearch/evalkit/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "vidsearch/agents/search_tool.hpp"
#include "vidsearch/common/error.hpp"
#include "vidsearch/rerank/reranker.hpp"

namespace vidsearch::evalkit {
namespace {

nlohmann::json config_snapshot(const ingest::Corpus& corpus, const EvalConfig& cfg) {
    const auto& c = corpus.config();
    nlohmann::json j = {
        {"alpha", cfg.fusion.alpha},
        {"m_cand", cfg.fusion.m_cand},
        {"k", cfg.fusion.k},
        {"ef_search", cfg.fusion.ef_search ? nlohmann::json(*cfg.fusion.ef_search) : nlohmann::json(nullptr)},
        {"rerank", cfg.rerank},
        {"rerank_prompt", cfg.rerank ? nlohmann::json(rerank::kRerankPromptVersion) : nlohmann::json(nullptr)},
        {"frames_per_video", c.ingest.frames_per_video},
        {"description", c.ingest.use_description},
        {"corpus", c.to_json()},
        {"data_dir", corpus.data_dir().string()},
        {"index_paths", {(corpus.data_dir() / "vision.idx").string(), (corpus.data_dir() / "audio.idx").string()}},
        {"videos", corpus.size()},
        {"cutoff", kMetricCutoff},
        {"gain", std::string(to_string(cfg.gain))},
    };
    return j;
}

struct Outcome {
    std::optional<QueryMetrics> metrics;
    std::optional<SkippedQuery> skipped;
};

Outcome evaluate_one(const ingest::Corpus& corpus, const Query& q, const Qrels& qrels, const EvalConfig& cfg,
                     const rerank::LlmClient* reranker) {
    const auto it = qrels.find(q.id);
    if (it == qrels.end()) return {std::nullopt, SkippedQuery{q.id, "unjudged"}};
    const auto& rels = it->second;
    if (std::none_of(rels.begin(), rels.end(), [](const auto& r) { return r.second > 0; })) {
        return {std::nullopt, SkippedQuery{q.id, std::string(to_string(ErrorCode::NoRelevant))}};
    }
    agents::SearchOutcome found;
    try {
        found = agents::search_videos(corpus, q.text, cfg.fusion, cfg.rerank ? reranker : nullptr);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::EmptyQuery) throw;
        return {std::nullopt, SkippedQuery{q.id, std::string(to_string(e.code()))}};
    }
    QueryMetrics m;
    m.query_id = q.id;
    for (auto& v : found.videos) m.ranking.push_back(std::move(v.video_id));
    m.ndcg = ndcg_at_k(m.ranking, rels, kMetricCutoff, cfg.gain);
    m.recall = recall_at_k(m.ranking, rels, kMetricCutoff);
    m.rerank_degraded = found.rerank_degraded;
    return {std::move(m), std::nullopt};
}

std::string format_metric(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace

EvalRun run_eval(const ingest::Corpus& corpus, const std::vector<Query>& queries, const Qrels& qrels,
                 const EvalConfig& cfg, const rerank::LlmClient* reranker) {
    cfg.fusion.validate();
    if (cfg.rerank && reranker == nullptr) raise(ErrorCode::InvalidArgument, "rerank enabled without an LLM backend");
    if (corpus.size() == 0) raise(ErrorCode::EmptyCorpus, "empty corpus");
    const auto start = std::chrono::steady_clock::now();

    std::vector<Outcome> outcomes(queries.size());
    const std::size_t workers = std::clamp<std::size_t>(cfg.workers, 1, std::max<std::size_t>(1, queries.size()));
    if (workers == 1) {
        for (std::size_t i = 0; i < queries.size(); ++i) outcomes[i] = evaluate_one(corpus, queries[i], qrels, cfg, reranker);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(workers);
        {
            std::vector<std::jthread> pool;
            for (std::size_t w = 0; w < workers; ++w) {
                pool.emplace_back([&, w] {
                    try {
                        for (std::size_t i; (i = next.fetch_add(1)) < queries.size();) {
                            outcomes[i] = evaluate_one(corpus, queries[i], qrels, cfg, reranker);
                        }
                    } catch (...) {
                        errors[w] = std::current_exception();
                        next = queries.size();
                    }
                });
            }
        }
        for (const auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }

    EvalRun run;
    run.config = config_snapshot(corpus, cfg);
    std::set<std::string> asked;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        asked.insert(queries[i].id);
        if (outcomes[i].metrics) run.per_query.push_back(std::move(*outcomes[i].metrics));
        if (outcomes[i].skipped) run.skipped.push_back(std::move(*outcomes[i].skipped));
    }
    std::sort(run.per_query.begin(), run.per_query.end(),
              [](const QueryMetrics& a, const QueryMetrics& b) { return a.query_id < b.query_id; });
    std::sort(run.skipped.begin(), run.skipped.end(),
              [](const SkippedQuery& a, const SkippedQuery& b) { return a.query_id < b.query_id; });

    std::set<std::string> unknown;
    for (const auto& [qid, rels] : qrels) {
        if (!asked.contains(qid)) run.missing_queries.push_back(qid);
        for (const auto& [vid, g] : rels) {
            if (!corpus.contains(vid)) unknown.insert(vid);
        }
    }
    run.unknown_videos.assign(unknown.begin(), unknown.end());

    for (const auto& m : run.per_query) {
        run.mean_ndcg += m.ndcg;
        run.mean_recall += m.recall;
    }
    if (!run.per_query.empty()) {
        run.mean_ndcg /= static_cast<double>(run.per_query.size());
        run.mean_recall /= static_cast<double>(run.per_query.size());
    }
    run.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return run;
}

nlohmann::json to_json(const EvalRun& run) {
    nlohmann::json per_query = nlohmann::json::object();
    for (const auto& m : run.per_query) {
        per_query[m.query_id] = {
            {"ndcg@10", m.ndcg}, {"recall@10", m.recall}, {"ranking", m.ranking}, {"rerank_degraded", m.rerank_degraded}};
    }
    nlohmann::json skipped = nlohmann::json::object();
    for (const auto& s : run.skipped) skipped[s.query_id] = s.reason;
    return {
        {"config", run.config},
        {"evaluated", run.evaluated()},
        {"skipped", skipped},
        {"missing_queries", run.missing_queries},
        {"unknown_videos", run.unknown_videos},
        {"ndcg@10", run.mean_ndcg},
        {"recall@10", run.mean_recall},
        {"per_query", per_query},
        {"wall_clock_seconds", run.wall_clock_seconds},
    };
}

std::string to_tsv(const EvalRun& run) {
    std::string out = "query_id\tndcg@10\trecall@10\n";
    for (const auto& m : run.per_query) out += m.query_id + "\t" + format_metric(m.ndcg) + "\t" + format_metric(m.recall) + "\n";
    out += "mean\t" + format_metric(run.mean_ndcg) + "\t" + format_metric(run.mean_recall) + "\n";
    return out;
}

std::vector<AblationRow> run_ablation(const AblationSpec& spec, const std::vector<Query>& queries, const Qrels& qrels,
                                      const rerank::LlmClient* reranker) {
    std::vector<AblationRow> rows;
    for (const auto& cell : spec.cells) {
        std::unique_ptr<ingest::Corpus> corpus;
        std::string reason;
        const auto stored = ingest::Corpus::stored_config(cell.data_dir);
        if (!stored) {
            reason = "no index at " + cell.data_dir.string();
        } else if (stored->ingest.frames_per_video != cell.frames || stored->ingest.use_description != cell.description) {
            reason = "index at " + cell.data_dir.string() + " was built with frames=" +
                     std::to_string(stored->ingest.frames_per_video) +
                     " description=" + (stored->ingest.use_description ? "on" : "off");
        } else {
            corpus = ingest::Corpus::open_existing(cell.data_dir);
            if (corpus->size() == 0) reason = "index at " + cell.data_dir.string() + " is empty";
        }
        for (bool rerank_on : spec.rerank) {
            AblationRow row{cell.frames, cell.vector_label, cell.description, rerank_on, std::nullopt, reason};
            if (reason.empty()) {
                auto cfg = spec.base;
                cfg.rerank = rerank_on;
                row.run = run_eval(*corpus, queries, qrels, cfg, reranker);
                row.run->config["retrieval_vector"] = cell.vector_label;
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

AblationSpec read_ablation_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::Io, "cannot open " + path.string());
    AblationSpec spec;
    try {
        const auto j = nlohmann::json::parse(in);
        for (const auto& c : j.at("cells")) {
            AblationCell cell;
            cell.frames = c.at("frames").get<std::size_t>();
            cell.vector_label = c.value("retrieval_vector", std::string("off"));
            cell.description = c.value("description", true);
            std::filesystem::path data = c.at("data").get<std::string>();
            cell.data_dir = data.is_absolute() ? data : path.parent_path() / data;
            spec.cells.push_back(std::move(cell));
        }
        if (j.contains("rerank")) spec.rerank = j.at("rerank").get<std::vector<bool>>();
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::Config, path.string() + ": " + e.what());
    }
    if (spec.cells.empty()) raise(ErrorCode::Config, path.string() + ": no cells");
    if (spec.rerank.empty()) raise(ErrorCode::Config, path.string() + ": empty rerank list");
    return spec;
}

std::string to_tsv(const std::vector<AblationRow>& rows) {
    std::string out = "frames\tretrieval_vector\tdescription\trerank\tndcg@10\trecall@10\n";
    for (const auto& r : rows) {
        out += std::to_string(r.frames) + "\t" + r.vector_label + "\t" + (r.description ? "on" : "off") + "\t" +
               (r.rerank ? "on" : "off") + "\t";
        out += r.run ? format_metric(r.run->mean_ndcg) + "\t" + format_metric(r.run->mean_recall) : std::string("n/a\tn/a");
        out += "\n";
    }
    return out;
}

nlohmann::json to_json(const std::vector<AblationRow>& rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json row = {{"frames", r.frames},
                              {"retrieval_vector", r.vector_label},
                              {"description", r.description},
                              {"rerank", r.rerank},
                              {"available", r.run.has_value()}};
        if (r.run) {
            row["ndcg@10"] = r.run->mean_ndcg;
            row["recall@10"] = r.run->mean_recall;
            row["run"] = to_json(*r.run);
        } else {
            row["ndcg@10"] = nullptr;
            row["recall@10"] = nullptr;
            row["reason"] = r.unavailable_reason;
        }
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace vidsearch::evalkit
