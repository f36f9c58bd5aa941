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

#include "vidsearch/gateway/cli.hpp"

#include <csignal>
#include <cstdio>
#include <fstream>
#include <thread>

#include <CLI11.hpp>
#include <pthread.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "vidsearch/agents/search_tool.hpp"
#include "vidsearch/common/error.hpp"
#include "vidsearch/evalkit/runner.hpp"
#include "vidsearch/gateway/app.hpp"
#include "vidsearch/gateway/config.hpp"
#include "vidsearch/gateway/server.hpp"
#include "vidsearch/ingest/pipeline.hpp"
#include "vidsearch/mergevec/task_vector.hpp"

namespace vidsearch::gateway {
namespace {

std::string fixed6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) raise(ErrorCode::Io, "cannot write " + path);
    f << text;
}

/// Settings shared by every subcommand; flags win over file and environment.
struct Common {
    std::string config_file;
    std::string data;

    AppConfig load() const {
        auto cfg = load_config(config_file.empty() ? std::nullopt : std::optional<std::filesystem::path>(config_file));
        if (!data.empty()) cfg.data_dir = data;
        return cfg;
    }
};

/// Read-side open: the directory's stored index-time settings apply.
std::unique_ptr<ingest::Corpus> open_for_reading(const AppConfig& cfg) {
    if (!ingest::Corpus::stored_config(cfg.data_dir)) raise(ErrorCode::EmptyCorpus, "empty corpus");
    auto corpus = ingest::Corpus::open_existing(cfg.data_dir, cfg.corpus.embedder);
    if (corpus->size() == 0) raise(ErrorCode::EmptyCorpus, "empty corpus");
    return corpus;
}

int cmd_index(const AppConfig& cfg, const std::string& manifest, std::ostream& out, std::ostream& err) {
    auto corpus = ingest::Corpus::open(cfg.data_dir, cfg.corpus);
    const auto translator = make_translator(cfg.translator);
    std::unique_ptr<ingest::Transcriber> transcriber;
    if (cfg.asr) transcriber = std::make_unique<ingest::RemoteTranscriber>(*cfg.asr);
    const auto records = ingest::read_manifest(manifest);
    const auto report =
        ingest::Ingestor(*corpus, *translator, transcriber.get()).ingest_manifest(records, cfg.ingest_workers);
    for (const auto& f : report.failures) err << "skipped " << f.video_id << ": " << to_string(f.code) << ": " << f.message << "\n";
    out << "indexed " << report.indexed.size() << " of " << records.size() << " records into " << cfg.data_dir.string()
        << " (" << corpus->size() << " videos)\n";
    return 0;
}

int cmd_search(const AppConfig& cfg, const std::string& query, bool rerank_on, std::ostream& out) {
    const auto corpus = open_for_reading(cfg);
    auto fc = cfg.fusion;
    fc.m_cand = std::max(fc.m_cand, fc.k);
    std::unique_ptr<rerank::LlmClient> llm;
    if (rerank_on) llm = rerank::make_llm(cfg.search_llm);
    const auto found = agents::search_videos(*corpus, query, fc, llm.get());
    out << "rank\tvideo_id\tfused\tvision\taudio\n";
    for (const auto& v : found.videos) {
        out << v.rank << "\t" << v.video_id << "\t" << fixed6(v.fused) << "\t" << fixed6(v.vision) << "\t" << fixed6(v.audio)
            << "\n";
    }
    if (found.rerank_degraded) spdlog::warn("rerank backend unavailable; fused order kept");
    return 0;
}

struct EvalArgs {
    std::string queries;
    std::string qrels;
    std::string gain = "exp";
    bool rerank = false;
    std::size_t workers = 1;
    std::string json_out;
    std::string tsv_out;
    std::string grid;
};

evalkit::EvalConfig eval_config(const AppConfig& cfg, const EvalArgs& a) {
    evalkit::EvalConfig ec;
    ec.fusion = cfg.fusion;
    ec.fusion.m_cand = std::max(ec.fusion.m_cand, evalkit::kMetricCutoff);
    ec.fusion.k = std::max(ec.fusion.k, evalkit::kMetricCutoff);
    ec.rerank = a.rerank;
    ec.gain = evalkit::parse_gain(a.gain);
    ec.workers = a.workers;
    return ec;
}

int cmd_eval(const AppConfig& cfg, const EvalArgs& a, std::ostream& out) {
    const auto corpus = open_for_reading(cfg);
    const auto llm = rerank::make_llm(cfg.search_llm);
    const auto run = evalkit::run_eval(*corpus, evalkit::read_queries(a.queries), evalkit::read_qrels(a.qrels),
                                       eval_config(cfg, a), llm.get());
    for (const auto& q : run.missing_queries) spdlog::warn("qrels query '{}' is not in the queries file", q);
    if (!run.unknown_videos.empty()) spdlog::warn("{} judged videos are not indexed", run.unknown_videos.size());
    const auto tsv = evalkit::to_tsv(run);
    if (!a.json_out.empty()) write_text(a.json_out, evalkit::to_json(run).dump(1) + "\n");
    if (!a.tsv_out.empty()) write_text(a.tsv_out, tsv);
    out << tsv;
    return 0;
}

int cmd_ablate(const AppConfig& cfg, const EvalArgs& a, std::ostream& out) {
    auto spec = evalkit::read_ablation_spec(a.grid);
    spec.base = eval_config(cfg, a);
    const auto llm = rerank::make_llm(cfg.search_llm);
    const auto rows =
        evalkit::run_ablation(spec, evalkit::read_queries(a.queries), evalkit::read_qrels(a.qrels), llm.get());
    for (const auto& r : rows) {
        if (!r.run) spdlog::warn("cell unavailable: {}", r.unavailable_reason);
    }
    const auto tsv = evalkit::to_tsv(rows);
    if (!a.json_out.empty()) write_text(a.json_out, evalkit::to_json(rows).dump(1) + "\n");
    if (!a.tsv_out.empty()) write_text(a.tsv_out, tsv);
    out << tsv;
    return 0;
}

int cmd_merge(const std::string& base, const std::string& plus, const std::string& minus, const std::string& dest,
              bool dry_run, std::ostream& out) {
    const auto report = mergevec::merge_archives(base, plus, minus, dest, dry_run);
    out << "tensor\ttau_l2\n";
    for (const auto& n : report.task_vector_norms) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.9g", n.l2);
        out << n.name << "\t" << buf << "\n";
    }
    out << (report.written ? "wrote " + dest : std::string("dry run: nothing written")) << "\n";
    return 0;
}

int cmd_serve(const AppConfig& cfg, std::ostream& out) {
    // Signals are taken synchronously by a waiter thread, so stop() never
    // runs inside a signal handler.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    App app(cfg);
    Server server(app);
    const int port = server.bind(cfg.bind_host, cfg.port);
    out << "listening on " << cfg.bind_host << ":" << port << std::endl;
    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        spdlog::info("signal {}, shutting down", sig);
        server.stop();
    });
    server.listen();
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    app.flush();
    pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
    return 0;
}

void log_to_stderr() {
    static const bool once = [] {
        auto logger = spdlog::stderr_color_mt("vidsearch");
        spdlog::set_default_logger(logger);
        return true;
    }();
    (void)once;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    log_to_stderr();
    CLI::App app{"Multimodal video search: indexing, fused retrieval, agents, evaluation and task-vector merging.",
                 "vidsearch"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);
    app.fallthrough();  // --config/--data are accepted after the subcommand too
    Common common;
    app.add_option("--config", common.config_file, "key = value config file")->check(CLI::ExistingFile);
    app.add_option("--data", common.data, "corpus directory (overrides data_dir)");

    std::string manifest;
    std::size_t workers = 0;
    std::optional<std::size_t> frames;
    std::optional<std::size_t> dimension;
    std::optional<bool> description;
    std::string glossary;
    auto* index = app.add_subcommand("index", "embed a JSONL manifest into the corpus");
    index->add_option("--manifest", manifest, "JSONL manifest")->required()->check(CLI::ExistingFile);
    index->add_option("--workers", workers, "embedding threads");
    index->add_option("--frames", frames, "frames sampled per video (new corpus only)");
    index->add_option("--dimension", dimension, "embedding dimension (new corpus only)");
    index->add_option("--description", description, "index descriptions: true|false (new corpus only)");
    index->add_option("--glossary", glossary, "translate with this glossary file")->check(CLI::ExistingFile);

    std::string query;
    std::optional<std::size_t> k;
    std::optional<double> alpha;
    std::optional<std::size_t> m_cand;
    bool rerank_on = false;
    auto* search = app.add_subcommand("search", "fused search; prints a TSV ranking");
    search->add_option("query", query, "query text")->required();
    search->add_option("--k", k, "results to return");
    search->add_option("--alpha", alpha, "vision weight in [0,1]");
    search->add_option("--m-cand", m_cand, "candidates per modality");
    search->add_flag("--rerank", rerank_on, "rerank with the search LLM slot");

    EvalArgs ea;
    auto* eval = app.add_subcommand("eval", "nDCG@10 / Recall@10 over a query set");
    eval->add_option("--queries", ea.queries, "query_id<TAB>text file")->required()->check(CLI::ExistingFile);
    eval->add_option("--qrels", ea.qrels, "TREC qrels")->required()->check(CLI::ExistingFile);
    eval->add_option("--gain", ea.gain, "exp|linear")->check(CLI::IsMember({"exp", "linear"}));
    eval->add_flag("--rerank", ea.rerank, "rerank with the search LLM slot");
    eval->add_option("--workers", ea.workers, "parallel queries")->check(CLI::PositiveNumber);
    eval->add_option("--json", ea.json_out, "write the full JSON report here");
    eval->add_option("--tsv", ea.tsv_out, "also write the TSV report here");
    eval->add_option("--alpha", alpha, "vision weight in [0,1]");
    eval->add_option("--m-cand", m_cand, "candidates per modality");

    EvalArgs aa;
    auto* ablate = app.add_subcommand("ablate", "evaluate a grid of pre-built index directories");
    ablate->add_option("--grid", aa.grid, "JSON grid file")->required()->check(CLI::ExistingFile);
    ablate->add_option("--queries", aa.queries, "query_id<TAB>text file")->required()->check(CLI::ExistingFile);
    ablate->add_option("--qrels", aa.qrels, "TREC qrels")->required()->check(CLI::ExistingFile);
    ablate->add_option("--gain", aa.gain, "exp|linear")->check(CLI::IsMember({"exp", "linear"}));
    ablate->add_option("--workers", aa.workers, "parallel queries")->check(CLI::PositiveNumber);
    ablate->add_option("--json", aa.json_out, "write the full JSON report here");
    ablate->add_option("--tsv", aa.tsv_out, "also write the TSV table here");
    ablate->add_option("--alpha", alpha, "vision weight in [0,1]");
    ablate->add_option("--m-cand", m_cand, "candidates per modality");

    std::string base, plus, minus, dest;
    bool dry_run = false;
    auto* merge = app.add_subcommand("merge", "write base + (plus - minus) as a tensor archive");
    merge->add_option("--base", base, "F")->required()->check(CLI::ExistingFile);
    merge->add_option("--plus", plus, "G")->required()->check(CLI::ExistingFile);
    merge->add_option("--minus", minus, "Q")->required()->check(CLI::ExistingFile);
    merge->add_option("--out", dest, "output archive")->required();
    merge->add_flag("--dry-run", dry_run, "print task-vector norms only");

    std::string bind;
    auto* serve = app.add_subcommand("serve", "run the HTTP API");
    serve->add_option("--bind", bind, "host:port");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, err, err);
        return 2;
    }

    try {
        if (merge->parsed()) return cmd_merge(base, plus, minus, dest, dry_run, out);

        auto cfg = common.load();
        if (k) cfg.fusion.k = *k;
        if (alpha) cfg.fusion.alpha = *alpha;
        if (m_cand) cfg.fusion.m_cand = *m_cand;
        if (workers) cfg.ingest_workers = workers;
        if (frames) cfg.corpus.ingest.frames_per_video = *frames;
        if (dimension) cfg.corpus.embedder.dimension = *dimension;
        if (description) cfg.corpus.ingest.use_description = *description;
        if (!glossary.empty()) {
            cfg.translator.kind = TranslatorKind::Glossary;
            cfg.translator.glossary = glossary;
        }
        if (!bind.empty()) cfg.set("http.bind", bind);
        if (k && !m_cand) cfg.fusion.m_cand = std::max(cfg.fusion.m_cand, *k);
        cfg.finalize();

        if (index->parsed()) return cmd_index(cfg, manifest, out, err);
        if (search->parsed()) return cmd_search(cfg, query, rerank_on || cfg.search_rerank, out);
        if (eval->parsed()) return cmd_eval(cfg, ea, out);
        if (ablate->parsed()) return cmd_ablate(cfg, aa, out);
        if (serve->parsed()) return cmd_serve(cfg, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace vidsearch::gateway
