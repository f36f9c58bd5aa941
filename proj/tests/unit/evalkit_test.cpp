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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "planted_fixture.hpp"
#include "test_support.hpp"
#include "vidsearch/evalkit/runner.hpp"
#include "vidsearch/rerank/llm_client.hpp"

namespace vidsearch::evalkit {
namespace {

using vidsearch::testing::build_planted_corpus;
using vidsearch::testing::data_dir;
using vidsearch::testing::planted_dir;
using vidsearch::testing::TempDir;

using Ids = std::vector<std::string>;

TEST(Metrics, HandDerivedGradedExample) {
    const Ids ranking{"a", "b", "c"};
    const GradeMap rels{{"a", 1}, {"b", 0}, {"c", 2}};
    const double idcg = 3.0 + 1.0 / std::log2(3.0);
    EXPECT_NEAR(ndcg_at_k(ranking, rels), 2.5 / idcg, 1e-12);
    // 2.5 / (3 + 1/log2 3) evaluated to 30 digits.
    EXPECT_NEAR(ndcg_at_k(ranking, rels), 0.688528880940466669, 1e-9);
    EXPECT_DOUBLE_EQ(recall_at_k(ranking, rels), 1.0);
}

TEST(Metrics, IdealAndEmptyRankings) {
    const GradeMap rels{{"a", 3}, {"b", 2}, {"c", 1}};
    EXPECT_DOUBLE_EQ(ndcg_at_k(Ids{"a", "b", "c", "x"}, rels), 1.0);
    EXPECT_EQ(ndcg_at_k(Ids{"x", "y"}, rels), 0.0);
    EXPECT_EQ(ndcg_at_k(Ids{}, rels), 0.0);
    EXPECT_EQ(ndcg_at_k(Ids{"a"}, GradeMap{{"a", 0}}), 0.0);
    EXPECT_ERROR_CODE(ndcg_at_k(Ids{"a"}, rels, 0), ErrorCode::InvalidArgument);
}

TEST(Metrics, RecallCounting) {
    const GradeMap rels{{"a", 1}, {"c", 2}, {"d", 1}, {"e", 0}};
    Ids ranking{"a", "b", "c", "e"};
    EXPECT_DOUBLE_EQ(recall_at_k(ranking, rels), 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(recall_at_k(Ids{"a", "c", "d"}, rels), 1.0);
    EXPECT_DOUBLE_EQ(recall_at_k(Ids{"a", "a", "a"}, rels), 1.0 / 3.0);
    EXPECT_ERROR_CODE(recall_at_k(ranking, GradeMap{{"a", 0}}), ErrorCode::NoRelevant);
    EXPECT_ERROR_CODE(recall_at_k(ranking, GradeMap{}), ErrorCode::NoRelevant);
}

TEST(Metrics, LinearGain) {
    const Ids ranking{"a", "b", "c"};
    const GradeMap rels{{"a", 1}, {"b", 0}, {"c", 2}};
    const double dcg = 1.0 + 2.0 / 2.0;
    const double idcg = 2.0 + 1.0 / std::log2(3.0);
    EXPECT_NEAR(ndcg_at_k(ranking, rels, 10, Gain::Linear), dcg / idcg, 1e-12);
    EXPECT_EQ(parse_gain("exp"), Gain::Exponential);
    EXPECT_EQ(parse_gain("linear"), Gain::Linear);
    EXPECT_ERROR_CODE(parse_gain("log"), ErrorCode::InvalidArgument);
}

TEST(Metrics, SingleRelevantAtRankI) {
    for (std::size_t i = 1; i <= 10; ++i) {
        Ids ranking;
        for (std::size_t j = 1; j < i; ++j) ranking.push_back("x" + std::to_string(j));
        ranking.push_back("r");
        EXPECT_DOUBLE_EQ(ndcg_at_k(ranking, GradeMap{{"r", 1}}), 1.0 / std::log2(static_cast<double>(i) + 1.0)) << i;
    }
}

TEST(Metrics, RandomizedCasesMatchIndependentOracle) {
    const auto cases = nlohmann::json::parse(std::ifstream(data_dir() / "metric_cases.json"));
    ASSERT_EQ(cases.size(), 200U);
    for (const auto& c : cases) {
        const auto ranking = c.at("ranking").get<Ids>();
        const auto rels = c.at("rels").get<GradeMap>();
        const auto kind = parse_gain(c.at("gain").get<std::string>());
        EXPECT_EQ(ndcg_at_k(ranking, rels, 10, kind), c.at("ndcg@10").get<double>());
        EXPECT_EQ(recall_at_k(ranking, rels, 10), c.at("recall@10").get<double>());
    }
}

TEST(Metrics, BoundedAndBlindBelowCutoff) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        Ids ranking;
        for (int i = 0; i < 30; ++i) ranking.push_back("d" + std::to_string(rng() % 40));
        GradeMap rels;
        for (int i = 0; i < 8; ++i) rels["d" + std::to_string(rng() % 40)] = static_cast<int>(rng() % 4);
        rels["d0"] = 1;
        const double n = ndcg_at_k(ranking, rels);
        const double r = recall_at_k(ranking, rels);
        ASSERT_GE(n, 0.0);
        ASSERT_LE(n, 1.0);
        ASSERT_GE(r, 0.0);
        ASSERT_LE(r, 1.0);
        auto shuffled = ranking;
        std::shuffle(shuffled.begin() + 10, shuffled.end(), rng);
        ASSERT_EQ(ndcg_at_k(shuffled, rels), n);
        ASSERT_EQ(recall_at_k(shuffled, rels), r);
        ASSERT_EQ(ndcg_at_k(ranking, rels), n);
    }
}

TEST(Qrels, ParsesTrecAndTsv) {
    std::istringstream qrels("q1 0 v1 2\nq1 0 v2 0\n\nq2\t0\tv9 1\r\nq1 0 v1 1\n");
    const auto parsed = parse_qrels(qrels);
    EXPECT_EQ(parsed.at("q1"), (GradeMap{{"v1", 1}, {"v2", 0}}));
    EXPECT_EQ(parsed.at("q2"), (GradeMap{{"v9", 1}}));

    std::istringstream queries("q1\tred car chase\nq2\tsplit\tby tab\r\n\n");
    EXPECT_EQ(parse_queries(queries), (std::vector<Query>{{"q1", "red car chase"}, {"q2", "split\tby tab"}}));
}

TEST(Qrels, ReportsBadLines) {
    std::istringstream short_line("q1 0 v1\n");
    EXPECT_ERROR_CODE(parse_qrels(short_line, "f"), ErrorCode::InvalidArgument);
    std::istringstream negative("q1 0 v1 -1\n");
    EXPECT_ERROR_CODE(parse_qrels(negative), ErrorCode::InvalidArgument);
    std::istringstream word("q1 0 v1 high\n");
    try {
        parse_qrels(word, "qrels.txt");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("qrels.txt:1"), std::string::npos);
    }
    std::istringstream dup("q1\ta\nq1\tb\n");
    EXPECT_ERROR_CODE(parse_queries(dup), ErrorCode::InvalidArgument);
    std::istringstream notab("q1 a\n");
    EXPECT_ERROR_CODE(parse_queries(notab), ErrorCode::InvalidArgument);
    EXPECT_ERROR_CODE(read_qrels("/nonexistent/qrels"), ErrorCode::Io);
}

class PlantedEval : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        dir_ = new TempDir("evalkit");
        for (std::size_t frames : {48, 16}) {
            for (bool desc : {true, false}) build_planted_corpus(cell_dir(frames, desc), frames, desc);
        }
        expected_ = new nlohmann::json(nlohmann::json::parse(std::ifstream(planted_dir() / "expected_eval.json")));
    }
    static void TearDownTestSuite() {
        delete dir_;
        delete expected_;
    }
    static std::filesystem::path cell_dir(std::size_t frames, bool desc) {
        return dir_->path() / ("n" + std::to_string(frames) + (desc ? "-desc" : "-nodesc"));
    }
    static EvalConfig exact_config() {
        EvalConfig cfg;
        cfg.fusion.m_cand = 200;
        cfg.fusion.ef_search = 200;
        return cfg;
    }

    static TempDir* dir_;
    static nlohmann::json* expected_;
    const std::vector<Query> queries_ = read_queries(planted_dir() / "queries.tsv");
    const Qrels qrels_ = read_qrels(planted_dir() / "qrels.txt");
};

TempDir* PlantedEval::dir_ = nullptr;
nlohmann::json* PlantedEval::expected_ = nullptr;

TEST_F(PlantedEval, EveryCellMatchesIndependentOracle) {
    for (const auto& cell : expected_->at("cells")) {
        const auto frames = cell.at("frames").get<std::size_t>();
        const bool desc = cell.at("description").get<bool>();
        const auto corpus = ingest::Corpus::open_existing(cell_dir(frames, desc));
        const auto run = run_eval(*corpus, queries_, qrels_, exact_config());
        SCOPED_TRACE("frames=" + std::to_string(frames) + " description=" + std::to_string(desc));
        EXPECT_EQ(run.evaluated(), cell.at("evaluated").get<std::size_t>());
        EXPECT_EQ(run.skipped.size(), cell.at("skipped").get<std::size_t>());
        EXPECT_EQ(run.mean_ndcg, cell.at("ndcg@10").get<double>());
        EXPECT_EQ(run.mean_recall, cell.at("recall@10").get<double>());
        for (const auto& m : run.per_query) {
            const auto& want = cell.at("per_query").at(m.query_id);
            EXPECT_EQ(m.ndcg, want.at("ndcg@10").get<double>()) << m.query_id;
            EXPECT_EQ(m.recall, want.at("recall@10").get<double>()) << m.query_id;
            EXPECT_EQ(m.ranking, cell.at("rankings").at(m.query_id).get<Ids>()) << m.query_id;
        }
    }
}

TEST_F(PlantedEval, ReportsSkippedAndMissing) {
    const auto corpus = ingest::Corpus::open_existing(cell_dir(48, true));
    auto qrels = qrels_;
    qrels["q_orphan"] = {{"vid0001", 1}, {"vid9999", 2}};
    qrels["q00"]["not_indexed"] = 0;
    auto queries = queries_;
    queries.push_back({"q_blank", "   "});
    qrels["q_blank"] = {{"vid0001", 1}};
    queries.push_back({"q_zero", "alpha beta"});
    qrels["q_zero"] = {{"vid0002", 0}};

    const auto run = run_eval(*corpus, queries, qrels, exact_config());
    EXPECT_EQ(run.evaluated(), 20U);
    ASSERT_EQ(run.skipped.size(), 3U);
    EXPECT_EQ(run.skipped[0].query_id, "q_blank");
    EXPECT_EQ(run.skipped[0].reason, "EmptyQuery");
    EXPECT_EQ(run.skipped[1].reason, "unjudged");
    EXPECT_EQ(run.skipped[2].reason, "NoRelevant");
    EXPECT_EQ(run.missing_queries, Ids{"q_orphan"});
    EXPECT_EQ(run.unknown_videos, (Ids{"not_indexed", "vid9999"}));
    EXPECT_EQ(run.mean_ndcg, expected_->at("cells").at(0).at("ndcg@10").get<double>());

    const auto j = to_json(run);
    EXPECT_EQ(j.at("skipped").at("q_unjudged"), "unjudged");
    EXPECT_EQ(j.at("config").at("gain"), "exp");
    EXPECT_EQ(j.at("config").at("frames_per_video"), 48);
    EXPECT_EQ(j.at("config").at("alpha"), 0.5);
    const auto tsv = to_tsv(run);
    EXPECT_EQ(tsv.substr(0, tsv.find('\n')), "query_id\tndcg@10\trecall@10");
    EXPECT_NE(tsv.find("\nmean\t"), std::string::npos);
}

TEST_F(PlantedEval, SingleQueryRankedFirst) {
    const auto corpus = ingest::Corpus::open_existing(cell_dir(48, true));
    const auto& planted = expected_->at("planted");
    const std::string target = planted.at("q03").get<std::string>();
    const auto it = std::find_if(queries_.begin(), queries_.end(), [](const Query& q) { return q.id == "q03"; });
    const auto run = run_eval(*corpus, {*it}, Qrels{{"q03", {{target, 1}}}}, exact_config());
    ASSERT_EQ(run.evaluated(), 1U);
    EXPECT_EQ(run.mean_ndcg, 1.0);
    EXPECT_EQ(run.mean_recall, 1.0);
}

TEST_F(PlantedEval, IdentityRerankLeavesMetricsUnchanged) {
    const auto corpus = ingest::Corpus::open_existing(cell_dir(16, true));
    const auto identity = rerank::ScriptedLlm::constant("[0,1,2,3,4,5,6,7,8,9]");
    auto cfg = exact_config();
    const auto off = run_eval(*corpus, queries_, qrels_, cfg);
    cfg.rerank = true;
    const auto on = run_eval(*corpus, queries_, qrels_, cfg, &identity);
    EXPECT_EQ(on.mean_ndcg, off.mean_ndcg);
    EXPECT_EQ(on.mean_recall, off.mean_recall);
    EXPECT_EQ(on.config.at("rerank"), true);

    const auto reverse = rerank::ScriptedLlm::constant("[9,8,7,6,5,4,3,2,1,0]");
    const auto reversed = run_eval(*corpus, queries_, qrels_, cfg, &reverse);
    EXPECT_LT(reversed.mean_ndcg, off.mean_ndcg);
    EXPECT_EQ(reversed.mean_recall, off.mean_recall);

    const auto down = rerank::ScriptedLlm::failing();
    const auto degraded = run_eval(*corpus, queries_, qrels_, cfg, &down);
    EXPECT_EQ(degraded.mean_ndcg, off.mean_ndcg);
    EXPECT_TRUE(degraded.per_query.front().rerank_degraded);
    EXPECT_ERROR_CODE(run_eval(*corpus, queries_, qrels_, cfg), ErrorCode::InvalidArgument);
}

TEST_F(PlantedEval, ParallelAndShuffledRunsAgree) {
    const auto corpus = ingest::Corpus::open_existing(cell_dir(48, false));
    const auto base = run_eval(*corpus, queries_, qrels_, exact_config());
    auto shuffled = queries_;
    std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937_64(3));
    auto cfg = exact_config();
    cfg.workers = 6;
    const auto par = run_eval(*corpus, shuffled, qrels_, cfg);
    EXPECT_EQ(par.mean_ndcg, base.mean_ndcg);
    EXPECT_EQ(par.mean_recall, base.mean_recall);
    ASSERT_EQ(par.per_query.size(), base.per_query.size());
    for (std::size_t i = 0; i < par.per_query.size(); ++i) EXPECT_EQ(par.per_query[i].ranking, base.per_query[i].ranking);
}

TEST_F(PlantedEval, AblationRowsMatchIndividualRuns) {
    AblationSpec spec;
    spec.base = exact_config();
    spec.rerank = {false, true};
    for (std::size_t frames : {16, 48}) {
        for (bool desc : {false, true}) spec.cells.push_back({frames, "off", desc, cell_dir(frames, desc)});
    }
    const auto identity = rerank::ScriptedLlm::constant("[0,1,2,3,4,5,6,7,8,9]");
    const auto rows = run_ablation(spec, queries_, qrels_, &identity);
    ASSERT_EQ(rows.size(), 8U);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const auto& cell = spec.cells[i / 2];
        EXPECT_EQ(row.frames, cell.frames);
        EXPECT_EQ(row.description, cell.description);
        EXPECT_EQ(row.rerank, i % 2 == 1);
        ASSERT_TRUE(row.run.has_value());
        const auto single = run_eval(*ingest::Corpus::open_existing(cell.data_dir), queries_, qrels_, exact_config());
        EXPECT_EQ(row.run->mean_ndcg, single.mean_ndcg);
        EXPECT_EQ(row.run->mean_recall, single.mean_recall);
    }
    for (std::size_t i = 0; i < rows.size(); i += 2) {
        EXPECT_EQ(rows[i].run->mean_ndcg, rows[i + 1].run->mean_ndcg);
        EXPECT_EQ(rows[i].run->mean_recall, rows[i + 1].run->mean_recall);
    }

    const auto tsv = to_tsv(rows);
    EXPECT_EQ(tsv.substr(0, tsv.find('\n')), "frames\tretrieval_vector\tdescription\trerank\tndcg@10\trecall@10");
    EXPECT_NE(tsv.find("\n16\toff\toff\toff\t"), std::string::npos);
    EXPECT_EQ(to_json(rows).at(0).at("retrieval_vector"), "off");
}

TEST_F(PlantedEval, UnavailableCells) {
    AblationSpec spec;
    spec.base = exact_config();
    spec.cells = {{48, "on", true, dir_->path() / "absent"},
                  {16, "off", true, cell_dir(48, true)},
                  {48, "off", true, cell_dir(48, true)}};
    const auto rows = run_ablation(spec, queries_, qrels_);
    ASSERT_EQ(rows.size(), 3U);
    EXPECT_FALSE(rows[0].run.has_value());
    EXPECT_NE(rows[0].unavailable_reason.find("no index"), std::string::npos);
    EXPECT_FALSE(rows[1].run.has_value());
    EXPECT_NE(rows[1].unavailable_reason.find("frames=48"), std::string::npos);
    EXPECT_TRUE(rows[2].run.has_value());
    EXPECT_NE(to_tsv(rows).find("48\ton\ton\toff\tn/a\tn/a"), std::string::npos);
    EXPECT_EQ(to_json(rows).at(0).at("available"), false);
}

TEST_F(PlantedEval, SingleCellGridEqualsRunEval) {
    TempDir tmp("grid");
    const auto grid = tmp.path() / "grid.json";
    std::filesystem::create_directory_symlink(cell_dir(16, false), tmp.path() / "cell");
    std::ofstream(grid) << R"({"cells":[{"frames":16,"retrieval_vector":"on","description":false,"data":"cell"}]})";
    auto spec = read_ablation_spec(grid);
    ASSERT_EQ(spec.cells.size(), 1U);
    EXPECT_EQ(spec.cells[0].data_dir, tmp.path() / "cell");
    EXPECT_EQ(spec.rerank, std::vector<bool>{false});
    spec.base = exact_config();
    const auto rows = run_ablation(spec, queries_, qrels_);
    ASSERT_EQ(rows.size(), 1U);
    const auto single = run_eval(*ingest::Corpus::open_existing(cell_dir(16, false)), queries_, qrels_, exact_config());
    EXPECT_EQ(rows[0].run->mean_ndcg, single.mean_ndcg);
    EXPECT_EQ(rows[0].run->mean_recall, single.mean_recall);
    EXPECT_EQ(rows[0].run->config.at("retrieval_vector"), "on");

    std::ofstream(tmp.path() / "bad.json") << R"({"cells":[]})";
    EXPECT_ERROR_CODE(read_ablation_spec(tmp.path() / "bad.json"), ErrorCode::Config);
}

TEST(Eval, EmptyCorpusIsFatal) {
    TempDir dir("evalkit-empty");
    ingest::CorpusConfig cfg;
    auto corpus = ingest::Corpus::open(dir.path(), cfg);
    EXPECT_ERROR_CODE(run_eval(*corpus, {{"q", "x"}}, {{"q", {{"v", 1}}}}, {}), ErrorCode::EmptyCorpus);
}

}  // namespace
}  // namespace vidsearch::evalkit
