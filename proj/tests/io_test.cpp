// Copyright 2026 The qcl-landscape Authors.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "qcl/io.hpp"

namespace {

namespace fs = std::filesystem;
using qcl::json;
using qcl::param_vector;

fs::path scratch(const std::string &name) {
    const fs::path dir = fs::path(::testing::TempDir()) / "qcl_io_test";
    fs::create_directories(dir);
    const fs::path p = dir / name;
    fs::remove(p);
    return p;
}

qcl::train_record sample_record() {
    qcl::dataset_options opt;
    opt.n_points = 30;
    const auto split = qcl::split(qcl::generate_dataset(4, opt));
    qcl::train_config c;
    c.steps = 5;
    c.batch_size = 4;
    c.optimizer.kind = qcl::optimizer_kind::qng;
    c.init = qcl::init_scheme::uniform();
    c.seed = 12;
    c.data_seed = 4;
    return qcl::train(qcl::circuit_for(c), c, split);
}

TEST(Json, RecordRoundTripIsExact) {
    const auto rec = sample_record();
    const json j = qcl::to_json(rec);
    const std::set<std::string> keys{"config", "theta_init", "theta_final", "train_loss", "test_mse",
                                     "best_test_mse", "best_step", "seed", "duration_s"};
    std::set<std::string> got;
    for (const auto &[k, v] : j.items()) {
        got.insert(k);
    }
    EXPECT_EQ(got, keys);
    const auto back = qcl::train_record_from_json(qcl::parse_json_text(j.dump(), "mem"), "mem");
    EXPECT_EQ(qcl::config_hash(back.config), qcl::config_hash(rec.config));
    EXPECT_EQ(back.theta_init, rec.theta_init);
    EXPECT_EQ(back.theta_final, rec.theta_final);
    EXPECT_EQ(back.train_loss, rec.train_loss);
    EXPECT_EQ(back.test_mse, rec.test_mse);
    EXPECT_EQ(back.best_test_mse, rec.best_test_mse);
    EXPECT_EQ(back.best_step, rec.best_step);
    EXPECT_EQ(j["config"]["hash"], qcl::config_hash(rec.config));
    EXPECT_EQ(j["config"]["circuit"]["param_count"], 4);
}

TEST(Json, ParseErrorsCarryLocation) {
    try {
        qcl::parse_json_text("{\n  \"a\": 1,\n  \"b\": ]\n}", "cfg.json");
        FAIL() << "expected parse_error";
    } catch (const qcl::parse_error &e) {
        EXPECT_NE(std::string(e.what()).find("cfg.json:3"), std::string::npos) << e.what();
    }
    const json missing = {{"layouts", {"cycle"}}, {"optimizers", {"adam"}}};
    try {
        qcl::sweep_config_from_json(missing, "sweep.json");
        FAIL() << "expected parse_error";
    } catch (const qcl::parse_error &e) {
        EXPECT_NE(std::string(e.what()).find("depths"), std::string::npos) << e.what();
    }
    json unknown = {{"layouts", {"cycle"}}, {"depths", {1}}, {"optimizers", {"adam"}}, {"lr", 0.1}};
    EXPECT_THROW(qcl::sweep_config_from_json(unknown, "sweep.json"), qcl::parse_error);
    json bad_type = {{"layouts", {"cycle"}}, {"depths", "one"}, {"optimizers", {"adam"}}};
    EXPECT_THROW(qcl::sweep_config_from_json(bad_type, "sweep.json"), qcl::parse_error);
    json empty = {{"layouts", json::array()}, {"depths", {1}}, {"optimizers", {"adam"}}};
    EXPECT_THROW(qcl::sweep_config_from_json(empty, "sweep.json"), qcl::config_error);
}

TEST(Json, SweepConfigDefaultsAndOverrides) {
    const json j = {{"layouts", {"chain", "cycle"}},
                    {"depths", {1, 2}},
                    {"optimizers", {"sgd", "QNG"}},
                    {"inits", "standard"},
                    {"steps", 50},
                    {"qng", {{"metric", "diagonal"}}},
                    {"record_timing", true}};
    const auto cfg = qcl::sweep_config_from_json(j, "sweep.json");
    EXPECT_EQ(cfg.grid.run_count(), 2u * 2u * 2u * 6u * 6u);
    EXPECT_EQ(cfg.grid.base.steps, 50u);
    EXPECT_EQ(cfg.grid.base.optimizer.metric, qcl::metric_approximation::diagonal);
    EXPECT_TRUE(cfg.record_timing);
    EXPECT_EQ(cfg.split_ratio, 0.8);
    const json minimal = {{"layouts", {"cycle"}}, {"depths", {1}}, {"optimizers", {"adam"}}};
    EXPECT_FALSE(qcl::sweep_config_from_json(minimal, "sweep.json").record_timing);
}

TEST(Jsonl, ReadRecordsSkipsTruncatedTailAndRepairs) {
    const auto rec = sample_record();
    const auto path = scratch("records.jsonl");
    {
        std::ofstream out(path);
        out << qcl::to_json(rec).dump() << '\n';
        out << qcl::to_json(rec).dump() << '\n';
        out << qcl::to_json(rec).dump().substr(0, 40);
    }
    EXPECT_EQ(qcl::read_records(path).size(), 2u);
    qcl::repair_jsonl_tail(path);
    const std::string text = qcl::read_text_file(path);
    EXPECT_EQ(text.back(), '\n');
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
    const auto recs = qcl::read_records(path);
    const auto done = qcl::completed_hashes(recs);
    EXPECT_EQ(done.size(), 1u);
    EXPECT_TRUE(done.contains(qcl::config_hash(rec.config)));
}

TEST(Jsonl, CorruptMiddleLineIsParseError) {
    const auto path = scratch("corrupt.jsonl");
    {
        std::ofstream out(path);
        out << "{not json}\n";
    }
    try {
        qcl::read_records(path);
        FAIL() << "expected parse_error";
    } catch (const qcl::parse_error &e) {
        EXPECT_NE(std::string(e.what()).find(":1"), std::string::npos);
    }
    EXPECT_THROW(qcl::read_records(scratch("absent.jsonl")), qcl::io_error);
}

TEST(Csv, DatasetRoundTripIsExact) {
    const auto data = qcl::generate_dataset(3);
    const auto parts = qcl::split(data, 0.8, 3);
    const auto path = scratch("data.csv");
    qcl::write_dataset_csv(path, data, parts);
    const auto loaded = qcl::read_dataset_csv(path);
    EXPECT_EQ(loaded.data.xs, data.xs);
    EXPECT_EQ(loaded.data.ys, data.ys);
    EXPECT_EQ(loaded.parts.is_train, parts.is_train);
    EXPECT_EQ(loaded.parts.train.xs(), parts.train.xs());
    EXPECT_EQ(loaded.parts.test.ys(), parts.test.ys());
}

TEST(Csv, MalformedDatasetReportsLine) {
    const auto path = scratch("bad.csv");
    {
        std::ofstream out(path);
        out << "x,y,split\n0.1,0.01,train\n0.2,abc,test\n";
    }
    try {
        qcl::read_dataset_csv(path);
        FAIL() << "expected parse_error";
    } catch (const qcl::parse_error &e) {
        EXPECT_NE(std::string(e.what()).find(":3"), std::string::npos) << e.what();
    }
}

TEST(Json, AmsRoundTrip) {
    qcl::ams_result ams;
    param_vector c(2);
    c << 0.25, -1.5;
    ams.members.push_back({c, 0.0081, 7});
    const auto back = qcl::ams_from_json(qcl::to_json(ams), "ams.json");
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(back[0].center, c);
    EXPECT_EQ(back[0].test_mse, 0.0081);
    EXPECT_EQ(back[0].cluster_size, 7u);
    EXPECT_THROW(qcl::ams_from_json(json::object(), "ams.json"), qcl::parse_error);
}

} // namespace
