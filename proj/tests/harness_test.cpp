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

#include <cmath>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "qcl/harness.hpp"

namespace {

using qcl::entangler_layout;
using qcl::param_vector;
constexpr double pi = std::numbers::pi;

qcl::train_config small_config(qcl::optimizer_kind kind, std::size_t steps = 20) {
    qcl::train_config c;
    c.optimizer.kind = kind;
    c.steps = steps;
    c.batch_size = 4;
    return c;
}

TEST(Dataset, GridLabelsAndNoiseBound) {
    const auto data = qcl::generate_dataset(5);
    ASSERT_EQ(data.size(), 500u);
    EXPECT_EQ(data.xs.front(), -1.0);
    EXPECT_EQ(data.xs.back(), 1.0);
    for (std::size_t i = 0; i < data.size(); ++i) {
        EXPECT_GE(data.xs[i], -1.0);
        EXPECT_LE(data.xs[i], 1.0);
        EXPECT_LE(std::abs(data.ys[i] - data.xs[i] * data.xs[i]), 0.1);
        if (i > 0) {
            EXPECT_GT(data.xs[i], data.xs[i - 1]);
        }
    }
    const auto again = qcl::generate_dataset(5);
    EXPECT_EQ(again.ys, data.ys);
    EXPECT_NE(qcl::generate_dataset(6).ys, data.ys);
}

TEST(Dataset, NoiselessLabelsAreExactSquares) {
    qcl::dataset_options opt;
    opt.noise_amplitude = 0.0;
    const auto data = qcl::generate_dataset(0, opt);
    for (std::size_t i = 0; i < data.size(); ++i) {
        EXPECT_EQ(data.ys[i], data.xs[i] * data.xs[i]);
    }
    opt.n_points = 1;
    EXPECT_THROW(qcl::generate_dataset(0, opt), qcl::config_error);
}

TEST(Split, SizesAndPartition) {
    const auto data = qcl::generate_dataset(1);
    const auto s = qcl::split(data, 0.8, 3);
    EXPECT_EQ(s.train.size(), 400u);
    EXPECT_EQ(s.test.size(), 100u);
    std::multiset<double> all(data.xs.begin(), data.xs.end());
    std::multiset<double> parts(s.train.xs().begin(), s.train.xs().end());
    parts.insert(s.test.xs().begin(), s.test.xs().end());
    EXPECT_EQ(all, parts);
    EXPECT_EQ(std::count(s.is_train.begin(), s.is_train.end(), true), 400);
    EXPECT_THROW(qcl::split(data, 1.0), qcl::config_error);
    EXPECT_THROW(qcl::split(data, 0.0), qcl::config_error);
    EXPECT_THROW(qcl::split(data, 0.001), qcl::config_error);
}

TEST(Init, GaussianStatistics) {
    const auto theta = qcl::init_params(qcl::init_scheme::gaussian(pi / 2), 100000, 7);
    const double mean = theta.mean();
    const double var = (theta.array() - mean).square().sum() / static_cast<double>(theta.size() - 1);
    EXPECT_NEAR(mean, pi / 2, 0.01);
    EXPECT_NEAR(std::sqrt(var), 0.5774, 0.01);
    EXPECT_NEAR(qcl::qubit_glorot_sigma, 0.5774, 1e-4);
}

TEST(Init, UniformHalfOpenRange) {
    const auto theta = qcl::init_params(qcl::init_scheme::uniform(), 100000, 8);
    EXPECT_GE(theta.minCoeff(), 0.0);
    EXPECT_LT(theta.maxCoeff(), 2 * pi);
    EXPECT_NEAR(theta.mean(), pi, 0.03);
}

TEST(Init, StandardSchemesAndBatchSizes) {
    const auto schemes = qcl::standard_init_schemes();
    ASSERT_EQ(schemes.size(), 6u);
    EXPECT_EQ(schemes[2].mean, pi / 2);
    EXPECT_EQ(schemes.back().type, qcl::init_scheme::kind::uniform);
    EXPECT_EQ(qcl::standard_batch_sizes(), (std::vector<std::size_t>{1, 2, 4, 8, 16, 32}));
    EXPECT_THROW(qcl::init_params(qcl::init_scheme::gaussian(0.0, 0.0), 3, 0), qcl::config_error);
}

TEST(ConfigHash, StableAndSensitive) {
    qcl::train_config a;
    qcl::train_config b = a;
    EXPECT_EQ(qcl::config_hash(a), qcl::config_hash(b));
    EXPECT_EQ(qcl::config_hash(a).size(), 16u);
    b.seed = 1;
    EXPECT_NE(qcl::config_hash(a), qcl::config_hash(b));
    b = a;
    b.optimizer.learning_rate = 0.05000000000000001;
    EXPECT_NE(qcl::config_hash(a), qcl::config_hash(b));
    b = a;
    b.encoding = qcl::encoding_order::ry_first;
    EXPECT_NE(qcl::config_hash(a), qcl::config_hash(b));
}

TEST(Train, RecordShapeAndBestStep) {
    const auto split = qcl::split(qcl::generate_dataset(0));
    for (const auto kind : {qcl::optimizer_kind::sgd, qcl::optimizer_kind::adam,
                            qcl::optimizer_kind::qng}) {
        const auto config = small_config(kind);
        const auto rec = qcl::train(qcl::circuit_for(config), config, split);
        ASSERT_EQ(rec.train_loss.size(), 21u);
        ASSERT_EQ(rec.test_mse.size(), 21u);
        EXPECT_EQ(rec.theta_init.size(), 4);
        EXPECT_EQ(rec.theta_final.size(), 4);
        EXPECT_EQ(rec.best_test_mse, rec.test_mse[rec.best_step]);
        for (const double v : rec.test_mse) {
            EXPECT_GE(v, rec.best_test_mse);
        }
        EXPECT_NEAR(rec.test_mse[0], qcl::mse_loss(qcl::circuit_for(config), rec.theta_init, split.test), 0.0);
        EXPECT_GE(rec.duration_s, 0.0);
    }
}

TEST(Train, FullLengthRunHasStepsPlusOneEntries) {
    const auto split = qcl::split(qcl::generate_dataset(0));
    const auto config = small_config(qcl::optimizer_kind::adam, 300);
    const auto rec = qcl::train(qcl::circuit_for(config), config, split);
    EXPECT_EQ(rec.train_loss.size(), 301u);
    EXPECT_EQ(rec.test_mse.size(), 301u);
}

TEST(Train, DeterministicForEqualConfigs) {
    const auto split = qcl::split(qcl::generate_dataset(2));
    const auto config = small_config(qcl::optimizer_kind::qng);
    const auto a = qcl::train(qcl::circuit_for(config), config, split);
    const auto b = qcl::train(qcl::circuit_for(config), config, split);
    EXPECT_EQ(a.theta_init, b.theta_init);
    EXPECT_EQ(a.theta_final, b.theta_final);
    EXPECT_EQ(a.train_loss, b.train_loss);
    EXPECT_EQ(a.test_mse, b.test_mse);
    auto other = config;
    other.seed = 9;
    EXPECT_NE(qcl::train(qcl::circuit_for(other), other, split).theta_init, a.theta_init);
}

TEST(Train, ZeroGradientLeavesParametersUnchanged) {
    // At theta = 0 every x = 0 sample predicts 1, so labels of 1 give zero residuals.
    qcl::data_split split;
    for (int i = 0; i < 8; ++i) {
        split.train.push_back(0.0, 1.0);
    }
    split.test.push_back(0.0, 1.0);
    for (const auto kind : {qcl::optimizer_kind::sgd, qcl::optimizer_kind::adam,
                            qcl::optimizer_kind::qng}) {
        const auto config = small_config(kind, 10);
        const param_vector zero = param_vector::Zero(4);
        const auto rec = qcl::train(qcl::circuit_for(config), config, split, zero);
        EXPECT_EQ(rec.theta_final, zero);
        for (const double v : rec.train_loss) {
            EXPECT_EQ(v, 0.0);
        }
    }
}

TEST(Train, RejectsInvalidConfigs) {
    const auto split = qcl::split(qcl::generate_dataset(0));
    auto config = small_config(qcl::optimizer_kind::sgd);
    config.steps = 0;
    EXPECT_THROW(qcl::train(qcl::circuit_for(config), config, split), qcl::config_error);
    config = small_config(qcl::optimizer_kind::sgd);
    config.batch_size = 0;
    EXPECT_THROW(qcl::train(qcl::circuit_for(config), config, split), qcl::config_error);
    config = small_config(qcl::optimizer_kind::sgd);
    EXPECT_THROW(qcl::train(qcl::circuit_for(config), config, split, param_vector::Zero(5)),
                 qcl::shape_error);
}

qcl::sweep_grid tiny_grid() {
    qcl::sweep_grid g;
    g.layouts = {entangler_layout::chain, entangler_layout::cycle};
    g.depths = {1};
    g.optimizers = {qcl::optimizer_kind::sgd, qcl::optimizer_kind::adam};
    g.inits = {qcl::init_scheme::gaussian(0.0), qcl::init_scheme::uniform()};
    g.batch_sizes = {2, 8};
    g.base.steps = 5;
    return g;
}

TEST(Sweep, ExpandOrderAndEmptyGrid) {
    const auto runs = qcl::expand(tiny_grid());
    ASSERT_EQ(runs.size(), 16u);
    EXPECT_EQ(runs[0].layout, entangler_layout::chain);
    EXPECT_EQ(runs[0].batch_size, 2u);
    EXPECT_EQ(runs[1].batch_size, 8u);
    EXPECT_EQ(runs[8].layout, entangler_layout::cycle);
    std::set<std::string> hashes;
    for (const auto &r : runs) {
        hashes.insert(qcl::config_hash(r));
    }
    EXPECT_EQ(hashes.size(), runs.size());
    auto empty = tiny_grid();
    empty.depths.clear();
    EXPECT_THROW(qcl::expand(empty), qcl::config_error);
}

TEST(Sweep, ResumeSkipsCompletedAndParallelKeepsOrder) {
    const auto split = qcl::split(qcl::generate_dataset(0));
    const auto grid = tiny_grid();
    std::vector<qcl::train_record> serial;
    const auto r1 = qcl::sweep(grid, split, {}, [&](const qcl::train_record &r) { serial.push_back(r); });
    EXPECT_EQ(r1.completed, 16u);
    EXPECT_TRUE(r1.failures.empty());

    std::vector<qcl::train_record> parallel;
    qcl::sweep(grid, split, {}, [&](const qcl::train_record &r) { parallel.push_back(r); }, 4);
    ASSERT_EQ(parallel.size(), serial.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        EXPECT_EQ(qcl::config_hash(parallel[i].config), qcl::config_hash(serial[i].config));
        EXPECT_EQ(parallel[i].theta_final, serial[i].theta_final);
    }

    std::unordered_set<std::string> done;
    for (std::size_t i = 0; i < 10; ++i) {
        done.insert(qcl::config_hash(serial[i].config));
    }
    std::vector<qcl::train_record> resumed;
    const auto r2 = qcl::sweep(grid, split, done, [&](const qcl::train_record &r) { resumed.push_back(r); });
    EXPECT_EQ(r2.skipped, 10u);
    EXPECT_EQ(r2.completed, 6u);
    ASSERT_EQ(resumed.size(), 6u);
    for (std::size_t i = 0; i < 6; ++i) {
        EXPECT_EQ(resumed[i].test_mse, serial[10 + i].test_mse);
    }
}

TEST(Histogram, BinGeometryAndClamping) {
    const qcl::histogram_spec spec;
    EXPECT_NEAR(spec.width(), 0.00306, 1e-12);
    EXPECT_NEAR(spec.midpoint(0), 0.00853, 1e-12);
    EXPECT_EQ(spec.bin_of(0.0), 0u);
    EXPECT_EQ(spec.bin_of(0.5), 49u);
    EXPECT_EQ(spec.bin_of(0.16), 49u);
    EXPECT_EQ(spec.bin_of(0.007 + 1.5 * spec.width()), 1u);
    const std::vector<double> values{0.001, 0.008, 0.012, 0.2};
    const auto h = qcl::make_histogram(values);
    EXPECT_EQ(h.counts[0], 2u);
    EXPECT_EQ(h.counts[1], 1u);
    EXPECT_EQ(h.counts[49], 1u);
    EXPECT_EQ(h.below, 1u);
    EXPECT_EQ(h.above, 1u);
    EXPECT_EQ(h.lowest_occupied(), 0u);
}

TEST(Statistics, MedianAndSummary) {
    EXPECT_EQ(qcl::median({3.0, 1.0, 2.0}), 2.0);
    EXPECT_EQ(qcl::median({4.0, 1.0, 3.0, 2.0}), 2.5);
    EXPECT_THROW(qcl::median({}), qcl::domain_error);

    std::vector<qcl::train_record> records(3);
    records[0].config.optimizer.kind = qcl::optimizer_kind::sgd;
    records[0].best_test_mse = 0.05;
    records[0].best_step = 10;
    records[1].config.optimizer.kind = qcl::optimizer_kind::adam;
    records[1].best_test_mse = 0.009;
    records[1].best_step = 20;
    records[2].config.optimizer.kind = qcl::optimizer_kind::adam;
    records[2].best_test_mse = 0.02;
    records[2].best_step = 40;
    const auto groups = qcl::summarize(records);
    ASSERT_EQ(groups.size(), 2u);
    EXPECT_EQ(groups[0].key.optimizer, qcl::optimizer_kind::sgd);
    EXPECT_EQ(groups[1].n, 2u);
    EXPECT_NEAR(groups[1].median_best_test_mse, 0.0145, 1e-15);
    EXPECT_EQ(groups[1].lowest_bin, 0u);
    EXPECT_EQ(groups[1].lowest_bin_occupancy, 1u);
    EXPECT_EQ(groups[1].mean_steps_to_best, 30.0);
    EXPECT_THROW(qcl::summarize(std::span<const qcl::train_record>{}), qcl::domain_error);
}

} // namespace
