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

/**
 * @file
 * Training harness for the parabola regression task.
 *
 * Data: 500 equally spaced x in [-1, 1], y = x^2 + eps, eps ~ U[-0.1, 0.1],
 * split 80/20 into train and test. Each run trains for a fixed number of
 * steps (no early stopping) and records the test MSE after every step. A
 * sweep enumerates layout x depth x optimizer x init x batch size x seed and
 * runs every configuration exactly once.
 */

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <tuple>
#include <unordered_set>
#include <utility>
#include <vector>

#include "qcl/ansatz.hpp"
#include "qcl/errors.hpp"
#include "qcl/gradloss.hpp"
#include "qcl/optim.hpp"

namespace qcl {

// ---------------------------------------------------------------------------
// Data

struct dataset_options {
    std::size_t n_points = 500;
    double noise_amplitude = 0.1;
};

struct dataset {
    std::vector<double> xs;
    std::vector<double> ys;
    std::uint64_t seed = 0;

    [[nodiscard]] std::size_t size() const noexcept { return xs.size(); }
};

inline dataset generate_dataset(std::uint64_t seed, const dataset_options &options = {}) {
    if (options.n_points < 2) {
        throw config_error("dataset needs at least 2 points");
    }
    if (!(options.noise_amplitude >= 0.0)) {
        throw config_error("noise amplitude must be >= 0");
    }
    dataset data;
    data.seed = seed;
    data.xs.resize(options.n_points);
    data.ys.resize(options.n_points);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> noise(-options.noise_amplitude,
                                                 options.noise_amplitude);
    const auto last = static_cast<double>(options.n_points - 1);
    for (std::size_t i = 0; i < options.n_points; ++i) {
        // Endpoints are exact: -1 and +1.
        const double x = i + 1 == options.n_points ? 1.0 : -1.0 + 2.0 * static_cast<double>(i) / last;
        data.xs[i] = x;
        const double eps = options.noise_amplitude > 0.0 ? noise(rng) : 0.0;
        data.ys[i] = x * x + eps;
    }
    return data;
}

struct data_split {
    batch train;
    batch test;
    /// Per dataset point, in dataset order: true when assigned to train.
    std::vector<bool> is_train;
};

inline data_split split(const dataset &data, double ratio = 0.8, std::uint64_t seed = 0) {
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw config_error("split ratio must lie in (0, 1), got " + std::to_string(ratio));
    }
    const auto n = data.size();
    const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratio));
    if (n_train == 0 || n_train == n) {
        throw config_error("split ratio leaves an empty partition");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    data_split out;
    out.is_train.assign(n, false);
    for (std::size_t k = 0; k < n_train; ++k) {
        out.is_train[order[k]] = true;
    }
    out.train.reserve(n_train);
    out.test.reserve(n - n_train);
    for (std::size_t i = 0; i < n; ++i) {
        (out.is_train[i] ? out.train : out.test).push_back(data.xs[i], data.ys[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Initialization

/// Glorot-style width sqrt(2 / (fan_in + fan_out)) with both fans replaced by
/// the qubit count of the 3-qubit circuit.
inline const double qubit_glorot_sigma = std::sqrt(2.0 / 6.0);

struct init_scheme {
    enum class kind { gaussian, uniform };
    kind type = kind::gaussian;
    double mean = 0.0;
    double sigma = qubit_glorot_sigma;

    static init_scheme gaussian(double mean, double sigma = qubit_glorot_sigma) {
        return {kind::gaussian, mean, sigma};
    }
    static init_scheme uniform() { return {kind::uniform, 0.0, 0.0}; }

    [[nodiscard]] std::string label() const;

    friend bool operator==(const init_scheme &, const init_scheme &) = default;
};

/// Gaussians centred at 0, pi/4, pi/2, 3pi/4, pi plus U[0, 2pi).
inline std::vector<init_scheme> standard_init_schemes() {
    constexpr double pi = std::numbers::pi;
    return {init_scheme::gaussian(0.0),        init_scheme::gaussian(pi / 4),
            init_scheme::gaussian(pi / 2),     init_scheme::gaussian(3 * pi / 4),
            init_scheme::gaussian(pi),         init_scheme::uniform()};
}

inline std::vector<std::size_t> standard_batch_sizes() { return {1, 2, 4, 8, 16, 32}; }

inline param_vector init_params(const init_scheme &scheme, std::size_t n_params,
                                std::mt19937_64 &rng) {
    param_vector theta(static_cast<Eigen::Index>(n_params));
    switch (scheme.type) {
    case init_scheme::kind::gaussian: {
        if (!(scheme.sigma > 0.0)) {
            throw config_error("gaussian init needs sigma > 0");
        }
        std::normal_distribution<double> dist(scheme.mean, scheme.sigma);
        for (auto &v : theta) {
            v = dist(rng);
        }
        break;
    }
    case init_scheme::kind::uniform: {
        std::uniform_real_distribution<double> dist(0.0, 2.0 * std::numbers::pi);
        for (auto &v : theta) {
            do {
                v = dist(rng);
            } while (v >= 2.0 * std::numbers::pi); // half-open even under rounding
        }
        break;
    }
    default:
        throw config_error("unknown init scheme");
    }
    return theta;
}

inline param_vector init_params(const init_scheme &scheme, std::size_t n_params,
                                std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return init_params(scheme, n_params, rng);
}

// ---------------------------------------------------------------------------
// Number formatting shared by labels, hashes and the file writers.

/// 17 significant digits, enough to round-trip any finite double.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string init_scheme::label() const {
    if (type == kind::uniform) {
        return "uniform[0,2pi)";
    }
    return "gaussian(mu=" + format_double(mean) + ",sigma=" + format_double(sigma) + ")";
}

// ---------------------------------------------------------------------------
// Single run

struct train_config {
    entangler_layout layout = entangler_layout::cycle;
    std::size_t depth = 1;
    std::size_t n_qubits = 3;
    encoding_order encoding = encoding_order::rz_first;
    optimizer_settings optimizer;
    std::size_t steps = 300;
    std::size_t batch_size = 8;
    init_scheme init = init_scheme::gaussian(std::numbers::pi / 2);
    std::uint64_t seed = 0;
    /// Seed of the dataset and split the run trains on (echoed for provenance).
    std::uint64_t data_seed = 0;

    void validate() const {
        if (depth < 1) {
            throw config_error("depth must be >= 1");
        }
        if (steps < 1) {
            throw config_error("steps must be >= 1");
        }
        if (batch_size < 1) {
            throw config_error("batch size must be >= 1");
        }
        optimizer.validate();
    }
};

/// Canonical key of every field that influences a run.
inline std::string config_key(const train_config &c) {
    const auto &o = c.optimizer;
    return "layout=" + to_string(c.layout) + ";depth=" + std::to_string(c.depth) +
           ";n_qubits=" + std::to_string(c.n_qubits) + ";encoding=" + to_string(c.encoding) +
           ";optimizer=" + to_string(o.kind) +
           ";lr=" + format_double(o.learning_rate) + ";beta1=" + format_double(o.beta1) +
           ";beta2=" + format_double(o.beta2) + ";adam_eps=" + format_double(o.adam_epsilon) +
           ";qng_reg=" + format_double(o.qng_regularizer) + ";metric=" + to_string(o.metric) +
           ";steps=" + std::to_string(c.steps) + ";batch=" + std::to_string(c.batch_size) +
           ";init=" + c.init.label() + ";seed=" + std::to_string(c.seed) +
           ";data_seed=" + std::to_string(c.data_seed);
}

/// 64-bit FNV-1a of the config key, as 16 hex digits. Stable across platforms.
inline std::string config_hash(const train_config &c) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char ch : config_key(c)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Independent random stream @p stream of a run (0: initialization, 1: batching).
inline std::mt19937_64 run_stream(const train_config &config, std::uint32_t stream) {
    const std::uint64_t h = std::stoull(config_hash(config), nullptr, 16);
    std::seed_seq seq{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32), stream};
    return std::mt19937_64(seq);
}

struct train_record {
    train_config config;
    param_vector theta_init;
    param_vector theta_final;
    std::vector<double> train_loss; // steps + 1 entries
    std::vector<double> test_mse;   // steps + 1 entries
    double best_test_mse = 0.0;
    std::size_t best_step = 0;
    double duration_s = 0.0;
};

/// Draws mini-batches without replacement within an epoch, reshuffling each
/// epoch. A tail shorter than the batch size is discarded.
class epoch_sampler {
  public:
    epoch_sampler(std::size_t n, std::size_t batch_size, std::mt19937_64 &rng)
        : order_(n), batch_size_(std::min(batch_size, n)), rng_(rng) {
        if (n == 0 || batch_size == 0) {
            throw config_error("epoch sampler needs data and a positive batch size");
        }
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        cursor_ = order_.size(); // forces a shuffle on first use
    }

    std::span<const std::size_t> next() {
        if (cursor_ + batch_size_ > order_.size()) {
            std::shuffle(order_.begin(), order_.end(), rng_);
            cursor_ = 0;
        }
        std::span<const std::size_t> out(order_.data() + cursor_, batch_size_);
        cursor_ += batch_size_;
        return out;
    }

  private:
    std::vector<std::size_t> order_;
    std::size_t batch_size_;
    std::mt19937_64 &rng_;
    std::size_t cursor_ = 0;
};

inline batch gather(batch_view source, std::span<const std::size_t> indices) {
    batch out;
    out.reserve(indices.size());
    for (const auto i : indices) {
        out.push_back(source.xs[i], source.ys[i]);
    }
    return out;
}

/// One optimizer update on a mini-batch.
inline param_vector optimizer_update(optimizer_state &state, const circuit_spec &spec,
                                     const param_vector &theta, const param_vector &grad,
                                     batch_view mini_batch) {
    const auto &s = state.settings;
    switch (s.kind) {
    case optimizer_kind::sgd:
        state.step_count += 1;
        return sgd_step(theta, grad, s.learning_rate);
    case optimizer_kind::adam:
        return adam_step(state, theta, grad);
    case optimizer_kind::qng: {
        state.step_count += 1;
        const metric_matrix g = fubini_metric_blockdiag(spec, mini_batch.xs, theta, s.metric);
        return qng_step(theta, grad, g, s.learning_rate, s.qng_regularizer);
    }
    }
    throw config_error("unknown optimizer kind");
}

/// Trains from an explicit starting point.
inline train_record train(const circuit_spec &spec, const train_config &config,
                          const data_split &data, const param_vector &theta_init) {
    config.validate();
    check_params(spec, theta_init);
    if (data.train.empty() || data.test.empty()) {
        throw config_error("training needs non-empty train and test sets");
    }
    const auto started = std::chrono::steady_clock::now();
    std::mt19937_64 rng = run_stream(config, 1);

    train_record rec;
    rec.config = config;
    rec.theta_init = theta_init;
    rec.train_loss.reserve(config.steps + 1);
    rec.test_mse.reserve(config.steps + 1);

    optimizer_state opt = optimizer_state::make(config.optimizer, spec.param_count());
    epoch_sampler sampler(data.train.size(), config.batch_size, rng);
    param_vector theta = theta_init;
    for (std::size_t step = 0; step < config.steps; ++step) {
        const batch mini = gather(data.train, sampler.next());
        const auto lg = evaluate_loss_gradient(spec, theta, mini);
        rec.train_loss.push_back(lg.loss);
        rec.test_mse.push_back(mse_loss(spec, theta, data.test));
        theta = optimizer_update(opt, spec, theta, lg.gradient, mini);
    }
    rec.train_loss.push_back(mse_loss(spec, theta, gather(data.train, sampler.next())));
    rec.test_mse.push_back(mse_loss(spec, theta, data.test));
    rec.theta_final = theta;

    const auto best = std::min_element(rec.test_mse.begin(), rec.test_mse.end());
    rec.best_test_mse = *best;
    rec.best_step = static_cast<std::size_t>(best - rec.test_mse.begin());
    rec.duration_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return rec;
}

inline train_record train(const circuit_spec &spec, const train_config &config,
                          const data_split &data) {
    std::mt19937_64 rng = run_stream(config, 0);
    const param_vector theta0 = init_params(config.init, spec.param_count(), rng);
    return train(spec, config, data, theta0);
}

inline circuit_spec circuit_for(const train_config &config) {
    ansatz_options options;
    options.encoding = config.encoding;
    return build_ansatz(config.layout, config.depth, config.n_qubits, options);
}

// ---------------------------------------------------------------------------
// Sweep

struct sweep_grid {
    std::vector<entangler_layout> layouts;
    std::vector<std::size_t> depths;
    std::vector<optimizer_kind> optimizers;
    std::vector<init_scheme> inits = standard_init_schemes();
    std::vector<std::size_t> batch_sizes = standard_batch_sizes();
    std::vector<std::uint64_t> seeds = {0};
    /// Shared settings; the optimizer kind is overridden per run.
    train_config base;

    [[nodiscard]] std::size_t run_count() const noexcept {
        return layouts.size() * depths.size() * optimizers.size() * inits.size() *
               batch_sizes.size() * seeds.size();
    }
};

/// Run list in a fixed order: layout, depth, optimizer, seed, init, batch size.
inline std::vector<train_config> expand(const sweep_grid &grid) {
    if (grid.run_count() == 0) {
        throw config_error("sweep grid is empty (every axis needs at least one value)");
    }
    std::vector<train_config> runs;
    runs.reserve(grid.run_count());
    for (const auto layout : grid.layouts) {
        for (const auto depth : grid.depths) {
            for (const auto opt : grid.optimizers) {
                for (const auto seed : grid.seeds) {
                    for (const auto &init : grid.inits) {
                        for (const auto bs : grid.batch_sizes) {
                            train_config c = grid.base;
                            c.layout = layout;
                            c.depth = depth;
                            c.optimizer.kind = opt;
                            c.seed = seed;
                            c.init = init;
                            c.batch_size = bs;
                            c.validate();
                            runs.push_back(c);
                        }
                    }
                }
            }
        }
    }
    return runs;
}

struct sweep_failure {
    train_config config;
    std::string message;
};

struct sweep_report {
    std::size_t completed = 0;
    std::size_t skipped = 0;
    std::vector<sweep_failure> failures;
};

/**
 * Runs every configuration of @p grid whose hash is not in @p done. Finished
 * records are handed to @p sink one at a time and in run-list order, under a
 * single lock. A run that throws is recorded as a failure and the sweep
 * continues.
 */
template <class Sink>
sweep_report sweep(const sweep_grid &grid, const data_split &data,
                   const std::unordered_set<std::string> &done, Sink &&sink, std::size_t jobs = 1) {
    const auto all = expand(grid);
    std::vector<train_config> pending;
    sweep_report report;
    for (const auto &c : all) {
        if (done.contains(config_hash(c))) {
            ++report.skipped;
        } else {
            pending.push_back(c);
        }
    }

    std::vector<std::optional<train_record>> results(pending.size());
    std::vector<std::optional<std::string>> errors(pending.size());
    std::vector<bool> finished(pending.size(), false);
    std::size_t flushed = 0;
    std::mutex lock;
    std::atomic<std::size_t> next{0};

    auto flush_ready = [&] { // caller holds lock
        while (flushed < pending.size() && finished[flushed]) {
            if (results[flushed]) {
                sink(*results[flushed]);
                ++report.completed;
                results[flushed].reset();
            } else {
                report.failures.push_back({pending[flushed], errors[flushed].value_or("")});
            }
            ++flushed;
        }
    };

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= pending.size()) {
                return;
            }
            std::optional<train_record> rec;
            std::optional<std::string> err;
            try {
                rec = train(circuit_for(pending[i]), pending[i], data);
            } catch (const std::exception &e) {
                err = e.what();
            }
            const std::scoped_lock guard(lock);
            results[i] = std::move(rec);
            errors[i] = std::move(err);
            finished[i] = true;
            flush_ready();
        }
    };

    const std::size_t n_workers = std::max<std::size_t>(1, std::min(jobs, pending.size()));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_workers);
        for (std::size_t w = 0; w < n_workers; ++w) {
            pool.emplace_back(worker);
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Statistics

struct histogram_spec {
    double lo = 0.007;
    double hi = 0.16;
    std::size_t bins = 50;

    [[nodiscard]] double width() const noexcept {
        return (hi - lo) / static_cast<double>(bins);
    }
    /// Bin of @p v; values outside [lo, hi] clamp to the first / last bin.
    [[nodiscard]] std::size_t bin_of(double v) const noexcept {
        if (!(v >= lo)) {
            return 0;
        }
        const auto b = static_cast<std::size_t>((v - lo) / width());
        return std::min(b, bins - 1);
    }
    [[nodiscard]] double midpoint(std::size_t bin) const noexcept {
        return lo + (static_cast<double>(bin) + 0.5) * width();
    }
};

struct mse_histogram {
    histogram_spec spec;
    std::vector<std::size_t> counts;
    std::size_t below = 0; // clamped into bin 0
    std::size_t above = 0; // clamped into the last bin

    [[nodiscard]] std::optional<std::size_t> lowest_occupied() const {
        for (std::size_t b = 0; b < counts.size(); ++b) {
            if (counts[b] > 0) {
                return b;
            }
        }
        return std::nullopt;
    }
};

inline mse_histogram make_histogram(std::span<const double> values,
                                    const histogram_spec &spec = {}) {
    if (spec.bins == 0 || !(spec.hi > spec.lo)) {
        throw config_error("histogram needs bins > 0 and hi > lo");
    }
    mse_histogram h{spec, std::vector<std::size_t>(spec.bins, 0), 0, 0};
    for (const double v : values) {
        if (v < spec.lo) {
            ++h.below;
        } else if (v > spec.hi) {
            ++h.above;
        }
        ++h.counts[spec.bin_of(v)];
    }
    return h;
}

inline double median(std::vector<double> values) {
    if (values.empty()) {
        throw domain_error("median of an empty set");
    }
    const auto mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                     values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) {
        return upper;
    }
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

struct group_key {
    entangler_layout layout = entangler_layout::cycle;
    std::size_t depth = 1;
    optimizer_kind optimizer = optimizer_kind::adam;

    friend auto operator<=>(const group_key &, const group_key &) = default;
};

struct group_summary {
    group_key key;
    std::size_t n = 0;
    double median_best_test_mse = 0.0;
    std::size_t lowest_bin = 0;
    double lowest_bin_midpoint = 0.0;
    std::size_t lowest_bin_occupancy = 0;
    double mean_steps_to_best = 0.0;
    std::size_t below_range = 0;
    std::size_t above_range = 0;
};

/// Per (layout, depth, optimizer) statistics of best test MSE, sorted by key.
inline std::vector<group_summary> summarize(std::span<const train_record> records,
                                            const histogram_spec &hist = {}) {
    if (records.empty()) {
        throw domain_error("no records to summarize");
    }
    std::map<group_key, std::vector<const train_record *>> groups;
    for (const auto &r : records) {
        groups[{r.config.layout, r.config.depth, r.config.optimizer.kind}].push_back(&r);
    }
    std::vector<group_summary> out;
    for (const auto &[key, members] : groups) {
        std::vector<double> best;
        double steps = 0.0;
        for (const auto *r : members) {
            best.push_back(r->best_test_mse);
            steps += static_cast<double>(r->best_step);
        }
        const auto h = make_histogram(best, hist);
        const auto low = h.lowest_occupied().value_or(0);
        group_summary s;
        s.key = key;
        s.n = members.size();
        s.median_best_test_mse = median(best);
        s.lowest_bin = low;
        s.lowest_bin_midpoint = hist.midpoint(low);
        s.lowest_bin_occupancy = h.counts[low];
        s.mean_steps_to_best = steps / static_cast<double>(members.size());
        s.below_range = h.below;
        s.above_range = h.above;
        out.push_back(s);
    }
    return out;
}

} // namespace qcl
