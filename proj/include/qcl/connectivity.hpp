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
 * Connectivity of minima.
 *
 * Aggregate minima set (AMS): the final parameters of runs whose best test
 * MSE falls in the lowest occupied histogram bin are clustered with flat-kernel
 * mean shift; a cluster center survives only if its own test MSE lands in
 * that same bin.
 *
 * Nudged elastic band (NEB): a band of pivots between two fixed minima. Each
 * interior pivot i moves by lr * F_i with
 *
 *     F_i = k (|p_{i+1} - p_i| - |p_i - p_{i-1}|) tau_i  -  (g_i - (g_i . tau_i) tau_i)
 *
 * where g_i is a mini-batch estimate of the loss gradient at p_i and tau_i is
 * the upwind unit tangent: the segment towards the higher-loss neighbour,
 * blended by the loss differences at local extrema along the band. The band
 * with the smallest trapezoidal area under its full-train loss curve is kept.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qcl/ansatz.hpp"
#include "qcl/errors.hpp"
#include "qcl/gradloss.hpp"
#include "qcl/harness.hpp"

namespace qcl {

// ---------------------------------------------------------------------------
// Mean shift

struct mean_shift_result {
    std::vector<param_vector> centers;
    std::vector<std::size_t> assignments; // per input point
    std::vector<std::size_t> cluster_sizes;
};

/// Linear-interpolated quantile of all pairwise distances. Falls back to 1 when
/// the points do not spread (fewer than two, or all identical).
inline double estimate_bandwidth(std::span<const param_vector> points, double quantile = 0.3) {
    if (!(quantile >= 0.0 && quantile <= 1.0)) {
        throw config_error("bandwidth quantile must lie in [0, 1]");
    }
    std::vector<double> dists;
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            dists.push_back((points[i] - points[j]).norm());
        }
    }
    if (dists.empty()) {
        return 1.0;
    }
    std::sort(dists.begin(), dists.end());
    const double pos = quantile * static_cast<double>(dists.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, dists.size() - 1);
    const double value = dists[lo] + (pos - static_cast<double>(lo)) * (dists[hi] - dists[lo]);
    return value > 0.0 ? value : 1.0;
}

/**
 * Flat-kernel mean shift seeded at every point. A seed climbs to the mean of
 * the points within @p bandwidth until it moves less than @p tolerance. Modes
 * are ranked by how many points their window holds; a mode within
 * @p bandwidth of a higher-ranked one is merged into it.
 */
inline mean_shift_result mean_shift(std::span<const param_vector> points, double bandwidth,
                                    double tolerance = 1e-4, std::size_t max_iterations = 300) {
    if (!(bandwidth > 0.0)) {
        throw config_error("mean shift bandwidth must be > 0");
    }
    if (points.empty()) {
        throw domain_error("mean shift over an empty point set");
    }
    const auto dim = points.front().size();
    for (const auto &p : points) {
        if (p.size() != dim) {
            throw shape_error("mean shift points differ in dimension");
        }
    }

    struct mode {
        param_vector center;
        std::size_t support;
    };
    std::vector<mode> modes;
    modes.reserve(points.size());
    for (const auto &seed : points) {
        param_vector center = seed;
        std::size_t support = 0;
        for (std::size_t it = 0; it < max_iterations; ++it) {
            param_vector sum = param_vector::Zero(dim);
            std::size_t count = 0;
            for (const auto &p : points) {
                if ((p - center).norm() <= bandwidth) {
                    sum += p;
                    ++count;
                }
            }
            if (count == 0) {
                break;
            }
            support = count;
            const param_vector next = sum / static_cast<double>(count);
            const double moved = (next - center).norm();
            center = next;
            if (moved < tolerance) {
                break;
            }
        }
        modes.push_back({std::move(center), support});
    }
    std::stable_sort(modes.begin(), modes.end(),
                     [](const mode &a, const mode &b) { return a.support > b.support; });

    mean_shift_result out;
    for (const auto &m : modes) {
        const bool near_kept = std::any_of(
            out.centers.begin(), out.centers.end(),
            [&](const param_vector &c) { return (c - m.center).norm() <= bandwidth; });
        if (!near_kept) {
            out.centers.push_back(m.center);
        }
    }
    out.cluster_sizes.assign(out.centers.size(), 0);
    out.assignments.reserve(points.size());
    for (const auto &p : points) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < out.centers.size(); ++c) {
            const double d = (p - out.centers[c]).norm();
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        out.assignments.push_back(best);
        ++out.cluster_sizes[best];
    }
    return out;
}

/// Maps every component into [0, 2 pi).
inline param_vector wrap_angles(const param_vector &theta) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    param_vector out(theta.size());
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        double v = std::fmod(theta[i], two_pi);
        if (v < 0.0) {
            v += two_pi;
        }
        out[i] = v >= two_pi ? 0.0 : v;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Aggregate minima set

struct ams_options {
    histogram_spec hist;
    std::optional<double> bandwidth; // default: estimate_bandwidth(quantile)
    double bandwidth_quantile = 0.3;
    bool wrap = false;
};

struct ams_member {
    param_vector center;
    double test_mse = 0.0;
    std::size_t cluster_size = 0;
};

struct ams_result {
    std::vector<ams_member> members;
    std::size_t n_selected = 0; // runs in the selection bin
    std::size_t n_clusters = 0; // mean-shift centers before filtering
    std::optional<std::size_t> selection_bin;
    double bandwidth = 0.0;
};

/**
 * Builds the AMS from training records. @p test_mse evaluates the test-set MSE
 * of a parameter vector. Returns an empty set when nothing was selected.
 */
template <class TestLoss>
    requires std::invocable<TestLoss &, const param_vector &>
ams_result build_ams(std::span<const train_record> records, TestLoss &&test_mse,
                     const ams_options &options = {}) {
    if (records.empty()) {
        throw domain_error("AMS needs at least one training record");
    }
    std::vector<double> best;
    best.reserve(records.size());
    for (const auto &r : records) {
        best.push_back(r.best_test_mse);
    }
    const auto hist = make_histogram(best, options.hist);
    ams_result out;
    out.selection_bin = hist.lowest_occupied();
    if (!out.selection_bin) {
        return out;
    }
    const std::size_t bin = *out.selection_bin;

    std::vector<param_vector> selected;
    for (const auto &r : records) {
        if (options.hist.bin_of(r.best_test_mse) == bin) {
            selected.push_back(options.wrap ? wrap_angles(r.theta_final) : r.theta_final);
        }
    }
    out.n_selected = selected.size();
    out.bandwidth =
        options.bandwidth.value_or(estimate_bandwidth(selected, options.bandwidth_quantile));
    const auto clusters = mean_shift(selected, out.bandwidth);
    out.n_clusters = clusters.centers.size();
    for (std::size_t c = 0; c < clusters.centers.size(); ++c) {
        const double mse = test_mse(clusters.centers[c]);
        if (options.hist.bin_of(mse) == bin) {
            out.members.push_back({clusters.centers[c], mse, clusters.cluster_sizes[c]});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Nudged elastic band

struct neb_profile {
    std::string name = "custom";
    std::size_t pivots = 10;
    std::size_t steps = 10;
    double learning_rate = 0.05;
    double spring = 1.0;

    /// Short search hugging the straight segment.
    static neb_profile localized() { return {"localized", 10, 10, 0.05, 1.0}; }
    /// Long search between separated minima (10 free pivots).
    static neb_profile long_search() { return {"long", 12, 100, 0.05, 1.0}; }
    static neb_profile medium() { return {"medium", 9, 50, 0.05, 1.0}; }

    static neb_profile named(const std::string &name) {
        if (name == "localized") {
            return localized();
        }
        if (name == "long") {
            return long_search();
        }
        if (name == "medium") {
            return medium();
        }
        throw config_error("unknown NEB profile '" + name + "' (localized, long, medium)");
    }
};

/// Pivots of a band. pivots.front() and pivots.back() never move.
struct neb_path {
    std::vector<param_vector> pivots;
    double spring = 1.0;

    [[nodiscard]] std::size_t size() const noexcept { return pivots.size(); }
};

inline neb_path neb_init(const param_vector &theta_a, const param_vector &theta_b,
                         std::size_t n_pivots, double spring = 1.0) {
    if (n_pivots < 3) {
        throw config_error("a band needs at least 3 pivots, got " + std::to_string(n_pivots));
    }
    if (theta_a.size() != theta_b.size()) {
        throw shape_error("band endpoints differ in length");
    }
    neb_path path;
    path.spring = spring;
    path.pivots.reserve(n_pivots);
    path.pivots.push_back(theta_a);
    for (std::size_t i = 1; i + 1 < n_pivots; ++i) {
        const double alpha = static_cast<double>(i) / static_cast<double>(n_pivots - 1);
        path.pivots.push_back((1.0 - alpha) * theta_a + alpha * theta_b);
    }
    path.pivots.push_back(theta_b);
    return path;
}

/// Upwind unit tangent at interior pivot @p i given per-pivot losses.
inline param_vector neb_tangent(const neb_path &path, std::size_t i,
                                std::span<const double> losses) {
    if (i == 0 || i + 1 >= path.size()) {
        throw index_error("tangent requested at non-interior pivot " + std::to_string(i));
    }
    if (losses.size() != path.size()) {
        throw shape_error("tangent: one loss per pivot required");
    }
    const param_vector forward = path.pivots[i + 1] - path.pivots[i];
    const param_vector backward = path.pivots[i] - path.pivots[i - 1];
    const double prev = losses[i - 1];
    const double here = losses[i];
    const double next = losses[i + 1];

    param_vector tau;
    if (next > here && here > prev) {
        tau = forward;
    } else if (next < here && here < prev) {
        tau = backward;
    } else {
        const double d_next = std::abs(next - here);
        const double d_prev = std::abs(prev - here);
        const double d_max = std::max(d_next, d_prev);
        const double d_min = std::min(d_next, d_prev);
        tau = next > prev ? (forward * d_max + backward * d_min).eval()
                          : (forward * d_min + backward * d_max).eval();
        if (!(tau.norm() > 0.0)) {
            tau = forward + backward; // flat neighbourhood
        }
    }
    const double norm = tau.norm();
    if (norm > 0.0) {
        tau /= norm;
    }
    return tau;
}

/**
 * Interface of a landscape NEB can run on.
 *   loss(theta)                            full-data loss used for reporting
 *   stochastic_loss_gradient(theta, rng)   mini-batch estimate used for updates
 */
template <class O>
concept neb_objective = requires(const O &o, const param_vector &theta, std::mt19937_64 &rng) {
    { o.loss(theta) } -> std::convertible_to<double>;
    { o.stochastic_loss_gradient(theta, rng) } -> std::same_as<loss_and_gradient>;
};

/// One synchronous band update. The endpoints are left bit-identical.
template <neb_objective Objective>
void neb_step(neb_path &path, const Objective &objective, double lr, std::mt19937_64 &rng) {
    const std::size_t t = path.size();
    if (t < 3) {
        throw config_error("a band needs at least 3 pivots");
    }
    std::vector<double> losses(t);
    std::vector<param_vector> grads(t);
    for (std::size_t i = 0; i < t; ++i) {
        auto est = objective.stochastic_loss_gradient(path.pivots[i], rng);
        losses[i] = est.loss;
        grads[i] = std::move(est.gradient);
    }
    std::vector<param_vector> moved(path.pivots.begin() + 1, path.pivots.end() - 1);
    for (std::size_t i = 1; i + 1 < t; ++i) {
        const param_vector tau = neb_tangent(path, i, losses);
        const double stretch = (path.pivots[i + 1] - path.pivots[i]).norm() -
                               (path.pivots[i] - path.pivots[i - 1]).norm();
        const param_vector perp = grads[i] - grads[i].dot(tau) * tau;
        const param_vector force = path.spring * stretch * tau - perp;
        moved[i - 1] = path.pivots[i] + lr * force;
    }
    std::move(moved.begin(), moved.end(), path.pivots.begin() + 1);
}

struct path_metrics {
    double max_loss = 0.0;
    double auc = 0.0;
    double endpoint_ratio = 0.0;
    double loss_a = 0.0;
    double loss_b = 0.0;
};

/// Max, trapezoidal area over unit-spaced pivots, and the larger max/endpoint ratio.
inline path_metrics make_path_metrics(std::span<const double> losses, double loss_a,
                                      double loss_b) {
    if (losses.empty()) {
        throw shape_error("path metrics need at least one loss value");
    }
    path_metrics m;
    m.loss_a = loss_a;
    m.loss_b = loss_b;
    m.max_loss = *std::max_element(losses.begin(), losses.end());
    for (std::size_t i = 1; i < losses.size(); ++i) {
        m.auc += 0.5 * (losses[i - 1] + losses[i]);
    }
    m.endpoint_ratio = std::max(m.max_loss / loss_a, m.max_loss / loss_b);
    return m;
}

inline path_metrics make_path_metrics(std::span<const double> losses) {
    if (losses.empty()) {
        throw shape_error("path metrics need at least one loss value");
    }
    return make_path_metrics(losses, losses.front(), losses.back());
}

/// Connected when the band never rises more than @p epsilon above the higher endpoint.
inline bool classify_connected(const path_metrics &metrics, double epsilon) {
    return metrics.max_loss - std::max(metrics.loss_a, metrics.loss_b) <= epsilon;
}

struct neb_result {
    neb_profile profile;
    neb_path initial;
    neb_path best;
    std::size_t best_step = 0;
    /// Full-train loss per pivot after every step; entry 0 is the initial band.
    std::vector<std::vector<double>> train_history;
    std::vector<std::vector<double>> test_history; // empty without test data
    path_metrics initial_metrics;
    path_metrics best_metrics;
    std::optional<path_metrics> initial_test_metrics;
    std::optional<path_metrics> best_test_metrics;
};

namespace detail {
template <class O>
concept has_test_loss = requires(const O &o, const param_vector &theta) {
    { o.test_loss(theta) } -> std::convertible_to<std::optional<double>>;
};

template <class O>
std::vector<double> band_losses(const O &objective, const neb_path &path) {
    std::vector<double> out;
    out.reserve(path.size());
    for (const auto &p : path.pivots) {
        out.push_back(objective.loss(p));
    }
    return out;
}

template <class O>
std::optional<std::vector<double>> band_test_losses(const O &objective, const neb_path &path) {
    if constexpr (has_test_loss<O>) {
        std::vector<double> out;
        for (const auto &p : path.pivots) {
            const std::optional<double> v = objective.test_loss(p);
            if (!v) {
                return std::nullopt;
            }
            out.push_back(*v);
        }
        return out;
    } else {
        return std::nullopt;
    }
}
} // namespace detail

/// Runs a band search and keeps the band with the smallest area under its loss curve.
template <neb_objective Objective>
neb_result neb_run(const Objective &objective, const param_vector &theta_a,
                   const param_vector &theta_b, const neb_profile &profile, std::uint64_t seed) {
    if (!(profile.learning_rate > 0.0)) {
        throw config_error("NEB learning rate must be > 0");
    }
    neb_result out;
    out.profile = profile;
    neb_path path = neb_init(theta_a, theta_b, profile.pivots, profile.spring);
    std::mt19937_64 rng(seed);

    out.initial = path;
    out.best = path;
    out.train_history.push_back(detail::band_losses(objective, path));
    if (auto test = detail::band_test_losses(objective, path)) {
        out.test_history.push_back(std::move(*test));
    }
    double best_auc = make_path_metrics(out.train_history.front()).auc;

    // Coincident endpoints: every pivot is a minimum already, nothing to search.
    const bool degenerate = theta_a == theta_b;
    for (std::size_t step = 1; step <= profile.steps && !degenerate; ++step) {
        neb_step(path, objective, profile.learning_rate, rng);
        out.train_history.push_back(detail::band_losses(objective, path));
        if (!out.test_history.empty()) {
            out.test_history.push_back(detail::band_test_losses(objective, path).value());
        }
        const double auc = make_path_metrics(out.train_history.back()).auc;
        if (auc < best_auc) {
            best_auc = auc;
            out.best = path;
            out.best_step = step;
        }
    }
    out.initial_metrics = make_path_metrics(out.train_history.front());
    out.best_metrics = make_path_metrics(out.train_history[out.best_step]);
    if (!out.test_history.empty()) {
        out.initial_test_metrics = make_path_metrics(out.test_history.front());
        out.best_test_metrics = make_path_metrics(out.test_history[out.best_step]);
    }
    return out;
}

/// The regression loss as an NEB landscape: per-pivot mini-batches drawn from the train set.
class qcl_objective {
  public:
    qcl_objective(const circuit_spec &spec, batch_view train,
                  std::optional<batch_view> test = std::nullopt, std::size_t batch_size = 32)
        : spec_(&spec), train_(train), test_(test), batch_size_(batch_size) {
        if (train.empty()) {
            throw domain_error("NEB objective needs training data");
        }
        if (batch_size == 0) {
            throw config_error("NEB batch size must be >= 1");
        }
    }

    [[nodiscard]] const circuit_spec &spec() const noexcept { return *spec_; }

    [[nodiscard]] double loss(const param_vector &theta) const {
        return mse_loss(*spec_, theta, train_);
    }

    [[nodiscard]] std::optional<double> test_loss(const param_vector &theta) const {
        if (!test_) {
            return std::nullopt;
        }
        return mse_loss(*spec_, theta, *test_);
    }

    [[nodiscard]] loss_and_gradient stochastic_loss_gradient(const param_vector &theta,
                                                             std::mt19937_64 &rng) const {
        const std::size_t n = train_.size();
        const std::size_t m = std::min(batch_size_, n);
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) {
            idx[i] = i;
        }
        for (std::size_t i = 0; i < m; ++i) { // partial Fisher-Yates
            std::uniform_int_distribution<std::size_t> pick(i, n - 1);
            std::swap(idx[i], idx[pick(rng)]);
        }
        const batch mini = gather(train_, std::span<const std::size_t>(idx.data(), m));
        return evaluate_loss_gradient(*spec_, theta, mini);
    }

  private:
    const circuit_spec *spec_;
    batch_view train_;
    std::optional<batch_view> test_;
    std::size_t batch_size_;
};

/// Independent RNG seed for the band between AMS members @p i and @p j.
inline std::uint64_t pair_seed(std::uint64_t seed, std::size_t i, std::size_t j) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

struct pair_connectivity {
    std::size_t i = 0;
    std::size_t j = 0;
    path_metrics straight; // initial band
    path_metrics best;
    bool connected = false;
};

/// Localized band search over every pair of @p minima.
template <neb_objective Objective>
std::vector<pair_connectivity> scan_pairs(const Objective &objective,
                                          std::span<const param_vector> minima,
                                          const neb_profile &profile, double epsilon,
                                          std::uint64_t seed) {
    std::vector<pair_connectivity> out;
    for (std::size_t i = 0; i < minima.size(); ++i) {
        for (std::size_t j = i + 1; j < minima.size(); ++j) {
            const auto run = neb_run(objective, minima[i], minima[j], profile, pair_seed(seed, i, j));
            out.push_back({i, j, run.initial_metrics, run.best_metrics,
                           classify_connected(run.best_metrics, epsilon)});
        }
    }
    return out;
}

} // namespace qcl
