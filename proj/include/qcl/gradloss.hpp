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
 * Mean-squared-error loss over a batch and its gradient.
 *
 *     L      = (1/n) sum_i (y_i - y_hat_i)^2
 *     grad L = -(2/n) sum_i (y_i - y_hat_i) grad y_hat_i
 *
 * grad y_hat is evaluated with the two-term parameter-shift rule
 *     d y_hat / d theta_k = [y_hat(theta + pi/2 e_k) - y_hat(theta - pi/2 e_k)] / 2,
 * which is exact for rotations generated by Paulis / 2.
 */

#pragma once

#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qcl/ansatz.hpp"
#include "qcl/errors.hpp"

namespace qcl {

/// Non-owning (features, labels) pair.
struct batch_view {
    std::span<const double> xs;
    std::span<const double> ys;

    [[nodiscard]] std::size_t size() const noexcept { return xs.size(); }
    [[nodiscard]] bool empty() const noexcept { return xs.empty(); }
};

/// Owning batch. Features and labels always have the same length.
class batch {
  public:
    batch() = default;
    batch(std::vector<double> xs, std::vector<double> ys) : xs_(std::move(xs)), ys_(std::move(ys)) {
        if (xs_.size() != ys_.size()) {
            throw shape_error("batch has " + std::to_string(xs_.size()) + " features but " +
                              std::to_string(ys_.size()) + " labels");
        }
    }

    void push_back(double x, double y) {
        xs_.push_back(x);
        ys_.push_back(y);
    }
    void reserve(std::size_t n) {
        xs_.reserve(n);
        ys_.reserve(n);
    }
    void clear() noexcept {
        xs_.clear();
        ys_.clear();
    }

    [[nodiscard]] const std::vector<double> &xs() const noexcept { return xs_; }
    [[nodiscard]] const std::vector<double> &ys() const noexcept { return ys_; }
    [[nodiscard]] std::size_t size() const noexcept { return xs_.size(); }
    [[nodiscard]] bool empty() const noexcept { return xs_.empty(); }
    [[nodiscard]] batch_view view() const noexcept { return {xs_, ys_}; }
    operator batch_view() const noexcept { return view(); } // NOLINT(google-explicit-constructor)

  private:
    std::vector<double> xs_;
    std::vector<double> ys_;
};

struct loss_and_gradient {
    double loss = 0.0;
    param_vector gradient;
};

namespace detail {
inline void check_batch(batch_view data) {
    if (data.xs.size() != data.ys.size()) {
        throw shape_error("batch features and labels differ in length");
    }
    if (data.empty()) {
        throw domain_error("loss over an empty batch");
    }
}
} // namespace detail

inline double mse_loss(const circuit_spec &spec, const param_vector &theta, batch_view data) {
    detail::check_batch(data);
    check_params(spec, theta);
    double sum = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double r = data.ys[i] - forward(spec, data.xs[i], theta);
        sum += r * r;
    }
    return sum / static_cast<double>(data.size());
}

/// grad_theta y_hat(x, theta) by the parameter-shift rule (2P circuit evaluations).
inline param_vector predict_gradient(const circuit_spec &spec, const param_vector &theta,
                                     double x) {
    check_params(spec, theta);
    check_feature(x);
    constexpr double shift = std::numbers::pi / 2;
    param_vector grad(theta.size());
    param_vector shifted = theta;
    for (Eigen::Index k = 0; k < theta.size(); ++k) {
        shifted[k] = theta[k] + shift;
        const double plus = forward(spec, x, shifted);
        shifted[k] = theta[k] - shift;
        const double minus = forward(spec, x, shifted);
        shifted[k] = theta[k];
        grad[k] = 0.5 * (plus - minus);
    }
    return grad;
}

/// Loss and gradient in one pass; samples are reduced left to right.
inline loss_and_gradient evaluate_loss_gradient(const circuit_spec &spec,
                                                const param_vector &theta, batch_view data) {
    detail::check_batch(data);
    check_params(spec, theta);
    loss_and_gradient out{0.0, param_vector::Zero(theta.size())};
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double r = data.ys[i] - forward(spec, data.xs[i], theta);
        out.loss += r * r;
        out.gradient += r * predict_gradient(spec, theta, data.xs[i]);
    }
    const auto n = static_cast<double>(data.size());
    out.loss /= n;
    out.gradient *= -2.0 / n;
    return out;
}

inline param_vector loss_gradient(const circuit_spec &spec, const param_vector &theta,
                                  batch_view data) {
    return evaluate_loss_gradient(spec, theta, data).gradient;
}

} // namespace qcl
