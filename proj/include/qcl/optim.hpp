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
 * Gradient step rules: SGD, Adam and the quantum natural gradient (QNG).
 *
 * The QNG preconditions the loss gradient with the Fubini-Study metric of the
 * parameterized state,
 *     g_ij = Re<d_i psi|d_j psi> - Re(<d_i psi|psi><psi|d_j psi>),
 * and takes theta' = theta - lr (G + lambda I)^{-1} grad L.
 *
 * Two metrics are provided:
 *  - fubini_metric_exact: the full P x P metric for one input, using
 *    |d_k psi> = |psi(theta + pi e_k)> / 2 (exact for Pauli rotations).
 *  - fubini_metric_blockdiag: one block per rotation layer, computed as the
 *    covariance of the layer generators on the state entering the layer and
 *    averaged over a batch of inputs. Off-block entries are zero. The
 *    diagonal variant also drops off-diagonal entries inside a block.
 */

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qcl/ansatz.hpp"
#include "qcl/errors.hpp"
#include "qcl/simulator.hpp"

namespace qcl {

using metric_matrix = Eigen::MatrixXd;

enum class optimizer_kind { sgd, adam, qng };

inline std::string to_string(optimizer_kind kind) {
    switch (kind) {
    case optimizer_kind::sgd:
        return "sgd";
    case optimizer_kind::adam:
        return "adam";
    case optimizer_kind::qng:
        return "qng";
    }
    return "?";
}

inline optimizer_kind parse_optimizer(std::string_view name) {
    if (name == "sgd" || name == "SGD") {
        return optimizer_kind::sgd;
    }
    if (name == "adam" || name == "Adam") {
        return optimizer_kind::adam;
    }
    if (name == "qng" || name == "QNG") {
        return optimizer_kind::qng;
    }
    throw config_error("unknown optimizer '" + std::string(name) + "' (expected sgd, adam, qng)");
}

enum class metric_approximation { block_diagonal, diagonal };

inline std::string to_string(metric_approximation m) {
    return m == metric_approximation::block_diagonal ? "block_diagonal" : "diagonal";
}

inline metric_approximation parse_metric_approximation(std::string_view name) {
    if (name == "block_diagonal" || name == "block-diag") {
        return metric_approximation::block_diagonal;
    }
    if (name == "diagonal" || name == "diag") {
        return metric_approximation::diagonal;
    }
    throw config_error("unknown metric approximation '" + std::string(name) + "'");
}

struct optimizer_settings {
    optimizer_kind kind = optimizer_kind::adam;
    double learning_rate = 0.05;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;
    double qng_regularizer = 1e-6;
    metric_approximation metric = metric_approximation::block_diagonal;

    void validate() const {
        if (!(learning_rate > 0.0)) {
            throw config_error("learning rate must be > 0");
        }
        if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
            throw config_error("Adam betas must lie in [0, 1)");
        }
        if (!(adam_epsilon > 0.0)) {
            throw config_error("Adam epsilon must be > 0");
        }
        if (!(qng_regularizer >= 0.0)) {
            throw config_error("QNG regularizer must be >= 0");
        }
    }
};

struct optimizer_state {
    optimizer_settings settings;
    std::size_t step_count = 0;
    param_vector adam_m;
    param_vector adam_v;

    static optimizer_state make(const optimizer_settings &settings, std::size_t n_params) {
        settings.validate();
        const auto n = static_cast<Eigen::Index>(n_params);
        return {settings, 0, param_vector::Zero(n), param_vector::Zero(n)};
    }
};

namespace detail {
inline void check_same_shape(const param_vector &a, const param_vector &b, const char *what) {
    if (a.size() != b.size()) {
        throw shape_error(std::string(what) + ": sizes " + std::to_string(a.size()) + " and " +
                          std::to_string(b.size()) + " differ");
    }
}
} // namespace detail

inline param_vector sgd_step(const param_vector &theta, const param_vector &grad, double lr) {
    detail::check_same_shape(theta, grad, "sgd_step");
    return theta - lr * grad;
}

/// Bias-corrected Adam update. Advances @p state.step_count.
inline param_vector adam_step(optimizer_state &state, const param_vector &theta,
                              const param_vector &grad) {
    detail::check_same_shape(theta, grad, "adam_step");
    detail::check_same_shape(theta, state.adam_m, "adam_step moments");
    const auto &s = state.settings;
    state.step_count += 1;
    const auto t = static_cast<double>(state.step_count);
    state.adam_m = s.beta1 * state.adam_m + (1.0 - s.beta1) * grad;
    state.adam_v = s.beta2 * state.adam_v + (1.0 - s.beta2) * grad.cwiseAbs2();
    const double m_corr = 1.0 - std::pow(s.beta1, t);
    const double v_corr = 1.0 - std::pow(s.beta2, t);
    param_vector out(theta.size());
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        const double m_hat = state.adam_m[i] / m_corr;
        const double v_hat = state.adam_v[i] / v_corr;
        out[i] = theta[i] - s.learning_rate * m_hat / (std::sqrt(v_hat) + s.adam_epsilon);
    }
    return out;
}

/// theta - lr (G + lambda I)^{-1} grad, via an LDL^T solve.
inline param_vector qng_step(const param_vector &theta, const param_vector &grad,
                             const metric_matrix &metric, double lr, double lambda) {
    detail::check_same_shape(theta, grad, "qng_step");
    if (metric.rows() != theta.size() || metric.cols() != theta.size()) {
        throw shape_error("qng_step: metric is " + std::to_string(metric.rows()) + "x" +
                          std::to_string(metric.cols()) + ", expected " +
                          std::to_string(theta.size()) + "x" + std::to_string(theta.size()));
    }
    if (!(lambda >= 0.0)) {
        throw config_error("qng_step: regularizer must be >= 0");
    }
    metric_matrix system = metric;
    system.diagonal().array() += lambda;
    const Eigen::LDLT<metric_matrix> ldlt(system);
    // Eigen pseudo-inverts zero pivots, so the pivot spread is checked as well as rcond.
    const auto pivots = ldlt.vectorD().cwiseAbs();
    const double pivot_ratio = pivots.size() > 0 && pivots.maxCoeff() > 0.0
                                   ? pivots.minCoeff() / pivots.maxCoeff()
                                   : 0.0;
    const double rcond =
        ldlt.info() == Eigen::Success ? std::min(ldlt.rcond(), pivot_ratio) : 0.0;
    if (!(rcond > std::numeric_limits<double>::epsilon())) {
        throw numerical_error("qng_step: metric system is singular (reciprocal condition "
                              "estimate " +
                              std::to_string(rcond) + ", lambda " + std::to_string(lambda) + ")");
    }
    const param_vector direction = ldlt.solve(grad);
    return theta - lr * direction;
}

namespace detail {
inline void apply_generator(state_vector &state, const gate_op &op) {
    switch (op.kind) {
    case gate_kind::ry:
        state.apply_y(op.target);
        break;
    case gate_kind::rz:
        state.apply_z(op.target);
        break;
    case gate_kind::cnot:
        throw config_error("CNOT has no rotation generator");
    }
}
} // namespace detail

/// Full Fubini-Study metric of |psi(x, theta)>. Verification oracle.
inline metric_matrix fubini_metric_exact(const circuit_spec &spec, double x,
                                         const param_vector &theta) {
    check_params(spec, theta);
    const auto n = static_cast<Eigen::Index>(spec.param_count());
    const state_vector psi = prepare_state(spec, x, theta);
    std::vector<state_vector> derivs;
    derivs.reserve(spec.param_count());
    param_vector shifted = theta;
    for (Eigen::Index k = 0; k < n; ++k) {
        shifted[k] = theta[k] + std::numbers::pi;
        derivs.push_back(prepare_state(spec, x, shifted).scale(0.5));
        shifted[k] = theta[k];
    }
    std::vector<std::complex<double>> overlap(spec.param_count());
    for (Eigen::Index k = 0; k < n; ++k) {
        overlap[k] = derivs[k].inner(psi); // <d_k psi|psi>
    }
    metric_matrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const double value = derivs[i].inner(derivs[j]).real() -
                                 (overlap[i] * std::conj(overlap[j])).real();
            g(i, j) = value;
            g(j, i) = value;
        }
    }
    return g;
}

/// Layer-block (or diagonal) Fubini-Study metric averaged over @p xs.
inline metric_matrix
fubini_metric_blockdiag(const circuit_spec &spec, std::span<const double> xs,
                        const param_vector &theta,
                        metric_approximation approx = metric_approximation::block_diagonal) {
    check_params(spec, theta);
    if (xs.empty()) {
        throw domain_error("metric over an empty batch");
    }
    const auto n = static_cast<Eigen::Index>(spec.param_count());
    metric_matrix g = metric_matrix::Zero(n, n);
    for (const double x : xs) {
        state_vector state = encode(x, spec.n_qubits(), spec.encoding());
        std::size_t cursor = 0;
        for (const auto &layer : spec.layers()) {
            apply_schedule(state, spec, theta, cursor, layer.first_gate);
            // Generators of one layer commute with the layer itself, so their
            // covariance on the entering state equals the exact metric block.
            std::vector<state_vector> moved;
            std::vector<double> mean;
            moved.reserve(layer.slots.size());
            for (const auto slot : layer.slots) {
                state_vector k_state = state;
                detail::apply_generator(k_state, spec.gate_for_slot(slot));
                mean.push_back(state.inner(k_state).real());
                moved.push_back(std::move(k_state));
            }
            for (std::size_t a = 0; a < layer.slots.size(); ++a) {
                for (std::size_t b = a; b < layer.slots.size(); ++b) {
                    if (approx == metric_approximation::diagonal && a != b) {
                        continue;
                    }
                    const double cov = moved[a].inner(moved[b]).real() - mean[a] * mean[b];
                    const auto i = static_cast<Eigen::Index>(layer.slots[a]);
                    const auto j = static_cast<Eigen::Index>(layer.slots[b]);
                    g(i, j) += 0.25 * cov;
                    if (i != j) {
                        g(j, i) += 0.25 * cov;
                    }
                }
            }
            cursor = layer.first_gate;
        }
    }
    g /= static_cast<double>(xs.size());
    return g;
}

} // namespace qcl
