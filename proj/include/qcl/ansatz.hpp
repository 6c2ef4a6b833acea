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
 * The regression circuit: a fixed feature-encoding block followed by a
 * trainable schedule of RY rotations and CNOT entanglers. The prediction is
 * the Pauli-Z expectation of the measured qubit.
 *
 * Encoding, applied to every qubit of |0...0>, in one of two gate orders:
 *     rz_first (default):  RZ(acos x^2) then RY(asin x)
 *     ry_first:            RY(asin x) then RZ(acos x^2)
 * On |0> the leading RZ of rz_first is a global phase, so that order encodes
 * the Bloch vector (x, 0, sqrt(1 - x^2)); ry_first encodes
 * (x^3, x sqrt(1 - x^4), sqrt(1 - x^2)).
 *
 * Trainable schedule for depth D on n qubits:
 *     D x [ RY on qubits 0..n-1 ; entangler ]  then  RY on the measured qubit
 * giving n*D + 1 parameters. Entanglers:
 *     chain: CNOT(0->1), CNOT(1->2), ..., CNOT(n-2 -> n-1)
 *     cycle: chain plus CNOT(n-1 -> 0)
 */

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qcl/errors.hpp"
#include "qcl/simulator.hpp"

namespace qcl {

using param_vector = Eigen::VectorXd;

enum class gate_kind { ry, rz, cnot };

struct gate_op {
    gate_kind kind = gate_kind::ry;
    std::size_t target = 0;
    std::optional<std::size_t> control;    // CNOT only
    std::optional<std::size_t> param_slot; // trainable rotations only
    double fixed_angle = 0.0;              // rotations without a slot

    static gate_op trainable_ry(std::size_t qubit, std::size_t slot) {
        return {gate_kind::ry, qubit, std::nullopt, slot, 0.0};
    }
    static gate_op cnot(std::size_t control, std::size_t target) {
        return {gate_kind::cnot, target, control, std::nullopt, 0.0};
    }

    [[nodiscard]] bool trainable() const noexcept { return param_slot.has_value(); }
};

enum class entangler_layout { chain, cycle };

inline std::string to_string(entangler_layout layout) {
    return layout == entangler_layout::chain ? "chain" : "cycle";
}

inline entangler_layout parse_layout(std::string_view name) {
    if (name == "chain") {
        return entangler_layout::chain;
    }
    if (name == "cycle") {
        return entangler_layout::cycle;
    }
    throw config_error("unknown entangler layout '" + std::string(name) +
                       "' (expected chain or cycle)");
}

enum class encoding_order { rz_first, ry_first };

inline std::string to_string(encoding_order order) {
    return order == encoding_order::rz_first ? "rz_first" : "ry_first";
}

inline encoding_order parse_encoding_order(std::string_view name) {
    if (name == "rz_first") {
        return encoding_order::rz_first;
    }
    if (name == "ry_first") {
        return encoding_order::ry_first;
    }
    throw config_error("unknown encoding order '" + std::string(name) +
                       "' (expected rz_first or ry_first)");
}

/// A maximal run of trainable rotations on distinct qubits.
struct rotation_layer {
    std::size_t first_gate = 0; // schedule index of the first rotation
    std::size_t last_gate = 0;  // one past the last rotation
    std::vector<std::size_t> slots;
};

/// Immutable circuit description. Safe to share between threads.
class circuit_spec {
  public:
    circuit_spec(std::size_t n_qubits, std::vector<gate_op> schedule, std::size_t measured_qubit,
                 std::size_t depth = 0, std::optional<entangler_layout> layout = std::nullopt,
                 encoding_order encoding = encoding_order::rz_first)
        : n_qubits_(n_qubits), depth_(depth), layout_(layout), encoding_(encoding),
          measured_qubit_(measured_qubit), schedule_(std::move(schedule)) {
        if (n_qubits_ < 1 || n_qubits_ > state_vector::max_qubits) {
            throw config_error("circuit qubit count out of range: " + std::to_string(n_qubits_));
        }
        if (measured_qubit_ >= n_qubits_) {
            throw index_error("measured qubit " + std::to_string(measured_qubit_) +
                              " out of range");
        }
        validate_and_index();
    }

    [[nodiscard]] std::size_t n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] std::size_t depth() const noexcept { return depth_; }
    [[nodiscard]] std::optional<entangler_layout> layout() const noexcept { return layout_; }
    [[nodiscard]] encoding_order encoding() const noexcept { return encoding_; }
    [[nodiscard]] std::size_t measured_qubit() const noexcept { return measured_qubit_; }
    [[nodiscard]] std::size_t param_count() const noexcept { return param_count_; }
    [[nodiscard]] const std::vector<gate_op> &schedule() const noexcept { return schedule_; }
    [[nodiscard]] const std::vector<rotation_layer> &layers() const noexcept { return layers_; }

    [[nodiscard]] std::size_t cnot_count() const {
        return static_cast<std::size_t>(std::count_if(
            schedule_.begin(), schedule_.end(),
            [](const gate_op &g) { return g.kind == gate_kind::cnot; }));
    }

    /// The rotation bound to @p slot.
    [[nodiscard]] const gate_op &gate_for_slot(std::size_t slot) const {
        return schedule_.at(slot_gate_.at(slot));
    }

  private:
    void validate_and_index() {
        std::vector<std::optional<std::size_t>> owner;
        for (std::size_t g = 0; g < schedule_.size(); ++g) {
            const auto &op = schedule_[g];
            if (op.target >= n_qubits_) {
                throw index_error("gate " + std::to_string(g) + " targets qubit " +
                                  std::to_string(op.target) + " out of range");
            }
            if (op.kind == gate_kind::cnot) {
                if (!op.control) {
                    throw config_error("CNOT at schedule index " + std::to_string(g) +
                                       " has no control");
                }
                if (*op.control >= n_qubits_ || *op.control == op.target) {
                    throw index_error("CNOT at schedule index " + std::to_string(g) +
                                      " has an invalid control");
                }
                if (op.param_slot) {
                    throw config_error("CNOT cannot carry a parameter slot");
                }
            } else if (op.control) {
                throw config_error("rotation at schedule index " + std::to_string(g) +
                                   " has a control qubit");
            }
            if (op.param_slot) {
                const auto slot = *op.param_slot;
                if (slot >= owner.size()) {
                    owner.resize(slot + 1);
                }
                if (owner[slot]) {
                    throw config_error("parameter slot " + std::to_string(slot) +
                                       " used more than once");
                }
                owner[slot] = g;
            }
        }
        param_count_ = owner.size();
        slot_gate_.resize(param_count_);
        for (std::size_t s = 0; s < param_count_; ++s) {
            if (!owner[s]) {
                throw config_error("parameter slot " + std::to_string(s) + " is never used");
            }
            slot_gate_[s] = *owner[s];
        }

        std::vector<bool> seen(n_qubits_, false);
        bool open = false;
        for (std::size_t g = 0; g < schedule_.size(); ++g) {
            const auto &op = schedule_[g];
            if (!op.trainable()) {
                open = false;
                continue;
            }
            if (!open || seen[op.target]) {
                layers_.push_back({g, g, {}});
                std::fill(seen.begin(), seen.end(), false);
                open = true;
            }
            seen[op.target] = true;
            layers_.back().last_gate = g + 1;
            layers_.back().slots.push_back(*op.param_slot);
        }
    }

    std::size_t n_qubits_;
    std::size_t depth_;
    std::optional<entangler_layout> layout_;
    encoding_order encoding_;
    std::size_t measured_qubit_;
    std::vector<gate_op> schedule_;
    std::size_t param_count_ = 0;
    std::vector<std::size_t> slot_gate_;
    std::vector<rotation_layer> layers_;
};

struct ansatz_options {
    std::size_t measured_qubit = 1;
    /// Qubit carrying the final (n*D + 1)-th rotation; defaults to the measured qubit.
    std::optional<std::size_t> trailing_qubit;
    encoding_order encoding = encoding_order::rz_first;
};

inline circuit_spec build_ansatz(entangler_layout layout, std::size_t depth,
                                 std::size_t n_qubits = 3, const ansatz_options &options = {}) {
    if (depth < 1) {
        throw config_error("ansatz depth must be >= 1");
    }
    if (n_qubits < 2) {
        throw config_error("the entangling ansatz needs at least 2 qubits");
    }
    std::vector<gate_op> schedule;
    std::size_t slot = 0;
    for (std::size_t d = 0; d < depth; ++d) {
        for (std::size_t q = 0; q < n_qubits; ++q) {
            schedule.push_back(gate_op::trainable_ry(q, slot++));
        }
        for (std::size_t q = 0; q + 1 < n_qubits; ++q) {
            schedule.push_back(gate_op::cnot(q, q + 1));
        }
        if (layout == entangler_layout::cycle) {
            schedule.push_back(gate_op::cnot(n_qubits - 1, 0));
        }
    }
    schedule.push_back(
        gate_op::trainable_ry(options.trailing_qubit.value_or(options.measured_qubit), slot++));
    return circuit_spec(n_qubits, std::move(schedule), options.measured_qubit, depth, layout,
                        options.encoding);
}

inline void check_feature(double x) {
    if (!(x >= -1.0 && x <= 1.0)) {
        throw domain_error("feature " + std::to_string(x) + " outside [-1, 1]");
    }
}

inline void check_params(const circuit_spec &spec, const param_vector &theta) {
    if (static_cast<std::size_t>(theta.size()) != spec.param_count()) {
        throw shape_error("parameter vector has " + std::to_string(theta.size()) +
                          " entries, circuit expects " + std::to_string(spec.param_count()));
    }
}

/// Applies the encoding block to @p state in place.
template <class Real>
void encode_into(basic_state_vector<Real> &state, double x,
                 encoding_order order = encoding_order::rz_first) {
    check_feature(x);
    const Real ry_angle = static_cast<Real>(std::asin(x));
    const Real rz_angle = static_cast<Real>(std::acos(x * x));
    for (std::size_t q = 0; q < state.n_qubits(); ++q) {
        if (order == encoding_order::rz_first) {
            state.apply_rz(q, rz_angle);
            state.apply_ry(q, ry_angle);
        } else {
            state.apply_ry(q, ry_angle);
            state.apply_rz(q, rz_angle);
        }
    }
}

inline state_vector encode(double x, std::size_t n_qubits,
                           encoding_order order = encoding_order::rz_first) {
    check_feature(x);
    state_vector state(n_qubits);
    encode_into(state, x, order);
    return state;
}

template <class Real>
void apply_gate(basic_state_vector<Real> &state, const gate_op &op, const param_vector &theta) {
    const double angle = op.param_slot ? theta[static_cast<Eigen::Index>(*op.param_slot)]
                                       : op.fixed_angle;
    switch (op.kind) {
    case gate_kind::ry:
        state.apply_ry(op.target, static_cast<Real>(angle));
        break;
    case gate_kind::rz:
        state.apply_rz(op.target, static_cast<Real>(angle));
        break;
    case gate_kind::cnot:
        state.apply_cnot(*op.control, op.target);
        break;
    }
}

/// Applies schedule gates [first, last) to @p state.
template <class Real>
void apply_schedule(basic_state_vector<Real> &state, const circuit_spec &spec,
                    const param_vector &theta, std::size_t first, std::size_t last) {
    const auto &schedule = spec.schedule();
    for (std::size_t g = first; g < last && g < schedule.size(); ++g) {
        apply_gate(state, schedule[g], theta);
    }
}

/// |psi(x, theta)>: encoding followed by the whole trainable schedule.
inline state_vector prepare_state(const circuit_spec &spec, double x, const param_vector &theta) {
    check_params(spec, theta);
    state_vector state = encode(x, spec.n_qubits(), spec.encoding());
    apply_schedule(state, spec, theta, 0, spec.schedule().size());
    return state;
}

/// Model prediction y_hat(x, theta) in [-1, 1].
inline double forward(const circuit_spec &spec, double x, const param_vector &theta) {
    return prepare_state(spec, x, theta).expectation_z(spec.measured_qubit());
}

} // namespace qcl
