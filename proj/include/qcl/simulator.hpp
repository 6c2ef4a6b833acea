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
 * Dense statevector simulation of the RY / RZ / CNOT gate set.
 *
 * Conventions:
 *  - Qubit 0 is the least-significant bit of the basis index.
 *  - RY(t) = exp(-i t Y / 2) = [[cos t/2, -sin t/2], [sin t/2, cos t/2]].
 *  - RZ(t) = exp(-i t Z / 2) = diag(exp(-i t/2), exp(i t/2)).
 *
 * With these conventions every rotation generator has eigenvalues +-1/2 and
 * the two-term parameter-shift rule with shift pi/2 is exact.
 */

#pragma once

#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qcl/errors.hpp"

namespace qcl {

template <std::floating_point Real> class basic_state_vector {
  public:
    using real_type = Real;
    using complex_type = std::complex<Real>;

    static constexpr std::size_t max_qubits = 12;

    /// |0...0> on @p n_qubits qubits.
    explicit basic_state_vector(std::size_t n_qubits)
        : n_qubits_(checked_qubit_count(n_qubits)),
          amplitudes_(std::size_t{1} << n_qubits) {
        amplitudes_[0] = complex_type{1, 0};
    }

    /// Takes ownership of @p amplitudes and rescales them to unit norm.
    static basic_state_vector from_amplitudes(std::vector<complex_type> amplitudes) {
        const auto dim = amplitudes.size();
        std::size_t n = 0;
        while ((std::size_t{1} << n) < dim) {
            ++n;
        }
        if (dim < 2 || (std::size_t{1} << n) != dim) {
            throw shape_error("amplitude count " + std::to_string(dim) +
                              " is not a power of two >= 2");
        }
        basic_state_vector state(n);
        state.amplitudes_ = std::move(amplitudes);
        const Real norm = std::sqrt(state.norm_squared());
        if (!(norm > Real{0}) || !std::isfinite(norm)) {
            throw numerical_error("cannot normalize a zero or non-finite state");
        }
        for (auto &a : state.amplitudes_) {
            a /= norm;
        }
        return state;
    }

    [[nodiscard]] std::size_t n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] std::size_t size() const noexcept { return amplitudes_.size(); }
    [[nodiscard]] std::span<const complex_type> amplitudes() const noexcept {
        return amplitudes_;
    }
    [[nodiscard]] const complex_type &operator[](std::size_t i) const {
        return amplitudes_[i];
    }

    basic_state_vector &apply_ry(std::size_t qubit, Real angle) {
        check_qubit(qubit);
        const Real c = std::cos(angle / 2);
        const Real s = std::sin(angle / 2);
        for_each_pair(qubit, [c, s](complex_type &a0, complex_type &a1) {
            const complex_type v0 = a0;
            const complex_type v1 = a1;
            a0 = c * v0 - s * v1;
            a1 = s * v0 + c * v1;
        });
        return *this;
    }

    basic_state_vector &apply_rz(std::size_t qubit, Real angle) {
        check_qubit(qubit);
        const complex_type lower = std::polar(Real{1}, -angle / 2);
        const complex_type upper = std::polar(Real{1}, angle / 2);
        for_each_pair(qubit, [&](complex_type &a0, complex_type &a1) {
            a0 *= lower;
            a1 *= upper;
        });
        return *this;
    }

    /// Pauli Y. Used to apply rotation generators, not as a circuit gate.
    basic_state_vector &apply_y(std::size_t qubit) {
        check_qubit(qubit);
        const complex_type i{0, 1};
        for_each_pair(qubit, [&](complex_type &a0, complex_type &a1) {
            const complex_type v0 = a0;
            a0 = -i * a1;
            a1 = i * v0;
        });
        return *this;
    }

    basic_state_vector &apply_z(std::size_t qubit) {
        check_qubit(qubit);
        for_each_pair(qubit, [](complex_type &, complex_type &a1) { a1 = -a1; });
        return *this;
    }

    basic_state_vector &apply_cnot(std::size_t control, std::size_t target) {
        check_qubit(control);
        check_qubit(target);
        if (control == target) {
            throw index_error("CNOT control and target are both qubit " +
                              std::to_string(control));
        }
        const std::size_t cmask = std::size_t{1} << control;
        const std::size_t tmask = std::size_t{1} << target;
        for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
            if ((i & cmask) != 0 && (i & tmask) == 0) {
                std::swap(amplitudes_[i], amplitudes_[i | tmask]);
            }
        }
        return *this;
    }

    /// <Z_qubit>, always within [-1, 1].
    [[nodiscard]] Real expectation_z(std::size_t qubit) const {
        check_qubit(qubit);
        const std::size_t mask = std::size_t{1} << qubit;
        Real sum{0};
        for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
            const Real p = std::norm(amplitudes_[i]);
            sum += (i & mask) ? -p : p;
        }
        if (sum > Real{1}) {
            return Real{1};
        }
        if (sum < Real{-1}) {
            return Real{-1};
        }
        return sum;
    }

    [[nodiscard]] Real norm_squared() const noexcept {
        Real sum{0};
        for (const auto &a : amplitudes_) {
            sum += std::norm(a);
        }
        return sum;
    }

    /// <this|other>.
    [[nodiscard]] complex_type inner(const basic_state_vector &other) const {
        if (other.size() != size()) {
            throw shape_error("inner product of states with different sizes");
        }
        complex_type sum{0, 0};
        for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
            sum += std::conj(amplitudes_[i]) * other.amplitudes_[i];
        }
        return sum;
    }

    basic_state_vector &scale(complex_type factor) noexcept {
        for (auto &a : amplitudes_) {
            a *= factor;
        }
        return *this;
    }

  private:
    static std::size_t checked_qubit_count(std::size_t n) {
        if (n < 1 || n > max_qubits) {
            throw config_error("qubit count must be in [1, " + std::to_string(max_qubits) +
                               "], got " + std::to_string(n));
        }
        return n;
    }

    void check_qubit(std::size_t qubit) const {
        if (qubit >= n_qubits_) {
            throw index_error("qubit index " + std::to_string(qubit) + " out of range for " +
                              std::to_string(n_qubits_) + " qubits");
        }
    }

    // Visits every (|..0..>, |..1..>) amplitude pair that differs only in @p qubit.
    template <class F> void for_each_pair(std::size_t qubit, F &&f) {
        const std::size_t stride = std::size_t{1} << qubit;
        const std::size_t dim = amplitudes_.size();
        for (std::size_t block = 0; block < dim; block += 2 * stride) {
            for (std::size_t i = block; i < block + stride; ++i) {
                f(amplitudes_[i], amplitudes_[i + stride]);
            }
        }
    }

    std::size_t n_qubits_;
    std::vector<complex_type> amplitudes_;
};

using state_vector = basic_state_vector<double>;

inline state_vector init_state(std::size_t n_qubits) { return state_vector(n_qubits); }

} // namespace qcl
