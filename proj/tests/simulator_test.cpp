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
#include <random>

#include "oracles.hpp"
#include "qcl/simulator.hpp"

namespace {

using qcl::state_vector;
using cplx = std::complex<double>;
constexpr double pi = std::numbers::pi;

state_vector random_state(std::size_t n, std::mt19937_64 &rng) {
    std::normal_distribution<double> d;
    std::vector<cplx> amps(std::size_t{1} << n);
    for (auto &a : amps) {
        a = {d(rng), d(rng)};
    }
    return state_vector::from_amplitudes(std::move(amps));
}

double expectation_x0(const state_vector &s) {
    // <X> on a single qubit: 2 Re(conj(a0) a1)
    return 2.0 * (std::conj(s[0]) * s[1]).real();
}

TEST(StateVector, InitState) {
    const auto one = qcl::init_state(1);
    ASSERT_EQ(one.size(), 2u);
    EXPECT_EQ(one[0], cplx(1, 0));
    EXPECT_EQ(one[1], cplx(0, 0));
    const auto three = qcl::init_state(3);
    ASSERT_EQ(three.size(), 8u);
    EXPECT_EQ(three[0], cplx(1, 0));
    for (std::size_t i = 1; i < 8; ++i) {
        EXPECT_EQ(three[i], cplx(0, 0));
    }
}

TEST(StateVector, RejectsQubitCountOutOfRange) {
    EXPECT_THROW(qcl::init_state(0), qcl::config_error);
    EXPECT_THROW(qcl::init_state(13), qcl::config_error);
    EXPECT_NO_THROW(qcl::init_state(12));
}

TEST(StateVector, FromAmplitudesNormalizesAndValidates) {
    auto s = state_vector::from_amplitudes({3.0, 4.0});
    EXPECT_NEAR(s.norm_squared(), 1.0, 1e-15);
    EXPECT_NEAR(s[0].real(), 0.6, 1e-15);
    EXPECT_THROW(state_vector::from_amplitudes({1.0, 0.0, 0.0}), qcl::shape_error);
    EXPECT_THROW(state_vector::from_amplitudes({1.0}), qcl::shape_error);
}

TEST(ApplyRy, Examples) {
    auto s = qcl::init_state(1);
    s.apply_ry(0, pi);
    EXPECT_NEAR(s[0].real(), 0.0, 1e-15);
    EXPECT_NEAR(s[1].real(), 1.0, 1e-15);

    auto id = qcl::init_state(1);
    id.apply_ry(0, 0.0);
    EXPECT_EQ(id[0], cplx(1, 0));
    EXPECT_EQ(id[1], cplx(0, 0));

    auto half = qcl::init_state(1);
    half.apply_ry(0, pi / 2);
    EXPECT_NEAR(half[0].real(), 1 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(half[1].real(), 1 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(half.expectation_z(0), 0.0, 1e-15);
}

TEST(ApplyRy, RejectsBadQubit) {
    auto s = qcl::init_state(2);
    EXPECT_THROW(s.apply_ry(2, 0.1), qcl::index_error);
    EXPECT_THROW(s.apply_rz(5, 0.1), qcl::index_error);
    EXPECT_THROW((void)s.expectation_z(2), qcl::index_error);
}

TEST(ApplyRz, Examples) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> angle(-10, 10);
    for (int k = 0; k < 20; ++k) {
        auto s = qcl::init_state(1);
        s.apply_rz(0, angle(rng));
        EXPECT_NEAR(std::abs(s[0]), 1.0, 1e-15);
        EXPECT_NEAR(std::abs(s[1]), 0.0, 1e-15);
    }
    auto id = qcl::init_state(1);
    id.apply_rz(0, 0.0);
    EXPECT_EQ(id[0], cplx(1, 0));

    // (|0> + |1>)/sqrt(2) has <X> = +1; RZ(pi) flips it to -1.
    auto plus = state_vector::from_amplitudes({1.0, 1.0});
    EXPECT_NEAR(expectation_x0(plus), 1.0, 1e-15);
    plus.apply_rz(0, pi);
    EXPECT_NEAR(expectation_x0(plus), -1.0, 1e-15);
}

TEST(ApplyCnot, TruthTableAndBell) {
    // Control qubit 0 set, target clear: basis index 1.
    auto s = state_vector::from_amplitudes({0.0, 1.0, 0.0, 0.0});
    s.apply_cnot(0, 1);
    EXPECT_EQ(s[3], cplx(1, 0));

    auto zero = qcl::init_state(2);
    zero.apply_cnot(0, 1);
    EXPECT_EQ(zero[0], cplx(1, 0));

    auto bell = state_vector::from_amplitudes({1.0, 1.0, 0.0, 0.0});
    bell.apply_cnot(0, 1);
    EXPECT_NEAR(bell[0].real(), 1 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(std::abs(bell[1]), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(bell[2]), 0.0, 1e-15);
    EXPECT_NEAR(bell[3].real(), 1 / std::sqrt(2.0), 1e-15);
}

TEST(ApplyCnot, RejectsEqualOrOutOfRange) {
    auto s = qcl::init_state(3);
    EXPECT_THROW(s.apply_cnot(1, 1), qcl::index_error);
    EXPECT_THROW(s.apply_cnot(0, 3), qcl::index_error);
    EXPECT_THROW(s.apply_cnot(3, 0), qcl::index_error);
}

TEST(ExpectationZ, Examples) {
    EXPECT_EQ(qcl::init_state(3).expectation_z(1), 1.0);
    std::vector<cplx> amps(8, 0.0);
    amps[0b010] = 1.0;
    EXPECT_EQ(state_vector::from_amplitudes(amps).expectation_z(1), -1.0);
    const auto uniform = state_vector::from_amplitudes(std::vector<cplx>(8, 1.0));
    EXPECT_NEAR(uniform.expectation_z(1), 0.0, 1e-15);
}

TEST(SimulatorProperties, NormPreservedByEveryGate) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> angle(-2 * pi, 2 * pi);
    for (int trial = 0; trial < 200; ++trial) {
        auto s = random_state(3, rng);
        const std::size_t q = static_cast<std::size_t>(trial % 3);
        s.apply_ry(q, angle(rng));
        EXPECT_NEAR(s.norm_squared(), 1.0, 1e-12);
        s.apply_rz((q + 1) % 3, angle(rng));
        EXPECT_NEAR(s.norm_squared(), 1.0, 1e-12);
        s.apply_cnot(q, (q + 2) % 3);
        EXPECT_NEAR(s.norm_squared(), 1.0, 1e-12);
    }
}

TEST(SimulatorProperties, GatesInvertAndCnotIsSelfInverse) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> angle(-2 * pi, 2 * pi);
    for (int trial = 0; trial < 100; ++trial) {
        const auto original = random_state(3, rng);
        const double t = angle(rng);
        auto s = original;
        s.apply_ry(1, t).apply_ry(1, -t);
        s.apply_rz(2, t).apply_rz(2, -t);
        s.apply_cnot(2, 0).apply_cnot(2, 0);
        for (std::size_t i = 0; i < s.size(); ++i) {
            EXPECT_NEAR(std::abs(s[i] - original[i]), 0.0, 1e-12);
        }
    }
}

TEST(SimulatorProperties, RyPeriodicUpToGlobalSign) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> angle(-pi, pi);
    for (int trial = 0; trial < 100; ++trial) {
        const auto psi = random_state(3, rng);
        const double t = angle(rng);
        auto a = psi;
        auto b = psi;
        a.apply_ry(0, t);
        b.apply_ry(0, t + 2 * pi);
        for (std::size_t i = 0; i < a.size(); ++i) {
            EXPECT_NEAR(std::abs(a[i]), std::abs(b[i]), 1e-12);
            EXPECT_NEAR(std::abs(a[i] + b[i]), 0.0, 1e-12); // b = -a
        }
        EXPECT_NEAR(a.expectation_z(2), b.expectation_z(2), 1e-12);
    }
}

TEST(SimulatorProperties, ExpectationMatchesDensityMatrixTrace) {
    std::mt19937_64 rng(5);
    for (std::size_t n = 1; n <= 3; ++n) {
        for (int trial = 0; trial < 50; ++trial) {
            const auto s = random_state(n, rng);
            qcl::oracle::cvector psi(static_cast<Eigen::Index>(s.size()));
            for (std::size_t i = 0; i < s.size(); ++i) {
                psi[static_cast<Eigen::Index>(i)] = s[i];
            }
            for (std::size_t q = 0; q < n; ++q) {
                const double z = s.expectation_z(q);
                EXPECT_GE(z, -1.0);
                EXPECT_LE(z, 1.0);
                EXPECT_NEAR(z, qcl::oracle::density_expectation_z(psi, q, n), 1e-12);
            }
        }
    }
}

TEST(SimulatorProperties, SinglePrecisionInstantiation) {
    qcl::basic_state_vector<float> s(2);
    s.apply_ry(0, static_cast<float>(pi / 2)).apply_cnot(0, 1);
    EXPECT_NEAR(s.expectation_z(1), 0.0f, 1e-6f);
    EXPECT_NEAR(s.norm_squared(), 1.0f, 1e-6f);
}

} // namespace
