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
 * Low-dimensional views of the loss landscape.
 *
 *  - 1D cuts along the segment (1 - a) theta_A + a theta_B.
 *  - 2D planes through three minima: origin theta_A, w1 along theta_B - theta_A,
 *    w2 the Gram-Schmidt remainder of theta_C - theta_A. theta_B sits at
 *    (scale1, 0) and theta_C at (c_alpha, scale2) with scale1, scale2 > 0.
 *  - Gate dropout: the same 1D cut with selected parameters clamped to 0.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qcl/ansatz.hpp"
#include "qcl/errors.hpp"
#include "qcl/gradloss.hpp"
#include "qcl/harness.hpp"

namespace qcl {

inline param_vector interpolate(const param_vector &theta_a, const param_vector &theta_b,
                                double alpha) {
    if (theta_a.size() != theta_b.size()) {
        throw shape_error("interpolate: endpoints differ in length");
    }
    return (1.0 - alpha) * theta_a + alpha * theta_b;
}

/// n equally spaced values on [0, 1]; the endpoints are exact.
inline std::vector<double> unit_alphas(std::size_t n_points) {
    if (n_points < 2) {
        throw config_error("a cut needs at least 2 points");
    }
    std::vector<double> out(n_points);
    for (std::size_t k = 0; k < n_points; ++k) {
        out[k] = static_cast<double>(k) / static_cast<double>(n_points - 1);
    }
    return out;
}

struct cut_point {
    double alpha = 0.0;
    double train_loss = 0.0;
    double test_loss = 0.0;
};

inline std::vector<cut_point> cut_1d(const circuit_spec &spec, const param_vector &theta_a,
                                     const param_vector &theta_b, std::size_t n_points,
                                     const data_split &data) {
    check_params(spec, theta_a);
    check_params(spec, theta_b);
    std::vector<cut_point> out;
    for (const double alpha : unit_alphas(n_points)) {
        const param_vector theta = interpolate(theta_a, theta_b, alpha);
        out.push_back({alpha, mse_loss(spec, theta, data.train), mse_loss(spec, theta, data.test)});
    }
    return out;
}

class plane_basis {
  public:
    /// Gram-Schmidt basis of the plane through three parameter vectors.
    static plane_basis through(const param_vector &theta_a, const param_vector &theta_b,
                               const param_vector &theta_c, double tolerance = 1e-9) {
        if (theta_a.size() != theta_b.size() || theta_a.size() != theta_c.size()) {
            throw shape_error("plane basis: points differ in length");
        }
        plane_basis p;
        p.origin_ = theta_a;
        p.point_b_ = theta_b;
        p.point_c_ = theta_c;
        const param_vector ab = theta_b - theta_a;
        const param_vector ac = theta_c - theta_a;
        p.scale1_ = ab.norm();
        if (!(p.scale1_ > tolerance)) {
            throw degeneracy_error("plane basis: theta_A and theta_B coincide (distance " +
                                       format_double(p.scale1_) + ")",
                                   p.scale1_);
        }
        p.w1_ = ab / p.scale1_;
        param_vector rest = ac - ac.dot(p.w1_) * p.w1_;
        rest -= rest.dot(p.w1_) * p.w1_; // second pass keeps w1.w2 at rounding level
        const double residual = rest.norm();
        if (!(residual > tolerance * std::max(1.0, ac.norm()))) {
            throw degeneracy_error("plane basis: points are collinear (residual norm " +
                                       format_double(residual) + ")",
                                   residual);
        }
        p.w2_ = rest / residual;
        p.c_alpha_ = ac.dot(p.w1_);
        p.scale2_ = (theta_c - theta_a).dot(p.w2_);
        return p;
    }

    [[nodiscard]] const param_vector &origin() const noexcept { return origin_; }
    [[nodiscard]] const param_vector &w1() const noexcept { return w1_; }
    [[nodiscard]] const param_vector &w2() const noexcept { return w2_; }
    [[nodiscard]] const param_vector &point_b() const noexcept { return point_b_; }
    [[nodiscard]] const param_vector &point_c() const noexcept { return point_c_; }
    [[nodiscard]] double scale1() const noexcept { return scale1_; }
    [[nodiscard]] double c_alpha() const noexcept { return c_alpha_; }
    [[nodiscard]] double scale2() const noexcept { return scale2_; }

    /// origin + alpha w1 + beta w2. The three defining coordinates return the
    /// stored defining vectors exactly.
    [[nodiscard]] param_vector point(double alpha, double beta) const {
        if (alpha == 0.0 && beta == 0.0) {
            return origin_;
        }
        if (alpha == scale1_ && beta == 0.0) {
            return point_b_;
        }
        if (alpha == c_alpha_ && beta == scale2_) {
            return point_c_;
        }
        return origin_ + alpha * w1_ + beta * w2_;
    }

    /// In-plane coordinates of the orthogonal projection of @p theta.
    [[nodiscard]] std::pair<double, double> project(const param_vector &theta) const {
        if (theta.size() != origin_.size()) {
            throw shape_error("plane projection: wrong vector length");
        }
        const param_vector d = theta - origin_;
        return {d.dot(w1_), d.dot(w2_)};
    }

  private:
    plane_basis() = default;

    param_vector origin_, w1_, w2_, point_b_, point_c_;
    double scale1_ = 0.0;
    double c_alpha_ = 0.0;
    double scale2_ = 0.0;
};

struct grid_axes {
    double alpha_min = 0.0;
    double alpha_max = 1.0;
    double beta_min = 0.0;
    double beta_max = 1.0;
    std::size_t alpha_points = 50;
    std::size_t beta_points = 50;
    /// Adds the defining coordinates to the axes so the three minima are grid points.
    bool include_defining_points = true;
};

/// Spans the defining points on each axis, padded by a quarter of their spread.
inline grid_axes default_axes(const plane_basis &basis, std::size_t resolution = 50,
                              double padding = 0.25) {
    const double a_lo = std::min({0.0, basis.scale1(), basis.c_alpha()});
    const double a_hi = std::max({0.0, basis.scale1(), basis.c_alpha()});
    const double b_lo = 0.0;
    const double b_hi = basis.scale2();
    const double a_pad = padding * (a_hi - a_lo);
    const double b_pad = padding * (b_hi - b_lo);
    return {a_lo - a_pad, a_hi + a_pad, b_lo - b_pad, b_hi + b_pad, resolution, resolution, true};
}

namespace detail {
inline std::vector<double> axis_values(double lo, double hi, std::size_t n,
                                       std::span<const double> extra) {
    if (n < 2) {
        throw config_error("grid resolution must be >= 2 per axis");
    }
    if (!(hi > lo)) {
        throw config_error("grid axis range is empty");
    }
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = k + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    }
    out.insert(out.end(), extra.begin(), extra.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}
} // namespace detail

struct landscape_grid {
    plane_basis basis;
    std::vector<double> alphas;
    std::vector<double> betas;
    Eigen::MatrixXd train_losses; // (alpha index, beta index)
    std::optional<Eigen::MatrixXd> test_losses;
};

inline landscape_grid cut_2d(const circuit_spec &spec, const plane_basis &basis,
                             const grid_axes &axes, const data_split &data,
                             bool with_test = false) {
    check_params(spec, basis.origin());
    std::vector<double> a_extra;
    std::vector<double> b_extra;
    if (axes.include_defining_points) {
        a_extra = {0.0, basis.scale1(), basis.c_alpha()};
        b_extra = {0.0, basis.scale2()};
    }
    landscape_grid grid{basis,
                        detail::axis_values(axes.alpha_min, axes.alpha_max, axes.alpha_points, a_extra),
                        detail::axis_values(axes.beta_min, axes.beta_max, axes.beta_points, b_extra),
                        {},
                        std::nullopt};
    const auto na = static_cast<Eigen::Index>(grid.alphas.size());
    const auto nb = static_cast<Eigen::Index>(grid.betas.size());
    grid.train_losses.resize(na, nb);
    if (with_test) {
        grid.test_losses = Eigen::MatrixXd(na, nb);
    }
    for (Eigen::Index i = 0; i < na; ++i) {
        for (Eigen::Index j = 0; j < nb; ++j) {
            const param_vector theta = basis.point(grid.alphas[i], grid.betas[j]);
            grid.train_losses(i, j) = mse_loss(spec, theta, data.train);
            if (with_test) {
                (*grid.test_losses)(i, j) = mse_loss(spec, theta, data.test);
            }
        }
    }
    return grid;
}

struct dropout_point {
    double alpha = 0.0;
    double loss_free = 0.0;
    double loss_clamped = 0.0;
};

/// Loss along the segment with and without the listed parameters forced to 0.
inline std::vector<dropout_point> dropout_curve(const circuit_spec &spec,
                                                const param_vector &theta_a,
                                                const param_vector &theta_b,
                                                std::span<const std::size_t> zero_indices,
                                                std::size_t n_points, batch_view data) {
    check_params(spec, theta_a);
    check_params(spec, theta_b);
    for (const auto idx : zero_indices) {
        if (idx >= spec.param_count()) {
            throw index_error("dropout index " + std::to_string(idx) + " out of range for " +
                              std::to_string(spec.param_count()) + " parameters");
        }
    }
    std::vector<dropout_point> out;
    for (const double alpha : unit_alphas(n_points)) {
        const param_vector theta = interpolate(theta_a, theta_b, alpha);
        param_vector clamped = theta;
        for (const auto idx : zero_indices) {
            clamped[static_cast<Eigen::Index>(idx)] = 0.0;
        }
        out.push_back({alpha, mse_loss(spec, theta, data), mse_loss(spec, clamped, data)});
    }
    return out;
}

struct dropout_summary {
    double max_free = 0.0;
    double max_clamped = 0.0;

    /// Positive when clamping raises the barrier along the segment.
    [[nodiscard]] double delta() const noexcept { return max_clamped - max_free; }
};

inline dropout_summary summarize_dropout(std::span<const dropout_point> curve) {
    if (curve.empty()) {
        throw domain_error("empty dropout curve");
    }
    dropout_summary s{curve.front().loss_free, curve.front().loss_clamped};
    for (const auto &p : curve) {
        s.max_free = std::max(s.max_free, p.loss_free);
        s.max_clamped = std::max(s.max_clamped, p.loss_clamped);
    }
    return s;
}

} // namespace qcl
