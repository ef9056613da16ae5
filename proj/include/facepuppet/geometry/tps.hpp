/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: include/facepuppet/geometry/tps.hpp
 *
 * Copyright 2026 The facepuppet authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#ifndef FACEPUPPET_GEOMETRY_TPS_HPP
#define FACEPUPPET_GEOMETRY_TPS_HPP

#include "facepuppet/core/fiducials.hpp"
#include "facepuppet/core/warp_field.hpp"

#include "Eigen/Core"

#include <vector>

namespace facepuppet {
namespace geometry {

/// The thin-plate kernel phi(r) = r^2 log r, with phi(0) = 0.
double tps_kernel(double r) noexcept;

/**
 * A smoothing thin-plate spline r: R^2 -> R^2,
 *
 *   r(p) = a0 + A p + sum_j w_j phi(|p - c_j|),
 *
 * with control points c_j and side conditions sum_j w_j = 0,
 * sum_j w_j c_j^T = 0.
 */
class TpsMapping
{
public:
    TpsMapping(std::vector<Eigen::Vector2d> control_points, Eigen::MatrixX2d weights,
               Eigen::Matrix<double, 2, 3> affine, double lambda, std::vector<double> objective_trace);

    Eigen::Vector2d operator()(const Eigen::Vector2d& p) const noexcept;

    const std::vector<Eigen::Vector2d>& control_points() const noexcept { return control_points_; }
    /// One row of RBF coefficients per control point.
    const Eigen::MatrixX2d& weights() const noexcept { return weights_; }
    /// Columns: offset a0, then the 2x2 linear part A.
    const Eigen::Matrix<double, 2, 3>& affine() const noexcept { return affine_; }
    double lambda() const noexcept { return lambda_; }

    /// sum over both output coordinates of w^T K w, K_ij = phi(|c_i - c_j|).
    double bending_energy() const;

    /// Objective after the initial solve and after each accepted refinement step.
    const std::vector<double>& objective_trace() const noexcept { return objective_trace_; }

private:
    std::vector<Eigen::Vector2d> control_points_;
    Eigen::MatrixX2d weights_;
    Eigen::Matrix<double, 2, 3> affine_;
    double lambda_;
    std::vector<double> objective_trace_;
};

/**
 * Discrete smoothing objective of a candidate spline with control points at
 * the target fiducials:
 *
 *   sum_i |source_i - r(target_i)|^2 + lambda * sum_d w_d^T K w_d.
 */
double tps_objective(const FiducialSet& source, const FiducialSet& target, const Eigen::MatrixX2d& weights,
                     const Eigen::Matrix<double, 2, 3>& affine, double lambda);

/**
 * Fits the smoothing thin-plate spline mapping target fiducials toward the
 * source fiducials, i.e. the backward map used to warp a photo with
 * landmarks `source` into the expression given by `target`.
 *
 * Solves the augmented system [K + lambda I, P; P^T, 0] [w; a] = [source; 0]
 * followed by iterative refinement. lambda = 0 interpolates exactly and
 * lambda -> infinity approaches the least-squares affine fit.
 *
 * Throws InputError for negative lambda and ComputationError for a
 * degenerate (collinear) target configuration.
 */
TpsMapping fit_tps(const FiducialSet& source, const FiducialSet& target, double lambda);

/// Dense field displacement(p) = r(p) - p at every pixel centre.
WarpField rasterize_tps(const TpsMapping& mapping, int width, int height);

} /* namespace geometry */
} /* namespace facepuppet */

#endif /* FACEPUPPET_GEOMETRY_TPS_HPP */
