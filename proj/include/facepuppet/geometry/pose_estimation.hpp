/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: include/facepuppet/geometry/pose_estimation.hpp
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

#ifndef FACEPUPPET_GEOMETRY_POSE_ESTIMATION_HPP
#define FACEPUPPET_GEOMETRY_POSE_ESTIMATION_HPP

#include "facepuppet/core/fiducials.hpp"
#include "facepuppet/core/photo.hpp"

#include "Eigen/Core"

#include <array>
#include <vector>

namespace facepuppet {
namespace geometry {

using TemplatePoints = std::array<Eigen::Vector3d, FiducialSet::count>;

struct PoseEstimate
{
    Pose pose;
    /// Mean reprojection error in pixels at the solution.
    double mean_reprojection_error;
    /// Mean reprojection error after the linear initialisation and after every Gauss-Newton step.
    std::vector<double> residual_trace;
    int iterations;
};

/// Mean Euclidean reprojection error of the template under a pose.
double mean_reprojection_error(const Pose& pose, const TemplatePoints& template_points, const FiducialSet& fiducials);

/**
 * Perspective-n-Point for the 49 landmarks: direct linear transform
 * initialisation followed by Gauss-Newton refinement of the reprojection
 * error (at most 100 iterations, converged when the update norm drops below
 * 1e-10).
 *
 * Throws InputError for (near) coplanar templates and ComputationError, with
 * the residual trace in the message, when the refinement does not converge.
 */
PoseEstimate estimate_pose(const FiducialSet& fiducials, const TemplatePoints& template_points,
                           const Intrinsics& intrinsics);

/// Rotation about an axis by an angle in radians (Rodrigues).
Eigen::Matrix3d axis_angle(const Eigen::Vector3d& axis, double angle);

/// Angle in radians of the relative rotation a^T b.
double rotation_angle_between(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b);

} /* namespace geometry */
} /* namespace facepuppet */

#endif /* FACEPUPPET_GEOMETRY_POSE_ESTIMATION_HPP */
