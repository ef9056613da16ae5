/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: include/facepuppet/core/fiducials.hpp
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

#ifndef FACEPUPPET_CORE_FIDUCIALS_HPP
#define FACEPUPPET_CORE_FIDUCIALS_HPP

#include "Eigen/Core"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace facepuppet {

/**
 * The 49 facial landmarks of one face image, in image pixel coordinates.
 *
 * Order follows the 49-point layout documented in docs/landmarks.md:
 *   0-9   eyebrows (5 per brow, right brow first)
 *   10-13 nose bridge, 14-18 lower nose
 *   19-24 right eye, 25-30 left eye
 *   31-42 outer lip contour, 43-48 inner lip contour
 * "Right" means the subject's right, i.e. the left side of the image.
 */
class FiducialSet
{
public:
    static constexpr int count = 49;

    /// Throws InputError unless exactly 49 finite points are given.
    explicit FiducialSet(std::span<const Eigen::Vector2d> points);

    const Eigen::Vector2d& operator[](int i) const noexcept { return points_[i]; }
    const std::array<Eigen::Vector2d, count>& points() const noexcept { return points_; }

    /// Frobenius distance ||F_a - F_b|| over all 98 coordinates.
    double distance(const FiducialSet& other) const noexcept;

    /// Root mean square point-to-point distance.
    double rms_distance(const FiducialSet& other) const noexcept;

    FiducialSet translated(const Eigen::Vector2d& offset) const;

    bool operator==(const FiducialSet& other) const noexcept { return points_ == other.points_; }

private:
    std::array<Eigen::Vector2d, count> points_;
};

/// Coordinate-wise mean of several fiducial sets.
FiducialSet mean_fiducials(std::span<const FiducialSet> sets);

/**
 * Reads a landmark CSV: exactly 49 data rows of `x,y`, with an optional
 * non-numeric header row. Throws InputError with the offending detail.
 */
FiducialSet load_fiducials_csv(const std::string& path);

/// Writes `x,y` header plus 49 rows at full double precision.
void save_fiducials_csv(const FiducialSet& fiducials, const std::string& path);

/// Semantic groups of the landmark layout, as half-open index ranges.
namespace landmarks {
inline constexpr int brows_begin = 0, brows_end = 10;
inline constexpr int nose_begin = 10, nose_end = 19;
inline constexpr int right_eye_begin = 19, right_eye_end = 25;
inline constexpr int left_eye_begin = 25, left_eye_end = 31;
inline constexpr int mouth_outer_begin = 31, mouth_outer_end = 43;
inline constexpr int mouth_inner_begin = 43, mouth_inner_end = 49;
inline constexpr int mouth_right_corner = 31;
inline constexpr int mouth_left_corner = 37;
} /* namespace landmarks */

} /* namespace facepuppet */

#endif /* FACEPUPPET_CORE_FIDUCIALS_HPP */
