/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: include/facepuppet/geometry/frontalize.hpp
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

#ifndef FACEPUPPET_GEOMETRY_FRONTALIZE_HPP
#define FACEPUPPET_GEOMETRY_FRONTALIZE_HPP

#include "facepuppet/core/depth_mesh.hpp"
#include "facepuppet/core/photo.hpp"
#include "facepuppet/geometry/pose_estimation.hpp"
#include "facepuppet/geometry/raster.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace facepuppet {
namespace geometry {

/**
 * A generic face: depth-map mesh on the canonical grid plus the 3D position
 * of each of the 49 landmarks on it.
 */
struct FaceTemplate
{
    DepthMesh mesh;
    TemplatePoints fiducials;
};

/// Reads the template mesh (float-grid) and a 49-row `x,y,z` CSV of 3D landmarks.
FaceTemplate load_face_template(const std::string& mesh_path, const std::string& fiducials_path);
void save_template_fiducials(const TemplatePoints& points, const std::string& path);

struct FrontalizedPhoto
{
    /// Photo resampled onto the template grid; invisible pixels are zero.
    FaceImage image;
    /// Rigid pose-corrected landmarks in canonical grid coordinates.
    FiducialSet fiducials;
    /// Per-pixel flag: template vertex valid and visible in the photo.
    std::vector<std::uint8_t> visible;
    Pose pose;
    double reprojection_error;
};

/// Z-buffer of the template mesh rendered through a pose at the given photo size.
DepthBuffer render_template_depth(const DepthMesh& mesh, const Pose& pose, int width, int height);

/**
 * Back-projects a photo onto the canonical template grid.
 *
 * The pose is estimated from the landmarks (or taken from the record when
 * present); every template vertex is projected into the photo and sampled
 * if it passes the template z-buffer test. Landmarks are mapped to the grid
 * location whose projection lands on them. Pose estimation errors propagate.
 */
FrontalizedPhoto frontalize(const PhotoRecord& record, const FaceTemplate& face_template, const Intrinsics& intrinsics);

} /* namespace geometry */
} /* namespace facepuppet */

#endif /* FACEPUPPET_GEOMETRY_FRONTALIZE_HPP */
