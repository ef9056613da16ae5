/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: include/facepuppet/synth/synthetic.hpp
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

#ifndef FACEPUPPET_SYNTH_SYNTHETIC_HPP
#define FACEPUPPET_SYNTH_SYNTHETIC_HPP

#include "facepuppet/core/depth_mesh.hpp"
#include "facepuppet/core/fiducials.hpp"
#include "facepuppet/core/image.hpp"
#include "facepuppet/core/photo.hpp"
#include "facepuppet/geometry/frontalize.hpp"

#include <cstdint>
#include <vector>

// Procedural faces with exact ground truth, used by the test suites and by
// the bundled demo dataset generator.
namespace facepuppet {
namespace synth {

struct Expression
{
    double smile = 0.0;      ///< 0..1, mouth corners up and out, smile creases
    double mouth_open = 0.0; ///< 0..1, lower lip down
    double brow_raise = 0.0; ///< -1..1
    double eye_close = 0.0;  ///< 0..1, upper lids down
};

struct Identity
{
    std::uint32_t seed = 1;
    Eigen::Vector3d skin{0.78, 0.6, 0.5};
    double eye_spacing = 0.0; ///< normalised offset of the eye centres
    double mouth_width = 0.0; ///< normalised change of the mouth half width
};

/// Global lighting applied as a smooth multiplicative shading field plus tint.
struct Lighting
{
    double ambient = 1.0;
    double gradient_x = 0.0;
    double gradient_y = 0.0;
    double curvature = 0.0;
    Eigen::Vector3d tint{1.0, 1.0, 1.0};
};

/// Landmarks of an expression on a width x height canonical grid.
FiducialSet landmarks(int width, int height, const Identity& identity, const Expression& expression = {});

/// Analytic face height field (canonical units) at grid position (u, v); NaN outside the face.
double face_depth(int width, int height, double u, double v);

/// Template mesh and 3D landmarks of the neutral generic face.
geometry::FaceTemplate make_template(int width, int height);

/**
 * Canonical (frontal, unlit) face texture for an identity and expression.
 * The neutral texture is drawn from the landmarks and warped to the
 * expression landmarks; expression-dependent creases are added on top.
 */
Image face_texture(int width, int height, const Identity& identity, const Expression& expression);

/**
 * Frame mesh for an expression: every vertex slides along the neutral
 * surface to where the landmark motion (thin-plate interpolated) carries it.
 * Vertices carried off the surface keep their neutral position.
 */
DepthMesh expression_mesh(const DepthMesh& neutral, const FiducialSet& neutral_landmarks,
                          const FiducialSet& expression_landmarks);

/// Multiplies a canonical texture by a lighting field.
Image apply_lighting(const Image& texture, const Lighting& lighting);

/// A rendered photo with its ground truth.
struct RenderedPhoto
{
    PhotoRecord record;
    Image canonical;               ///< lit canonical texture that was rendered
    FiducialSet canonical_landmarks;
};

/**
 * Renders a canonical texture through the template surface with a pose.
 * Background pixels get a flat grey. The landmarks are the exact projections
 * of the surface points at the canonical landmarks.
 */
RenderedPhoto render_photo(const Image& canonical, const FiducialSet& canonical_landmarks,
                           const geometry::FaceTemplate& face_template, const Pose& pose, int photo_width,
                           int photo_height, const std::string& id);

/// Pose looking at the face from distance `distance` with yaw/pitch in degrees.
Pose view_pose(double yaw_degrees, double pitch_degrees, double distance, const Intrinsics& intrinsics);

/**
 * Smooth band-limited random texture in [0, 1], deterministic in seed.
 * Pixel (x, y) holds the continuous pattern at (x, y) + offset, so offsets
 * give exact sub-pixel translations.
 */
Image noise_texture(int width, int height, std::uint32_t seed, double feature_size, int channels = 1,
                    const Eigen::Vector2d& offset = Eigen::Vector2d::Zero());

} /* namespace synth */
} /* namespace facepuppet */

#endif /* FACEPUPPET_SYNTH_SYNTHETIC_HPP */
