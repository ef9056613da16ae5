/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: include/facepuppet/texture/align.hpp
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

#ifndef FACEPUPPET_TEXTURE_ALIGN_HPP
#define FACEPUPPET_TEXTURE_ALIGN_HPP

#include "facepuppet/core/fiducials.hpp"
#include "facepuppet/core/image.hpp"
#include "facepuppet/core/photo.hpp"
#include "facepuppet/core/warp_field.hpp"
#include "facepuppet/flow/optical_flow.hpp"
#include "facepuppet/geometry/frontalize.hpp"

#include <span>
#include <string>
#include <vector>

namespace facepuppet {
namespace texture {

/// A photo on the canonical grid together with its pose-corrected landmarks.
struct CanonicalPhoto
{
    std::string id;
    Image image;         ///< 3 channels
    FiducialSet fiducials;
    Image coverage;      ///< single channel in [0, 1]; 1 where the photo saw the face
};

/// Wraps an already canonical image with full coverage.
CanonicalPhoto canonical_photo(std::string id, Image image, const FiducialSet& fiducials);

/// Frontalizes every record onto the template grid. Photos keep their collection order.
std::vector<CanonicalPhoto> frontalize_collection(const PhotoCollection& collection,
                                                  const geometry::FaceTemplate& face_template);

CanonicalPhoto frontalize_record(const PhotoRecord& record, const geometry::FaceTemplate& face_template);

/// Flow settings of the dense texture warp: the solver defaults with a smoothness weight of 0.3.
flow::FlowParams dense_warp_flow_params();

struct AlignParams
{
    double tps_lambda = 10.0;
    flow::FlowParams flow = dense_warp_flow_params();
    int subspace_rank = 4;
    bool dense = true; ///< run the subspace flow refinement (needs at least subspace_rank + 1 photos)
};

struct AlignedPhoto
{
    std::string id;
    Image image;           ///< the canonical photo warped with `field`
    Image coverage;        ///< coverage warped with `field`
    FiducialSet fiducials; ///< the photo's own canonical landmarks (unchanged)
    WarpField tps_field;   ///< TPS part only
    WarpField field;       ///< full warp applied to the canonical photo
};

/**
 * Warps every photo onto the target expression.
 *
 * Each photo is first TPS-warped from its landmarks to `target`. With dense
 * refinement, the TPS results span a rank-4 appearance subspace and every
 * image is flowed onto its own projection. With a reference image (already
 * on the canonical grid, its landmarks being `target`) the flow from the
 * reference's projection to the reference is composed last.
 */
std::vector<AlignedPhoto> align_collection(std::span<const CanonicalPhoto> photos, const FiducialSet& target,
                                           const Image* reference, const AlignParams& params);

/// Coverage-weighted mean; pixels nobody covers take the plain mean.
Image coverage_mean(std::span<const Image> images, std::span<const Image> coverage);

} /* namespace texture */
} /* namespace facepuppet */

#endif /* FACEPUPPET_TEXTURE_ALIGN_HPP */
