/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: include/facepuppet/texture/synthesis.hpp
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

#ifndef FACEPUPPET_TEXTURE_SYNTHESIS_HPP
#define FACEPUPPET_TEXTURE_SYNTHESIS_HPP

#include "facepuppet/texture/align.hpp"
#include "facepuppet/texture/blend.hpp"

#include <span>
#include <vector>

namespace facepuppet {
namespace texture {

/// Smallest collection synthesize_texture accepts.
inline constexpr std::size_t min_texture_photos = 5;

/// The average face and the intermediate images of its construction.
struct AverageResult
{
    Image frontalized; ///< (a) mean of the canonical photos
    Image tps;         ///< (b) mean after TPS warping to the mean landmarks
    Image dense;       ///< (c) mean after dense warping
    Image texture;     ///< (d) multi-scale weighted average
    FiducialSet fiducials;
    std::vector<AlignedPhoto> aligned; ///< the photos aligned to `fiducials`
};

/// Builds the average texture of a collection, using the mean landmarks as target.
AverageResult build_average(std::span<const CanonicalPhoto> photos, const AlignParams& align_params,
                            const BlendParams& blend_params);

/// Blend inputs from aligned photos (image, coverage and the photo's own landmarks).
std::vector<BlendInput> blend_inputs(const std::vector<AlignedPhoto>& aligned);

/**
 * Texture of the collection at the target expression: align to the target
 * (optionally composed towards a canonical reference image), then blend
 * with expression- and detail-dependent weights. Throws InputError for
 * fewer than min_texture_photos photos.
 */
Image synthesize_texture(std::span<const CanonicalPhoto> photos, const FiducialSet& target, const Image* reference,
                         const AlignParams& align_params, const BlendParams& blend_params,
                         BlendDiagnostics* diagnostics = nullptr, bool keep_weight_maps = false);

/// Comparison textures for one target.
struct Baselines
{
    Image warped_average;  ///< (ii) the average texture TPS-warped to the target
    Image unaligned;       ///< (iii) single-scale weighted average of the unaligned photos
    Image prewarped;       ///< (iv) single-scale weighted average of the aligned photos
};

Baselines baseline_textures(std::span<const CanonicalPhoto> photos, const AverageResult& average,
                            const FiducialSet& target, const Image* reference, const AlignParams& align_params,
                            const BlendParams& blend_params);

/// Mean gradient magnitude of the luminance over pixels where mask is non-zero (all pixels if empty).
double gradient_energy(const Image& image, const std::vector<std::uint8_t>& mask = {});

} /* namespace texture */
} /* namespace facepuppet */

#endif /* FACEPUPPET_TEXTURE_SYNTHESIS_HPP */
