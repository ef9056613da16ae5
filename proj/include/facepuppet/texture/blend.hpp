/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: include/facepuppet/texture/blend.hpp
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

#ifndef FACEPUPPET_TEXTURE_BLEND_HPP
#define FACEPUPPET_TEXTURE_BLEND_HPP

#include "facepuppet/core/fiducials.hpp"
#include "facepuppet/core/image.hpp"
#include "facepuppet/texture/pyramid.hpp"

#include <optional>
#include <string>
#include <vector>

namespace facepuppet {
namespace texture {

struct BlendParams
{
    double sigma = 10.0; ///< expression bandwidth, canonical pixels
    double alpha = 1.0;  ///< exponent of the Laplacian response
    double beta = 20.0;  ///< decay of the uniform term over levels
    double tau = 1.0;    ///< scale of the uniform term
    int depth = 0;       ///< pyramid levels; 0 selects default_pyramid_depth

    /// Throws InputError unless sigma > 0, alpha >= 0, beta >= 0, tau >= 0 and depth >= 0.
    void validate() const;
    int resolved_depth(int width, int height) const noexcept
    {
        return depth > 0 ? depth : default_pyramid_depth(width, height);
    }
};

/// Response floor applied before the exponent alpha.
inline constexpr double response_floor = 1e-4;

/// exp(-|target - candidate|^2 / (2 sigma^2)) with the Frobenius distance over all landmarks.
double expression_weight(const FiducialSet& target, const FiducialSet& candidate, double sigma);

/// tau * l^-beta for l >= 1; infinite at l = 0, where weights are uniform.
double uniform_term(int level, double tau, double beta) noexcept;

/// |luminance| of a band, 3x3 box-smoothed (reflect borders), floored at response_floor.
Image band_response(const Image& band);

/// band_response of the finest Laplacian band image - expand(reduce(image)).
Image laplacian_response(const Image& image);

/**
 * Per-pixel weights (expression_w + uniform_term(l)) * response^alpha.
 * Level 0 is the pure-uniform limit and returns all ones.
 */
Image level_weight_map(const Image& response, double expression_w, int level, const BlendParams& params);

/// One aligned photo entering the blend.
struct BlendInput
{
    std::string id;
    Image image;         ///< aligned to the canonical grid, 3 channels
    FiducialSet fiducials; ///< the photo's own canonical landmarks (for the expression weight)
    std::optional<Image> coverage; ///< optional single-channel weight in [0, 1] (visibility)
};

struct BlendDiagnostics
{
    /// Pixels (summed over levels) where every weight was zero and the unweighted mean was used.
    std::size_t fallback_pixels = 0;
    /// Normalised weight maps, [level][photo], filled when requested.
    std::vector<std::vector<Image>> weight_maps;
};

/**
 * Multi-scale weighted blending with precomputed pyramids.
 *
 * Construction decomposes every photo once and caches the per-level
 * responses and coverage pyramids, so blending for a new target only
 * recomputes the scalar expression weights. Photos are accumulated in
 * ascending id order in double precision, so the result does not depend on
 * input order or thread count.
 *
 * With depth 1 the single level is weighted with the single-scale weights
 * expression_w * laplacian_response^alpha (no uniform term). With depth >= 2
 * level 0 is uniform and level l >= 1 uses level_weight_map.
 */
class TextureBlender
{
public:
    TextureBlender(std::vector<BlendInput> inputs, const BlendParams& params);

    Image blend(const FiducialSet& target, BlendDiagnostics* diagnostics = nullptr,
                bool keep_weight_maps = false) const;

    /// Blend with caller-supplied per-photo expression weights (same order as ids()).
    Image blend_with_expression_weights(const std::vector<double>& expression_weights,
                                        BlendDiagnostics* diagnostics = nullptr, bool keep_weight_maps = false) const;

    /// Weighted pyramid before collapsing, for inspection and tests.
    LaplacianPyramid blend_pyramid(const std::vector<double>& expression_weights,
                                   BlendDiagnostics* diagnostics = nullptr, bool keep_weight_maps = false) const;

    std::vector<std::string> ids() const;
    std::vector<double> expression_weights(const FiducialSet& target) const;
    int depth() const noexcept { return depth_; }
    std::size_t size() const noexcept { return photos_.size(); }
    const BlendParams& params() const noexcept { return params_; }

private:
    struct Photo
    {
        std::string id;
        FiducialSet fiducials;
        LaplacianPyramid pyramid;
        std::vector<Image> response_alpha; // response^alpha per level (empty at level 0 when depth >= 2)
        std::vector<Image> coverage;       // per level, empty if none
    };
    std::vector<Photo> photos_;
    BlendParams params_;
    int depth_ = 0;
    int width_ = 0;
    int height_ = 0;
};

/// Single-scale weighted average: weights expression_w * laplacian_response^alpha (times coverage).
Image single_scale_weighted_average(const std::vector<BlendInput>& inputs, const FiducialSet& target,
                                    const BlendParams& params);

} /* namespace texture */
} /* namespace facepuppet */

#endif /* FACEPUPPET_TEXTURE_BLEND_HPP */
