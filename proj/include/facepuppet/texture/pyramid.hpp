/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: include/facepuppet/texture/pyramid.hpp
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

#ifndef FACEPUPPET_TEXTURE_PYRAMID_HPP
#define FACEPUPPET_TEXTURE_PYRAMID_HPP

#include "facepuppet/core/image.hpp"

#include <vector>

namespace facepuppet {
namespace texture {

/// Smallest side allowed for the coarsest pyramid level.
inline constexpr int min_base_size = 4;

/// floor(log2(min(width, height))) - 3, clamped to [3, 7].
int default_pyramid_depth(int width, int height) noexcept;

/// Blur with the binomial [1 4 6 4 1] / 16 kernel (reflect borders) and keep even pixels.
Image reduce(const Image& image);
/// Upsample to width x height by zero insertion and 2 x binomial interpolation.
Image expand(const Image& image, int width, int height);

/**
 * Laplacian pyramid ordered coarsest first: level 0 is the low-pass
 * residual, the last level is the finest band at full resolution. Each level
 * has twice (+-1) the size of the previous one.
 */
class LaplacianPyramid
{
public:
    /// Throws InputError if the image cannot be halved depth - 1 times above min_base_size.
    static LaplacianPyramid decompose(const Image& image, int depth);

    explicit LaplacianPyramid(std::vector<Image> levels);

    Image collapse() const;

    int depth() const noexcept { return static_cast<int>(levels_.size()); }
    const Image& level(int l) const { return levels_.at(static_cast<std::size_t>(l)); }
    Image& level(int l) { return levels_.at(static_cast<std::size_t>(l)); }
    const std::vector<Image>& levels() const noexcept { return levels_; }

private:
    std::vector<Image> levels_;
};

/// Gaussian pyramid of a single-channel mask, coarsest first, matching the Laplacian level sizes.
std::vector<Image> mask_pyramid(const Image& mask, int depth);

} /* namespace texture */
} /* namespace facepuppet */

#endif /* FACEPUPPET_TEXTURE_PYRAMID_HPP */
