/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: include/facepuppet/flow/subspace.hpp
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

#ifndef FACEPUPPET_FLOW_SUBSPACE_HPP
#define FACEPUPPET_FLOW_SUBSPACE_HPP

#include "facepuppet/core/image.hpp"

#include <span>
#include <vector>

namespace facepuppet {
namespace flow {

inline constexpr int default_subspace_rank = 4;

/**
 * Mean plus orthonormal principal directions of a set of images, each image
 * treated as one vector of all its pixel values.
 *
 * Directions with (numerically) zero variance are not stored, so basis()
 * may hold fewer than rank() images for degenerate collections.
 */
class AppearanceSubspace
{
public:
    /// Throws InputError if shapes disagree or the basis is not orthonormal within 1e-6.
    AppearanceSubspace(Image mean, std::vector<Image> basis, std::vector<double> energies, int rank);

    const Image& mean() const noexcept { return mean_; }
    const std::vector<Image>& basis() const noexcept { return basis_; }
    /// Eigenvalues of the pixel covariance (sum of squares), one per nominal component.
    const std::vector<double>& energies() const noexcept { return energies_; }
    int rank() const noexcept { return rank_; }

    int width() const noexcept { return mean_.width(); }
    int height() const noexcept { return mean_.height(); }
    int channels() const noexcept { return mean_.channels(); }

private:
    Image mean_;
    std::vector<Image> basis_;
    std::vector<double> energies_;
    int rank_;
};

/**
 * PCA through the eigendecomposition of the n x n Gram matrix of the
 * centred images. Each basis image has its largest-magnitude value positive.
 * Throws InputError for fewer than rank + 1 images or mismatched shapes.
 */
AppearanceSubspace build_subspace(std::span<const Image> images, int rank = default_subspace_rank);
AppearanceSubspace build_subspace(std::span<const FaceImage> images, int rank = default_subspace_rank);

/// Coefficients <image - mean, b_k> for the stored basis images.
std::vector<double> subspace_coefficients(const Image& image, const AppearanceSubspace& subspace);

/// mean + sum_k <image - mean, b_k> b_k. Throws InputError on shape mismatch.
Image project(const Image& image, const AppearanceSubspace& subspace);

inline FaceImage project(const FaceImage& image, const AppearanceSubspace& subspace)
{
    return FaceImage(project(image.image(), subspace));
}

} /* namespace flow */
} /* namespace facepuppet */

#endif /* FACEPUPPET_FLOW_SUBSPACE_HPP */
