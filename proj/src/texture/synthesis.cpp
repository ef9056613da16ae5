/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: src/texture/synthesis.cpp
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
#include "facepuppet/texture/synthesis.hpp"
#include "facepuppet/core/error.hpp"
#include "facepuppet/geometry/tps.hpp"
#include "facepuppet/geometry/warp.hpp"

#include <cmath>

namespace facepuppet {
namespace texture {

namespace {

Image aligned_mean(const std::vector<AlignedPhoto>& aligned)
{
    std::vector<Image> images;
    std::vector<Image> coverage;
    for (const auto& a : aligned)
    {
        images.push_back(a.image);
        coverage.push_back(a.coverage);
    }
    return coverage_mean(images, coverage);
}

std::vector<BlendInput> canonical_inputs(std::span<const CanonicalPhoto> photos)
{
    std::vector<BlendInput> inputs;
    for (const auto& p : photos)
    {
        inputs.push_back(BlendInput{p.id, p.image, p.fiducials, p.coverage});
    }
    return inputs;
}

} // namespace

std::vector<BlendInput> blend_inputs(const std::vector<AlignedPhoto>& aligned)
{
    std::vector<BlendInput> inputs;
    inputs.reserve(aligned.size());
    for (const auto& a : aligned)
    {
        inputs.push_back(BlendInput{a.id, a.image, a.fiducials, a.coverage});
    }
    return inputs;
}

AverageResult build_average(std::span<const CanonicalPhoto> photos, const AlignParams& align_params,
                            const BlendParams& blend_params)
{
    if (photos.empty())
    {
        throw InputError("build_average: empty collection");
    }
    std::vector<FiducialSet> sets;
    std::vector<Image> images;
    std::vector<Image> coverage;
    for (const auto& p : photos)
    {
        sets.push_back(p.fiducials);
        images.push_back(p.image);
        coverage.push_back(p.coverage);
    }
    const FiducialSet target = mean_fiducials(sets);

    AlignParams tps_only = align_params;
    tps_only.dense = false;
    const std::vector<AlignedPhoto> after_tps = align_collection(photos, target, nullptr, tps_only);
    std::vector<AlignedPhoto> aligned =
        align_params.dense ? align_collection(photos, target, nullptr, align_params) : after_tps;

    const TextureBlender blender(blend_inputs(aligned), blend_params);
    Image frontalized = coverage_mean(images, coverage);
    Image tps = aligned_mean(after_tps);
    Image dense = aligned_mean(aligned);
    Image texture = blender.blend(target);
    return AverageResult{std::move(frontalized), std::move(tps), std::move(dense), std::move(texture), target,
                         std::move(aligned)};
}

Image synthesize_texture(std::span<const CanonicalPhoto> photos, const FiducialSet& target, const Image* reference,
                         const AlignParams& align_params, const BlendParams& blend_params,
                         BlendDiagnostics* diagnostics, bool keep_weight_maps)
{
    if (photos.size() < min_texture_photos)
    {
        throw InputError("synthesize_texture: need at least 5 photos, got " + std::to_string(photos.size()));
    }
    blend_params.validate();
    const std::vector<AlignedPhoto> aligned = align_collection(photos, target, reference, align_params);
    const TextureBlender blender(blend_inputs(aligned), blend_params);
    return blender.blend(target, diagnostics, keep_weight_maps);
}

Baselines baseline_textures(std::span<const CanonicalPhoto> photos, const AverageResult& average,
                            const FiducialSet& target, const Image* reference, const AlignParams& align_params,
                            const BlendParams& blend_params)
{
    if (photos.empty())
    {
        throw InputError("baseline_textures: empty collection");
    }
    Baselines out;
    const geometry::TpsMapping r = geometry::fit_tps(average.fiducials, target, align_params.tps_lambda);
    out.warped_average =
        geometry::warp(average.texture, geometry::rasterize_tps(r, average.texture.width(), average.texture.height()));
    out.unaligned = single_scale_weighted_average(canonical_inputs(photos), target, blend_params);
    const std::vector<AlignedPhoto> aligned = align_collection(photos, target, reference, align_params);
    out.prewarped = single_scale_weighted_average(blend_inputs(aligned), target, blend_params);
    return out;
}

double gradient_energy(const Image& image, const std::vector<std::uint8_t>& mask)
{
    const Image gray = image.channels() == 3 ? luminance(image) : image;
    const int w = gray.width();
    const int h = gray.height();
    if (!mask.empty() && mask.size() != gray.pixel_count())
    {
        throw InputError("gradient_energy: mask size does not match the image");
    }
    double sum = 0.0;
    std::size_t count = 0;
    for (int y = 1; y + 1 < h; ++y)
    {
        for (int x = 1; x + 1 < w; ++x)
        {
            if (!mask.empty() && !mask[static_cast<std::size_t>(y) * w + x])
            {
                continue;
            }
            const double gx = 0.5 * (gray.at(x + 1, y, 0) - gray.at(x - 1, y, 0));
            const double gy = 0.5 * (gray.at(x, y + 1, 0) - gray.at(x, y - 1, 0));
            sum += std::hypot(gx, gy);
            ++count;
        }
    }
    return count ? sum / static_cast<double>(count) : 0.0;
}

} /* namespace texture */
} /* namespace facepuppet */
