/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: src/texture/align.cpp
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
#include "facepuppet/texture/align.hpp"
#include "facepuppet/core/error.hpp"
#include "facepuppet/core/parallel.hpp"
#include "facepuppet/flow/subspace.hpp"
#include "facepuppet/geometry/tps.hpp"
#include "facepuppet/geometry/warp.hpp"

#include <optional>

namespace facepuppet {
namespace texture {

namespace {

void check_photo(const CanonicalPhoto& photo, int width, int height)
{
    if (photo.image.width() != width || photo.image.height() != height || photo.image.channels() != 3)
    {
        throw InputError("align_collection: photo '" + photo.id + "' is not a 3-channel image on the canonical grid");
    }
    if (photo.coverage.width() != width || photo.coverage.height() != height || photo.coverage.channels() != 1)
    {
        throw InputError("align_collection: coverage of photo '" + photo.id + "' does not match the grid");
    }
}

// Replaces uncovered pixels with the fill image so they do not drive the flow.
Image fill_uncovered(const Image& image, const Image& coverage, const Image& fill)
{
    Image out = image;
    for (int y = 0; y < image.height(); ++y)
    {
        for (int x = 0; x < image.width(); ++x)
        {
            const float c = std::clamp(coverage.at(x, y, 0), 0.0f, 1.0f);
            for (int k = 0; k < image.channels(); ++k)
            {
                out.at(x, y, k) = c * image.at(x, y, k) + (1.0f - c) * fill.at(x, y, k);
            }
        }
    }
    return out;
}

} // namespace

CanonicalPhoto canonical_photo(std::string id, Image image, const FiducialSet& fiducials)
{
    Image coverage(image.width(), image.height(), 1, 1.0f);
    return CanonicalPhoto{std::move(id), std::move(image), fiducials, std::move(coverage)};
}

CanonicalPhoto frontalize_record(const PhotoRecord& record, const geometry::FaceTemplate& face_template)
{
    const Intrinsics intrinsics = record.pose ? record.pose->intrinsics()
                                              : Intrinsics::default_for(record.image.width(), record.image.height());
    geometry::FrontalizedPhoto f = geometry::frontalize(record, face_template, intrinsics);
    Image coverage(f.image.width(), f.image.height(), 1);
    for (int y = 0; y < coverage.height(); ++y)
    {
        for (int x = 0; x < coverage.width(); ++x)
        {
            coverage.at(x, y, 0) = f.visible[static_cast<std::size_t>(y) * coverage.width() + x] ? 1.0f : 0.0f;
        }
    }
    return CanonicalPhoto{record.id, f.image.image(), f.fiducials, std::move(coverage)};
}

std::vector<CanonicalPhoto> frontalize_collection(const PhotoCollection& collection,
                                                  const geometry::FaceTemplate& face_template)
{
    std::vector<std::optional<CanonicalPhoto>> slots(collection.size());
    parallel_for(0, static_cast<int>(collection.size()),
                 [&](int i) { slots[i] = frontalize_record(collection[i], face_template); });
    std::vector<CanonicalPhoto> out;
    out.reserve(slots.size());
    for (auto& s : slots)
    {
        out.push_back(std::move(*s));
    }
    return out;
}

flow::FlowParams dense_warp_flow_params()
{
    flow::FlowParams p;
    p.alpha = 0.3;
    return p;
}

Image coverage_mean(std::span<const Image> images, std::span<const Image> coverage)
{
    if (images.empty() || coverage.size() != images.size())
    {
        throw InputError("coverage_mean: one coverage map per image required");
    }
    const int w = images[0].width();
    const int h = images[0].height();
    const int ch = images[0].channels();
    for (std::size_t i = 0; i < images.size(); ++i)
    {
        if (images[i].width() != w || images[i].height() != h || images[i].channels() != ch ||
            coverage[i].width() != w || coverage[i].height() != h || coverage[i].channels() != 1)
        {
            throw InputError("coverage_mean: image shapes differ");
        }
    }
    Image out(w, h, ch);
    parallel_for(0, h, [&](int y) {
        std::vector<double> acc(static_cast<std::size_t>(ch));
        std::vector<double> plain(static_cast<std::size_t>(ch));
        for (int x = 0; x < w; ++x)
        {
            std::fill(acc.begin(), acc.end(), 0.0);
            std::fill(plain.begin(), plain.end(), 0.0);
            double weight = 0.0;
            for (std::size_t i = 0; i < images.size(); ++i)
            {
                const double c = std::clamp(static_cast<double>(coverage[i].at(x, y, 0)), 0.0, 1.0);
                weight += c;
                for (int k = 0; k < ch; ++k)
                {
                    acc[k] += c * images[i].at(x, y, k);
                    plain[k] += images[i].at(x, y, k);
                }
            }
            for (int k = 0; k < ch; ++k)
            {
                out.at(x, y, k) = static_cast<float>(weight > 0.0 ? acc[k] / weight
                                                                  : plain[k] / static_cast<double>(images.size()));
            }
        }
    });
    return out;
}

std::vector<AlignedPhoto> align_collection(std::span<const CanonicalPhoto> photos, const FiducialSet& target,
                                           const Image* reference, const AlignParams& params)
{
    if (photos.empty())
    {
        throw InputError("align_collection: no photos");
    }
    if (!(params.tps_lambda >= 0.0))
    {
        throw InputError("align_collection: tps_lambda must be non-negative");
    }
    params.flow.validate();
    if (params.subspace_rank < 1)
    {
        throw InputError("align_collection: subspace_rank must be at least 1");
    }
    const int w = photos[0].image.width();
    const int h = photos[0].image.height();
    for (const auto& p : photos)
    {
        check_photo(p, w, h);
    }
    if (reference && (reference->width() != w || reference->height() != h || reference->channels() != 3))
    {
        throw InputError("align_collection: reference is not on the canonical grid");
    }

    const std::size_t n = photos.size();
    std::vector<std::optional<AlignedPhoto>> slots(n);
    std::vector<Image> tps_images(n);
    std::vector<Image> tps_coverage(n);
    parallel_for(0, static_cast<int>(n), [&](int i) {
        const CanonicalPhoto& p = photos[i];
        // Backward warp: sample the photo at r(q), r taking target landmarks onto the photo's.
        const geometry::TpsMapping r = geometry::fit_tps(p.fiducials, target, params.tps_lambda);
        WarpField tps = geometry::rasterize_tps(r, w, h);
        tps_images[i] = geometry::warp(p.image, tps);
        tps_coverage[i] = geometry::warp(p.coverage, tps);
        slots[i] = AlignedPhoto{p.id, tps_images[i], tps_coverage[i], p.fiducials, tps, tps};
    });
    std::vector<AlignedPhoto> out;
    out.reserve(n);
    for (auto& s : slots)
    {
        out.push_back(std::move(*s));
    }

    const bool dense = params.dense && n >= static_cast<std::size_t>(params.subspace_rank) + 1;
    if (!dense)
    {
        return out;
    }

    const Image fill = coverage_mean(tps_images, tps_coverage);
    std::vector<Image> filled(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        filled[i] = fill_uncovered(tps_images[i], tps_coverage[i], fill);
    }
    const flow::AppearanceSubspace subspace = flow::build_subspace(std::span<const Image>(filled), params.subspace_rank);
    std::optional<WarpField> to_reference;
    if (reference)
    {
        to_reference = flow::compute_flow(flow::project(*reference, subspace), *reference, params.flow);
    }
    parallel_for(0, static_cast<int>(n), [&](int i) {
        const WarpField to_projection = flow::compute_flow(filled[i], flow::project(filled[i], subspace), params.flow);
        WarpField field = compose(out[i].tps_field, to_projection);
        if (to_reference)
        {
            field = compose(field, *to_reference);
        }
        out[i].image = geometry::warp(photos[i].image, field);
        out[i].coverage = geometry::warp(photos[i].coverage, field);
        out[i].field = std::move(field);
    });
    return out;
}

} /* namespace texture */
} /* namespace facepuppet */
