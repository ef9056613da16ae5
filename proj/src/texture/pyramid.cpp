/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: src/texture/pyramid.cpp
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
#include "facepuppet/texture/pyramid.hpp"
#include "facepuppet/core/error.hpp"
#include "facepuppet/core/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace facepuppet {
namespace texture {

namespace {

constexpr double kernel[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};

int reflect(int i, int n) noexcept
{
    if (n == 1)
    {
        return 0;
    }
    while (i < 0 || i >= n)
    {
        i = i < 0 ? -i : 2 * n - 2 - i;
    }
    return i;
}

int half(int n) noexcept { return (n + 1) / 2; }

} // namespace

int default_pyramid_depth(int width, int height) noexcept
{
    const int side = std::max(1, std::min(width, height));
    const int depth = static_cast<int>(std::floor(std::log2(static_cast<double>(side)))) - 3;
    return std::clamp(depth, 3, 7);
}

Image reduce(const Image& image)
{
    const int w = image.width();
    const int h = image.height();
    const int c = image.channels();
    const int ow = half(w);
    const int oh = half(h);
    // Horizontal pass at even columns, then vertical pass at even rows.
    Image tmp(ow, h, c);
    parallel_for(0, h, [&](int y) {
        for (int x = 0; x < ow; ++x)
        {
            for (int k = 0; k < c; ++k)
            {
                double acc = 0.0;
                for (int t = -2; t <= 2; ++t)
                {
                    acc += kernel[t + 2] * image.at(reflect(2 * x + t, w), y, k);
                }
                tmp.at(x, y, k) = static_cast<float>(acc);
            }
        }
    });
    Image out(ow, oh, c);
    parallel_for(0, oh, [&](int y) {
        for (int x = 0; x < ow; ++x)
        {
            for (int k = 0; k < c; ++k)
            {
                double acc = 0.0;
                for (int t = -2; t <= 2; ++t)
                {
                    acc += kernel[t + 2] * tmp.at(x, reflect(2 * y + t, h), k);
                }
                out.at(x, y, k) = static_cast<float>(acc);
            }
        }
    });
    return out;
}

Image expand(const Image& image, int width, int height)
{
    const int c = image.channels();
    if (half(width) != image.width() || half(height) != image.height())
    {
        throw InputError("expand: target size does not match the coarse level");
    }
    // Horizontal: only even positions of the zero-inserted row are non-zero.
    Image tmp(width, image.height(), c);
    parallel_for(0, image.height(), [&](int y) {
        for (int x = 0; x < width; ++x)
        {
            for (int k = 0; k < c; ++k)
            {
                double acc = 0.0;
                for (int t = -2; t <= 2; ++t)
                {
                    const int xs = reflect(x + t, width);
                    if (xs % 2 == 0)
                    {
                        acc += 2.0 * kernel[t + 2] * image.at(xs / 2, y, k);
                    }
                }
                tmp.at(x, y, k) = static_cast<float>(acc);
            }
        }
    });
    Image out(width, height, c);
    parallel_for(0, height, [&](int y) {
        for (int x = 0; x < width; ++x)
        {
            for (int k = 0; k < c; ++k)
            {
                double acc = 0.0;
                for (int t = -2; t <= 2; ++t)
                {
                    const int ys = reflect(y + t, height);
                    if (ys % 2 == 0)
                    {
                        acc += 2.0 * kernel[t + 2] * tmp.at(x, ys / 2, k);
                    }
                }
                out.at(x, y, k) = static_cast<float>(acc);
            }
        }
    });
    return out;
}

LaplacianPyramid::LaplacianPyramid(std::vector<Image> levels) : levels_(std::move(levels))
{
    if (levels_.empty())
    {
        throw InputError("LaplacianPyramid: no levels");
    }
    for (std::size_t l = 1; l < levels_.size(); ++l)
    {
        if (half(levels_[l].width()) != levels_[l - 1].width() || half(levels_[l].height()) != levels_[l - 1].height() ||
            levels_[l].channels() != levels_[l - 1].channels())
        {
            throw InputError("LaplacianPyramid: inconsistent level sizes");
        }
    }
}

LaplacianPyramid LaplacianPyramid::decompose(const Image& image, int depth)
{
    if (depth < 1)
    {
        throw InputError("LaplacianPyramid: depth must be at least 1");
    }
    int w = image.width();
    int h = image.height();
    for (int l = 1; l < depth; ++l)
    {
        w = half(w);
        h = half(h);
    }
    if (std::min(w, h) < min_base_size)
    {
        throw InputError("LaplacianPyramid: image " + std::to_string(image.width()) + "x" +
                         std::to_string(image.height()) + " too small for " + std::to_string(depth) + " levels");
    }
    std::vector<Image> bands; // finest first while building
    Image current = image;
    for (int l = 1; l < depth; ++l)
    {
        Image coarse = reduce(current);
        const Image up = expand(coarse, current.width(), current.height());
        Image band(current.width(), current.height(), current.channels());
        auto b = band.data();
        const auto cur = current.data();
        const auto u = up.data();
        for (std::size_t i = 0; i < b.size(); ++i)
        {
            b[i] = cur[i] - u[i];
        }
        bands.push_back(std::move(band));
        current = std::move(coarse);
    }
    bands.push_back(std::move(current));
    std::reverse(bands.begin(), bands.end());
    return LaplacianPyramid(std::move(bands));
}

Image LaplacianPyramid::collapse() const
{
    Image current = levels_.front();
    for (std::size_t l = 1; l < levels_.size(); ++l)
    {
        const Image& band = levels_[l];
        Image up = expand(current, band.width(), band.height());
        auto u = up.data();
        const auto b = band.data();
        for (std::size_t i = 0; i < u.size(); ++i)
        {
            u[i] += b[i];
        }
        current = std::move(up);
    }
    return current;
}

std::vector<Image> mask_pyramid(const Image& mask, int depth)
{
    std::vector<Image> levels{mask};
    for (int l = 1; l < depth; ++l)
    {
        levels.push_back(reduce(levels.back()));
    }
    std::reverse(levels.begin(), levels.end());
    return levels;
}

} /* namespace texture */
} /* namespace facepuppet */
