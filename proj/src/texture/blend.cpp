/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: src/texture/blend.cpp
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
#include "facepuppet/texture/blend.hpp"
#include "facepuppet/core/error.hpp"
#include "facepuppet/core/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>

namespace facepuppet {
namespace texture {

namespace {

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

Image power(const Image& response, double alpha)
{
    Image out = response;
    if (alpha == 1.0)
    {
        return out;
    }
    for (float& v : out.data())
    {
        v = static_cast<float>(std::pow(static_cast<double>(v), alpha));
    }
    return out;
}

} // namespace

void BlendParams::validate() const
{
    if (!(sigma > 0.0) || !std::isfinite(sigma))
    {
        throw InputError("BlendParams: sigma must be positive");
    }
    if (!(alpha >= 0.0) || !(beta >= 0.0) || !(tau >= 0.0))
    {
        throw InputError("BlendParams: alpha, beta and tau must be non-negative");
    }
    if (depth < 0)
    {
        throw InputError("BlendParams: depth must be non-negative (0 = automatic)");
    }
}

double expression_weight(const FiducialSet& target, const FiducialSet& candidate, double sigma)
{
    const double d = target.distance(candidate);
    return std::exp(-d * d / (2.0 * sigma * sigma));
}

double uniform_term(int level, double tau, double beta) noexcept
{
    if (level <= 0)
    {
        return std::numeric_limits<double>::infinity();
    }
    return tau * std::pow(static_cast<double>(level), -beta);
}

Image band_response(const Image& band)
{
    const Image gray = band.channels() == 3 ? luminance(band) : band;
    const int w = gray.width();
    const int h = gray.height();
    Image out(w, h, 1);
    parallel_for(0, h, [&](int y) {
        for (int x = 0; x < w; ++x)
        {
            double acc = 0.0;
            for (int dy = -1; dy <= 1; ++dy)
            {
                for (int dx = -1; dx <= 1; ++dx)
                {
                    acc += std::abs(static_cast<double>(gray.at(reflect(x + dx, w), reflect(y + dy, h), 0)));
                }
            }
            out.at(x, y, 0) = static_cast<float>(std::max(acc / 9.0, response_floor));
        }
    });
    return out;
}

Image laplacian_response(const Image& image)
{
    const Image up = expand(reduce(image), image.width(), image.height());
    Image band(image.width(), image.height(), image.channels());
    auto b = band.data();
    const auto a = image.data();
    const auto u = up.data();
    for (std::size_t i = 0; i < b.size(); ++i)
    {
        b[i] = a[i] - u[i];
    }
    return band_response(band);
}

Image level_weight_map(const Image& response, double expression_w, int level, const BlendParams& params)
{
    Image out(response.width(), response.height(), 1, 1.0f);
    if (level <= 0)
    {
        return out;
    }
    const double factor = expression_w + uniform_term(level, params.tau, params.beta);
    const auto r = response.data();
    auto o = out.data();
    for (std::size_t i = 0; i < o.size(); ++i)
    {
        o[i] = static_cast<float>(factor * std::pow(static_cast<double>(r[i]), params.alpha));
    }
    return out;
}

TextureBlender::TextureBlender(std::vector<BlendInput> inputs, const BlendParams& params) : params_(params)
{
    params_.validate();
    if (inputs.empty())
    {
        throw InputError("TextureBlender: no photos");
    }
    width_ = inputs.front().image.width();
    height_ = inputs.front().image.height();
    for (const auto& in : inputs)
    {
        if (in.image.width() != width_ || in.image.height() != height_ || in.image.channels() != 3)
        {
            throw InputError("TextureBlender: photos must share one 3-channel canonical grid");
        }
        if (in.coverage && (in.coverage->width() != width_ || in.coverage->height() != height_ ||
                            in.coverage->channels() != 1))
        {
            throw InputError("TextureBlender: coverage must be a single-channel map on the canonical grid");
        }
    }
    depth_ = params_.resolved_depth(width_, height_);
    std::stable_sort(inputs.begin(), inputs.end(), [](const BlendInput& a, const BlendInput& b) { return a.id < b.id; });

    photos_.reserve(inputs.size());
    for (auto& in : inputs)
    {
        LaplacianPyramid pyramid = LaplacianPyramid::decompose(in.image, depth_);
        std::vector<Image> response(static_cast<std::size_t>(depth_));
        if (depth_ == 1)
        {
            response[0] = power(laplacian_response(in.image), params_.alpha);
        }
        else
        {
            for (int l = 1; l < depth_; ++l)
            {
                response[static_cast<std::size_t>(l)] = power(band_response(pyramid.level(l)), params_.alpha);
            }
        }
        std::vector<Image> coverage;
        if (in.coverage)
        {
            coverage = mask_pyramid(*in.coverage, depth_);
        }
        photos_.push_back(Photo{std::move(in.id), in.fiducials, std::move(pyramid), std::move(response),
                                std::move(coverage)});
        in.image = Image();
    }
}

std::vector<std::string> TextureBlender::ids() const
{
    std::vector<std::string> out;
    for (const auto& p : photos_)
    {
        out.push_back(p.id);
    }
    return out;
}

std::vector<double> TextureBlender::expression_weights(const FiducialSet& target) const
{
    std::vector<double> out;
    for (const auto& p : photos_)
    {
        out.push_back(expression_weight(target, p.fiducials, params_.sigma));
    }
    return out;
}

LaplacianPyramid TextureBlender::blend_pyramid(const std::vector<double>& expression_w,
                                               BlendDiagnostics* diagnostics, bool keep_weight_maps) const
{
    if (expression_w.size() != photos_.size())
    {
        throw InputError("TextureBlender: one expression weight per photo required");
    }
    const std::size_t n = photos_.size();
    std::vector<Image> levels;
    std::atomic<std::size_t> fallback{0};
    if (diagnostics && keep_weight_maps)
    {
        diagnostics->weight_maps.assign(static_cast<std::size_t>(depth_), {});
    }

    for (int l = 0; l < depth_; ++l)
    {
        const Image& shape = photos_.front().pyramid.level(l);
        const int w = shape.width();
        const int h = shape.height();
        const bool uniform = depth_ >= 2 && l == 0;
        std::vector<double> factor(n, 1.0);
        if (!uniform)
        {
            for (std::size_t i = 0; i < n; ++i)
            {
                factor[i] = depth_ == 1 ? expression_w[i]
                                        : expression_w[i] + uniform_term(l, params_.tau, params_.beta);
            }
        }
        std::vector<Image> maps;
        if (diagnostics && keep_weight_maps)
        {
            maps.assign(n, Image(w, h, 1));
        }

        Image out(w, h, 3);
        parallel_for(0, h, [&](int y) {
            std::vector<double> acc(3 * static_cast<std::size_t>(w), 0.0);
            std::vector<double> weight_sum(static_cast<std::size_t>(w), 0.0);
            std::vector<double> plain(3 * static_cast<std::size_t>(w), 0.0);
            for (std::size_t i = 0; i < n; ++i)
            {
                const Photo& p = photos_[i];
                const Image& band = p.pyramid.level(l);
                const Image* coverage = p.coverage.empty() ? nullptr : &p.coverage[static_cast<std::size_t>(l)];
                const Image* response = uniform ? nullptr : &p.response_alpha[static_cast<std::size_t>(l)];
                for (int x = 0; x < w; ++x)
                {
                    double weight = factor[i];
                    if (response)
                    {
                        weight *= response->at(x, y, 0);
                    }
                    if (coverage)
                    {
                        weight *= std::clamp(static_cast<double>(coverage->at(x, y, 0)), 0.0, 1.0);
                    }
                    weight_sum[x] += weight;
                    for (int c = 0; c < 3; ++c)
                    {
                        const double value = band.at(x, y, c);
                        acc[3 * x + c] += weight * value;
                        plain[3 * x + c] += value;
                    }
                    if (!maps.empty())
                    {
                        maps[i].at(x, y, 0) = static_cast<float>(weight);
                    }
                }
            }
            std::size_t row_fallback = 0;
            for (int x = 0; x < w; ++x)
            {
                const bool ok = weight_sum[x] > 0.0 && std::isfinite(weight_sum[x]);
                row_fallback += !ok;
                for (int c = 0; c < 3; ++c)
                {
                    const double value = ok ? acc[3 * x + c] / weight_sum[x] : plain[3 * x + c] / static_cast<double>(n);
                    out.at(x, y, c) = static_cast<float>(value);
                }
                for (auto& m : maps)
                {
                    m.at(x, y, 0) = ok ? static_cast<float>(m.at(x, y, 0) / weight_sum[x]) : static_cast<float>(1.0 / n);
                }
            }
            fallback += row_fallback;
        });
        levels.push_back(std::move(out));
        if (diagnostics && keep_weight_maps)
        {
            diagnostics->weight_maps[static_cast<std::size_t>(l)] = std::move(maps);
        }
    }
    if (diagnostics)
    {
        diagnostics->fallback_pixels = fallback.load();
    }
    return LaplacianPyramid(std::move(levels));
}

Image TextureBlender::blend_with_expression_weights(const std::vector<double>& expression_w,
                                                    BlendDiagnostics* diagnostics, bool keep_weight_maps) const
{
    return blend_pyramid(expression_w, diagnostics, keep_weight_maps).collapse();
}

Image TextureBlender::blend(const FiducialSet& target, BlendDiagnostics* diagnostics, bool keep_weight_maps) const
{
    return blend_with_expression_weights(expression_weights(target), diagnostics, keep_weight_maps);
}

Image single_scale_weighted_average(const std::vector<BlendInput>& inputs, const FiducialSet& target,
                                    const BlendParams& params)
{
    BlendParams single = params;
    single.depth = 1;
    return TextureBlender(inputs, single).blend(target);
}

} /* namespace texture */
} /* namespace facepuppet */
