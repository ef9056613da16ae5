/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: src/core/warp_field.cpp
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
#include "facepuppet/core/warp_field.hpp"
#include "facepuppet/core/error.hpp"
#include "facepuppet/core/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace facepuppet {

WarpField::WarpField(int width, int height, std::vector<float> displacement)
    : width_(width), height_(height), data_(std::move(displacement))
{
    if (width <= 0 || height <= 0)
    {
        throw InputError("WarpField: invalid dimensions");
    }
    if (data_.size() != 2 * static_cast<std::size_t>(width) * height)
    {
        throw InputError("WarpField: buffer size does not match dimensions");
    }
    for (float v : data_)
    {
        if (!std::isfinite(v))
        {
            throw InputError("WarpField: non-finite displacement");
        }
    }
}

WarpField WarpField::zero(int width, int height)
{
    return WarpField(width, height, std::vector<float>(2 * static_cast<std::size_t>(width) * height, 0.0f));
}

WarpField WarpField::constant(int width, int height, Eigen::Vector2f offset)
{
    std::vector<float> data(2 * static_cast<std::size_t>(width) * height);
    for (std::size_t i = 0; i < data.size(); i += 2)
    {
        data[i] = offset.x();
        data[i + 1] = offset.y();
    }
    return WarpField(width, height, std::move(data));
}

Eigen::Vector2f WarpField::sample(double x, double y) const noexcept
{
    x = std::clamp(x, 0.0, static_cast<double>(width_ - 1));
    y = std::clamp(y, 0.0, static_cast<double>(height_ - 1));
    const int x0 = std::min(static_cast<int>(x), width_ - 1);
    const int y0 = std::min(static_cast<int>(y), height_ - 1);
    const int x1 = std::min(x0 + 1, width_ - 1);
    const int y1 = std::min(y0 + 1, height_ - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    Eigen::Vector2f out;
    for (int c = 0; c < 2; ++c)
    {
        auto v = [&](int xx, int yy) { return static_cast<double>(data_[2 * (static_cast<std::size_t>(yy) * width_ + xx) + c]); };
        const double top = (1.0 - fx) * v(x0, y0) + fx * v(x1, y0);
        const double bottom = (1.0 - fx) * v(x0, y1) + fx * v(x1, y1);
        out[c] = static_cast<float>((1.0 - fy) * top + fy * bottom);
    }
    return out;
}

double WarpField::rms_magnitude() const noexcept
{
    if (data_.empty())
    {
        return 0.0;
    }
    double sum = 0.0;
    for (float v : data_)
    {
        sum += static_cast<double>(v) * v;
    }
    return std::sqrt(sum / (data_.size() / 2));
}

WarpField compose(const WarpField& f_ab, const WarpField& f_bc)
{
    if (f_ab.width() != f_bc.width() || f_ab.height() != f_bc.height())
    {
        throw InputError("compose: warp field dimensions differ");
    }
    const int w = f_bc.width();
    const int h = f_bc.height();
    std::vector<float> out(2 * static_cast<std::size_t>(w) * h);
    parallel_for(0, h, [&](int y) {
        for (int x = 0; x < w; ++x)
        {
            const Eigen::Vector2f d = f_bc.at(x, y);
            const Eigen::Vector2f e = f_ab.sample(x + static_cast<double>(d.x()), y + static_cast<double>(d.y()));
            const std::size_t i = 2 * (static_cast<std::size_t>(y) * w + x);
            out[i] = d.x() + e.x();
            out[i + 1] = d.y() + e.y();
        }
    });
    return WarpField(w, h, std::move(out));
}

double rms_difference(const WarpField& a, const WarpField& b, int margin)
{
    if (a.width() != b.width() || a.height() != b.height())
    {
        throw InputError("rms_difference: warp field dimensions differ");
    }
    double sum = 0.0;
    std::size_t n = 0;
    for (int y = margin; y < a.height() - margin; ++y)
    {
        for (int x = margin; x < a.width() - margin; ++x)
        {
            sum += (a.at(x, y) - b.at(x, y)).cast<double>().squaredNorm();
            ++n;
        }
    }
    return n == 0 ? 0.0 : std::sqrt(sum / n);
}

} /* namespace facepuppet */
