/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: src/flow/flow_io.cpp
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
#include "facepuppet/flow/flow_io.hpp"
#include "facepuppet/core/depth_mesh.hpp"
#include "facepuppet/core/error.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace facepuppet {
namespace flow {

namespace {

// Middlebury colour wheel: red-yellow-green-cyan-blue-magenta segments.
std::vector<std::array<double, 3>> colour_wheel()
{
    const int segments[6] = {15, 6, 4, 11, 13, 6};
    std::vector<std::array<double, 3>> wheel;
    auto ramp = [&](int n, auto&& colour) {
        for (int i = 0; i < n; ++i)
        {
            wheel.push_back(colour(static_cast<double>(i) / n));
        }
    };
    ramp(segments[0], [](double t) { return std::array<double, 3>{1.0, t, 0.0}; });
    ramp(segments[1], [](double t) { return std::array<double, 3>{1.0 - t, 1.0, 0.0}; });
    ramp(segments[2], [](double t) { return std::array<double, 3>{0.0, 1.0, t}; });
    ramp(segments[3], [](double t) { return std::array<double, 3>{0.0, 1.0 - t, 1.0}; });
    ramp(segments[4], [](double t) { return std::array<double, 3>{t, 0.0, 1.0}; });
    ramp(segments[5], [](double t) { return std::array<double, 3>{1.0, 0.0, 1.0 - t}; });
    return wheel;
}

} // namespace

void save_flow_grid(const WarpField& field, const std::string& path)
{
    FloatGrid grid{field.width(), field.height(), std::vector<float>(4 * static_cast<std::size_t>(field.width()) * field.height())};
    const auto d = field.data();
    for (std::size_t i = 0; i < d.size() / 2; ++i)
    {
        grid.quads[4 * i] = d[2 * i];
        grid.quads[4 * i + 1] = d[2 * i + 1];
        grid.quads[4 * i + 2] = 0.0f;
        grid.quads[4 * i + 3] = 1.0f;
    }
    write_float_grid(grid, path);
}

WarpField load_flow_grid(const std::string& path)
{
    const FloatGrid grid = read_float_grid(path);
    std::vector<float> data(2 * static_cast<std::size_t>(grid.width) * grid.height);
    for (std::size_t i = 0; i < data.size() / 2; ++i)
    {
        data[2 * i] = grid.quads[4 * i];
        data[2 * i + 1] = grid.quads[4 * i + 1];
    }
    return WarpField(grid.width, grid.height, std::move(data));
}

Image flow_to_color(const WarpField& field, std::optional<double> max_magnitude)
{
    double limit = max_magnitude.value_or(0.0);
    if (!max_magnitude)
    {
        for (int y = 0; y < field.height(); ++y)
        {
            for (int x = 0; x < field.width(); ++x)
            {
                limit = std::max(limit, static_cast<double>(field.at(x, y).norm()));
            }
        }
    }
    if (!(limit > 0.0))
    {
        limit = 1.0;
    }
    static const auto wheel = colour_wheel();
    const int n = static_cast<int>(wheel.size());
    Image out(field.width(), field.height(), 3);
    for (int y = 0; y < field.height(); ++y)
    {
        for (int x = 0; x < field.width(); ++x)
        {
            const Eigen::Vector2f f = field.at(x, y);
            const double radius = std::min(1.0, f.norm() / limit);
            const double angle = std::atan2(-f.y(), -f.x()) / std::numbers::pi;
            const double fk = (angle + 1.0) / 2.0 * (n - 1);
            const int k0 = static_cast<int>(std::floor(fk));
            const int k1 = (k0 + 1) % n;
            const double t = fk - k0;
            for (int c = 0; c < 3; ++c)
            {
                const double colour = (1.0 - t) * wheel[k0][c] + t * wheel[k1][c];
                out.at(x, y, c) = static_cast<float>(1.0 - radius * (1.0 - colour));
            }
        }
    }
    return out;
}

} /* namespace flow */
} /* namespace facepuppet */
