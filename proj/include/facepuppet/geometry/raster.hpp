/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: include/facepuppet/geometry/raster.hpp
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

#ifndef FACEPUPPET_GEOMETRY_RASTER_HPP
#define FACEPUPPET_GEOMETRY_RASTER_HPP

#include "facepuppet/core/depth_mesh.hpp"

#include "Eigen/Core"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace facepuppet {
namespace geometry {

/// A projected vertex: screen position in pixels and positive view depth.
struct ScreenVertex
{
    Eigen::Vector2d position;
    double depth;
};

/**
 * Scan-converts one triangle, calling fragment(x, y, depth, b) for every
 * pixel centre inside it, where b holds the barycentric weights of a, b, c.
 * With `perspective` the weights and depth are perspective-correct (1/depth
 * is interpolated linearly in screen space); otherwise they are affine.
 */
template <class Fragment>
void rasterize_triangle(const ScreenVertex& a, const ScreenVertex& b, const ScreenVertex& c, int width, int height,
                        bool perspective, Fragment&& fragment)
{
    const Eigen::Vector2d& p0 = a.position;
    const Eigen::Vector2d& p1 = b.position;
    const Eigen::Vector2d& p2 = c.position;
    const double area = (p1.x() - p0.x()) * (p2.y() - p0.y()) - (p1.y() - p0.y()) * (p2.x() - p0.x());
    if (!(std::abs(area) > 1e-12))
    {
        return;
    }
    const int x_min = std::max(0, static_cast<int>(std::ceil(std::min({p0.x(), p1.x(), p2.x()}))));
    const int x_max = std::min(width - 1, static_cast<int>(std::floor(std::max({p0.x(), p1.x(), p2.x()}))));
    const int y_min = std::max(0, static_cast<int>(std::ceil(std::min({p0.y(), p1.y(), p2.y()}))));
    const int y_max = std::min(height - 1, static_cast<int>(std::floor(std::max({p0.y(), p1.y(), p2.y()}))));
    constexpr double eps = 1e-9;
    for (int y = y_min; y <= y_max; ++y)
    {
        for (int x = x_min; x <= x_max; ++x)
        {
            const double w0 = ((p1.x() - x) * (p2.y() - y) - (p1.y() - y) * (p2.x() - x)) / area;
            const double w1 = ((p2.x() - x) * (p0.y() - y) - (p2.y() - y) * (p0.x() - x)) / area;
            const double w2 = 1.0 - w0 - w1;
            if (w0 < -eps || w1 < -eps || w2 < -eps)
            {
                continue;
            }
            Eigen::Vector3d weights(w0, w1, w2);
            double depth = 0.0;
            if (perspective)
            {
                const Eigen::Vector3d inv(w0 / a.depth, w1 / b.depth, w2 / c.depth);
                const double inv_depth = inv.sum();
                depth = 1.0 / inv_depth;
                weights = inv * depth;
            }
            else
            {
                depth = w0 * a.depth + w1 * b.depth + w2 * c.depth;
            }
            fragment(x, y, depth, weights);
        }
    }
}

/**
 * Calls triangle(i0, i1, i2) with grid indices for the two triangles of
 * every mesh cell whose four corners are valid (same split as the OBJ export).
 */
template <class Triangle>
void for_each_mesh_triangle(const VectorGrid& mesh, Triangle&& triangle)
{
    for (int v = 0; v + 1 < mesh.height(); ++v)
    {
        for (int u = 0; u + 1 < mesh.width(); ++u)
        {
            if (!(mesh.valid(u, v) && mesh.valid(u + 1, v) && mesh.valid(u, v + 1) && mesh.valid(u + 1, v + 1)))
            {
                continue;
            }
            triangle(mesh.index(u, v), mesh.index(u, v + 1), mesh.index(u + 1, v));
            triangle(mesh.index(u + 1, v), mesh.index(u, v + 1), mesh.index(u + 1, v + 1));
        }
    }
}

/// Per-pixel nearest depth; +infinity where nothing was drawn.
class DepthBuffer
{
public:
    DepthBuffer(int width, int height)
        : width_(width), height_(height),
          depth_(static_cast<std::size_t>(width) * height, std::numeric_limits<double>::infinity())
    {
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    double at(int x, int y) const noexcept { return depth_[static_cast<std::size_t>(y) * width_ + x]; }

    /// Keeps the nearer depth; returns true if the fragment passed the test.
    bool test_and_set(int x, int y, double depth) noexcept
    {
        double& slot = depth_[static_cast<std::size_t>(y) * width_ + x];
        if (depth < slot)
        {
            slot = depth;
            return true;
        }
        return false;
    }

private:
    int width_;
    int height_;
    std::vector<double> depth_;
};

} /* namespace geometry */
} /* namespace facepuppet */

#endif /* FACEPUPPET_GEOMETRY_RASTER_HPP */
