/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: src/pipeline/preview.cpp
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
#include "facepuppet/pipeline/preview.hpp"
#include "facepuppet/core/error.hpp"
#include "facepuppet/geometry/raster.hpp"

#include "Eigen/Geometry"

namespace facepuppet {
namespace pipeline {

Image render_preview(const DepthMesh& mesh, const Image& texture)
{
    if (texture.empty() || (texture.channels() != 3 && texture.channels() != 1))
    {
        throw InputError("render_preview: texture must have 1 or 3 channels");
    }
    const int w = mesh.width();
    const int h = mesh.height();
    const Eigen::Vector3d light = Eigen::Vector3d(-0.3, 0.4, 1.0).normalized();
    const double sx = w > 1 ? (texture.width() - 1) / static_cast<double>(w - 1) : 0.0;
    const double sy = h > 1 ? (texture.height() - 1) / static_cast<double>(h - 1) : 0.0;

    Image out(w, h, 3, 0.0f);
    geometry::DepthBuffer zbuffer(w, h);
    auto screen = [&](std::size_t i) {
        const Eigen::Vector3d& p = mesh.values()[i];
        return geometry::ScreenVertex{Eigen::Vector2d(p.x() + (w - 1) / 2.0, (h - 1) / 2.0 - p.y()), -p.z()};
    };
    geometry::for_each_mesh_triangle(mesh, [&](std::size_t i0, std::size_t i1, std::size_t i2) {
        const auto& vs = mesh.values();
        Eigen::Vector3d normal = (vs[i1] - vs[i0]).cross(vs[i2] - vs[i0]);
        if (!(normal.norm() > 0.0))
        {
            return;
        }
        normal.normalize();
        if (normal.z() < 0.0)
        {
            normal = -normal;
        }
        const double shade = 0.25 + 0.75 * std::max(0.0, normal.dot(light));
        const std::size_t ids[3] = {i0, i1, i2};
        Eigen::Vector2d uv[3];
        for (int k = 0; k < 3; ++k)
        {
            uv[k] = Eigen::Vector2d(static_cast<double>(ids[k] % w) * sx, static_cast<double>(ids[k] / w) * sy);
        }
        geometry::rasterize_triangle(screen(i0), screen(i1), screen(i2), w, h, false,
                                     [&](int x, int y, double depth, const Eigen::Vector3d& weights) {
                                         if (!zbuffer.test_and_set(x, y, depth))
                                         {
                                             return;
                                         }
                                         const Eigen::Vector2d t =
                                             weights[0] * uv[0] + weights[1] * uv[1] + weights[2] * uv[2];
                                         for (int c = 0; c < 3; ++c)
                                         {
                                             const int tc = texture.channels() == 3 ? c : 0;
                                             out.at(x, y, c) = static_cast<float>(shade * texture.sample(t.x(), t.y(), tc));
                                         }
                                     });
    });
    return out;
}

} /* namespace pipeline */
} /* namespace facepuppet */
