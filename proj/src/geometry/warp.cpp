/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: src/geometry/warp.cpp
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
#include "facepuppet/geometry/warp.hpp"
#include "facepuppet/core/error.hpp"
#include "facepuppet/core/parallel.hpp"

namespace facepuppet {
namespace geometry {

Image warp(const Image& image, const WarpField& field)
{
    if (image.width() != field.width() || image.height() != field.height())
    {
        throw InputError("warp: image and warp field dimensions differ");
    }
    Image out(image.width(), image.height(), image.channels());
    parallel_for(0, image.height(), [&](int y) {
        for (int x = 0; x < image.width(); ++x)
        {
            const Eigen::Vector2f d = field.at(x, y);
            const double sx = x + static_cast<double>(d.x());
            const double sy = y + static_cast<double>(d.y());
            for (int c = 0; c < image.channels(); ++c)
            {
                out.at(x, y, c) = image.sample(sx, sy, c);
            }
        }
    });
    return out;
}

} /* namespace geometry */
} /* namespace facepuppet */
