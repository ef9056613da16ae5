/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: include/facepuppet/geometry/warp.hpp
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

#ifndef FACEPUPPET_GEOMETRY_WARP_HPP
#define FACEPUPPET_GEOMETRY_WARP_HPP

#include "facepuppet/core/image.hpp"
#include "facepuppet/core/warp_field.hpp"

namespace facepuppet {
namespace geometry {

/**
 * Backward warp: out(p) = in(p + field(p)), bilinear, clamp-to-edge.
 * Works on any channel count. Throws InputError on a size mismatch.
 */
Image warp(const Image& image, const WarpField& field);

inline FaceImage warp_image(const FaceImage& image, const WarpField& field)
{
    return FaceImage(warp(image.image(), field));
}

} /* namespace geometry */
} /* namespace facepuppet */

#endif /* FACEPUPPET_GEOMETRY_WARP_HPP */
