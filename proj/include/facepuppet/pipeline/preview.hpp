/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: include/facepuppet/pipeline/preview.hpp
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

#ifndef FACEPUPPET_PIPELINE_PREVIEW_HPP
#define FACEPUPPET_PIPELINE_PREVIEW_HPP

#include "facepuppet/core/depth_mesh.hpp"
#include "facepuppet/core/image.hpp"

namespace facepuppet {
namespace pipeline {

/**
 * Orthographic front view of a textured depth mesh, the size of the mesh
 * grid. Each triangle is flat shaded by a fixed light from the upper left
 * and modulated by the texture (sampled at the vertex grid positions).
 * Empty pixels are black.
 */
Image render_preview(const DepthMesh& mesh, const Image& texture);

} /* namespace pipeline */
} /* namespace facepuppet */

#endif /* FACEPUPPET_PIPELINE_PREVIEW_HPP */
