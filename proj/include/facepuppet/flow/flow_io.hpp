/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: include/facepuppet/flow/flow_io.hpp
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

#ifndef FACEPUPPET_FLOW_FLOW_IO_HPP
#define FACEPUPPET_FLOW_FLOW_IO_HPP

#include "facepuppet/core/image.hpp"
#include "facepuppet/core/warp_field.hpp"

#include <optional>
#include <string>

namespace facepuppet {
namespace flow {

/// Float-grid container with (dx, dy, 0, 1) per pixel.
void save_flow_grid(const WarpField& field, const std::string& path);
WarpField load_flow_grid(const std::string& path);

/**
 * Colour-wheel visualisation: hue encodes direction, saturation the length
 * relative to `max_magnitude` (default: the largest length in the field).
 */
Image flow_to_color(const WarpField& field, std::optional<double> max_magnitude = std::nullopt);

} /* namespace flow */
} /* namespace facepuppet */

#endif /* FACEPUPPET_FLOW_FLOW_IO_HPP */
