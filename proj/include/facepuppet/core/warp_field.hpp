/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: include/facepuppet/core/warp_field.hpp
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

#ifndef FACEPUPPET_CORE_WARP_FIELD_HPP
#define FACEPUPPET_CORE_WARP_FIELD_HPP

#include "Eigen/Core"

#include <span>
#include <vector>

namespace facepuppet {

/**
 * Dense backward-mapping displacement field.
 *
 * Output pixel p samples the input at p + displacement(p). Entries are
 * stored interleaved (dx, dy) in row-major order.
 */
class WarpField
{
public:
    WarpField() = default;
    /// Throws InputError on size mismatch or non-finite entries.
    WarpField(int width, int height, std::vector<float> displacement);

    static WarpField zero(int width, int height);
    static WarpField constant(int width, int height, Eigen::Vector2f offset);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool empty() const noexcept { return data_.empty(); }

    Eigen::Vector2f at(int x, int y) const noexcept
    {
        const std::size_t i = 2 * (static_cast<std::size_t>(y) * width_ + x);
        return {data_[i], data_[i + 1]};
    }

    /// Bilinear sample with clamp-to-edge borders.
    Eigen::Vector2f sample(double x, double y) const noexcept;

    std::span<const float> data() const noexcept { return data_; }

    /// Root mean square displacement length.
    double rms_magnitude() const noexcept;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<float> data_;
};

/**
 * Composition of two backward warps: applying f_ab then f_bc to an image.
 * Result(p) = f_bc(p) + f_ab(p + f_bc(p)), with f_ab sampled bilinearly.
 */
WarpField compose(const WarpField& f_ab, const WarpField& f_bc);

/// RMS difference between two fields, optionally ignoring a border of `margin` pixels.
double rms_difference(const WarpField& a, const WarpField& b, int margin = 0);

} /* namespace facepuppet */

#endif /* FACEPUPPET_CORE_WARP_FIELD_HPP */
