/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: include/facepuppet/core/image.hpp
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

#ifndef FACEPUPPET_CORE_IMAGE_HPP
#define FACEPUPPET_CORE_IMAGE_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace facepuppet {

/**
 * A dense, interleaved float image with 1..4 channels.
 *
 * This is the working buffer type used by the numerical modules (pyramid
 * levels, grayscale flow images, weight maps). Pixel (x, y) has its centre
 * at the continuous coordinate (x, y).
 */
class Image
{
public:
    Image() = default;
    Image(int width, int height, int channels, float fill = 0.0f);
    /// Throws InputError if the size does not match or a value is not finite.
    Image(int width, int height, int channels, std::vector<float> data);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int channels() const noexcept { return channels_; }
    std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(width_) * height_; }
    bool empty() const noexcept { return data_.empty(); }

    float& at(int x, int y, int c) noexcept { return data_[index(x, y, c)]; }
    float at(int x, int y, int c) const noexcept { return data_[index(x, y, c)]; }

    std::span<float> data() noexcept { return data_; }
    std::span<const float> data() const noexcept { return data_; }

    /// Bilinear sample with clamp-to-edge borders.
    float sample(double x, double y, int c) const noexcept;

    bool all_finite() const noexcept;

private:
    std::size_t index(int x, int y, int c) const noexcept
    {
        return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
    }

    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<float> data_;
};

/**
 * An RGB face photo in linear float values (nominally [0, 1]).
 *
 * Immutable after construction. At least 16x16 pixels, every value finite.
 */
class FaceImage
{
public:
    static constexpr int min_size = 16;

    /// Throws InputError if rgb is not a valid face image.
    explicit FaceImage(Image rgb);

    int width() const noexcept { return rgb_.width(); }
    int height() const noexcept { return rgb_.height(); }
    const Image& image() const noexcept { return rgb_; }
    operator const Image&() const noexcept { return rgb_; }

    float at(int x, int y, int c) const noexcept { return rgb_.at(x, y, c); }

private:
    Image rgb_;
};

/// Rec. 601 luma of an RGB image as a single-channel image.
Image luminance(const Image& rgb);

/// Per-pixel mean over equally sized images, accumulated in double precision.
Image mean_image(std::span<const Image> images);

/// Peak signal-to-noise ratio for signals with unit dynamic range.
double psnr(const Image& a, const Image& b);

/// Largest absolute per-value difference. Throws InputError on shape mismatch.
double max_abs_difference(const Image& a, const Image& b);

/**
 * Loads a PNG (8 or 16 bit, gray/RGB/RGBA) as RGB scaled to [0, 1].
 * Values are divided by the maximum code value; no gamma decoding is applied.
 */
FaceImage load_png(const std::string& path);

/// Writes 1- or 3-channel images as 8-bit PNG, clamping to [0, 1].
void save_png(const Image& image, const std::string& path);

} /* namespace facepuppet */

#endif /* FACEPUPPET_CORE_IMAGE_HPP */
