/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: src/core/image.cpp
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
#include "facepuppet/core/image.hpp"
#include "facepuppet/core/error.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace facepuppet {

Image::Image(int width, int height, int channels, float fill)
    : width_(width), height_(height), channels_(channels)
{
    if (width <= 0 || height <= 0 || channels < 1 || channels > 4)
    {
        throw InputError("Image: invalid dimensions " + std::to_string(width) + "x" + std::to_string(height) +
                         "x" + std::to_string(channels));
    }
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

Image::Image(int width, int height, int channels, std::vector<float> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data))
{
    if (width <= 0 || height <= 0 || channels < 1 || channels > 4)
    {
        throw InputError("Image: invalid dimensions");
    }
    if (data_.size() != static_cast<std::size_t>(width) * height * channels)
    {
        throw InputError("Image: buffer size does not match dimensions");
    }
    if (!all_finite())
    {
        throw InputError("Image: non-finite pixel value");
    }
}

float Image::sample(double x, double y, int c) const noexcept
{
    x = std::clamp(x, 0.0, static_cast<double>(width_ - 1));
    y = std::clamp(y, 0.0, static_cast<double>(height_ - 1));
    const int x0 = std::min(static_cast<int>(x), width_ - 1);
    const int y0 = std::min(static_cast<int>(y), height_ - 1);
    const int x1 = std::min(x0 + 1, width_ - 1);
    const int y1 = std::min(y0 + 1, height_ - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    const double top = (1.0 - fx) * at(x0, y0, c) + fx * at(x1, y0, c);
    const double bottom = (1.0 - fx) * at(x0, y1, c) + fx * at(x1, y1, c);
    return static_cast<float>((1.0 - fy) * top + fy * bottom);
}

bool Image::all_finite() const noexcept
{
    return std::all_of(data_.begin(), data_.end(), [](float v) { return std::isfinite(v); });
}

FaceImage::FaceImage(Image rgb) : rgb_(std::move(rgb))
{
    if (rgb_.channels() != 3)
    {
        throw InputError("FaceImage: expected 3 channels, got " + std::to_string(rgb_.channels()));
    }
    if (rgb_.width() < min_size || rgb_.height() < min_size)
    {
        throw InputError("FaceImage: image is smaller than 16x16");
    }
    if (!rgb_.all_finite())
    {
        throw InputError("FaceImage: non-finite pixel value");
    }
}

Image luminance(const Image& rgb)
{
    if (rgb.channels() == 1)
    {
        return rgb;
    }
    Image gray(rgb.width(), rgb.height(), 1);
    for (int y = 0; y < rgb.height(); ++y)
    {
        for (int x = 0; x < rgb.width(); ++x)
        {
            gray.at(x, y, 0) = 0.299f * rgb.at(x, y, 0) + 0.587f * rgb.at(x, y, 1) + 0.114f * rgb.at(x, y, 2);
        }
    }
    return gray;
}

Image mean_image(std::span<const Image> images)
{
    if (images.empty())
    {
        throw InputError("mean_image: no images");
    }
    const Image& first = images.front();
    std::vector<double> sum(first.data().size(), 0.0);
    for (const Image& image : images)
    {
        if (image.width() != first.width() || image.height() != first.height() ||
            image.channels() != first.channels())
        {
            throw InputError("mean_image: image dimensions differ");
        }
        const auto values = image.data();
        for (std::size_t i = 0; i < values.size(); ++i)
        {
            sum[i] += values[i];
        }
    }
    Image mean(first.width(), first.height(), first.channels());
    auto out = mean.data();
    for (std::size_t i = 0; i < out.size(); ++i)
    {
        out[i] = static_cast<float>(sum[i] / static_cast<double>(images.size()));
    }
    return mean;
}

static void require_same_shape(const Image& a, const Image& b, const char* what)
{
    if (a.width() != b.width() || a.height() != b.height() || a.channels() != b.channels())
    {
        throw InputError(std::string(what) + ": image shapes differ");
    }
}

double psnr(const Image& a, const Image& b)
{
    require_same_shape(a, b, "psnr");
    double sse = 0.0;
    const auto va = a.data();
    const auto vb = b.data();
    for (std::size_t i = 0; i < va.size(); ++i)
    {
        const double d = static_cast<double>(va[i]) - vb[i];
        sse += d * d;
    }
    const double mse = sse / static_cast<double>(va.size());
    if (mse == 0.0)
    {
        return std::numeric_limits<double>::infinity();
    }
    return 10.0 * std::log10(1.0 / mse);
}

double max_abs_difference(const Image& a, const Image& b)
{
    require_same_shape(a, b, "max_abs_difference");
    double worst = 0.0;
    const auto va = a.data();
    const auto vb = b.data();
    for (std::size_t i = 0; i < va.size(); ++i)
    {
        worst = std::max(worst, std::abs(static_cast<double>(va[i]) - vb[i]));
    }
    return worst;
}

FaceImage load_png(const std::string& path)
{
    cv::Mat raw = cv::imread(path, cv::IMREAD_ANYDEPTH | cv::IMREAD_COLOR);
    if (raw.empty())
    {
        throw InputError("cannot read image: " + path);
    }
    const double scale = raw.depth() == CV_16U ? 65535.0 : 255.0;
    cv::Mat converted;
    raw.convertTo(converted, CV_32F, 1.0 / scale);
    std::vector<float> rgb(static_cast<std::size_t>(converted.rows) * converted.cols * 3);
    for (int y = 0; y < converted.rows; ++y)
    {
        const auto* row = converted.ptr<cv::Vec3f>(y);
        for (int x = 0; x < converted.cols; ++x)
        {
            const std::size_t base = (static_cast<std::size_t>(y) * converted.cols + x) * 3;
            // OpenCV stores BGR.
            rgb[base + 0] = row[x][2];
            rgb[base + 1] = row[x][1];
            rgb[base + 2] = row[x][0];
        }
    }
    return FaceImage(Image(converted.cols, converted.rows, 3, std::move(rgb)));
}

void save_png(const Image& image, const std::string& path)
{
    if (image.channels() != 1 && image.channels() != 3)
    {
        throw InputError("save_png: only 1- or 3-channel images are supported");
    }
    cv::Mat out(image.height(), image.width(), image.channels() == 1 ? CV_8UC1 : CV_8UC3);
    auto to_byte = [](float v) {
        return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
    };
    for (int y = 0; y < image.height(); ++y)
    {
        auto* row = out.ptr<unsigned char>(y);
        for (int x = 0; x < image.width(); ++x)
        {
            if (image.channels() == 1)
            {
                row[x] = to_byte(image.at(x, y, 0));
            }
            else
            {
                row[3 * x + 0] = to_byte(image.at(x, y, 2));
                row[3 * x + 1] = to_byte(image.at(x, y, 1));
                row[3 * x + 2] = to_byte(image.at(x, y, 0));
            }
        }
    }
    if (!cv::imwrite(path, out))
    {
        throw InputError("cannot write image: " + path);
    }
}

} /* namespace facepuppet */
