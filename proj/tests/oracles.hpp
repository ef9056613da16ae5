/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: tests/oracles.hpp
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

#ifndef FACEPUPPET_TESTS_ORACLES_HPP
#define FACEPUPPET_TESTS_ORACLES_HPP

// Reference computations and fixtures shared by the unit suites and the
// acceptance run. Nothing here calls the code it is used to check.

#include "facepuppet/core/depth_mesh.hpp"
#include "facepuppet/core/fiducials.hpp"
#include "facepuppet/core/image.hpp"
#include "facepuppet/core/warp_field.hpp"
#include "facepuppet/denoise/rof_huber.hpp"
#include "facepuppet/synth/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace facepuppet {
namespace testing {

// Denoising.

inline double huber_oracle(double r, double eps)
{
    return r < eps ? r * r / (2.0 * eps) : r - eps / 2.0;
}

/// Forward differences (zero where a neighbour is missing or invalid).
inline void forward_gradient(const denoise::ScalarField& f, const std::vector<double>& x, std::size_t i, int u, int v,
                             double& gx, double& gy)
{
    gx = 0.0;
    gy = 0.0;
    if (u + 1 < f.width && f.valid[i] && f.valid[i + 1])
    {
        gx = x[i + 1] - x[i];
    }
    if (v + 1 < f.height && f.valid[i] && f.valid[i + f.width])
    {
        gy = x[i + f.width] - x[i];
    }
}

inline double energy_oracle(const denoise::ScalarField& f, const std::vector<double>& x, double w, double eps)
{
    double e = 0.0;
    for (int v = 0; v < f.height; ++v)
    {
        for (int u = 0; u < f.width; ++u)
        {
            const std::size_t i = f.index(u, v);
            if (!f.valid[i])
            {
                continue;
            }
            double gx = 0.0;
            double gy = 0.0;
            forward_gradient(f, x, i, u, v, gx, gy);
            e += 0.5 * (x[i] - f.values[i]) * (x[i] - f.values[i]) + w * huber_oracle(std::hypot(gx, gy), eps);
        }
    }
    return e;
}

/// Plain gradient descent with step 1/L, L = 1 + 8 w / eps, run to convergence.
inline std::vector<double> gradient_descent_oracle(const denoise::ScalarField& f, double w, double eps, int iterations)
{
    std::vector<double> x = f.values;
    const double step = 1.0 / (1.0 + 8.0 * w / eps);
    std::vector<double> g(x.size());
    for (int it = 0; it < iterations; ++it)
    {
        std::fill(g.begin(), g.end(), 0.0);
        for (int v = 0; v < f.height; ++v)
        {
            for (int u = 0; u < f.width; ++u)
            {
                const std::size_t i = f.index(u, v);
                if (!f.valid[i])
                {
                    continue;
                }
                g[i] += x[i] - f.values[i];
                double gx = 0.0;
                double gy = 0.0;
                forward_gradient(f, x, i, u, v, gx, gy);
                const double r = std::hypot(gx, gy);
                const double s = w * (r < eps ? 1.0 / eps : 1.0 / r);
                if (gx != 0.0)
                {
                    g[i + 1] += s * gx;
                    g[i] -= s * gx;
                }
                if (gy != 0.0)
                {
                    g[i + f.width] += s * gy;
                    g[i] -= s * gy;
                }
            }
        }
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            if (f.valid[i])
            {
                x[i] -= step * g[i];
            }
        }
    }
    return x;
}

/// Five noisy 32x28 test fields: step, ramp, wave, masked disc, pure noise.
inline denoise::ScalarField noisy_field(int kind, std::uint32_t seed)
{
    const int w = 32;
    const int h = 28;
    std::mt19937 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.15);
    std::vector<double> values(w * h);
    std::vector<std::uint8_t> valid(w * h, 1);
    for (int v = 0; v < h; ++v)
    {
        for (int u = 0; u < w; ++u)
        {
            double base = 0.0;
            switch (kind)
            {
            case 0: base = u < w / 2 ? 0.0 : 1.0; break;
            case 1: base = 0.05 * u - 0.03 * v; break;
            case 2: base = std::sin(0.4 * u) * std::cos(0.3 * v); break;
            case 3: base = (u - 16) * (u - 16) + (v - 14) * (v - 14) < 80 ? 2.0 : -1.0; break;
            default: base = 0.0; break;
            }
            values[v * w + u] = base + noise(rng);
            // The disc also has a hole and a ragged border, like a mesh mask.
            if (kind == 3 && ((u > 20 && u < 25 && v > 5 && v < 12) || u + v < 6))
            {
                valid[v * w + u] = 0;
            }
        }
    }
    return denoise::ScalarField(w, h, values, valid);
}

// Deformation.

/// Slides the surface along itself: a Gaussian bump of amplitude amp (grid rows) in v.
inline DepthMesh slide(const DepthMesh& m, double amp, double cx, double cy, double radius)
{
    std::vector<Eigen::Vector3d> values = m.values();
    for (int v = 0; v < m.height(); ++v)
    {
        for (int u = 0; u < m.width(); ++u)
        {
            if (!m.valid(u, v))
            {
                continue;
            }
            const double g = amp * std::exp(-((u - cx) * (u - cx) + (v - cy) * (v - cy)) / (2.0 * radius * radius));
            if (const auto s = m.sample(u, v + g))
            {
                values[m.index(u, v)] = *s;
            }
        }
    }
    return DepthMesh(m.width(), m.height(), values, m.mask());
}

/// A jaw-drop sized slide (peak about 14 units on a 194x244 grid).
inline DepthMesh jaw_drop(const DepthMesh& m, double amplitude = 14.0)
{
    const double s = m.width() / 194.0;
    return slide(m, amplitude * s, m.width() / 2.0, 0.7 * m.height(), 25.0 * s);
}

inline DepthMesh scaled(const DepthMesh& m, double s)
{
    std::vector<Eigen::Vector3d> values = m.values();
    for (auto& p : values)
    {
        p *= s;
    }
    return DepthMesh(m.width(), m.height(), values, m.mask());
}

inline double peak_displacement(const DepthMesh& frame, const DepthMesh& average)
{
    double peak = 0.0;
    for (std::size_t i = 0; i < average.size(); ++i)
    {
        if (average.mask()[i])
        {
            peak = std::max(peak, (frame.values()[i] - average.values()[i]).norm());
        }
    }
    return peak;
}

// Images.

/// A colour image: constant colour plus fine detail from a noise pattern.
inline Image detailed(int w, int h, std::array<float, 3> colour, std::uint32_t seed, double feature, double amplitude)
{
    const Image n = synth::noise_texture(w, h, seed, feature);
    Image out(w, h, 3);
    for (int y = 0; y < h; ++y)
    {
        for (int x = 0; x < w; ++x)
        {
            for (int c = 0; c < 3; ++c)
            {
                out.at(x, y, c) = colour[c] + static_cast<float>(amplitude * (n.at(x, y, 0) - 0.5));
            }
        }
    }
    return out;
}

inline FiducialSet shifted(const FiducialSet& f, double dx, double dy)
{
    std::array<Eigen::Vector2d, FiducialSet::count> p;
    for (int i = 0; i < FiducialSet::count; ++i)
    {
        p[i] = f[i] + Eigen::Vector2d(dx, dy);
    }
    return FiducialSet(p);
}

inline double correlation(std::span<const float> a, std::span<const float> b)
{
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double ab = 0.0;
    double aa = 0.0;
    double bb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        ab += (a[i] - ma) * (b[i] - mb);
        aa += (a[i] - ma) * (a[i] - ma);
        bb += (b[i] - mb) * (b[i] - mb);
    }
    return ab / std::sqrt(aa * bb);
}

inline double channel_mean(const Image& image, int c)
{
    double s = 0.0;
    for (int y = 0; y < image.height(); ++y)
    {
        for (int x = 0; x < image.width(); ++x)
        {
            s += image.at(x, y, c);
        }
    }
    return s / static_cast<double>(image.pixel_count());
}

// Flow.

/// Band-limited flow test texture; feature size 8 px keeps it well sampled.
inline constexpr double flow_feature_size = 8.0;

inline double median_endpoint_error(const WarpField& f, const Eigen::Vector2f& truth)
{
    std::vector<double> e;
    for (int y = 0; y < f.height(); ++y)
    {
        for (int x = 0; x < f.width(); ++x)
        {
            e.push_back((f.at(x, y) - truth).norm());
        }
    }
    std::nth_element(e.begin(), e.begin() + e.size() / 2, e.end());
    return e[e.size() / 2];
}

/// Source and a target translated by `shift`: target(p) = source(p - shift), so the flow is -shift.
inline std::pair<Image, Image> translated_pair(int size, std::uint32_t seed, const Eigen::Vector2d& shift)
{
    return {synth::noise_texture(size, size, seed, flow_feature_size),
            synth::noise_texture(size, size, seed, flow_feature_size, 1, -shift)};
}

} /* namespace testing */
} /* namespace facepuppet */

#endif /* FACEPUPPET_TESTS_ORACLES_HPP */
