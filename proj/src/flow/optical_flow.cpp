/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: src/flow/optical_flow.cpp
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
#include "facepuppet/flow/optical_flow.hpp"
#include "facepuppet/core/error.hpp"
#include "facepuppet/core/parallel.hpp"
#include "facepuppet/flow/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace facepuppet {
namespace flow {

namespace {

constexpr double epsilon_squared = 1e-6; // Charbonnier epsilon 1e-3
constexpr double gamma = 1.0;            // gradient constancy weight
constexpr double omega = 1.9;            // over-relaxation
constexpr int max_backtracking = 4;      // step sizes 1, 1/2, ..., 1/16

double psi(double s) { return std::sqrt(s + epsilon_squared); }
double psi_prime(double s) { return 0.5 / std::sqrt(s + epsilon_squared); }

struct Plane
{
    int w = 0;
    int h = 0;
    std::vector<float> v;

    Plane() = default;
    Plane(int width, int height, float fill = 0.0f)
        : w(width), h(height), v(static_cast<std::size_t>(width) * height, fill)
    {
    }
    float& at(int x, int y) { return v[static_cast<std::size_t>(y) * w + x]; }
    float at(int x, int y) const { return v[static_cast<std::size_t>(y) * w + x]; }
    float clamped(int x, int y) const { return at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1)); }
    float sample(double x, double y) const
    {
        x = std::clamp(x, 0.0, static_cast<double>(w - 1));
        y = std::clamp(y, 0.0, static_cast<double>(h - 1));
        const int x0 = std::min(static_cast<int>(x), w - 2 < 0 ? 0 : w - 2);
        const int y0 = std::min(static_cast<int>(y), h - 2 < 0 ? 0 : h - 2);
        const int x1 = std::min(x0 + 1, w - 1);
        const int y1 = std::min(y0 + 1, h - 1);
        const double fx = x - x0;
        const double fy = y - y0;
        const double top = (1.0 - fx) * at(x0, y0) + fx * at(x1, y0);
        const double bottom = (1.0 - fx) * at(x0, y1) + fx * at(x1, y1);
        return static_cast<float>((1.0 - fy) * top + fy * bottom);
    }
    // Keys cubic convolution (a = -0.5), clamped borders.
    float sample_cubic(double x, double y) const
    {
        x = std::clamp(x, 0.0, static_cast<double>(w - 1));
        y = std::clamp(y, 0.0, static_cast<double>(h - 1));
        const int x0 = static_cast<int>(std::floor(x));
        const int y0 = static_cast<int>(std::floor(y));
        double wx[4];
        double wy[4];
        cubic_weights(x - x0, wx);
        cubic_weights(y - y0, wy);
        double acc = 0.0;
        for (int j = 0; j < 4; ++j)
        {
            double row = 0.0;
            for (int i = 0; i < 4; ++i)
            {
                row += wx[i] * clamped(x0 - 1 + i, y0 - 1 + j);
            }
            acc += wy[j] * row;
        }
        return static_cast<float>(acc);
    }
    static void cubic_weights(double t, double* k)
    {
        constexpr double a = -0.5;
        auto near = [](double d) { return ((a + 2.0) * d - (a + 3.0)) * d * d + 1.0; };
        auto far = [](double d) { return ((a * d - 5.0 * a) * d + 8.0 * a) * d - 4.0 * a; };
        k[0] = far(1.0 + t);
        k[1] = near(t);
        k[2] = near(1.0 - t);
        k[3] = far(2.0 - t);
    }
};

Plane gray_plane(const Image& image)
{
    Plane out(image.width(), image.height());
    if (image.channels() == 1)
    {
        std::copy(image.data().begin(), image.data().end(), out.v.begin());
    }
    else if (image.channels() == 3)
    {
        const Image gray = luminance(image);
        std::copy(gray.data().begin(), gray.data().end(), out.v.begin());
    }
    else
    {
        throw InputError("compute_flow: expected 1 or 3 channels");
    }
    return out;
}

Plane gaussian_blur(const Plane& in, double sigma)
{
    if (!(sigma > 0.0))
    {
        return in;
    }
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(2 * radius + 1);
    for (int i = -radius; i <= radius; ++i)
    {
        kernel[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    }
    const double sum = std::accumulate(kernel.begin(), kernel.end(), 0.0);
    for (double& k : kernel)
    {
        k /= sum;
    }
    Plane tmp(in.w, in.h);
    parallel_for(0, in.h, [&](int y) {
        for (int x = 0; x < in.w; ++x)
        {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
            {
                acc += kernel[i + radius] * in.clamped(x + i, y);
            }
            tmp.at(x, y) = static_cast<float>(acc);
        }
    });
    Plane out(in.w, in.h);
    parallel_for(0, in.h, [&](int y) {
        for (int x = 0; x < in.w; ++x)
        {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
            {
                acc += kernel[i + radius] * tmp.clamped(x, y + i);
            }
            out.at(x, y) = static_cast<float>(acc);
        }
    });
    return out;
}

// Bilinear resize with pixel centres aligned at half-pixel offsets.
Plane resize(const Plane& in, int w, int h)
{
    Plane out(w, h);
    const double sx = static_cast<double>(in.w) / w;
    const double sy = static_cast<double>(in.h) / h;
    parallel_for(0, h, [&](int y) {
        for (int x = 0; x < w; ++x)
        {
            out.at(x, y) = in.sample((x + 0.5) * sx - 0.5, (y + 0.5) * sy - 0.5);
        }
    });
    return out;
}

// Five-point central derivative [1, -8, 0, 8, -1] / 12 with clamped borders.
Plane derivative(const Plane& in, bool along_x)
{
    Plane out(in.w, in.h);
    parallel_for(0, in.h, [&](int y) {
        for (int x = 0; x < in.w; ++x)
        {
            auto f = [&](int d) { return along_x ? in.clamped(x + d, y) : in.clamped(x, y + d); };
            out.at(x, y) = static_cast<float>((f(-2) - 8.0 * f(-1) + 8.0 * f(1) - f(2)) / 12.0);
        }
    });
    return out;
}

Plane warp_plane(const Plane& in, const Plane& u, const Plane& v)
{
    Plane out(in.w, in.h);
    parallel_for(0, in.h, [&](int y) {
        for (int x = 0; x < in.w; ++x)
        {
            out.at(x, y) = in.sample_cubic(x + u.at(x, y), y + v.at(x, y));
        }
    });
    return out;
}

double sum_rows(const std::vector<double>& rows)
{
    double total = 0.0;
    for (double r : rows)
    {
        total += r;
    }
    return total;
}

struct Level
{
    Plane target; // I1: the frame the field lives on
    Plane source; // I2: sampled at p + w
    Plane target_dx, target_dy;
};

double level_energy(const Level& level, const Plane& u, const Plane& v, double alpha)
{
    const Plane warped = warp_plane(level.source, u, v);
    const Plane wx = derivative(warped, true);
    const Plane wy = derivative(warped, false);
    const int w = u.w;
    const int h = u.h;
    std::vector<double> rows(h, 0.0);
    parallel_for(0, h, [&](int y) {
        double acc = 0.0;
        for (int x = 0; x < w; ++x)
        {
            const double dt = warped.at(x, y) - level.target.at(x, y);
            const double gx = wx.at(x, y) - level.target_dx.at(x, y);
            const double gy = wy.at(x, y) - level.target_dy.at(x, y);
            const double ux = x + 1 < w ? u.at(x + 1, y) - u.at(x, y) : 0.0;
            const double uy = y + 1 < h ? u.at(x, y + 1) - u.at(x, y) : 0.0;
            const double vx = x + 1 < w ? v.at(x + 1, y) - v.at(x, y) : 0.0;
            const double vy = y + 1 < h ? v.at(x, y + 1) - v.at(x, y) : 0.0;
            acc += psi(dt * dt) + gamma * psi(gx * gx + gy * gy) + alpha * psi(ux * ux + uy * uy + vx * vx + vy * vy);
        }
        rows[y] = acc;
    });
    return sum_rows(rows);
}

// One outer iteration: linearise at (u, v), solve for the increment, backtrack.
void outer_iteration(const Level& level, Plane& u, Plane& v, double& energy, const FlowParams& params)
{
    const int w = u.w;
    const int h = u.h;
    const Plane warped = warp_plane(level.source, u, v);
    Plane blend(w, h);
    Plane It(w, h);
    for (std::size_t i = 0; i < blend.v.size(); ++i)
    {
        blend.v[i] = 0.5f * (level.target.v[i] + warped.v[i]);
        It.v[i] = warped.v[i] - level.target.v[i];
    }
    const Plane Ix = derivative(blend, true);
    const Plane Iy = derivative(blend, false);
    const Plane Ixx = derivative(Ix, true);
    const Plane Ixy = derivative(Ix, false);
    const Plane Iyy = derivative(Iy, false);
    const Plane Ixt = derivative(It, true);
    const Plane Iyt = derivative(It, false);

    Plane du(w, h);
    Plane dv(w, h);
    Plane phi_s(w, h);
    std::vector<double> A11(u.v.size()), A12(u.v.size()), A22(u.v.size()), b1(u.v.size()), b2(u.v.size());

    for (int inner = 0; inner < params.inner_iterations; ++inner)
    {
        parallel_for(0, h, [&](int y) {
            for (int x = 0; x < w; ++x)
            {
                const std::size_t i = static_cast<std::size_t>(y) * w + x;
                const double ix = Ix.v[i], iy = Iy.v[i], it = It.v[i];
                const double ixx = Ixx.v[i], ixy = Ixy.v[i], iyy = Iyy.v[i];
                const double ixt = Ixt.v[i], iyt = Iyt.v[i];
                const double bc = it + ix * du.v[i] + iy * dv.v[i];
                const double gcx = ixt + ixx * du.v[i] + ixy * dv.v[i];
                const double gcy = iyt + ixy * du.v[i] + iyy * dv.v[i];
                const double phi_d = psi_prime(bc * bc);
                const double phi_g = gamma * psi_prime(gcx * gcx + gcy * gcy);
                A11[i] = phi_d * ix * ix + phi_g * (ixx * ixx + ixy * ixy);
                A12[i] = phi_d * ix * iy + phi_g * (ixx * ixy + ixy * iyy);
                A22[i] = phi_d * iy * iy + phi_g * (ixy * ixy + iyy * iyy);
                b1[i] = -(phi_d * ix * it + phi_g * (ixx * ixt + ixy * iyt));
                b2[i] = -(phi_d * iy * it + phi_g * (ixy * ixt + iyy * iyt));

                auto diff = [&](const Plane& a, const Plane& d, int dx, int dy) -> double {
                    const int xn = x + dx;
                    const int yn = y + dy;
                    if (xn >= w || yn >= h)
                    {
                        return 0.0;
                    }
                    return (a.at(xn, yn) + d.at(xn, yn)) - (a.at(x, y) + d.at(x, y));
                };
                const double ux = diff(u, du, 1, 0), uy = diff(u, du, 0, 1);
                const double vx = diff(v, dv, 1, 0), vy = diff(v, dv, 0, 1);
                phi_s.v[i] = static_cast<float>(params.alpha * psi_prime(ux * ux + uy * uy + vx * vx + vy * vy));
            }
        });

        // Red-black SOR: pixels of one colour depend only on the other colour.
        for (int sweep = 0; sweep < params.sor_iterations; ++sweep)
        {
            for (int colour = 0; colour < 2; ++colour)
            {
                parallel_for(0, h, [&](int y) {
                    for (int x = (y + colour) % 2; x < w; x += 2)
                    {
                        const std::size_t i = static_cast<std::size_t>(y) * w + x;
                        double weight_sum = 0.0;
                        double su = 0.0; // sum w_n ((u_n + du_n) - u_p)
                        double sv = 0.0;
                        auto neighbour = [&](int xn, int yn, double weight) {
                            if (weight == 0.0)
                            {
                                return;
                            }
                            weight_sum += weight;
                            su += weight * (u.at(xn, yn) + du.at(xn, yn) - u.at(x, y));
                            sv += weight * (v.at(xn, yn) + dv.at(xn, yn) - v.at(x, y));
                        };
                        if (x + 1 < w)
                        {
                            neighbour(x + 1, y, phi_s.at(x, y));
                        }
                        if (x > 0)
                        {
                            neighbour(x - 1, y, phi_s.at(x - 1, y));
                        }
                        if (y + 1 < h)
                        {
                            neighbour(x, y + 1, phi_s.at(x, y));
                        }
                        if (y > 0)
                        {
                            neighbour(x, y - 1, phi_s.at(x, y - 1));
                        }
                        const double denom_u = A11[i] + weight_sum;
                        if (denom_u > 1e-12)
                        {
                            const double target_u = (b1[i] + su - A12[i] * dv.v[i]) / denom_u;
                            du.v[i] = static_cast<float>((1.0 - omega) * du.v[i] + omega * target_u);
                        }
                        const double denom_v = A22[i] + weight_sum;
                        if (denom_v > 1e-12)
                        {
                            const double target_v = (b2[i] + sv - A12[i] * du.v[i]) / denom_v;
                            dv.v[i] = static_cast<float>((1.0 - omega) * dv.v[i] + omega * target_v);
                        }
                    }
                });
            }
        }
    }

    double step = 1.0;
    for (int attempt = 0; attempt <= max_backtracking; ++attempt, step *= 0.5)
    {
        Plane u_new = u;
        Plane v_new = v;
        for (std::size_t i = 0; i < u.v.size(); ++i)
        {
            u_new.v[i] += static_cast<float>(step * du.v[i]);
            v_new.v[i] += static_cast<float>(step * dv.v[i]);
        }
        const double candidate = level_energy(level, u_new, v_new, params.alpha);
        if (candidate <= energy)
        {
            u = std::move(u_new);
            v = std::move(v_new);
            energy = candidate;
            return;
        }
    }
    // No descent along the increment: keep the current field.
}

Plane upsample_component(const Plane& coarse, int w, int h, double factor)
{
    Plane out = resize(coarse, w, h);
    for (float& x : out.v)
    {
        x = static_cast<float>(x * factor);
    }
    return out;
}

} // namespace

void FlowParams::validate() const
{
    if (!(ratio > 0.0 && ratio < 1.0))
    {
        throw InputError("FlowParams: ratio must lie in (0, 1)");
    }
    if (min_width < 8)
    {
        throw InputError("FlowParams: min_width must be at least 8");
    }
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
    {
        throw InputError("FlowParams: alpha must be non-negative");
    }
    if (outer_iterations < 1 || inner_iterations < 1 || sor_iterations < 1)
    {
        throw InputError("FlowParams: iteration counts must be at least 1");
    }
}

FlowResult compute_flow_with_trace(const Image& source, const Image& target, const FlowParams& params)
{
    params.validate();
    if (source.width() != target.width() || source.height() != target.height())
    {
        throw InputError("compute_flow: image dimensions differ");
    }
    if (std::min(source.width(), source.height()) < params.min_width)
    {
        throw InputError("compute_flow: image smaller than the minimum level width " +
                         std::to_string(params.min_width));
    }
    const Plane target_gray = gray_plane(target);
    const Plane source_gray = gray_plane(source);
    const int width = target_gray.w;
    const int height = target_gray.h;

    std::vector<std::pair<int, int>> sizes{{width, height}};
    for (double scale = params.ratio;; scale *= params.ratio)
    {
        const int w = static_cast<int>(std::lround(width * scale));
        const int h = static_cast<int>(std::lround(height * scale));
        if (std::min(w, h) < params.min_width)
        {
            break;
        }
        sizes.emplace_back(w, h);
    }

    FlowResult result;
    Plane u;
    Plane v;
    for (int k = static_cast<int>(sizes.size()) - 1; k >= 0; --k)
    {
        const auto [w, h] = sizes[k];
        Level level;
        if (k == 0)
        {
            level.target = target_gray;
            level.source = source_gray;
        }
        else
        {
            const double scale = static_cast<double>(w) / width;
            const double sigma = 0.5 * std::sqrt(1.0 / (scale * scale) - 1.0);
            level.target = resize(gaussian_blur(target_gray, sigma), w, h);
            level.source = resize(gaussian_blur(source_gray, sigma), w, h);
        }
        level.target_dx = derivative(level.target, true);
        level.target_dy = derivative(level.target, false);

        if (u.v.empty())
        {
            u = Plane(w, h);
            v = Plane(w, h);
        }
        else
        {
            const double fx = static_cast<double>(w) / u.w;
            const double fy = static_cast<double>(h) / u.h;
            u = upsample_component(u, w, h, fx);
            v = upsample_component(v, w, h, fy);
        }

        double energy = level_energy(level, u, v, params.alpha);
        std::vector<double> trace{energy};
        for (int outer = 0; outer < params.outer_iterations; ++outer)
        {
            outer_iteration(level, u, v, energy, params);
            trace.push_back(energy);
        }
        result.energy_trace.push_back(std::move(trace));
    }

    std::vector<float> data(2 * u.v.size());
    for (std::size_t i = 0; i < u.v.size(); ++i)
    {
        data[2 * i] = u.v[i];
        data[2 * i + 1] = v.v[i];
    }
    result.field = WarpField(width, height, std::move(data));
    return result;
}

double flow_energy(const Image& source, const Image& target, const WarpField& field, double alpha)
{
    if (source.width() != target.width() || source.height() != target.height() ||
        field.width() != source.width() || field.height() != source.height())
    {
        throw InputError("flow_energy: dimensions differ");
    }
    Level level;
    level.target = gray_plane(target);
    level.source = gray_plane(source);
    level.target_dx = derivative(level.target, true);
    level.target_dy = derivative(level.target, false);
    Plane u(field.width(), field.height());
    Plane v(field.width(), field.height());
    for (std::size_t i = 0; i < u.v.size(); ++i)
    {
        u.v[i] = field.data()[2 * i];
        v.v[i] = field.data()[2 * i + 1];
    }
    return level_energy(level, u, v, alpha);
}

std::vector<WarpField> align_via_subspace(std::span<const Image> images, const FlowParams& params)
{
    if (images.size() < static_cast<std::size_t>(default_subspace_rank) + 1)
    {
        throw InputError("align_via_subspace: need at least 5 images");
    }
    const AppearanceSubspace subspace = build_subspace(images, default_subspace_rank);
    std::vector<WarpField> fields(images.size());
    parallel_for(0, static_cast<int>(images.size()), [&](int i) {
        fields[i] = compute_flow(images[i], project(images[i], subspace), params);
    });
    return fields;
}

} /* namespace flow */
} /* namespace facepuppet */
