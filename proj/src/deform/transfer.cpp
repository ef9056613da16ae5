/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: src/deform/transfer.cpp
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
#include "facepuppet/deform/transfer.hpp"
#include "facepuppet/core/error.hpp"
#include "facepuppet/core/parallel.hpp"
#include "facepuppet/deform/vertex_index.hpp"

#include <chrono>
#include <cmath>

namespace facepuppet {
namespace deform {

namespace {

// Search radius (grid pixels) when snapping a mapped location to a valid vertex.
constexpr int snap_radius = 2;

std::optional<std::size_t> nearest_valid_vertex(const VectorGrid& grid, const Eigen::Vector2d& p)
{
    if (!(p.x() >= -0.5 && p.y() >= -0.5 && p.x() <= grid.width() - 0.5 && p.y() <= grid.height() - 0.5))
    {
        return std::nullopt;
    }
    const int cx = static_cast<int>(std::lround(p.x()));
    const int cy = static_cast<int>(std::lround(p.y()));
    double best = std::numeric_limits<double>::infinity();
    std::optional<std::size_t> found;
    for (int y = cy - snap_radius; y <= cy + snap_radius; ++y)
    {
        for (int x = cx - snap_radius; x <= cx + snap_radius; ++x)
        {
            if (x < 0 || y < 0 || x >= grid.width() || y >= grid.height() || !grid.valid(x, y))
            {
                continue;
            }
            const double d = (Eigen::Vector2d(x, y) - p).squaredNorm();
            if (d < best)
            {
                best = d;
                found = grid.index(x, y);
            }
        }
    }
    return found;
}

void check_grid(const VectorGrid& a, const VectorGrid& b, const char* what)
{
    if (a.width() != b.width() || a.height() != b.height())
    {
        throw InputError(std::string("transfer_deformation: ") + what + " grid dimensions differ");
    }
}

double elapsed_ms(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

Correspondence Correspondence::identity(int width, int height)
{
    return Correspondence{WarpField::zero(width, height), WarpField::zero(width, height), "identity"};
}

Correspondence cross_identity_correspondence(const Image& driver_average, const Image& puppet_average,
                                             const flow::AppearanceSubspace& driver_space,
                                             const flow::AppearanceSubspace& puppet_space,
                                             const flow::FlowParams& params)
{
    if (driver_average.width() != puppet_average.width() || driver_average.height() != puppet_average.height())
    {
        throw InputError("cross_identity_correspondence: canonical grids differ");
    }
    const Image puppet_as_driver = flow::project(puppet_average, driver_space);
    const Image driver_in_driver = flow::project(driver_average, driver_space);
    const Image driver_as_puppet = flow::project(driver_average, puppet_space);
    const Image puppet_in_puppet = flow::project(puppet_average, puppet_space);
    Correspondence c;
    c.forward = flow::compute_flow(puppet_as_driver, driver_in_driver, params);
    c.inverse = flow::compute_flow(driver_as_puppet, puppet_in_puppet, params);
    c.provenance = "flow between averages projected onto the driver subspace (forward) and the puppet subspace "
                   "(inverse)";
    return c;
}

WarpField round_trip_residual(const Correspondence& correspondence)
{
    return compose(correspondence.forward, correspondence.inverse);
}

double round_trip_rms(const Correspondence& correspondence, const std::vector<std::uint8_t>& mask)
{
    const WarpField residual = round_trip_residual(correspondence);
    double sum = 0.0;
    std::size_t count = 0;
    for (int y = 0; y < residual.height(); ++y)
    {
        for (int x = 0; x < residual.width(); ++x)
        {
            if (!mask.empty() && !mask[static_cast<std::size_t>(y) * residual.width() + x])
            {
                continue;
            }
            sum += residual.at(x, y).cast<double>().squaredNorm();
            ++count;
        }
    }
    return count ? std::sqrt(sum / count) : 0.0;
}

DepthMesh transfer_deformation(const DepthMesh& driver_frame, const DepthMesh& driver_average,
                               const DepthMesh& puppet_average, const Correspondence& correspondence,
                               const denoise::DenoiseParams& denoise_params, TransferReport* report)
{
    const auto start = std::chrono::steady_clock::now();
    check_grid(driver_frame, driver_average, "driver frame and driver average");
    const int dw = driver_average.width();
    const int dh = driver_average.height();
    const int pw = puppet_average.width();
    const int ph = puppet_average.height();
    if (correspondence.forward.width() != dw || correspondence.forward.height() != dh ||
        correspondence.inverse.width() != pw || correspondence.inverse.height() != ph)
    {
        throw InputError("transfer_deformation: correspondence does not match the mesh grids");
    }

    const VertexIndex index(driver_average);
    const std::size_t n = puppet_average.size();
    enum class State : std::uint8_t { unmatched, pass_through, moved };
    std::vector<State> state(n, State::unmatched);
    std::vector<Eigen::Vector3d> direction(n, Eigen::Vector3d::Zero());
    std::vector<double> magnitude(n, 0.0);

    parallel_for(0, ph, [&](int qv) {
        for (int qu = 0; qu < pw; ++qu)
        {
            const std::size_t q = puppet_average.index(qu, qv);
            if (!puppet_average.mask()[q])
            {
                continue;
            }
            const Eigen::Vector2f to_driver = correspondence.inverse.at(qu, qv);
            const auto uv = nearest_valid_vertex(driver_average, Eigen::Vector2d(qu + to_driver.x(), qv + to_driver.y()));
            if (!uv || !driver_frame.mask()[*uv])
            {
                continue;
            }
            const Eigen::Vector3d delta = driver_frame.values()[*uv] - driver_average.values()[*uv];
            const double length = delta.norm();
            if (!(length >= pass_through_threshold))
            {
                state[q] = State::pass_through;
                continue;
            }
            const auto st = index.nearest(driver_average.values()[*uv] + delta);
            if (!st)
            {
                continue;
            }
            const int s = static_cast<int>(*st % dw);
            const int t = static_cast<int>(*st / dw);
            const Eigen::Vector2f to_puppet = correspondence.forward.at(s, t);
            const auto st_puppet = nearest_valid_vertex(puppet_average, Eigen::Vector2d(s + to_puppet.x(), t + to_puppet.y()));
            if (!st_puppet)
            {
                continue;
            }
            const Eigen::Vector3d unit = delta / length;
            const Eigen::Vector3d delta_puppet = puppet_average.values()[*st_puppet] - puppet_average.values()[q];
            state[q] = State::moved;
            direction[q] = unit;
            magnitude[q] = unit.dot(delta_puppet);
        }
    });

    std::vector<std::uint8_t> domain(n, 0);
    for (std::size_t i = 0; i < n; ++i)
    {
        domain[i] = state[i] != State::unmatched;
    }
    TransferReport local;
    for (State s : state)
    {
        local.moved += s == State::moved;
        local.pass_through += s == State::pass_through;
    }
    local.unmatched = puppet_average.valid_count() - local.moved - local.pass_through;

    std::vector<double> smoothed = magnitude;
    const double before_denoise = elapsed_ms(start);
    const auto denoise_start = std::chrono::steady_clock::now();
    if (local.moved > 0)
    {
        const denoise::ScalarField f(pw, ph, magnitude, domain);
        smoothed = denoise::rof_huber_denoise(f, denoise_params, &local.denoise).values;
    }
    local.denoise_ms = elapsed_ms(denoise_start);

    const auto assemble_start = std::chrono::steady_clock::now();
    std::vector<Eigen::Vector3d> vertices = puppet_average.values();
    for (std::size_t i = 0; i < n; ++i)
    {
        if (state[i] == State::moved)
        {
            vertices[i] += direction[i] * smoothed[i];
        }
    }
    DepthMesh out(pw, ph, std::move(vertices), std::move(domain));
    local.transfer_ms = before_denoise + elapsed_ms(assemble_start);
    if (report)
    {
        *report = local;
    }
    return out;
}

DepthMesh frame_from_flow(const DepthMesh& driver_average, const WarpField& motion)
{
    if (motion.width() != driver_average.width() || motion.height() != driver_average.height())
    {
        throw InputError("frame_from_flow: motion field does not match the mesh grid");
    }
    std::vector<Eigen::Vector3d> vertices = driver_average.values();
    for (int v = 0; v < driver_average.height(); ++v)
    {
        for (int u = 0; u < driver_average.width(); ++u)
        {
            if (!driver_average.valid(u, v))
            {
                continue;
            }
            const Eigen::Vector2f m = motion.at(u, v);
            if (const auto moved = driver_average.sample(u - m.x(), v - m.y()))
            {
                vertices[driver_average.index(u, v)] = *moved;
            }
        }
    }
    return DepthMesh(driver_average.width(), driver_average.height(), std::move(vertices), driver_average.mask());
}

FiducialSet frame_fiducials(const DepthMesh& frame, const DepthMesh& average, const FiducialSet& average_fiducials)
{
    check_grid(frame, average, "frame and average");
    std::array<Eigen::Vector2d, FiducialSet::count> points;
    for (int i = 0; i < FiducialSet::count; ++i)
    {
        const Eigen::Vector2d& g = average_fiducials[i];
        points[i] = g;
        const auto a = average.sample(g.x(), g.y());
        const auto f = frame.sample(g.x(), g.y());
        if (a && f)
        {
            const Eigen::Vector3d delta = *f - *a;
            points[i] += Eigen::Vector2d(delta.x(), -delta.y());
        }
    }
    return FiducialSet(points);
}

FiducialSet driver_to_puppet(const FiducialSet& fiducials, const Correspondence& correspondence)
{
    std::array<Eigen::Vector2d, FiducialSet::count> points;
    for (int i = 0; i < FiducialSet::count; ++i)
    {
        const Eigen::Vector2d& q = fiducials[i];
        points[i] = q + correspondence.forward.sample(q.x(), q.y()).cast<double>();
    }
    return FiducialSet(points);
}

} /* namespace deform */
} /* namespace facepuppet */
