/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: src/deform/vertex_index.cpp
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
#include "facepuppet/deform/vertex_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace facepuppet {
namespace deform {

VertexIndex::VertexIndex(const DepthMesh& mesh) : mesh_(&mesh)
{
    std::vector<double> edges;
    Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
    Eigen::Vector3d hi = -lo;
    std::vector<std::uint32_t> valid;
    for (int v = 0; v < mesh.height(); ++v)
    {
        for (int u = 0; u < mesh.width(); ++u)
        {
            if (!mesh.valid(u, v))
            {
                continue;
            }
            const Eigen::Vector3d& p = mesh.at(u, v);
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
            valid.push_back(static_cast<std::uint32_t>(mesh.index(u, v)));
            if (u + 1 < mesh.width() && mesh.valid(u + 1, v))
            {
                edges.push_back((mesh.at(u + 1, v) - p).norm());
            }
            if (v + 1 < mesh.height() && mesh.valid(u, v + 1))
            {
                edges.push_back((mesh.at(u, v + 1) - p).norm());
            }
        }
    }
    if (valid.empty())
    {
        return;
    }
    if (!edges.empty())
    {
        std::nth_element(edges.begin(), edges.begin() + static_cast<std::ptrdiff_t>(edges.size() / 2), edges.end());
        cell_ = edges[edges.size() / 2];
    }
    if (!(cell_ > 0.0))
    {
        cell_ = std::max((hi - lo).maxCoeff(), 1.0);
    }
    origin_ = lo;
    extent_ = ((hi - lo) / cell_).array().floor().cast<int>() + 1;

    std::vector<std::pair<Key, std::uint32_t>> keyed;
    keyed.reserve(valid.size());
    for (std::uint32_t i : valid)
    {
        keyed.emplace_back(key_of(cell_of(mesh.values()[i])), i);
    }
    std::sort(keyed.begin(), keyed.end());
    order_.resize(keyed.size());
    for (std::size_t i = 0; i < keyed.size();)
    {
        std::size_t j = i;
        while (j < keyed.size() && keyed[j].first == keyed[i].first)
        {
            order_[j] = keyed[j].second;
            ++j;
        }
        buckets_.emplace(keyed[i].first, std::pair{static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
        i = j;
    }
}

Eigen::Vector3i VertexIndex::cell_of(const Eigen::Vector3d& p) const
{
    const Eigen::Vector3d c = ((p - origin_) / cell_).array().floor();
    return c.cwiseMax(-1e6).cwiseMin(1e6).cast<int>();
}

VertexIndex::Key VertexIndex::key_of(const Eigen::Vector3i& c) noexcept
{
    auto part = [](int x) { return static_cast<Key>(static_cast<std::uint32_t>(x + (1 << 20)) & 0x1fffff); };
    return part(c.x()) | (part(c.y()) << 21) | (part(c.z()) << 42);
}

std::optional<std::size_t> VertexIndex::nearest(const Eigen::Vector3d& point) const
{
    if (order_.empty())
    {
        return std::nullopt;
    }
    const Eigen::Vector3i centre = cell_of(point);
    // Rings beyond this radius lie entirely outside the occupied box.
    Eigen::Vector3i far_corner = (centre - extent_).cwiseAbs().cwiseMax(centre.cwiseAbs());
    const int max_ring = far_corner.maxCoeff() + 1;

    double best = std::numeric_limits<double>::infinity();
    std::size_t best_index = 0;
    auto visit = [&](const Eigen::Vector3i& c) {
        const auto it = buckets_.find(key_of(c));
        if (it == buckets_.end())
        {
            return;
        }
        for (std::uint32_t k = it->second.first; k < it->second.second; ++k)
        {
            const std::size_t index = order_[k];
            const double d = (mesh_->values()[index] - point).squaredNorm();
            if (d < best || (d == best && index < best_index))
            {
                best = d;
                best_index = index;
            }
        }
    };

    for (int r = 0; r <= max_ring; ++r)
    {
        for (int dz = -r; dz <= r; ++dz)
        {
            for (int dy = -r; dy <= r; ++dy)
            {
                const bool face = std::abs(dz) == r || std::abs(dy) == r;
                const int step = face ? 1 : 2 * r;
                for (int dx = -r; dx <= r; dx += std::max(step, 1))
                {
                    visit(centre + Eigen::Vector3i(dx, dy, dz));
                }
            }
        }
        // Every cell in ring r + 1 or beyond is at least r * cell away.
        if (std::isfinite(best) && std::sqrt(best) <= r * cell_)
        {
            break;
        }
    }
    return best_index;
}

} /* namespace deform */
} /* namespace facepuppet */
