/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: include/facepuppet/deform/vertex_index.hpp
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

#ifndef FACEPUPPET_DEFORM_VERTEX_INDEX_HPP
#define FACEPUPPET_DEFORM_VERTEX_INDEX_HPP

#include "facepuppet/core/depth_mesh.hpp"

#include "Eigen/Core"

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

namespace facepuppet {
namespace deform {

/**
 * Exact Euclidean nearest-vertex queries over the valid vertices of a mesh,
 * bucketed in a uniform 3D hash whose cell size is the median edge length.
 * Ties go to the lower grid index.
 */
class VertexIndex
{
public:
    explicit VertexIndex(const DepthMesh& mesh);

    /// Grid index of the nearest valid vertex; empty if the mesh has none.
    std::optional<std::size_t> nearest(const Eigen::Vector3d& point) const;

    double cell_size() const noexcept { return cell_; }

private:
    using Key = std::uint64_t;
    Eigen::Vector3i cell_of(const Eigen::Vector3d& p) const;
    static Key key_of(const Eigen::Vector3i& c) noexcept;

    const DepthMesh* mesh_;
    double cell_ = 1.0;
    Eigen::Vector3d origin_;
    Eigen::Vector3i extent_; // number of cells per axis
    std::unordered_map<Key, std::pair<std::uint32_t, std::uint32_t>> buckets_;
    std::vector<std::uint32_t> order_;
};

} /* namespace deform */
} /* namespace facepuppet */

#endif /* FACEPUPPET_DEFORM_VERTEX_INDEX_HPP */
