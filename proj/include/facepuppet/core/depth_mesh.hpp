/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: include/facepuppet/core/depth_mesh.hpp
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

#ifndef FACEPUPPET_CORE_DEPTH_MESH_HPP
#define FACEPUPPET_CORE_DEPTH_MESH_HPP

#include "Eigen/Core"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace facepuppet {

/**
 * A grid of 3D vectors with a validity mask, indexed by (u, v) on an image
 * plane. Shared layout of DepthMesh and TranslationField.
 *
 * Values of valid entries are finite. Invalid entries carry arbitrary data.
 */
class VectorGrid
{
public:
    VectorGrid() = default;
    /// Throws InputError on size mismatch or non-finite valid entries.
    VectorGrid(int width, int height, std::vector<Eigen::Vector3d> values, std::vector<std::uint8_t> valid);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return values_.size(); }

    const Eigen::Vector3d& at(int u, int v) const noexcept { return values_[index(u, v)]; }
    bool valid(int u, int v) const noexcept { return valid_[index(u, v)] != 0; }
    std::size_t index(int u, int v) const noexcept { return static_cast<std::size_t>(v) * width_ + u; }

    const std::vector<Eigen::Vector3d>& values() const noexcept { return values_; }
    const std::vector<std::uint8_t>& mask() const noexcept { return valid_; }
    std::size_t valid_count() const noexcept;

    bool operator==(const VectorGrid& other) const;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<Eigen::Vector3d> values_;
    std::vector<std::uint8_t> valid_;
};

/**
 * A face surface M(u, v) parametrized on an image-plane grid.
 *
 * Vertices live in the canonical face frame: x right, y up, z toward the
 * camera, in units of canonical grid pixels. A depth map over a W x H grid
 * places vertex (u, v) at (u - (W-1)/2, (H-1)/2 - v, depth).
 */
class DepthMesh : public VectorGrid
{
public:
    using VectorGrid::VectorGrid;

    /// Builds a mesh from a row-major depth map; non-finite depths are invalid.
    static DepthMesh from_depth_map(int width, int height, const std::vector<double>& depth);

    /// Canonical-frame (x, y) of grid position (u, v), continuous.
    Eigen::Vector2d grid_to_plane(double u, double v) const noexcept;
    /// Inverse of grid_to_plane.
    Eigen::Vector2d plane_to_grid(double x, double y) const noexcept;

    /// Bilinear vertex position; empty if any contributing vertex is invalid.
    std::optional<Eigen::Vector3d> sample(double u, double v) const noexcept;

    /// Number of triangles the OBJ export emits (2 per fully valid cell).
    std::size_t triangle_count() const noexcept;
};

/// Per-vertex 3D displacement aligned to a DepthMesh grid.
class TranslationField : public VectorGrid
{
public:
    using VectorGrid::VectorGrid;

    /// frame - base on vertices valid in both; throws InputError on grid mismatch.
    static TranslationField between(const DepthMesh& frame, const DepthMesh& base);
};

/**
 * The on-disk float-grid container.
 *
 * Layout: the 7 bytes `PFMESH1`, width and height as little-endian uint32,
 * then width * height row-major quadruples of little-endian float32
 * (x, y, z, valid). Warp fields store (dx, dy, 0, 1) and scalar fields
 * store (value, 0, 0, valid).
 */
struct FloatGrid
{
    int width = 0;
    int height = 0;
    std::vector<float> quads; // 4 * width * height
};

FloatGrid read_float_grid(const std::string& path);
void write_float_grid(const FloatGrid& grid, const std::string& path);

DepthMesh load_depth_mesh(const std::string& path);
/// Stores vertices as float32; exact round trip for float-representable meshes.
void save_depth_mesh(const DepthMesh& mesh, const std::string& path);

/**
 * Wavefront OBJ export. Every grid cell whose four corners are valid becomes
 * two triangles. With a texture name, per-vertex texture coordinates
 * (u / (W-1), 1 - v / (H-1)) are written together with a companion .mtl file
 * referencing the texture image.
 */
void save_mesh_obj(const DepthMesh& mesh, const std::string& path,
                   const std::optional<std::string>& texture_file = std::nullopt);

} /* namespace facepuppet */

#endif /* FACEPUPPET_CORE_DEPTH_MESH_HPP */
