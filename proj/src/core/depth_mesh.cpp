/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: src/core/depth_mesh.cpp
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
#include "facepuppet/core/depth_mesh.hpp"
#include "facepuppet/core/error.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

namespace facepuppet {

static_assert(std::endian::native == std::endian::little, "float-grid I/O assumes a little-endian host");

VectorGrid::VectorGrid(int width, int height, std::vector<Eigen::Vector3d> values, std::vector<std::uint8_t> valid)
    : width_(width), height_(height), values_(std::move(values)), valid_(std::move(valid))
{
    if (width <= 0 || height <= 0)
    {
        throw InputError("grid: invalid dimensions");
    }
    const auto expected = static_cast<std::size_t>(width) * height;
    if (values_.size() != expected || valid_.size() != expected)
    {
        throw InputError("grid: dimension mismatch between mask and grid");
    }
    for (std::size_t i = 0; i < expected; ++i)
    {
        if (valid_[i] != 0 && !values_[i].allFinite())
        {
            throw InputError("grid: non-finite value at a valid vertex");
        }
    }
}

std::size_t VectorGrid::valid_count() const noexcept
{
    std::size_t n = 0;
    for (auto v : valid_)
    {
        n += v != 0;
    }
    return n;
}

bool VectorGrid::operator==(const VectorGrid& other) const
{
    if (width_ != other.width_ || height_ != other.height_ || valid_ != other.valid_)
    {
        return false;
    }
    for (std::size_t i = 0; i < values_.size(); ++i)
    {
        if (valid_[i] != 0 && values_[i] != other.values_[i])
        {
            return false;
        }
    }
    return true;
}

DepthMesh DepthMesh::from_depth_map(int width, int height, const std::vector<double>& depth)
{
    if (depth.size() != static_cast<std::size_t>(width) * height)
    {
        throw InputError("from_depth_map: depth buffer size does not match dimensions");
    }
    std::vector<Eigen::Vector3d> vertices(depth.size());
    std::vector<std::uint8_t> valid(depth.size());
    const double cx = (width - 1) / 2.0;
    const double cy = (height - 1) / 2.0;
    for (int v = 0; v < height; ++v)
    {
        for (int u = 0; u < width; ++u)
        {
            const std::size_t i = static_cast<std::size_t>(v) * width + u;
            const bool ok = std::isfinite(depth[i]);
            valid[i] = ok;
            vertices[i] = Eigen::Vector3d(u - cx, cy - v, ok ? depth[i] : 0.0);
        }
    }
    return DepthMesh(width, height, std::move(vertices), std::move(valid));
}

Eigen::Vector2d DepthMesh::grid_to_plane(double u, double v) const noexcept
{
    return {u - (width() - 1) / 2.0, (height() - 1) / 2.0 - v};
}

Eigen::Vector2d DepthMesh::plane_to_grid(double x, double y) const noexcept
{
    return {x + (width() - 1) / 2.0, (height() - 1) / 2.0 - y};
}

std::optional<Eigen::Vector3d> DepthMesh::sample(double u, double v) const noexcept
{
    if (!(u >= 0.0 && v >= 0.0 && u <= width() - 1 && v <= height() - 1))
    {
        return std::nullopt;
    }
    const int u0 = std::min(static_cast<int>(u), width() - 1);
    const int v0 = std::min(static_cast<int>(v), height() - 1);
    const int u1 = std::min(u0 + 1, width() - 1);
    const int v1 = std::min(v0 + 1, height() - 1);
    const double fu = u - u0;
    const double fv = v - v0;
    if (!valid(u0, v0) || !valid(u1, v0) || !valid(u0, v1) || !valid(u1, v1))
    {
        return std::nullopt;
    }
    const Eigen::Vector3d top = (1.0 - fu) * at(u0, v0) + fu * at(u1, v0);
    const Eigen::Vector3d bottom = (1.0 - fu) * at(u0, v1) + fu * at(u1, v1);
    return (1.0 - fv) * top + fv * bottom;
}

std::size_t DepthMesh::triangle_count() const noexcept
{
    std::size_t n = 0;
    for (int v = 0; v + 1 < height(); ++v)
    {
        for (int u = 0; u + 1 < width(); ++u)
        {
            if (valid(u, v) && valid(u + 1, v) && valid(u, v + 1) && valid(u + 1, v + 1))
            {
                n += 2;
            }
        }
    }
    return n;
}

TranslationField TranslationField::between(const DepthMesh& frame, const DepthMesh& base)
{
    if (frame.width() != base.width() || frame.height() != base.height())
    {
        throw InputError("TranslationField: mesh grids differ");
    }
    std::vector<Eigen::Vector3d> delta(frame.size(), Eigen::Vector3d::Zero());
    std::vector<std::uint8_t> valid(frame.size(), 0);
    for (std::size_t i = 0; i < frame.size(); ++i)
    {
        if (frame.mask()[i] && base.mask()[i])
        {
            delta[i] = frame.values()[i] - base.values()[i];
            valid[i] = 1;
        }
    }
    return TranslationField(frame.width(), frame.height(), std::move(delta), std::move(valid));
}

namespace {

constexpr std::array<char, 7> magic = {'P', 'F', 'M', 'E', 'S', 'H', '1'};

} // namespace

FloatGrid read_float_grid(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw InputError("cannot open float grid: " + path);
    }
    std::array<char, 7> header{};
    std::uint32_t dims[2] = {0, 0};
    in.read(header.data(), header.size());
    in.read(reinterpret_cast<char*>(dims), sizeof(dims));
    if (!in || header != magic)
    {
        throw InputError(path + ": not a PFMESH1 float grid");
    }
    if (dims[0] == 0 || dims[1] == 0 || dims[0] > 1u << 15 || dims[1] > 1u << 15)
    {
        throw InputError(path + ": implausible grid dimensions");
    }
    FloatGrid grid;
    grid.width = static_cast<int>(dims[0]);
    grid.height = static_cast<int>(dims[1]);
    grid.quads.resize(4 * static_cast<std::size_t>(grid.width) * grid.height);
    in.read(reinterpret_cast<char*>(grid.quads.data()), static_cast<std::streamsize>(grid.quads.size() * sizeof(float)));
    if (!in)
    {
        throw InputError(path + ": truncated float grid");
    }
    return grid;
}

void write_float_grid(const FloatGrid& grid, const std::string& path)
{
    if (grid.quads.size() != 4 * static_cast<std::size_t>(grid.width) * grid.height)
    {
        throw InputError("write_float_grid: payload size does not match dimensions");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
        throw InputError("cannot write float grid: " + path);
    }
    const std::uint32_t dims[2] = {static_cast<std::uint32_t>(grid.width), static_cast<std::uint32_t>(grid.height)};
    out.write(magic.data(), magic.size());
    out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    out.write(reinterpret_cast<const char*>(grid.quads.data()), static_cast<std::streamsize>(grid.quads.size() * sizeof(float)));
    if (!out)
    {
        throw InputError("failed writing float grid: " + path);
    }
}

DepthMesh load_depth_mesh(const std::string& path)
{
    const FloatGrid grid = read_float_grid(path);
    const auto n = static_cast<std::size_t>(grid.width) * grid.height;
    std::vector<Eigen::Vector3d> vertices(n);
    std::vector<std::uint8_t> valid(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        const float* q = &grid.quads[4 * i];
        vertices[i] = Eigen::Vector3d(q[0], q[1], q[2]);
        valid[i] = q[3] != 0.0f;
    }
    return DepthMesh(grid.width, grid.height, std::move(vertices), std::move(valid));
}

void save_depth_mesh(const DepthMesh& mesh, const std::string& path)
{
    FloatGrid grid;
    grid.width = mesh.width();
    grid.height = mesh.height();
    grid.quads.resize(4 * mesh.size());
    for (std::size_t i = 0; i < mesh.size(); ++i)
    {
        const auto& p = mesh.values()[i];
        grid.quads[4 * i + 0] = static_cast<float>(p.x());
        grid.quads[4 * i + 1] = static_cast<float>(p.y());
        grid.quads[4 * i + 2] = static_cast<float>(p.z());
        grid.quads[4 * i + 3] = mesh.mask()[i] ? 1.0f : 0.0f;
    }
    write_float_grid(grid, path);
}

void save_mesh_obj(const DepthMesh& mesh, const std::string& path, const std::optional<std::string>& texture_file)
{
    std::ofstream out(path);
    if (!out)
    {
        throw InputError("cannot write OBJ: " + path);
    }
    const std::filesystem::path obj_path(path);
    if (texture_file)
    {
        const auto mtl_path = std::filesystem::path(obj_path).replace_extension(".mtl");
        std::ofstream mtl(mtl_path);
        if (!mtl)
        {
            throw InputError("cannot write MTL: " + mtl_path.string());
        }
        mtl << "newmtl face\nKa 1 1 1\nKd 1 1 1\nKs 0 0 0\nillum 1\nmap_Kd " << *texture_file << '\n';
        out << "mtllib " << mtl_path.filename().string() << "\nusemtl face\n";
    }

    // OBJ indices are 1-based and only count emitted (valid) vertices.
    std::vector<std::size_t> obj_index(mesh.size(), 0);
    std::size_t next = 1;
    for (int v = 0; v < mesh.height(); ++v)
    {
        for (int u = 0; u < mesh.width(); ++u)
        {
            if (!mesh.valid(u, v))
            {
                continue;
            }
            const auto& p = mesh.at(u, v);
            out << "v " << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
            if (texture_file)
            {
                const double s = mesh.width() > 1 ? u / static_cast<double>(mesh.width() - 1) : 0.0;
                const double t = mesh.height() > 1 ? 1.0 - v / static_cast<double>(mesh.height() - 1) : 0.0;
                out << "vt " << s << ' ' << t << '\n';
            }
            obj_index[mesh.index(u, v)] = next++;
        }
    }
    auto corner = [&](int u, int v) { return obj_index[mesh.index(u, v)]; };
    auto face = [&](std::size_t a, std::size_t b, std::size_t c) {
        if (texture_file)
        {
            out << "f " << a << '/' << a << ' ' << b << '/' << b << ' ' << c << '/' << c << '\n';
        }
        else
        {
            out << "f " << a << ' ' << b << ' ' << c << '\n';
        }
    };
    for (int v = 0; v + 1 < mesh.height(); ++v)
    {
        for (int u = 0; u + 1 < mesh.width(); ++u)
        {
            if (!(mesh.valid(u, v) && mesh.valid(u + 1, v) && mesh.valid(u, v + 1) && mesh.valid(u + 1, v + 1)))
            {
                continue;
            }
            // Counter-clockwise when seen from +z (v grows downward on the grid).
            face(corner(u, v), corner(u, v + 1), corner(u + 1, v));
            face(corner(u + 1, v), corner(u, v + 1), corner(u + 1, v + 1));
        }
    }
}

} /* namespace facepuppet */
