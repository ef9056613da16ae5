/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: tests/support.hpp
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

#ifndef FACEPUPPET_TESTS_SUPPORT_HPP
#define FACEPUPPET_TESTS_SUPPORT_HPP

#include "facepuppet/core/depth_mesh.hpp"
#include "facepuppet/core/image.hpp"
#include "facepuppet/synth/synthetic.hpp"
#include "facepuppet/texture/align.hpp"

#include <array>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

namespace facepuppet {
namespace testing {

/// A fresh directory under the system temp dir, removed on destruction.
class TempDir
{
public:
    explicit TempDir(const std::string& tag)
    {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("facepuppet_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::string operator/(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline std::string data_dir()
{
    return FACEPUPPET_DATA_DIR;
}

/// Runs a shell command and returns its exit status (not the raw wait status).
inline int run_command(const std::string& command)
{
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

/// Random expression drawn like the demo collections (mostly mild, sometimes strong).
inline synth::Expression random_expression(std::mt19937& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    synth::Expression e;
    e.smile = u(rng) < 0.5 ? 0.0 : u(rng);
    e.mouth_open = u(rng) < 0.6 ? 0.0 : 0.8 * u(rng);
    e.brow_raise = 1.2 * u(rng) - 0.4;
    e.eye_close = u(rng) < 0.8 ? 0.0 : 0.6 * u(rng);
    return e;
}

inline synth::Lighting random_lighting(std::mt19937& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    synth::Lighting l;
    l.ambient = 0.8 + 0.4 * u(rng);
    l.gradient_x = 0.4 * (u(rng) - 0.5);
    l.gradient_y = 0.3 * (u(rng) - 0.5);
    l.tint = {0.9 + 0.2 * u(rng), 0.9 + 0.2 * u(rng), 0.9 + 0.2 * u(rng)};
    return l;
}

/// A photographed collection with ground truth, rendered through the template.
struct RenderedCollection
{
    geometry::FaceTemplate face_template;
    std::vector<PhotoRecord> records;
    std::vector<FiducialSet> truth; ///< exact canonical landmarks of each photo
    std::vector<synth::Expression> expressions;
};

inline RenderedCollection render_collection(int width, int height, int count, std::uint32_t seed,
                                            const synth::Identity& identity = {}, int photo_size = 256,
                                            double distance = 280.0)
{
    RenderedCollection c{synth::make_template(width, height), {}, {}, {}};
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < count; ++i)
    {
        const synth::Expression e = random_expression(rng);
        const Image texture = synth::apply_lighting(synth::face_texture(width, height, identity, e), random_lighting(rng));
        const FiducialSet lm = synth::landmarks(width, height, identity, e);
        const Pose pose = synth::view_pose(30.0 * (u(rng) - 0.5), 14.0 * (u(rng) - 0.5), distance,
                                           Intrinsics::default_for(photo_size, photo_size));
        char id[16];
        std::snprintf(id, sizeof(id), "p%03d", i);
        c.records.push_back(synth::render_photo(texture, lm, c.face_template, pose, photo_size, photo_size, id).record);
        c.truth.push_back(lm);
        c.expressions.push_back(e);
    }
    return c;
}

/// Canonical photos drawn directly on the grid (no rendering), with full coverage.
inline std::vector<texture::CanonicalPhoto> canonical_collection(int width, int height, int count, std::uint32_t seed,
                                                                 const synth::Identity& identity = {})
{
    std::vector<texture::CanonicalPhoto> photos;
    std::mt19937 rng(seed);
    for (int i = 0; i < count; ++i)
    {
        const synth::Expression e = random_expression(rng);
        Image texture = synth::apply_lighting(synth::face_texture(width, height, identity, e), random_lighting(rng));
        char id[16];
        std::snprintf(id, sizeof(id), "c%03d", i);
        photos.push_back(texture::canonical_photo(id, std::move(texture), synth::landmarks(width, height, identity, e)));
    }
    return photos;
}

/// Face-interior mask: valid template vertices whose whole (2r+1)^2 neighbourhood is valid.
inline std::vector<std::uint8_t> eroded_mask(const DepthMesh& mesh, int radius)
{
    std::vector<std::uint8_t> mask(mesh.size(), 0);
    for (int v = 0; v < mesh.height(); ++v)
    {
        for (int u = 0; u < mesh.width(); ++u)
        {
            bool inside = true;
            for (int dv = -radius; dv <= radius && inside; ++dv)
            {
                for (int du = -radius; du <= radius && inside; ++du)
                {
                    const int uu = u + du;
                    const int vv = v + dv;
                    inside = uu >= 0 && vv >= 0 && uu < mesh.width() && vv < mesh.height() && mesh.valid(uu, vv);
                }
            }
            mask[mesh.index(u, v)] = inside ? 1 : 0;
        }
    }
    return mask;
}

} /* namespace testing */
} /* namespace facepuppet */

#endif /* FACEPUPPET_TESTS_SUPPORT_HPP */
