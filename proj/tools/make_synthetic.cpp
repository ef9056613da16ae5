/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: tools/make_synthetic.cpp
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
#include "facepuppet/core/error.hpp"
#include "facepuppet/synth/synthetic.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

// Writes a small self-contained demo dataset: a template, two identities
// with photo collections and average meshes, a driver frame sequence and a
// few target landmark files.

using namespace facepuppet;
namespace fs = std::filesystem;

namespace {

struct Settings
{
    std::string out = "data/synthetic";
    int width = 96;
    int height = 120;
    int photos = 12;
    int photo_size = 192;
    int frames = 8;
    std::uint32_t seed = 1;
};

DepthMesh identity_mesh(int width, int height, double depth_scale)
{
    std::vector<double> depth(static_cast<std::size_t>(width) * height);
    for (int v = 0; v < height; ++v)
    {
        for (int u = 0; u < width; ++u)
        {
            depth[static_cast<std::size_t>(v) * width + u] = depth_scale * synth::face_depth(width, height, u, v);
        }
    }
    return DepthMesh::from_depth_map(width, height, depth);
}

void write_collection(const Settings& s, const geometry::FaceTemplate& face_template, const synth::Identity& identity,
                      const fs::path& directory, const std::string& prefix, std::mt19937& rng)
{
    fs::create_directories(directory);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    // Face spans about half the photo width.
    const double distance = 1.7 * s.width;
    for (int i = 0; i < s.photos; ++i)
    {
        synth::Expression e;
        e.smile = uniform(rng) < 0.5 ? 0.0 : uniform(rng);
        e.mouth_open = uniform(rng) < 0.6 ? 0.0 : 0.8 * uniform(rng);
        e.brow_raise = 1.2 * uniform(rng) - 0.4;
        e.eye_close = uniform(rng) < 0.8 ? 0.0 : 0.6 * uniform(rng);
        synth::Lighting light;
        light.ambient = 0.8 + 0.4 * uniform(rng);
        light.gradient_x = 0.4 * (uniform(rng) - 0.5);
        light.gradient_y = 0.3 * (uniform(rng) - 0.5);
        light.tint = {0.9 + 0.2 * uniform(rng), 0.9 + 0.2 * uniform(rng), 0.9 + 0.2 * uniform(rng)};
        const Image texture = synth::apply_lighting(synth::face_texture(s.width, s.height, identity, e), light);
        const FiducialSet lm = synth::landmarks(s.width, s.height, identity, e);
        const Intrinsics k = Intrinsics::default_for(s.photo_size, s.photo_size);
        const Pose pose = synth::view_pose(30.0 * (uniform(rng) - 0.5), 14.0 * (uniform(rng) - 0.5), distance, k);
        std::ostringstream id;
        id << prefix << std::setw(3) << std::setfill('0') << i;
        const synth::RenderedPhoto photo =
            synth::render_photo(texture, lm, face_template, pose, s.photo_size, s.photo_size, id.str());
        save_png(photo.record.image.image(), (directory / (id.str() + ".png")).string());
        save_fiducials_csv(photo.record.fiducials, (directory / (id.str() + ".csv")).string());
    }
}

} // namespace

int main(int argc, char** argv)
{
    Settings s;
    CLI::App app{"Writes the synthetic demo dataset"};
    app.add_option("--out", s.out, "output directory");
    app.add_option("--width", s.width, "canonical grid width");
    app.add_option("--height", s.height, "canonical grid height");
    app.add_option("--photos", s.photos, "photos per identity");
    app.add_option("--photo-size", s.photo_size, "photo width and height");
    app.add_option("--frames", s.frames, "driver frames");
    app.add_option("--seed", s.seed, "random seed");
    CLI11_PARSE(app, argc, argv);

    try
    {
        const fs::path out(s.out);
        std::mt19937 rng(s.seed);

        const geometry::FaceTemplate face_template = synth::make_template(s.width, s.height);
        fs::create_directories(out / "template");
        save_depth_mesh(face_template.mesh, (out / "template" / "template.pfmesh").string());
        geometry::save_template_fiducials(face_template.fiducials, (out / "template" / "landmarks.csv").string());

        synth::Identity puppet;
        puppet.seed = s.seed * 7 + 1;
        puppet.skin = {0.8, 0.62, 0.52};
        synth::Identity driver;
        driver.seed = s.seed * 7 + 2;
        driver.skin = {0.62, 0.45, 0.36};
        driver.eye_spacing = 0.06;
        driver.mouth_width = -0.08;

        write_collection(s, face_template, puppet, out / "puppet" / "photos", "p", rng);
        write_collection(s, face_template, driver, out / "driver" / "photos", "d", rng);

        const DepthMesh puppet_mesh = identity_mesh(s.width, s.height, 1.1);
        const DepthMesh driver_mesh = identity_mesh(s.width, s.height, 0.95);
        save_depth_mesh(puppet_mesh, (out / "puppet" / "mesh.pfmesh").string());
        save_depth_mesh(driver_mesh, (out / "driver" / "mesh.pfmesh").string());

        // Driver performance: a smile that opens into speech and relaxes.
        const FiducialSet neutral = synth::landmarks(s.width, s.height, driver);
        fs::create_directories(out / "driver" / "frames");
        for (int f = 0; f < s.frames; ++f)
        {
            const double t = s.frames > 1 ? static_cast<double>(f) / (s.frames - 1) : 0.0;
            synth::Expression e;
            e.smile = std::sin(M_PI * t);
            e.mouth_open = 0.6 * std::max(0.0, std::sin(2.0 * M_PI * t));
            e.brow_raise = 0.5 * std::sin(M_PI * t);
            const DepthMesh frame =
                synth::expression_mesh(driver_mesh, neutral, synth::landmarks(s.width, s.height, driver, e));
            std::ostringstream name;
            name << "frame_" << std::setw(4) << std::setfill('0') << f << ".pfmesh";
            save_depth_mesh(frame, (out / "driver" / "frames" / name.str()).string());
        }

        fs::create_directories(out / "targets");
        synth::Expression smile;
        smile.smile = 1.0;
        synth::Expression open;
        open.mouth_open = 0.8;
        save_fiducials_csv(synth::landmarks(s.width, s.height, puppet, smile), (out / "targets" / "smile.csv").string());
        save_fiducials_csv(synth::landmarks(s.width, s.height, puppet, open),
                           (out / "targets" / "mouth_open.csv").string());
        save_fiducials_csv(synth::landmarks(s.width, s.height, puppet), (out / "targets" / "neutral.csv").string());
    } catch (const InputError& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e)
    {
        std::cerr << "failed: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
