/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: src/pipeline/commands.cpp
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
#include "facepuppet/pipeline/commands.hpp"
#include "facepuppet/core/error.hpp"
#include "facepuppet/core/parallel.hpp"
#include "facepuppet/deform/transfer.hpp"
#include "facepuppet/flow/flow_io.hpp"
#include "facepuppet/flow/subspace.hpp"
#include "facepuppet/geometry/frontalize.hpp"
#include "facepuppet/pipeline/manifest.hpp"
#include "facepuppet/pipeline/preview.hpp"
#include "facepuppet/texture/synthesis.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <regex>

namespace facepuppet {
namespace pipeline {

namespace {

namespace fs = std::filesystem;

void require(const std::string& value, const char* key)
{
    if (value.empty())
    {
        throw InputError(std::string("missing required setting '") + key + "'");
    }
}

void require_directory(const std::string& value, const char* key)
{
    require(value, key);
    if (!fs::is_directory(value))
    {
        throw InputError(std::string(key) + ": not a directory: " + value);
    }
}

void require_file(const std::string& value, const char* key)
{
    require(value, key);
    if (!fs::is_regular_file(value))
    {
        throw InputError(std::string(key) + ": no such file: " + value);
    }
}

double elapsed_ms(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

/// Runs a command body under a recorder, marking the manifest on failure.
template <class Body>
void run(const char* command, const PipelineConfig& config, Body&& body)
{
    config.validate();
    set_thread_count(config.threads);
    RunRecorder recorder(command, config);
    try
    {
        body(recorder);
    } catch (const std::exception& e)
    {
        try
        {
            recorder.fail(e.what());
        } catch (...)
        {
        }
        throw;
    }
    recorder.finish();
}

geometry::FaceTemplate load_template(const PipelineConfig& config, RunRecorder& recorder)
{
    require_file(config.template_mesh, "template_mesh");
    require_file(config.template_landmarks, "template_landmarks");
    recorder.add_input("template", config.template_mesh);
    recorder.add_input("template", config.template_landmarks);
    return geometry::load_face_template(config.template_mesh, config.template_landmarks);
}

PhotoCollection load_collection(const std::string& directory, const char* key, RunRecorder& recorder)
{
    require_directory(directory, key);
    CollectionLoad load = load_photo_collection(directory);
    for (const auto& skipped : load.skipped)
    {
        std::cerr << "warning: " << key << ": skipped '" << skipped.id << "': " << skipped.message << '\n';
    }
    recorder.add_input_directory(key, directory);
    return std::move(load.collection);
}

DepthMesh load_mesh(const std::string& path, const char* key, RunRecorder& recorder)
{
    require_file(path, key);
    recorder.add_input(key, path);
    return load_depth_mesh(path);
}

void check_grid(const VectorGrid& mesh, const Image& image, const char* what)
{
    if (mesh.width() != image.width() || mesh.height() != image.height())
    {
        throw InputError(std::string(what) + ": mesh grid " + std::to_string(mesh.width()) + "x" +
                         std::to_string(mesh.height()) + " differs from the canonical image grid " +
                         std::to_string(image.width()) + "x" + std::to_string(image.height()));
    }
}

texture::AverageResult average_of(const PhotoCollection& collection, const geometry::FaceTemplate& face_template,
                                  const PipelineConfig& config, RunRecorder& recorder, const std::string& role)
{
    const auto photos =
        recorder.stage(role + ":frontalize", [&] { return texture::frontalize_collection(collection, face_template); });
    return recorder.stage(role + ":average", [&] {
        return texture::build_average(photos, config.align_params(), config.blend_params());
    });
}

flow::AppearanceSubspace subspace_of(const texture::AverageResult& average, int rank)
{
    std::vector<Image> images;
    for (const auto& a : average.aligned)
    {
        images.push_back(a.image);
    }
    if (images.size() < static_cast<std::size_t>(rank) + 1)
    {
        throw InputError("collection too small for a rank-" + std::to_string(rank) + " appearance subspace (" +
                         std::to_string(images.size()) + " photos)");
    }
    return flow::build_subspace(images, rank);
}

struct Sequence
{
    std::vector<FrameFile> files;
    std::vector<DepthMesh> meshes;
};

Sequence load_sequence(const PipelineConfig& config, const DepthMesh& driver_average, RunRecorder& recorder)
{
    require_directory(config.driver_frames, "driver_frames");
    Sequence s;
    s.files = list_frames(config.driver_frames);
    std::string mismatched;
    for (const auto& f : s.files)
    {
        recorder.add_input("driver_frames", f.path);
        s.meshes.push_back(load_depth_mesh(f.path.string()));
        if (s.meshes.back().width() != driver_average.width() || s.meshes.back().height() != driver_average.height())
        {
            mismatched += " " + f.path.filename().string();
        }
    }
    if (!mismatched.empty())
    {
        throw InputError("driver frames on a different grid than the driver mesh:" + mismatched);
    }
    return s;
}

struct Correspondences
{
    deform::Correspondence correspondence;
    std::optional<texture::AverageResult> puppet_average;
    std::optional<texture::AverageResult> driver_average;
};

Correspondences correspond(const PipelineConfig& config, const DepthMesh& driver_mesh, const DepthMesh& puppet_mesh,
                           RunRecorder& recorder)
{
    Correspondences c;
    if (config.puppet_photos.empty() && config.driver_photos.empty())
    {
        if (driver_mesh.width() != puppet_mesh.width() || driver_mesh.height() != puppet_mesh.height())
        {
            throw InputError("identity correspondence needs equal mesh grids; give puppet_photos and driver_photos");
        }
        c.correspondence = deform::Correspondence::identity(driver_mesh.width(), driver_mesh.height());
        return c;
    }
    const geometry::FaceTemplate face_template = load_template(config, recorder);
    const PhotoCollection driver_photos = load_collection(config.driver_photos, "driver_photos", recorder);
    const PhotoCollection puppet_photos = load_collection(config.puppet_photos, "puppet_photos", recorder);
    c.driver_average = average_of(driver_photos, face_template, config, recorder, "driver");
    c.puppet_average = average_of(puppet_photos, face_template, config, recorder, "puppet");
    check_grid(driver_mesh, c.driver_average->texture, "driver_mesh");
    check_grid(puppet_mesh, c.puppet_average->texture, "puppet_mesh");
    c.correspondence = recorder.stage("correspondence", [&] {
        return deform::cross_identity_correspondence(
            c.driver_average->texture, c.puppet_average->texture, subspace_of(*c.driver_average, config.subspace_rank),
            subspace_of(*c.puppet_average, config.subspace_rank), config.flow);
    });
    save_png(c.driver_average->texture, (recorder.out() / "average_driver.png").string());
    save_png(c.puppet_average->texture, (recorder.out() / "average_puppet.png").string());
    flow::save_flow_grid(c.correspondence.forward, (recorder.out() / "correspondence_forward.pfmesh").string());
    flow::save_flow_grid(c.correspondence.inverse, (recorder.out() / "correspondence_inverse.pfmesh").string());
    return c;
}

std::string frame_name(const FrameFile& f)
{
    std::ostringstream name;
    name << "frame_" << std::setw(4) << std::setfill('0') << f.index;
    return name.str();
}

struct FrameTiming
{
    double transfer_ms = 0.0;
    double denoise_ms = 0.0;
    std::optional<double> texture_ms;
};

void write_frame_timing(const fs::path& out, const std::vector<FrameFile>& files, const std::vector<FrameTiming>& t)
{
    std::ofstream csv(out / frame_timing_file);
    csv << "frame,transfer_ms,denoise_ms,denoise_share,texture_ms\n" << std::fixed << std::setprecision(3);
    for (std::size_t i = 0; i < files.size(); ++i)
    {
        const double share = t[i].transfer_ms + t[i].denoise_ms > 0.0
                                 ? t[i].denoise_ms / (t[i].transfer_ms + t[i].denoise_ms)
                                 : 0.0;
        csv << frame_name(files[i]) << ',' << t[i].transfer_ms << ',' << t[i].denoise_ms << ',' << share << ',';
        if (t[i].texture_ms)
        {
            csv << *t[i].texture_ms;
        }
        csv << '\n';
    }
}

} // namespace

std::vector<FrameFile> list_frames(const std::string& directory)
{
    if (!fs::is_directory(directory))
    {
        throw InputError("driver_frames: not a directory: " + directory);
    }
    static const std::regex pattern(R"(frame_(\d+)\.pfmesh)");
    std::vector<FrameFile> frames;
    for (const auto& entry : fs::directory_iterator(directory))
    {
        std::smatch match;
        const std::string name = entry.path().filename().string();
        if (entry.is_regular_file() && std::regex_match(name, match, pattern))
        {
            frames.push_back(FrameFile{std::stoi(match[1].str()), entry.path()});
        }
    }
    if (frames.empty())
    {
        throw InputError("driver_frames: no frame_NNNN.pfmesh files in " + directory);
    }
    std::sort(frames.begin(), frames.end(), [](const FrameFile& a, const FrameFile& b) { return a.index < b.index; });
    std::string missing;
    for (std::size_t i = 1; i < frames.size(); ++i)
    {
        if (frames[i].index == frames[i - 1].index)
        {
            throw InputError("driver_frames: frame " + std::to_string(frames[i].index) + " appears twice");
        }
        for (int k = frames[i - 1].index + 1; k < frames[i].index; ++k)
        {
            missing += " " + std::to_string(k);
        }
    }
    if (!missing.empty())
    {
        throw InputError("driver_frames: missing frames:" + missing);
    }
    return frames;
}

void cmd_average(const PipelineConfig& config)
{
    run("average", config, [&](RunRecorder& recorder) {
        const geometry::FaceTemplate face_template = load_template(config, recorder);
        const PhotoCollection collection = load_collection(config.puppet_photos, "puppet_photos", recorder);
        const texture::AverageResult average = average_of(collection, face_template, config, recorder, "puppet");
        recorder.stage("write", [&] {
            const fs::path out = recorder.out();
            save_png(average.frontalized, (out / "stage_a_frontalized.png").string());
            save_png(average.tps, (out / "stage_b_tps.png").string());
            save_png(average.dense, (out / "stage_c_dense.png").string());
            save_png(average.texture, (out / "stage_d_blended.png").string());
            save_png(average.texture, (out / "average.png").string());
            save_fiducials_csv(average.fiducials, (out / "average_fiducials.csv").string());
        });
    });
}

void cmd_texture(const PipelineConfig& base_config)
{
    PipelineConfig config = base_config;
    require(config.target, "target");
    const bool reference_target = fs::path(config.target).extension() == ".png";
    config.reference_mode = reference_target;
    run("texture", config, [&](RunRecorder& recorder) {
        const geometry::FaceTemplate face_template = load_template(config, recorder);
        PhotoCollection collection = load_collection(config.puppet_photos, "puppet_photos", recorder);
        require_file(config.target, "target");
        recorder.add_input("target", config.target);

        std::optional<texture::CanonicalPhoto> reference;
        FiducialSet target = [&] {
            if (!reference_target)
            {
                return load_fiducials_csv(config.target);
            }
            const PhotoRecord record = load_photo_record(config.target);
            reference = recorder.stage("reference", [&] { return texture::frontalize_record(record, face_template); });
            if (config.hold_out)
            {
                const auto& records = collection.records();
                const bool inside = std::any_of(records.begin(), records.end(),
                                                [&](const PhotoRecord& r) { return r.id == record.id; });
                if (inside)
                {
                    collection = collection.without(record.id);
                }
            }
            return reference->fiducials;
        }();

        const auto photos =
            recorder.stage("frontalize", [&] { return texture::frontalize_collection(collection, face_template); });
        const Image* reference_image = reference ? &reference->image : nullptr;
        texture::BlendDiagnostics diagnostics;
        const Image result = recorder.stage("synthesize", [&] {
            return texture::synthesize_texture(photos, target, reference_image, config.align_params(),
                                               config.blend_params(), &diagnostics, config.weight_maps);
        });
        const fs::path out = recorder.out();
        save_png(result, (out / "texture.png").string());
        save_fiducials_csv(target, (out / "target_fiducials.csv").string());
        if (diagnostics.fallback_pixels > 0)
        {
            std::cerr << "note: " << diagnostics.fallback_pixels << " pixels fell back to the unweighted mean\n";
        }
        if (config.weight_maps)
        {
            fs::create_directories(out / "weights");
            std::vector<std::string> ids;
            for (const auto& p : photos)
            {
                ids.push_back(p.id);
            }
            std::sort(ids.begin(), ids.end());
            for (std::size_t l = 0; l < diagnostics.weight_maps.size(); ++l)
            {
                for (std::size_t i = 0; i < diagnostics.weight_maps[l].size(); ++i)
                {
                    save_png(diagnostics.weight_maps[l][i],
                             (out / "weights" / ("level" + std::to_string(l) + "_" + ids[i] + ".png")).string());
                }
            }
        }
        if (config.baselines)
        {
            const texture::AverageResult average = recorder.stage("average", [&] {
                return texture::build_average(photos, config.align_params(), config.blend_params());
            });
            const texture::Baselines b = recorder.stage("baselines", [&] {
                return texture::baseline_textures(photos, average, target, reference_image, config.align_params(),
                                                  config.blend_params());
            });
            save_png(b.warped_average, (out / "baseline_ii_warped_average.png").string());
            save_png(b.unaligned, (out / "baseline_iii_unaligned.png").string());
            save_png(b.prewarped, (out / "baseline_iv_prewarped.png").string());
        }
    });
}

void cmd_transfer(const PipelineConfig& config)
{
    run("transfer", config, [&](RunRecorder& recorder) {
        const DepthMesh driver_mesh = load_mesh(config.driver_mesh, "driver_mesh", recorder);
        const DepthMesh puppet_mesh = load_mesh(config.puppet_mesh, "puppet_mesh", recorder);
        const Sequence sequence = load_sequence(config, driver_mesh, recorder);
        const Correspondences c = correspond(config, driver_mesh, puppet_mesh, recorder);

        const fs::path frames_dir = recorder.out() / "frames";
        fs::create_directories(frames_dir);
        std::vector<FrameTiming> timing(sequence.files.size());
        recorder.stage("transfer", [&] {
            parallel_for(0, static_cast<int>(sequence.files.size()), [&](int i) {
                deform::TransferReport report;
                const DepthMesh mesh = deform::transfer_deformation(sequence.meshes[i], driver_mesh, puppet_mesh,
                                                                    c.correspondence, config.denoise_params(), &report);
                timing[i].transfer_ms = report.transfer_ms;
                timing[i].denoise_ms = report.denoise_ms;
                const std::string name = frame_name(sequence.files[i]);
                save_depth_mesh(mesh, (frames_dir / (name + ".pfmesh")).string());
                save_mesh_obj(mesh, (frames_dir / (name + ".obj")).string());
            });
        });
        write_frame_timing(recorder.out(), sequence.files, timing);
    });
}

void cmd_puppet(const PipelineConfig& config)
{
    run("puppet", config, [&](RunRecorder& recorder) {
        require(config.puppet_photos, "puppet_photos");
        require(config.driver_photos, "driver_photos");
        const DepthMesh driver_mesh = load_mesh(config.driver_mesh, "driver_mesh", recorder);
        const DepthMesh puppet_mesh = load_mesh(config.puppet_mesh, "puppet_mesh", recorder);
        const Sequence sequence = load_sequence(config, driver_mesh, recorder);
        const Correspondences c = correspond(config, driver_mesh, puppet_mesh, recorder);
        const texture::AverageResult& puppet = *c.puppet_average;

        std::optional<texture::TextureBlender> neutral_blender;
        std::vector<texture::CanonicalPhoto> photos;
        if (config.texture_mode == TextureMode::neutral)
        {
            neutral_blender = recorder.stage("blend-setup", [&] {
                return texture::TextureBlender(texture::blend_inputs(puppet.aligned), config.blend_params());
            });
        }
        else
        {
            const geometry::FaceTemplate face_template = load_template(config, recorder);
            const PhotoCollection collection = load_collection(config.puppet_photos, "puppet_photos", recorder);
            photos = texture::frontalize_collection(collection, face_template);
        }

        const fs::path frames_dir = recorder.out() / "frames";
        const fs::path preview_dir = recorder.out() / "preview";
        fs::create_directories(frames_dir);
        if (config.preview)
        {
            fs::create_directories(preview_dir);
        }
        std::vector<FrameTiming> timing(sequence.files.size());
        recorder.stage("frames", [&] {
            parallel_for(0, static_cast<int>(sequence.files.size()), [&](int i) {
                const DepthMesh& frame = sequence.meshes[i];
                deform::TransferReport report;
                const DepthMesh mesh = deform::transfer_deformation(frame, driver_mesh, puppet_mesh, c.correspondence,
                                                                    config.denoise_params(), &report);
                timing[i].transfer_ms = report.transfer_ms;
                timing[i].denoise_ms = report.denoise_ms;

                const auto texture_start = std::chrono::steady_clock::now();
                const FiducialSet driver_target =
                    deform::frame_fiducials(frame, driver_mesh, c.driver_average->fiducials);
                const FiducialSet target = deform::driver_to_puppet(driver_target, c.correspondence);
                const Image texture = neutral_blender
                                          ? neutral_blender->blend(target)
                                          : texture::synthesize_texture(photos, target, nullptr, config.align_params(),
                                                                        config.blend_params());
                timing[i].texture_ms = elapsed_ms(texture_start);

                const std::string name = frame_name(sequence.files[i]);
                save_png(texture, (frames_dir / (name + ".png")).string());
                save_depth_mesh(mesh, (frames_dir / (name + ".pfmesh")).string());
                save_mesh_obj(mesh, (frames_dir / (name + ".obj")).string(), name + ".png");
                if (config.preview)
                {
                    save_png(render_preview(mesh, texture), (preview_dir / (name + ".png")).string());
                }
            });
        });
        write_frame_timing(recorder.out(), sequence.files, timing);
    });
}

void cmd_flow(const PipelineConfig& config, const std::string& source_png, const std::string& target_png)
{
    run("flow", config, [&](RunRecorder& recorder) {
        require_file(source_png, "source");
        require_file(target_png, "target");
        recorder.add_input("source", source_png);
        recorder.add_input("target", target_png);
        const FaceImage source = load_png(source_png);
        const FaceImage target = load_png(target_png);
        const WarpField field =
            recorder.stage("flow", [&] { return flow::compute_flow(source.image(), target.image(), config.flow); });
        flow::save_flow_grid(field, (recorder.out() / "flow.pfmesh").string());
        save_png(flow::flow_to_color(field), (recorder.out() / "flow.png").string());
    });
}

} /* namespace pipeline */
} /* namespace facepuppet */
