/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: tests/acceptance.cpp
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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   acceptance                  run everything
//   acceptance --update-golden  rewrite the golden puppet manifest, then run

#include "oracles.hpp"
#include "support.hpp"

#include "facepuppet/core/error.hpp"
#include "facepuppet/deform/transfer.hpp"
#include "facepuppet/denoise/rof_huber.hpp"
#include "facepuppet/flow/optical_flow.hpp"
#include "facepuppet/geometry/tps.hpp"
#include "facepuppet/pipeline/config.hpp"
#include "facepuppet/texture/blend.hpp"
#include "facepuppet/texture/pyramid.hpp"
#include "facepuppet/texture/synthesis.hpp"

#include "Eigen/Geometry"
#include "json.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

using namespace facepuppet;
using namespace facepuppet::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome
{
    bool pass = true;
    std::ostringstream detail;

    /// Records a check; failing checks are listed first in the detail text.
    void check(bool ok, const std::string& what)
    {
        if (!ok)
        {
            pass = false;
            detail << "[failed] ";
        }
        detail << what << "; ";
    }
};

template <class T>
std::string str(T value)
{
    std::ostringstream s;
    s << value;
    return s.str();
}

double ms_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

std::string data(const std::string& rel)
{
    return data_dir() + "/synthetic/" + rel;
}

int cli(const std::string& args, const std::string& log)
{
    return run_command(std::string(FACEPUPPET_CLI) + " " + args + " > " + log + " 2>&1");
}

// 1. Parameter fidelity.
void parameters(Outcome& o)
{
    const std::vector<std::pair<std::string, std::string>> published = {
        {"tps_lambda", "10"},        {"sigma", "10"},          {"alpha", "1"},
        {"beta", "20"},              {"tau", "1"},             {"subspace_rank", "4"},
        {"flow_alpha", "0.02"},      {"flow_ratio", "0.85"},   {"flow_min_width", "20"},
        {"flow_outer_iterations", "4"}, {"flow_inner_iterations", "1"}, {"flow_sor_iterations", "40"},
        {"tv_weight", "1"},          {"huber_eps", "0.05"},
    };
    const auto entries = pipeline::config_entries(pipeline::PipelineConfig{});
    for (const auto& [key, value] : published)
    {
        const auto it = std::find_if(entries.begin(), entries.end(), [&](const auto& e) { return e.first == key; });
        o.check(it != entries.end() && it->second == value,
                key + "=" + (it == entries.end() ? std::string("missing") : it->second));
    }
}

// 2. Runtime envelope.
void runtime(Outcome& o)
{
    // Transfer through the CLI on 194x244 meshes, read back from the frame timing CSV.
    const TempDir dir("accept_runtime");
    const geometry::FaceTemplate face = synth::make_template(194, 244);
    fs::create_directories(dir.path() / "frames");
    save_depth_mesh(face.mesh, dir / "driver.pfmesh");
    save_depth_mesh(scaled(face.mesh, 1.1), dir / "puppet.pfmesh");
    for (int i = 0; i < 4; ++i)
    {
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%04d.pfmesh", i);
        save_depth_mesh(jaw_drop(face.mesh, 4.0 + 4.0 * i), (dir.path() / "frames" / name).string());
    }
    const int status = cli("transfer --threads 1 --driver-mesh " + (dir / "driver.pfmesh") + " --puppet-mesh " +
                               (dir / "puppet.pfmesh") + " --driver-frames " + (dir / "frames") + " --out " +
                               (dir / "out"),
                           dir / "log.txt");
    o.check(status == 0, "transfer exit " + str(status));
    double worst_frame = 0.0;
    if (status == 0)
    {
        std::ifstream csv(dir.path() / "out" / "frame_timing.csv");
        std::string line;
        std::getline(csv, line); // header: frame,transfer_ms,denoise_ms,...
        while (std::getline(csv, line))
        {
            std::istringstream row(line);
            std::string frame, transfer, denoise;
            std::getline(row, frame, ',');
            std::getline(row, transfer, ',');
            std::getline(row, denoise, ',');
            worst_frame = std::max(worst_frame, std::stod(transfer) + std::stod(denoise));
        }
    }
    o.check(worst_frame > 0.0 && worst_frame <= 1000.0, "transfer 194x244 worst frame " + str(worst_frame) + " ms <= 1000");

    // Blend of a 200-photo 512x512 collection with precomputed pyramids.
    const int size = 512;
    const std::vector<texture::CanonicalPhoto> photos = canonical_collection(size, size, 200, 2024);
    std::vector<texture::BlendInput> inputs;
    for (const auto& p : photos)
    {
        inputs.push_back({p.id, p.image, p.fiducials, std::nullopt});
    }
    const auto setup = std::chrono::steady_clock::now();
    const texture::TextureBlender blender(std::move(inputs), texture::BlendParams{});
    const double setup_ms = ms_since(setup);
    synth::Expression smile;
    smile.smile = 1.0;
    const FiducialSet target = synth::landmarks(size, size, {}, smile);
    const auto start = std::chrono::steady_clock::now();
    const Image out = blender.blend(target);
    const double blend_ms = ms_since(start);
    o.check(out.all_finite() && blend_ms <= 2000.0,
            "blend 200 x 512^2 " + str(blend_ms) + " ms <= 2000 (pyramid setup " + str(setup_ms) + " ms)");
}

// 3. TPS.
void tps(Outcome& o)
{
    const FiducialSet target = synth::landmarks(128, 160, {});
    std::mt19937 rng(3);
    std::normal_distribution<double> g(0.0, 3.0);
    std::array<Eigen::Vector2d, FiducialSet::count> jittered;
    for (int i = 0; i < FiducialSet::count; ++i)
    {
        jittered[i] = target[i] + Eigen::Vector2d(g(rng), g(rng));
    }
    const FiducialSet source(jittered);

    const geometry::TpsMapping exact = geometry::fit_tps(source, target, 0.0);
    double worst = 0.0;
    for (int i = 0; i < FiducialSet::count; ++i)
    {
        worst = std::max(worst, (exact(target[i]) - source[i]).norm());
    }
    o.check(worst <= 1e-6, "lambda 0 interpolation error " + str(worst) + " <= 1e-6");

    Eigen::Matrix2d a;
    a << 1.1, 0.2, -0.15, 0.9;
    const Eigen::Vector2d b(4.0, -7.5);
    std::array<Eigen::Vector2d, FiducialSet::count> mapped;
    for (int i = 0; i < FiducialSet::count; ++i)
    {
        mapped[i] = a * target[i] + b;
    }
    const geometry::TpsMapping affine = geometry::fit_tps(FiducialSet(mapped), target, 10.0);
    double affine_error = 0.0;
    for (const Eigen::Vector2d p : {Eigen::Vector2d(3, 5), Eigen::Vector2d(100, 140), target[20]})
    {
        affine_error = std::max(affine_error, (affine(p) - (a * p + b)).norm());
    }
    o.check(std::abs(affine.bending_energy()) <= 1e-8 && affine_error <= 1e-8,
            "affine bending " + str(std::abs(affine.bending_energy())) + ", error " + str(affine_error) + " <= 1e-8");

    const geometry::TpsMapping smooth = geometry::fit_tps(source, target, 10.0);
    const auto& trace = smooth.objective_trace();
    bool monotone = !trace.empty();
    for (std::size_t i = 1; i < trace.size(); ++i)
    {
        monotone = monotone && trace[i] <= trace[i - 1];
    }
    o.check(monotone, "objective non-increasing over " + str(trace.size()) + " solver steps");

    const int fits = 50;
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < fits; ++i)
    {
        geometry::fit_tps(source, target, 10.0);
    }
    const double ms = ms_since(start) / fits;
    o.check(ms < 50.0, "49-point fit " + str(ms) + " ms < 50");
}

// 4. Optical flow.
void flow_suite(Outcome& o)
{
    const std::vector<Eigen::Vector2d> shifts{{3, -2}, {0.4, 0.3}, {-4.6, 2.5}, {5, 5},
                                              {-5, -5}, {1.5, -3.7}, {0, 4}, {-2.25, -0.75}};
    double worst = 0.0;
    for (const auto& s : shifts)
    {
        const auto [source, target] = translated_pair(96, 7, s);
        worst = std::max(worst, median_endpoint_error(flow::compute_flow(source, target), (-s).cast<float>()));
    }
    o.check(worst <= 0.1, "worst median EPE over 8 translations " + str(worst) + " px <= 0.1");

    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    int monotone = 0;
    for (int pair = 0; pair < 10; ++pair)
    {
        Image source;
        Image target;
        if (pair % 2 == 0)
        {
            std::tie(source, target) = translated_pair(64, 100 + pair, {u(rng), u(rng)});
        }
        else
        {
            source = synth::noise_texture(64, 64, 200 + pair, 6.0);
            target = synth::noise_texture(64, 64, 300 + pair, 6.0);
        }
        const flow::FlowResult r = flow::compute_flow_with_trace(source, target);
        bool ok = !r.energy_trace.empty();
        for (const auto& level : r.energy_trace)
        {
            for (std::size_t i = 1; i < level.size(); ++i)
            {
                ok = ok && level[i] <= level[i - 1];
            }
        }
        monotone += ok;
    }
    o.check(monotone == 10, "energy monotone on " + str(monotone) + "/10 random pairs");
}

// 5. Denoising.
void denoise_suite(Outcome& o)
{
    const denoise::ScalarField constant(10, 8, std::vector<double>(80, 0.375), std::vector<std::uint8_t>(80, 1));
    double drift = 0.0;
    for (double v : denoise::rof_huber_denoise(constant).values)
    {
        drift = std::max(drift, std::abs(v - 0.375));
    }
    o.check(drift <= 1e-12, "constant field drift " + str(drift));

    double worst_gap = 0.0;
    bool identity = true;
    bool bounded = true;
    for (int kind = 0; kind < 5; ++kind)
    {
        const denoise::ScalarField f = noisy_field(kind, 20 + kind);
        denoise::DenoiseParams zero;
        zero.tv_weight = 0.0;
        identity = identity && denoise::rof_huber_denoise(f, zero).values == f.values;

        const denoise::DenoiseParams p;
        const denoise::ScalarField x = denoise::rof_huber_denoise(f, p);
        const double achieved = energy_oracle(f, x.values, p.tv_weight, p.huber_eps);
        const double best =
            energy_oracle(f, gradient_descent_oracle(f, p.tv_weight, p.huber_eps, 30000), p.tv_weight, p.huber_eps);
        worst_gap = std::max(worst_gap, (achieved - best) / best);

        double lo = INFINITY;
        double hi = -INFINITY;
        for (std::size_t i = 0; i < f.values.size(); ++i)
        {
            if (f.valid[i])
            {
                lo = std::min(lo, f.values[i]);
                hi = std::max(hi, f.values[i]);
            }
        }
        for (std::size_t i = 0; i < f.values.size(); ++i)
        {
            bounded = bounded && (!f.valid[i] || (x.values[i] >= lo && x.values[i] <= hi));
        }
    }
    o.check(identity, "tv_weight 0 is the identity");
    o.check(worst_gap <= 1e-3, "worst relative energy above the gradient-descent oracle " + str(worst_gap) + " <= 1e-3");
    o.check(bounded, "output within the input range");
}

// 6. Deformation transfer.
void transfer_suite(Outcome& o)
{
    const geometry::FaceTemplate face = synth::make_template(194, 244);
    const DepthMesh& average = face.mesh;
    const auto identity = deform::Correspondence::identity(194, 244);

    const DepthMesh puppet = scaled(average, 1.3);
    const DepthMesh still = deform::transfer_deformation(average, average, puppet, identity);
    o.check(still.values() == puppet.values(), "zero deformation is bit-exact");

    const DepthMesh frame = jaw_drop(average);
    const double peak = peak_displacement(frame, average);
    const DepthMesh self = deform::transfer_deformation(frame, average, average, identity);
    double squared = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < average.size(); ++i)
    {
        if (average.mask()[i] && self.mask()[i])
        {
            squared += (self.values()[i] - frame.values()[i]).squaredNorm();
            ++n;
        }
    }
    const double relative = std::sqrt(squared / n) / peak;
    o.check(relative <= 0.02, "self-transfer RMS " + str(100.0 * relative) + "% of peak " + str(peak) + " <= 2%");

    const DepthMesh twice = scaled(average, 2.0);
    const DepthMesh doubled = deform::transfer_deformation(frame, average, twice, identity);
    std::vector<double> ratios;
    double worst_sin = 0.0;
    for (std::size_t i = 0; i < average.size(); ++i)
    {
        if (!average.mask()[i] || !doubled.mask()[i])
        {
            continue;
        }
        const Eigen::Vector3d d = frame.values()[i] - average.values()[i];
        const Eigen::Vector3d e = doubled.values()[i] - twice.values()[i];
        if (d.norm() >= 0.5 * peak)
        {
            ratios.push_back(e.norm() / d.norm());
        }
        if (d.norm() >= 1e-2 && e.norm() >= 1e-2)
        {
            worst_sin = std::max(worst_sin, d.cross(e).norm() / (d.norm() * e.norm()));
        }
    }
    std::nth_element(ratios.begin(), ratios.begin() + ratios.size() / 2, ratios.end());
    const double median = ratios.empty() ? 0.0 : ratios[ratios.size() / 2];
    o.check(std::abs(median - 2.0) <= 0.2, "x2 puppet median displacement ratio " + str(median) + " within 10% of 2");
    o.check(worst_sin <= 1e-6, "worst angular deviation " + str(std::asin(std::min(1.0, worst_sin))) + " rad <= 1e-6");
}

// 7. Pyramid and blending.
void blend_suite(Outcome& o)
{
    const int w = 96;
    const int h = 120;
    double reconstruction = 0.0;
    for (auto [iw, ih] : {std::pair{96, 120}, std::pair{97, 121}, std::pair{131, 77}})
    {
        const Image image = detailed(iw, ih, {0.3f, 0.5f, 0.7f}, 5, 3.0, 0.4);
        for (int depth = 1; depth <= texture::default_pyramid_depth(iw, ih); ++depth)
        {
            reconstruction = std::max(
                reconstruction, max_abs_difference(texture::LaplacianPyramid::decompose(image, depth).collapse(), image));
        }
    }
    o.check(reconstruction <= 1e-5, "pyramid reconstruction " + str(reconstruction) + " <= 1e-5");

    const FiducialSet f = synth::landmarks(w, h, {});
    const Image image = detailed(w, h, {0.4f, 0.35f, 0.3f}, 11, 2.5, 0.5);
    const double single = max_abs_difference(
        texture::TextureBlender({{"a", image, f, std::nullopt}}, texture::BlendParams{}).blend(shifted(f, 4.0, 0.0)),
        image);
    std::vector<texture::BlendInput> same;
    for (int i = 0; i < 6; ++i)
    {
        same.push_back({"id" + std::to_string(i), image, shifted(f, i, -i), std::nullopt});
    }
    const double identical = max_abs_difference(texture::TextureBlender(same, texture::BlendParams{}).blend(f), image);
    o.check(single <= 1e-4 && identical <= 1e-4,
            "single-image " + str(single) + ", identical-collection " + str(identical) + " <= 1e-4");

    std::vector<texture::BlendInput> varied;
    std::vector<Image> images;
    for (int i = 0; i < 5; ++i)
    {
        images.push_back(detailed(w, h, {0.2f + 0.1f * i, 0.5f, 0.6f - 0.05f * i}, 30 + i, 2.0 + i, 0.5));
        varied.push_back({"p" + std::to_string(i), images.back(), shifted(f, 3.0 * i, 0.0), std::nullopt});
    }
    texture::BlendParams flat;
    flat.alpha = 0.0;
    const double uniform = max_abs_difference(
        texture::TextureBlender(varied, flat).blend_with_expression_weights(std::vector<double>(5, 0.7)),
        mean_image(images));
    o.check(uniform <= 1e-4, "uniform weights vs plain average " + str(uniform) + " <= 1e-4");

    // Two populations with different colours, detail and expressions.
    const FiducialSet fa = f;
    const FiducialSet fb = shifted(f, 0.0, 6.0);
    const std::array<float, 3> ca{0.7f, 0.4f, 0.3f};
    const std::array<float, 3> cb{0.3f, 0.5f, 0.6f};
    std::vector<texture::BlendInput> mixed;
    for (int i = 0; i < 4; ++i)
    {
        mixed.push_back({"a" + std::to_string(i), detailed(w, h, ca, 101, 1.5, 0.3), fa, std::nullopt});
        mixed.push_back({"b" + std::to_string(i), detailed(w, h, cb, 202, 1.5, 0.3), fb, std::nullopt});
    }
    const texture::TextureBlender blender(mixed, texture::BlendParams{});
    const int finest = blender.depth() - 1;
    double colour_spread = 0.0;
    double matched = 1.0;
    for (const auto& [target, own] : {std::pair{fa, 0}, std::pair{fb, 1}})
    {
        const Image out = blender.blend(target);
        for (int c = 0; c < 3; ++c)
        {
            const double expected = 0.5 * (ca[c] + cb[c]);
            colour_spread = std::max(colour_spread, std::abs(channel_mean(out, c) - expected) / expected);
        }
        const auto po = texture::LaplacianPyramid::decompose(out, blender.depth());
        const auto pm = texture::LaplacianPyramid::decompose(mixed[own].image, blender.depth());
        matched = std::min(matched, correlation(po.level(finest).data(), pm.level(finest).data()));
    }
    o.check(colour_spread <= 0.02, "two-population mean colour deviation " + str(100.0 * colour_spread) +
                                       "% <= 2% for both targets");
    o.check(matched >= 0.9, "fine-detail correlation with the matched population " + str(matched) + " >= 0.9");
}

// 8. End-to-end determinism.
std::string golden_path()
{
    return FACEPUPPET_GOLDEN;
}

/// "sha256  path" lines of a manifest's inputs and outputs.
std::string digest_lines(const std::string& out)
{
    const nlohmann::json m = nlohmann::json::parse(read_file(fs::path(out) / "manifest.json"));
    std::string lines;
    for (const char* section : {"inputs", "outputs"})
    {
        for (const auto& e : m[section])
        {
            lines += e["sha256"].get<std::string>() + "  " + section + "/" + e["path"].get<std::string>() + "\n";
        }
    }
    return lines;
}

std::string puppet_flags()
{
    return " --template-mesh " + data("template/template.pfmesh") + " --template-landmarks " +
           data("template/landmarks.csv") + " --puppet-photos " + data("puppet/photos") + " --driver-photos " +
           data("driver/photos") + " --driver-frames " + data("driver/frames") + " --puppet-mesh " +
           data("puppet/mesh.pfmesh") + " --driver-mesh " + data("driver/mesh.pfmesh");
}

void determinism(Outcome& o, bool update_golden)
{
    const TempDir dir("accept_golden");
    std::string digests[2];
    const int threads[2] = {1, 4};
    for (int k = 0; k < 2; ++k)
    {
        const std::string out = dir / ("threads" + std::to_string(threads[k]));
        const int status = cli("puppet --threads " + std::to_string(threads[k]) + puppet_flags() + " --out " + out,
                               dir / "log.txt");
        o.check(status == 0, "puppet --threads " + std::to_string(threads[k]) + " exit " + str(status));
        if (status == 0)
        {
            digests[k] = digest_lines(out);
        }
    }
    if (update_golden && !digests[0].empty())
    {
        std::ofstream(golden_path()) << digests[0];
        std::cerr << "golden manifest digests written to " << golden_path() << '\n';
    }
    const std::string golden = read_file(golden_path());
    const std::size_t files = std::count(golden.begin(), golden.end(), '\n');
    o.check(!golden.empty() && digests[0] == golden, "--threads 1 matches the golden digests (" + str(files) + " files)");
    o.check(!golden.empty() && digests[1] == golden, "--threads 4 matches the golden digests");
}

// 9. Baselines.
void baselines(Outcome& o)
{
    const TempDir dir("accept_baselines");
    const std::string out = dir / "out";
    const int status = cli("texture --baselines --target " + data("targets/smile.csv") + " --template-mesh " +
                               data("template/template.pfmesh") + " --template-landmarks " +
                               data("template/landmarks.csv") + " --puppet-photos " + data("puppet/photos") +
                               " --out " + out,
                           dir / "log.txt");
    o.check(status == 0, "texture --baselines exit " + str(status));
    if (status != 0)
    {
        return;
    }
    const char* variants[] = {"baseline_ii_warped_average.png", "baseline_iii_unaligned.png",
                              "baseline_iv_prewarped.png"};
    int present = 0;
    for (const char* name : variants)
    {
        present += fs::exists(fs::path(out) / name);
    }
    o.check(present == 3, str(present) + "/3 baseline images written");
    const DepthMesh mesh = load_depth_mesh(data("template/template.pfmesh"));
    const std::vector<std::uint8_t> face = eroded_mask(mesh, 4);
    const double full = texture::gradient_energy(load_png((fs::path(out) / "texture.png").string()), face);
    const double warped =
        texture::gradient_energy(load_png((fs::path(out) / "baseline_ii_warped_average.png").string()), face);
    o.check(full > warped, "face gradient energy full " + str(full) + " > warped average " + str(warped));
}

} // namespace

int main(int argc, char** argv)
{
    const bool update_golden = argc > 1 && std::string(argv[1]) == "--update-golden";
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
        {"parameter fidelity", parameters},
        {"runtime envelope", runtime},
        {"thin-plate spline suite", tps},
        {"optical flow suite", flow_suite},
        {"denoising suite", denoise_suite},
        {"deformation transfer suite", transfer_suite},
        {"pyramid and blending suite", blend_suite},
        {"end-to-end determinism", [&](Outcome& o) { determinism(o, update_golden); }},
        {"baseline emission", baselines},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i)
    {
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try
        {
            criteria[i].second(o);
        } catch (const std::exception& e)
        {
            o.check(false, std::string("threw: ") + e.what());
        }
        failed += !o.pass;
        std::cout << "criterion " << i + 1 << " " << (o.pass ? "PASS" : "FAIL") << "  " << criteria[i].first << ": "
                  << o.detail.str() << "(" << static_cast<int>(ms_since(start) / 1000.0 + 0.5) << " s)" << std::endl;
    }
    std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? 0 : 1;
}
