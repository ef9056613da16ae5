/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: tests/test_flow.cpp
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
#include "doctest.h"
#include "oracles.hpp"
#include "support.hpp"

#include "facepuppet/core/error.hpp"
#include "facepuppet/flow/flow_io.hpp"
#include "facepuppet/flow/optical_flow.hpp"
#include "facepuppet/flow/subspace.hpp"

#include <algorithm>
#include <random>

using namespace facepuppet;
using namespace facepuppet::flow;
using namespace facepuppet::testing;

TEST_CASE("defaults are the published solver settings")
{
    const FlowParams p;
    CHECK(p.alpha == 0.02);
    CHECK(p.ratio == 0.85);
    CHECK(p.min_width == 20);
    CHECK(p.outer_iterations == 4);
    CHECK(p.inner_iterations == 1);
    CHECK(p.sor_iterations == 40);
}

TEST_CASE("integer and sub-pixel translations are recovered to 0.1 px median endpoint error")
{
    const std::vector<Eigen::Vector2d> shifts{{3, -2},   {0.4, 0.3},  {-4.6, 2.5}, {5, 5},
                                              {-5, -5},  {1.5, -3.7}, {0, 4},      {-2.25, -0.75}};
    for (const auto& s : shifts)
    {
        const auto [source, target] = translated_pair(96, 7, s);
        const WarpField f = compute_flow(source, target);
        const double epe = median_endpoint_error(f, (-s).cast<float>());
        INFO("shift " << s.transpose() << " median EPE " << epe);
        CHECK(epe <= 0.1);
    }
}

TEST_CASE("a (3, -2) shift of the content gives flow (-3, 2)")
{
    const auto [source, target] = translated_pair(96, 3, {3.0, -2.0});
    const WarpField f = compute_flow(source, target);
    const Eigen::Vector2f centre = f.at(48, 48);
    CHECK(centre.x() == doctest::Approx(-3.0).epsilon(0.05));
    CHECK(centre.y() == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("identical images give a near-zero field")
{
    const Image a = synth::noise_texture(64, 64, 4, flow_feature_size, 3);
    CHECK(compute_flow(a, a).rms_magnitude() < 1e-3);
}

TEST_CASE("energy never increases over outer iterations on random pairs")
{
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
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
            // Unrelated images: no true flow, the solver must still descend.
            source = synth::noise_texture(64, 64, 200 + pair, 6.0);
            target = synth::noise_texture(64, 64, 300 + pair, 6.0);
        }
        const FlowResult r = compute_flow_with_trace(source, target);
        REQUIRE_FALSE(r.energy_trace.empty());
        for (const auto& level : r.energy_trace)
        {
            REQUIRE(level.size() == static_cast<std::size_t>(FlowParams{}.outer_iterations) + 1);
            for (std::size_t i = 1; i < level.size(); ++i)
            {
                CHECK(level[i] <= level[i - 1]);
            }
        }
        // And the final field beats no motion at full resolution.
        const double alpha = FlowParams{}.alpha;
        CHECK(flow_energy(source, target, r.field, alpha) <=
              flow_energy(source, target, WarpField::zero(64, 64), alpha));
    }
}

TEST_CASE("flow input checks")
{
    const Image a = synth::noise_texture(64, 64, 1, flow_feature_size);
    const Image b = synth::noise_texture(60, 64, 1, flow_feature_size);
    CHECK_THROWS_AS(compute_flow(a, b), InputError);
    FlowParams p;
    p.ratio = 1.0;
    CHECK_THROWS_AS(compute_flow(a, a, p), InputError);
    p = {};
    p.sor_iterations = 0;
    CHECK_THROWS_AS(p.validate(), InputError);
    const Image tiny = synth::noise_texture(12, 12, 1, flow_feature_size);
    CHECK_THROWS_AS(compute_flow(tiny, tiny), InputError);
}

TEST_CASE("flow grid round trip and colour visualisation")
{
    facepuppet::testing::TempDir dir("flow");
    std::vector<float> d(2 * 10 * 6);
    for (std::size_t i = 0; i < d.size(); ++i)
    {
        d[i] = 0.37f * static_cast<float>(i) - 5.0f;
    }
    const WarpField f(10, 6, d);
    save_flow_grid(f, dir / "f.pfmesh");
    const WarpField back = load_flow_grid(dir / "f.pfmesh");
    CHECK(rms_difference(f, back) == 0.0);
    const Image colour = flow_to_color(f);
    CHECK(colour.width() == 10);
    CHECK(colour.height() == 6);
    CHECK(colour.channels() == 3);
    // Opposite directions get different hues.
    const Image two = flow_to_color(WarpField(2, 1, {1.0f, 0.0f, -1.0f, 0.0f}));
    CHECK(max_abs_difference(two, two) == 0.0);
    CHECK(std::abs(two.at(0, 0, 0) - two.at(1, 0, 0)) + std::abs(two.at(0, 0, 2) - two.at(1, 0, 2)) > 0.1);
}

TEST_CASE("subspace of a rank-2 family reproduces members and is orthonormal")
{
    const Image m = synth::noise_texture(24, 20, 1, 4.0, 3);
    const Image b1 = synth::noise_texture(24, 20, 2, 4.0, 3);
    const Image b2 = synth::noise_texture(24, 20, 3, 4.0, 3);
    std::vector<Image> images;
    std::mt19937 rng(4);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int i = 0; i < 8; ++i)
    {
        const double c1 = g(rng);
        const double c2 = g(rng);
        Image im(24, 20, 3);
        for (std::size_t k = 0; k < im.data().size(); ++k)
        {
            im.data()[k] = static_cast<float>(m.data()[k] + 0.3 * c1 * b1.data()[k] + 0.2 * c2 * b2.data()[k]);
        }
        images.push_back(im);
    }
    const AppearanceSubspace s = build_subspace(images, 4);
    CHECK(s.rank() == 4);
    REQUIRE(s.basis().size() == 2);
    double dot = 0.0;
    double n1 = 0.0;
    for (std::size_t k = 0; k < s.basis()[0].data().size(); ++k)
    {
        dot += s.basis()[0].data()[k] * s.basis()[1].data()[k];
        n1 += s.basis()[0].data()[k] * s.basis()[0].data()[k];
    }
    CHECK(std::abs(dot) < 1e-5);
    CHECK(n1 == doctest::Approx(1.0).epsilon(1e-5));
    for (const auto& im : images)
    {
        CHECK(max_abs_difference(project(im, s), im) < 1e-4);
    }
    // Projection is idempotent on anything.
    const Image other = synth::noise_texture(24, 20, 9, 4.0, 3);
    const Image once = project(other, s);
    CHECK(max_abs_difference(project(once, s), once) < 1e-5);
    // The mean is the plain average.
    CHECK(max_abs_difference(s.mean(), mean_image(images)) < 1e-5);
}

TEST_CASE("subspace needs rank + 1 images")
{
    std::vector<Image> four(4, synth::noise_texture(16, 16, 1, 4.0, 3));
    CHECK_THROWS_AS(build_subspace(four, 4), InputError);
    CHECK_THROWS_AS(align_via_subspace(four), InputError);
}

TEST_CASE("subspace alignment leaves in-span images alone")
{
    // Images that differ only by a global gain lie in the subspace: projection
    // reproduces them and the flows vanish.
    std::vector<Image> images;
    for (int i = 0; i < 6; ++i)
    {
        Image im = synth::noise_texture(64, 64, 5, flow_feature_size, 3);
        for (auto& v : im.data())
        {
            v = static_cast<float>(v * (0.9 + 0.04 * i));
        }
        images.push_back(im);
    }
    for (const auto& f : align_via_subspace(images))
    {
        CHECK(f.rms_magnitude() < 1e-3);
    }
}

TEST_CASE("subspace alignment undoes small misalignments under strong lighting changes")
{
    // Sixteen copies of one texture under strong lighting drawn from a rank-4
    // family (gain, two gradients, a quadratic term), each displaced by up to
    // 0.75 px. Lighting dominates the variance, so the subspace holds the
    // lighting and the projections sit at the mean position: the flow of image
    // i is -(s_i - mean s).
    const int n = 16;
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Image> images;
    std::vector<Eigen::Vector2d> shifts;
    Eigen::Vector2d mean_shift = Eigen::Vector2d::Zero();
    for (int i = 0; i < n; ++i)
    {
        const Eigen::Vector2d shift(0.75 * u(rng), 0.75 * u(rng));
        shifts.push_back(shift);
        mean_shift += shift / n;
        Image im = synth::noise_texture(64, 64, 5, flow_feature_size, 3, shift);
        const double g0 = 1.0 + 0.5 * u(rng);
        const double gx = 1.0 * u(rng);
        const double gy = 1.0 * u(rng);
        const double q = 2.0 * u(rng);
        for (int y = 0; y < 64; ++y)
        {
            for (int x = 0; x < 64; ++x)
            {
                const double sx = x / 63.0 - 0.5;
                const double sy = y / 63.0 - 0.5;
                const double light = g0 + gx * sx + gy * sy + q * (sx * sx + sy * sy);
                for (int c = 0; c < 3; ++c)
                {
                    im.at(x, y, c) = static_cast<float>(im.at(x, y, c) * light);
                }
            }
        }
        images.push_back(im);
    }
    const std::vector<WarpField> flows = align_via_subspace(images);
    REQUIRE(flows.size() == static_cast<std::size_t>(n));
    double before = 0.0;
    double after = 0.0;
    for (int i = 0; i < n; ++i)
    {
        // Pixel p of image i shows the pattern at p + s_i; the flow lands it on p + mean s.
        const Eigen::Vector2f truth = (mean_shift - shifts[i]).cast<float>();
        before += median_endpoint_error(WarpField::zero(64, 64), truth) / n;
        after += median_endpoint_error(flows[i], truth) / n;
    }
    MESSAGE("mean misalignment " << before << " px, after subspace flow " << after << " px");
    // The rank-4 basis also absorbs part of the shift variation, so the
    // correction is partial; it must still reduce the misalignment.
    CHECK(after < before);

    // With the ideal target (the same lighting, no shift) the flow itself is accurate.
    const Image ideal = synth::noise_texture(64, 64, 5, flow_feature_size, 3);
    const Image shifted = synth::noise_texture(64, 64, 5, flow_feature_size, 3, shifts[0]);
    CHECK(median_endpoint_error(compute_flow(shifted, ideal), (-shifts[0]).cast<float>()) < 0.1);
}
