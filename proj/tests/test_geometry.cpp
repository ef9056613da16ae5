/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: tests/test_geometry.cpp
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
#include "support.hpp"

#include "facepuppet/core/error.hpp"
#include "facepuppet/geometry/frontalize.hpp"
#include "facepuppet/geometry/pose_estimation.hpp"
#include "facepuppet/geometry/tps.hpp"
#include "facepuppet/geometry/warp.hpp"

#include "Eigen/Dense"

#include <chrono>
#include <random>

using namespace facepuppet;
using namespace facepuppet::geometry;

namespace {

FiducialSet face_landmarks()
{
    return synth::landmarks(128, 160, synth::Identity{});
}

FiducialSet jitter(const FiducialSet& f, double sigma, std::uint32_t seed)
{
    std::mt19937 rng(seed);
    std::normal_distribution<double> g(0.0, sigma);
    std::vector<Eigen::Vector2d> p;
    for (const auto& q : f.points())
    {
        p.push_back(q + Eigen::Vector2d(g(rng), g(rng)));
    }
    return FiducialSet(p);
}

FiducialSet affine_image(const FiducialSet& f, const Eigen::Matrix2d& a, const Eigen::Vector2d& b)
{
    std::vector<Eigen::Vector2d> p;
    for (const auto& q : f.points())
    {
        p.push_back(a * q + b);
    }
    return FiducialSet(p);
}

} // namespace

TEST_CASE("tps kernel is r^2 log r with phi(0) = 0")
{
    CHECK(tps_kernel(0.0) == 0.0);
    CHECK(tps_kernel(1.0) == doctest::Approx(0.0));
    CHECK(tps_kernel(std::exp(1.0)) == doctest::Approx(std::exp(2.0)));
}

TEST_CASE("tps with lambda 0 interpolates the landmarks exactly")
{
    const FiducialSet target = face_landmarks();
    for (std::uint32_t seed : {1u, 2u, 3u})
    {
        const FiducialSet source = jitter(target, 3.0, seed);
        const TpsMapping r = fit_tps(source, target, 0.0);
        double worst = 0.0;
        for (int i = 0; i < FiducialSet::count; ++i)
        {
            worst = std::max(worst, (r(target[i]) - source[i]).norm());
        }
        CHECK(worst <= 1e-6);
    }
}

TEST_CASE("tps reproduces affine maps with zero bending energy")
{
    const FiducialSet target = face_landmarks();
    Eigen::Matrix2d a;
    a << 1.1, 0.2, -0.15, 0.9;
    const Eigen::Vector2d b(4.0, -7.5);
    const FiducialSet source = affine_image(target, a, b);
    for (double lambda : {0.0, 10.0, 1000.0})
    {
        const TpsMapping r = fit_tps(source, target, lambda);
        CHECK(std::abs(r.bending_energy()) <= 1e-8);
        // Off the landmarks too.
        for (const Eigen::Vector2d p : {Eigen::Vector2d(3, 5), Eigen::Vector2d(100, 140), Eigen::Vector2d(-20, 60)})
        {
            CHECK((r(p) - (a * p + b)).norm() <= 1e-8);
        }
    }
}

TEST_CASE("tps objective never rises across solver steps and the fit is a minimiser")
{
    const FiducialSet target = face_landmarks();
    const FiducialSet source = jitter(target, 4.0, 11);
    const double lambda = 10.0;
    const TpsMapping r = fit_tps(source, target, lambda);
    const auto& trace = r.objective_trace();
    REQUIRE_FALSE(trace.empty());
    for (std::size_t i = 1; i < trace.size(); ++i)
    {
        CHECK(trace[i] <= trace[i - 1]);
    }
    const double best = tps_objective(source, target, r.weights(), r.affine(), lambda);
    CHECK(best == doctest::Approx(trace.back()));

    // Perturbations that keep the side conditions (weights orthogonal to [1 x y]) cannot do better.
    Eigen::MatrixXd p(FiducialSet::count, 3);
    for (int i = 0; i < FiducialSet::count; ++i)
    {
        p.row(i) << 1.0, target[i].x(), target[i].y();
    }
    const Eigen::MatrixXd null_space = Eigen::FullPivLU<Eigen::MatrixXd>(p.transpose()).kernel();
    std::mt19937 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial)
    {
        Eigen::MatrixXd z(null_space.cols(), 2);
        for (int i = 0; i < z.size(); ++i)
        {
            z.data()[i] = g(rng);
        }
        Eigen::Matrix<double, 2, 3> da;
        for (int i = 0; i < 6; ++i)
        {
            da.data()[i] = g(rng);
        }
        const double step = trial < 10 ? 1e-3 : 1e-1;
        const Eigen::MatrixX2d w = r.weights() + step * 1e-3 * (null_space * z);
        const Eigen::Matrix<double, 2, 3> a = r.affine() + step * 1e-2 * da;
        CHECK(tps_objective(source, target, w, a, lambda) >= best - 1e-9 * std::max(1.0, best));
    }
}

TEST_CASE("large lambda approaches the least-squares affine fit")
{
    const FiducialSet target = face_landmarks();
    const FiducialSet source = jitter(target, 4.0, 17);
    Eigen::MatrixXd p(FiducialSet::count, 3);
    Eigen::MatrixXd s(FiducialSet::count, 2);
    for (int i = 0; i < FiducialSet::count; ++i)
    {
        p.row(i) << 1.0, target[i].x(), target[i].y();
        s.row(i) = source[i].transpose();
    }
    const Eigen::MatrixXd ls = p.colPivHouseholderQr().solve(s); // 3 x 2
    const TpsMapping r = fit_tps(source, target, 1e9);
    for (int i = 0; i < FiducialSet::count; ++i)
    {
        const Eigen::Vector2d expected = (p.row(i) * ls).transpose();
        CHECK((r(target[i]) - expected).norm() < 1e-3);
    }
}

TEST_CASE("tps input checks")
{
    const FiducialSet target = face_landmarks();
    CHECK_THROWS_AS(fit_tps(target, target, -1.0), InputError);
    std::vector<Eigen::Vector2d> line;
    for (int i = 0; i < FiducialSet::count; ++i)
    {
        line.emplace_back(i, 2.0 * i);
    }
    CHECK_THROWS_AS(fit_tps(target, FiducialSet(line), 0.0), ComputationError);
}

TEST_CASE("tps fit of 49 points takes well under 50 ms")
{
    const FiducialSet target = face_landmarks();
    const FiducialSet source = jitter(target, 2.0, 3);
    const int fits = 50;
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < fits; ++i)
    {
        const TpsMapping r = fit_tps(source, target, 10.0);
        CHECK(r.lambda() == 10.0);
    }
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count() / fits;
    MESSAGE("mean TPS fit: " << ms << " ms");
    CHECK(ms < 50.0);
}

TEST_CASE("rasterized tps field displaces every pixel to r(p)")
{
    const FiducialSet target = face_landmarks();
    const TpsMapping r = fit_tps(jitter(target, 3.0, 4), target, 10.0);
    const WarpField field = rasterize_tps(r, 128, 160);
    for (const auto& [x, y] : {std::pair{0, 0}, std::pair{64, 80}, std::pair{127, 159}, std::pair{31, 120}})
    {
        const Eigen::Vector2d expected = r(Eigen::Vector2d(x, y)) - Eigen::Vector2d(x, y);
        CHECK((field.at(x, y).cast<double>() - expected).norm() < 1e-4);
    }
}

TEST_CASE("warping: zero field is the identity, constant fields shift")
{
    const Image img = synth::noise_texture(40, 30, 7, 5.0, 3);
    CHECK(max_abs_difference(warp(img, WarpField::zero(40, 30)), img) == 0.0);
    const Image shifted = warp(img, WarpField::constant(40, 30, {2.0f, 1.0f}));
    for (int y = 0; y < 28; ++y)
    {
        for (int x = 0; x < 37; ++x)
        {
            CHECK(shifted.at(x, y, 1) == doctest::Approx(img.at(x + 2, y + 1, 1)));
        }
    }
}

TEST_CASE("warping twice equals warping once with the composed field")
{
    // Smooth analytic image I = 0.5 + 0.25 sin(a x) + 0.25 cos(b y). One bilinear
    // resampling errs by at most (a^2 + b^2) / 32, so two resamplings against one
    // differ by at most three times that.
    const int w = 64;
    const int h = 48;
    const double fa = 0.2;
    const double fb = 0.15;
    Image img(w, h, 1);
    for (int y = 0; y < h; ++y)
    {
        for (int x = 0; x < w; ++x)
        {
            img.at(x, y, 0) = static_cast<float>(0.5 + 0.25 * std::sin(fa * x) + 0.25 * std::cos(fb * y));
        }
    }
    std::vector<float> d1(2 * w * h);
    std::vector<float> d2(2 * w * h);
    for (int y = 0; y < h; ++y)
    {
        for (int x = 0; x < w; ++x)
        {
            const std::size_t i = 2 * (static_cast<std::size_t>(y) * w + x);
            d1[i] = static_cast<float>(1.5 * std::sin(0.08 * y));
            d1[i + 1] = static_cast<float>(1.0 * std::cos(0.06 * x));
            d2[i] = static_cast<float>(-0.8 + 0.01 * y);
            d2[i + 1] = static_cast<float>(0.7 * std::sin(0.05 * x + 0.3));
        }
    }
    const WarpField f1(w, h, d1);
    const WarpField f2(w, h, d2);
    const Image twice = warp(warp(img, f1), f2);
    const Image once = warp(img, compose(f1, f2));
    const double bound = 3.0 * (fa * fa + fb * fb) / 32.0;
    double worst = 0.0;
    for (int y = 6; y < h - 6; ++y)
    {
        for (int x = 6; x < w - 6; ++x)
        {
            worst = std::max(worst, static_cast<double>(std::abs(twice.at(x, y, 0) - once.at(x, y, 0))));
        }
    }
    CHECK(worst <= bound);
}

TEST_CASE("composition with an integer shift is exact")
{
    const Image img = synth::noise_texture(40, 30, 3, 5.0, 3);
    std::vector<float> d(2 * 40 * 30);
    for (int y = 0; y < 30; ++y)
    {
        for (int x = 0; x < 40; ++x)
        {
            d[2 * (y * 40 + x)] = static_cast<float>(0.3 * std::sin(0.2 * x));
            d[2 * (y * 40 + x) + 1] = static_cast<float>(0.2 * std::cos(0.3 * y));
        }
    }
    const WarpField f1(40, 30, d);
    const WarpField f2 = WarpField::constant(40, 30, {3.0f, 2.0f});
    const Image twice = warp(warp(img, f1), f2);
    const Image once = warp(img, compose(f1, f2));
    for (int y = 0; y < 24; ++y)
    {
        for (int x = 0; x < 34; ++x)
        {
            CHECK(twice.at(x, y, 2) == doctest::Approx(once.at(x, y, 2)).epsilon(1e-6));
        }
    }
}

TEST_CASE("pose estimation recovers a known pose from exact projections")
{
    const FaceTemplate face_template = synth::make_template(128, 160);
    const Intrinsics k = Intrinsics::default_for(320, 320);
    for (const auto& [yaw, pitch] : {std::pair{0.0, 0.0}, std::pair{25.0, -8.0}, std::pair{-15.0, 10.0}})
    {
        const Pose truth = synth::view_pose(yaw, pitch, 300.0, k);
        std::vector<Eigen::Vector2d> projected;
        for (const auto& p : face_template.fiducials)
        {
            projected.push_back(truth.project(p));
        }
        const PoseEstimate est = estimate_pose(FiducialSet(projected), face_template.fiducials, k);
        CHECK(rotation_angle_between(est.pose.rotation(), truth.rotation()) < 1e-6);
        CHECK((est.pose.translation() - truth.translation()).norm() < 1e-4);
        CHECK(est.mean_reprojection_error < 1e-6);
    }
}

TEST_CASE("frontalization of neutral photos recovers the landmarks")
{
    const geometry::FaceTemplate face_template = synth::make_template(128, 160);
    const synth::Identity identity;
    const FiducialSet truth = synth::landmarks(128, 160, identity);
    const Image texture = synth::face_texture(128, 160, identity, {});
    for (const auto& [yaw, pitch] : {std::pair{0.0, 0.0}, std::pair{12.0, -5.0}, std::pair{-14.0, 6.0}})
    {
        const Intrinsics k = Intrinsics::default_for(256, 256);
        const auto photo =
            synth::render_photo(texture, truth, face_template, synth::view_pose(yaw, pitch, 280.0, k), 256, 256, "n");
        const FrontalizedPhoto f = frontalize(photo.record, face_template, k);
        CHECK(f.image.width() == 128);
        CHECK(f.image.height() == 160);
        CHECK(f.fiducials.rms_distance(truth) < 0.1);
        std::size_t visible = 0;
        for (auto v : f.visible)
        {
            visible += v != 0;
        }
        CHECK(visible > face_template.mesh.valid_count() / 2);
    }
}

TEST_CASE("frontalization of expressive photos beats assuming a neutral face")
{
    // The rigid template absorbs part of the non-rigid motion into the pose,
    // so expressive landmarks are only approximately recovered.
    const auto c = facepuppet::testing::render_collection(128, 160, 12, 21);
    const FiducialSet neutral = synth::landmarks(128, 160, synth::Identity{});
    int compared = 0;
    for (std::size_t i = 0; i < c.records.size(); ++i)
    {
        const double moved = neutral.rms_distance(c.truth[i]);
        if (moved < 1.0)
        {
            continue;
        }
        const FrontalizedPhoto f = frontalize(c.records[i], c.face_template, Intrinsics::default_for(256, 256));
        CHECK(f.fiducials.rms_distance(c.truth[i]) < moved);
        ++compared;
    }
    CHECK(compared >= 4);
}
