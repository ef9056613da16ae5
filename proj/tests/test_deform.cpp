/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: tests/test_deform.cpp
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

#include "facepuppet/core/error.hpp"
#include "facepuppet/deform/transfer.hpp"
#include "facepuppet/deform/vertex_index.hpp"
#include "facepuppet/synth/synthetic.hpp"

#include "Eigen/Geometry"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

using namespace facepuppet;
using namespace facepuppet::deform;
using namespace facepuppet::testing;

namespace {

constexpr int W = 194;
constexpr int H = 244;

const geometry::FaceTemplate& face()
{
    static const geometry::FaceTemplate t = synth::make_template(W, H);
    return t;
}

} // namespace

TEST_CASE("vertex index agrees with brute force")
{
    const DepthMesh& mesh = face().mesh;
    const VertexIndex index(mesh);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> x(-0.6 * W, 0.6 * W);
    std::uniform_real_distribution<double> y(-0.6 * H, 0.6 * H);
    std::uniform_real_distribution<double> z(-20.0, 80.0);
    for (int k = 0; k < 300; ++k)
    {
        const Eigen::Vector3d p(x(rng), y(rng), z(rng));
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < mesh.size(); ++i)
        {
            if (mesh.mask()[i])
            {
                best = std::min(best, (mesh.values()[i] - p).squaredNorm());
            }
        }
        const auto found = index.nearest(p);
        REQUIRE(found.has_value());
        CHECK(mesh.mask()[*found]);
        CHECK((mesh.values()[*found] - p).squaredNorm() == doctest::Approx(best).epsilon(1e-12));
    }
    // Each vertex is its own nearest neighbour.
    for (std::size_t i = 0; i < mesh.size(); i += 37)
    {
        if (mesh.mask()[i])
        {
            CHECK(*index.nearest(mesh.values()[i]) == i);
        }
    }
}

TEST_CASE("identity correspondence round trip is exact")
{
    const Correspondence c = Correspondence::identity(W, H);
    CHECK(round_trip_rms(c) == 0.0);
    const FiducialSet lm = synth::landmarks(W, H, {});
    const FiducialSet moved = driver_to_puppet(lm, c);
    for (int i = 0; i < FiducialSet::count; ++i)
    {
        CHECK(moved[i] == lm[i]);
    }
}

TEST_CASE("zero deformation transfers to the unchanged puppet")
{
    const DepthMesh& driver = face().mesh;
    const DepthMesh puppet = scaled(driver, 1.3);
    TransferReport report;
    const DepthMesh out = transfer_deformation(driver, driver, puppet, Correspondence::identity(W, H), {}, &report);
    CHECK(report.moved == 0);
    CHECK(report.pass_through == puppet.valid_count());
    for (std::size_t i = 0; i < puppet.size(); ++i)
    {
        if (puppet.mask()[i])
        {
            CHECK(out.mask()[i]);
            CHECK(out.values()[i] == puppet.values()[i]);
        }
    }
}

TEST_CASE("self transfer reproduces a realistic slide within 2% of its peak")
{
    const DepthMesh& average = face().mesh;
    const DepthMesh frame = jaw_drop(average);
    const double peak = peak_displacement(frame, average);
    REQUIRE(peak > 10.0);
    TransferReport report;
    const DepthMesh out = transfer_deformation(frame, average, average, Correspondence::identity(W, H), {}, &report);
    double squared = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < average.size(); ++i)
    {
        if (average.mask()[i] && out.mask()[i])
        {
            squared += (out.values()[i] - frame.values()[i]).squaredNorm();
            ++n;
        }
    }
    const double rms = std::sqrt(squared / n);
    INFO("rms " << rms << " peak " << peak << " unmatched " << report.unmatched);
    CHECK(n > 0.95 * average.valid_count());
    CHECK(rms <= 0.02 * peak);
}

TEST_CASE("transfer onto a puppet twice the size doubles the motion")
{
    const DepthMesh& average = face().mesh;
    const DepthMesh frame = jaw_drop(average);
    const DepthMesh puppet = scaled(average, 2.0);
    const double peak = peak_displacement(frame, average);
    const DepthMesh out = transfer_deformation(frame, average, puppet, Correspondence::identity(W, H));
    std::vector<double> ratios;
    for (std::size_t i = 0; i < average.size(); ++i)
    {
        if (!average.mask()[i] || !out.mask()[i])
        {
            continue;
        }
        const double d = (frame.values()[i] - average.values()[i]).norm();
        if (d >= 0.5 * peak)
        {
            ratios.push_back((out.values()[i] - puppet.values()[i]).norm() / d);
        }
    }
    REQUIRE(ratios.size() > 50);
    std::nth_element(ratios.begin(), ratios.begin() + ratios.size() / 2, ratios.end());
    const double median = ratios[ratios.size() / 2];
    INFO("median ratio " << median << " over " << ratios.size() << " vertices");
    CHECK(std::abs(median - 2.0) <= 0.2);
}

TEST_CASE("puppet motion is parallel to the driver motion")
{
    const DepthMesh& average = face().mesh;
    const DepthMesh frame = jaw_drop(average);
    const DepthMesh puppet = scaled(average, 0.8);
    const DepthMesh out = transfer_deformation(frame, average, puppet, Correspondence::identity(W, H));
    std::size_t checked = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < average.size(); ++i)
    {
        if (!average.mask()[i] || !out.mask()[i])
        {
            continue;
        }
        const Eigen::Vector3d a = frame.values()[i] - average.values()[i];
        const Eigen::Vector3d b = out.values()[i] - puppet.values()[i];
        if (a.norm() < 1e-2 || b.norm() < 1e-2)
        {
            continue;
        }
        worst = std::max(worst, a.cross(b).norm() / (a.norm() * b.norm()));
        ++checked;
    }
    INFO("worst |sin| " << worst << " over " << checked);
    CHECK(checked > 500);
    CHECK(worst <= 1e-6);
}

TEST_CASE("frame landmarks follow the mesh displacement")
{
    const DepthMesh& average = face().mesh;
    const FiducialSet lm = synth::landmarks(W, H, {});
    const FiducialSet same = frame_fiducials(average, average, lm);
    for (int i = 0; i < FiducialSet::count; ++i)
    {
        CHECK(same[i] == lm[i]);
    }
    // A rigid shift by (dx, dy) in model space moves grid landmarks by (dx, -dy).
    std::vector<Eigen::Vector3d> values = average.values();
    for (auto& p : values)
    {
        p += Eigen::Vector3d(1.5, -2.0, 3.0);
    }
    const FiducialSet shifted = frame_fiducials(DepthMesh(W, H, values, average.mask()), average, lm);
    for (int i = 0; i < FiducialSet::count; ++i)
    {
        CHECK(shifted[i].x() == doctest::Approx(lm[i].x() + 1.5));
        CHECK(shifted[i].y() == doctest::Approx(lm[i].y() + 2.0));
    }
    CHECK_THROWS_AS(frame_fiducials(DepthMesh(W - 1, H, std::vector<Eigen::Vector3d>((W - 1) * H),
                                              std::vector<std::uint8_t>((W - 1) * H, 1)),
                                    average, lm),
                    InputError);
}
