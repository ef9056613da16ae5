/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: src/geometry/frontalize.cpp
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
#include "facepuppet/geometry/frontalize.hpp"
#include "facepuppet/core/error.hpp"
#include "facepuppet/core/parallel.hpp"

#include "Eigen/LU"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace facepuppet {
namespace geometry {

namespace {

// Depth slack (canonical units) for the z-buffer visibility test.
constexpr double visibility_tolerance = 1.0;

std::optional<Eigen::Vector2d> project_grid(const DepthMesh& mesh, const Pose& pose, double u, double v)
{
    const auto point = mesh.sample(u, v);
    if (!point || !(pose.depth(*point) > 0.0))
    {
        return std::nullopt;
    }
    return pose.project(*point);
}

// Solves project(M(u, v)) = target for (u, v) by damped Newton steps.
Eigen::Vector2d unproject_landmark(const DepthMesh& mesh, const Pose& pose, const Eigen::Vector2d& target,
                                   Eigen::Vector2d start)
{
    Eigen::Vector2d uv = start;
    constexpr double h = 0.5;
    for (int iteration = 0; iteration < 30; ++iteration)
    {
        const auto here = project_grid(mesh, pose, uv.x(), uv.y());
        const auto du_plus = project_grid(mesh, pose, uv.x() + h, uv.y());
        const auto du_minus = project_grid(mesh, pose, uv.x() - h, uv.y());
        const auto dv_plus = project_grid(mesh, pose, uv.x(), uv.y() + h);
        const auto dv_minus = project_grid(mesh, pose, uv.x(), uv.y() - h);
        if (!here || !du_plus || !du_minus || !dv_plus || !dv_minus)
        {
            break;
        }
        Eigen::Matrix2d J;
        J.col(0) = (*du_plus - *du_minus) / (2.0 * h);
        J.col(1) = (*dv_plus - *dv_minus) / (2.0 * h);
        if (!(std::abs(J.determinant()) > 1e-9))
        {
            break;
        }
        Eigen::Vector2d step = J.inverse() * (target - *here);
        const double length = step.norm();
        if (length > 5.0)
        {
            step *= 5.0 / length;
        }
        uv += step;
        if (length < 1e-6)
        {
            break;
        }
    }
    return uv;
}

} // namespace

FaceTemplate load_face_template(const std::string& mesh_path, const std::string& fiducials_path)
{
    DepthMesh mesh = load_depth_mesh(mesh_path);
    std::ifstream in(fiducials_path);
    if (!in)
    {
        throw InputError("cannot open template landmark file: " + fiducials_path);
    }
    TemplatePoints points;
    std::string line;
    int count = 0;
    int line_number = 0;
    while (std::getline(in, line))
    {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
        {
            continue;
        }
        for (char& ch : line)
        {
            if (ch == ',')
            {
                ch = ' ';
            }
        }
        std::istringstream row(line);
        double x = 0.0;
        double y = 0.0;
        double z = 0.0;
        if (!(row >> x >> y >> z))
        {
            if (line_number == 1)
            {
                continue;
            }
            throw InputError(fiducials_path + ": malformed row " + std::to_string(line_number));
        }
        if (count >= FiducialSet::count)
        {
            throw InputError(fiducials_path + ": more than 49 template landmarks");
        }
        points[count++] = Eigen::Vector3d(x, y, z);
    }
    if (count != FiducialSet::count)
    {
        throw InputError(fiducials_path + ": expected 49 template landmarks, found " + std::to_string(count));
    }
    return FaceTemplate{std::move(mesh), points};
}

void save_template_fiducials(const TemplatePoints& points, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
    {
        throw InputError("cannot write template landmarks: " + path);
    }
    out << "x,y,z\n" << std::setprecision(17);
    for (const auto& p : points)
    {
        out << p.x() << ',' << p.y() << ',' << p.z() << '\n';
    }
}

DepthBuffer render_template_depth(const DepthMesh& mesh, const Pose& pose, int width, int height)
{
    DepthBuffer buffer(width, height);
    std::vector<ScreenVertex> projected(mesh.size());
    for (std::size_t i = 0; i < mesh.size(); ++i)
    {
        if (mesh.mask()[i])
        {
            projected[i] = {pose.project(mesh.values()[i]), pose.depth(mesh.values()[i])};
        }
    }
    for_each_mesh_triangle(mesh, [&](std::size_t a, std::size_t b, std::size_t c) {
        if (!(projected[a].depth > 0.0 && projected[b].depth > 0.0 && projected[c].depth > 0.0))
        {
            return;
        }
        rasterize_triangle(projected[a], projected[b], projected[c], width, height, true,
                           [&](int x, int y, double depth, const Eigen::Vector3d&) { buffer.test_and_set(x, y, depth); });
    });
    return buffer;
}

FrontalizedPhoto frontalize(const PhotoRecord& record, const FaceTemplate& face_template, const Intrinsics& intrinsics)
{
    const DepthMesh& mesh = face_template.mesh;
    const Image& photo = record.image.image();

    double reprojection_error = 0.0;
    std::optional<Pose> pose = record.pose;
    if (pose)
    {
        reprojection_error = mean_reprojection_error(*pose, face_template.fiducials, record.fiducials);
    }
    else
    {
        const PoseEstimate estimate = estimate_pose(record.fiducials, face_template.fiducials, intrinsics);
        pose = estimate.pose;
        reprojection_error = estimate.mean_reprojection_error;
    }

    const DepthBuffer zbuffer = render_template_depth(mesh, *pose, photo.width(), photo.height());

    Image canonical(mesh.width(), mesh.height(), 3, 0.0f);
    std::vector<std::uint8_t> visible(mesh.size(), 0);
    parallel_for(0, mesh.height(), [&](int v) {
        for (int u = 0; u < mesh.width(); ++u)
        {
            if (!mesh.valid(u, v))
            {
                continue;
            }
            const Eigen::Vector3d& point = mesh.at(u, v);
            const double depth = pose->depth(point);
            if (!(depth > 0.0))
            {
                continue;
            }
            const Eigen::Vector2d p = pose->project(point);
            if (!(p.x() >= 0.0 && p.y() >= 0.0 && p.x() <= photo.width() - 1 && p.y() <= photo.height() - 1))
            {
                continue;
            }
            // Occluded if every surrounding z-buffer sample is clearly nearer.
            const int x0 = static_cast<int>(p.x());
            const int y0 = static_cast<int>(p.y());
            double front = -std::numeric_limits<double>::infinity();
            for (int dy = 0; dy <= 1; ++dy)
            {
                for (int dx = 0; dx <= 1; ++dx)
                {
                    const int x = std::min(x0 + dx, photo.width() - 1);
                    const int y = std::min(y0 + dy, photo.height() - 1);
                    const double z = zbuffer.at(x, y);
                    if (std::isfinite(z))
                    {
                        front = std::max(front, z);
                    }
                }
            }
            if (std::isfinite(front) && depth > front + visibility_tolerance)
            {
                continue;
            }
            visible[mesh.index(u, v)] = 1;
            for (int c = 0; c < 3; ++c)
            {
                canonical.at(u, v, c) = photo.sample(p.x(), p.y(), c);
            }
        }
    });

    std::array<Eigen::Vector2d, FiducialSet::count> landmarks;
    for (int i = 0; i < FiducialSet::count; ++i)
    {
        const Eigen::Vector3d& anchor = face_template.fiducials[i];
        const Eigen::Vector2d start = mesh.plane_to_grid(anchor.x(), anchor.y());
        landmarks[i] = unproject_landmark(mesh, *pose, record.fiducials[i], start);
    }

    return FrontalizedPhoto{FaceImage(std::move(canonical)), FiducialSet(landmarks), std::move(visible), *pose,
                            reprojection_error};
}

} /* namespace geometry */
} /* namespace facepuppet */
