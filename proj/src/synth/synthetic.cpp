/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: src/synth/synthetic.cpp
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
#include "facepuppet/synth/synthetic.hpp"
#include "facepuppet/core/error.hpp"
#include "facepuppet/geometry/raster.hpp"
#include "facepuppet/geometry/tps.hpp"
#include "facepuppet/geometry/warp.hpp"

#include "Eigen/Geometry"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace facepuppet {
namespace synth {

namespace {

using std::numbers::pi;

// Grid <-> normalised face coordinates; the face ellipse spans about |n| <= 1.
struct Frame
{
    double cx, cy, sx, sy;
    Frame(int width, int height)
        : cx((width - 1) / 2.0), cy((height - 1) / 2.0), sx(0.5 * width * 0.85), sy(0.5 * height * 0.85)
    {
    }
    Eigen::Vector2d to_grid(double nx, double ny) const { return {cx + nx * sx, cy + ny * sy}; }
    Eigen::Vector2d to_normalised(double u, double v) const { return {(u - cx) / sx, (v - cy) / sy}; }
};

double smoothstep(double edge0, double edge1, double x)
{
    const double t = std::clamp((x - edge0) / (edge1 - edge0), 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

double segment_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& a, const Eigen::Vector2d& b)
{
    const Eigen::Vector2d ab = b - a;
    const double t = std::clamp((p - a).dot(ab) / std::max(ab.squaredNorm(), 1e-12), 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

double polyline_distance(const Eigen::Vector2d& p, const std::vector<Eigen::Vector2d>& line)
{
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < line.size(); ++i)
    {
        best = std::min(best, segment_distance(p, line[i], line[i + 1]));
    }
    return best;
}

// Signed distance to a closed polygon: negative inside.
double polygon_signed_distance(const Eigen::Vector2d& p, const std::vector<Eigen::Vector2d>& polygon)
{
    double best = std::numeric_limits<double>::infinity();
    bool inside = false;
    for (std::size_t i = 0, j = polygon.size() - 1; i < polygon.size(); j = i++)
    {
        best = std::min(best, segment_distance(p, polygon[j], polygon[i]));
        const auto& a = polygon[i];
        const auto& b = polygon[j];
        if ((a.y() > p.y()) != (b.y() > p.y()) && p.x() < (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x())
        {
            inside = !inside;
        }
    }
    return inside ? -best : best;
}

std::vector<Eigen::Vector2d> points_of(const FiducialSet& f, int begin, int end)
{
    return {f.points().begin() + begin, f.points().begin() + end};
}

Eigen::Vector3d mix(const Eigen::Vector3d& a, const Eigen::Vector3d& b, double t)
{
    return (1.0 - t) * a + t * b;
}

// Band-limited noise from random plane waves, roughly in [0, 1].
class WaveNoise
{
public:
    WaveNoise(std::uint32_t seed, double feature_size, int components = 24)
    {
        std::mt19937 rng(seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int k = 0; k < components; ++k)
        {
            const double angle = 2.0 * pi * unit(rng);
            const double frequency = (0.5 + unit(rng)) / feature_size;
            waves_.push_back({frequency * std::cos(angle), frequency * std::sin(angle), 2.0 * pi * unit(rng)});
        }
        norm_ = 1.0 / std::sqrt(2.0 * components);
    }

    double operator()(double x, double y) const
    {
        double sum = 0.0;
        for (const auto& w : waves_)
        {
            sum += std::sin(2.0 * pi * (w[0] * x + w[1] * y) + w[2]);
        }
        return std::clamp(0.5 + 0.5 * sum * norm_ * 1.5, 0.0, 1.0);
    }

private:
    std::vector<std::array<double, 3>> waves_;
    double norm_ = 1.0;
};

Image neutral_texture(int width, int height, const Identity& identity, const FiducialSet& f)
{
    const Frame frame(width, height);
    const WaveNoise low(identity.seed * 7919u + 1u, 0.35 * width);
    const WaveNoise pores(identity.seed * 104729u + 3u, 2.5);
    const WaveNoise freckles(identity.seed * 1299709u + 5u, 4.0);

    const auto right_brow = points_of(f, 0, 5);
    const auto left_brow = points_of(f, 5, 10);
    const auto outer_lip = points_of(f, landmarks::mouth_outer_begin, landmarks::mouth_outer_end);
    const auto inner_lip = points_of(f, landmarks::mouth_inner_begin, landmarks::mouth_inner_end);
    const double pixel = 1.0;
    const double brow_half_width = 0.03 * frame.sy;

    struct Eye
    {
        Eigen::Vector2d centre;
        double rx, ry;
    };
    auto eye_of = [&](int begin) {
        const Eigen::Vector2d a = f[begin];
        const Eigen::Vector2d b = f[begin + 3];
        const double top = 0.5 * (f[begin + 1].y() + f[begin + 2].y());
        const double bottom = 0.5 * (f[begin + 4].y() + f[begin + 5].y());
        return Eye{0.5 * (a + b), 0.5 * (b - a).norm(), std::max(0.5 * (bottom - top), 0.3)};
    };
    const Eye eyes[2] = {eye_of(landmarks::right_eye_begin), eye_of(landmarks::left_eye_begin)};
    const Eigen::Vector2d nostrils[2] = {f[15], f[17]};

    const Eigen::Vector3d skin = identity.skin;
    const Eigen::Vector3d background(0.22, 0.18, 0.16);
    const Eigen::Vector3d brow_colour(0.25, 0.17, 0.12);
    const Eigen::Vector3d lip_colour(0.72, 0.36, 0.36);
    const Eigen::Vector3d mouth_colour(0.18, 0.06, 0.06);
    const Eigen::Vector3d sclera(0.92, 0.9, 0.88);
    const Eigen::Vector3d iris(0.3, 0.22, 0.15);

    Image out(width, height, 3);
    for (int v = 0; v < height; ++v)
    {
        for (int u = 0; u < width; ++u)
        {
            const Eigen::Vector2d p(u, v);
            const Eigen::Vector2d n = frame.to_normalised(u, v);
            const double face_r = std::hypot(n.x() / 0.9, n.y() / 1.05);
            const double face = 1.0 - smoothstep(0.96, 1.04, face_r);

            Eigen::Vector3d c = skin * (0.92 + 0.16 * low(u, v));
            c *= 0.97 + 0.06 * pores(u, v);
            const double spot = smoothstep(0.78, 0.9, freckles(u + 0.37 * identity.seed, v));
            c = mix(c, c.cwiseProduct(Eigen::Vector3d(0.8, 0.7, 0.65)), 0.6 * spot);

            // Brows.
            const double brow_d = std::min(polyline_distance(p, right_brow), polyline_distance(p, left_brow));
            c = mix(c, brow_colour, 1.0 - smoothstep(brow_half_width - pixel, brow_half_width + pixel, brow_d));

            // Nose wings and nostrils.
            for (const auto& nostril : nostrils)
            {
                const double d = (p - nostril).norm();
                c = mix(c, 0.45 * skin, 0.8 * (1.0 - smoothstep(0.02 * frame.sx, 0.045 * frame.sx, d)));
            }

            // Lips and mouth opening.
            const double lip = polygon_signed_distance(p, outer_lip);
            c = mix(c, lip_colour, 1.0 - smoothstep(-pixel, pixel, lip));
            const double opening = polygon_signed_distance(p, inner_lip);
            c = mix(c, mouth_colour, 1.0 - smoothstep(-0.7 * pixel, 0.7 * pixel, opening));

            // Eyes.
            for (const auto& eye : eyes)
            {
                const Eigen::Vector2d q = p - eye.centre;
                const double r = std::hypot(q.x() / eye.rx, q.y() / eye.ry);
                const double inside = 1.0 - smoothstep(1.0 - pixel / eye.rx, 1.0 + pixel / eye.rx, r);
                const double iris_r = 0.9 * std::min(eye.rx, 2.0 * eye.ry);
                const double iris_w = 1.0 - smoothstep(iris_r - pixel, iris_r + pixel, q.norm());
                const double pupil_w = 1.0 - smoothstep(0.4 * iris_r - 0.5, 0.4 * iris_r + 0.5, q.norm());
                Eigen::Vector3d e = mix(sclera, iris, iris_w);
                e = mix(e, Eigen::Vector3d(0.04, 0.03, 0.03), pupil_w);
                c = mix(c, e, inside);
            }

            c = mix(background, c, face);
            for (int k = 0; k < 3; ++k)
            {
                out.at(u, v, k) = static_cast<float>(std::clamp(c[k], 0.0, 1.0));
            }
        }
    }
    return out;
}

void add_creases(Image& image, const FiducialSet& f, const Expression& e, int width, int height)
{
    const Frame frame(width, height);
    if (e.smile <= 0.0 && e.brow_raise <= 0.0)
    {
        return;
    }
    std::vector<std::vector<Eigen::Vector2d>> smile_lines;
    // Nasolabial folds from the nose wings to just outside the mouth corners.
    const Eigen::Vector2d out_r(-0.06 * frame.sx, 0.0);
    smile_lines.push_back({f[14] + 1.6 * out_r, f[31] + out_r + Eigen::Vector2d(0, -0.08 * frame.sy),
                           f[31] + 0.8 * out_r + Eigen::Vector2d(0, 0.06 * frame.sy)});
    smile_lines.push_back({f[18] - 1.6 * out_r, f[37] - out_r + Eigen::Vector2d(0, -0.08 * frame.sy),
                           f[37] - 0.8 * out_r + Eigen::Vector2d(0, 0.06 * frame.sy)});
    // Crow's feet at the outer eye corners.
    for (int side = 0; side < 2; ++side)
    {
        const Eigen::Vector2d corner = side == 0 ? f[19] : f[28];
        const double dir = side == 0 ? -1.0 : 1.0;
        for (int k = -1; k <= 1; ++k)
        {
            const Eigen::Vector2d a = corner + Eigen::Vector2d(dir * 0.04 * frame.sx, 0.03 * k * frame.sy);
            const Eigen::Vector2d b = corner + Eigen::Vector2d(dir * 0.14 * frame.sx, 0.07 * k * frame.sy);
            smile_lines.push_back({a, b});
        }
    }
    std::vector<std::vector<Eigen::Vector2d>> brow_lines;
    for (int k = 0; k < 3; ++k)
    {
        const double y = f[2].y() - (0.1 + 0.07 * k) * frame.sy;
        brow_lines.push_back({Eigen::Vector2d(f[1].x(), y), Eigen::Vector2d(f[8].x(), y)});
    }

    for (int v = 0; v < height; ++v)
    {
        for (int u = 0; u < width; ++u)
        {
            const Eigen::Vector2d p(u, v);
            double darken = 0.0;
            for (const auto& line : smile_lines)
            {
                darken = std::max(darken, e.smile * 0.45 * (1.0 - smoothstep(0.2, 1.2, polyline_distance(p, line))));
            }
            for (const auto& line : brow_lines)
            {
                darken = std::max(darken, std::max(0.0, e.brow_raise) * 0.3 *
                                              (1.0 - smoothstep(0.2, 1.0, polyline_distance(p, line))));
            }
            for (int c = 0; c < 3; ++c)
            {
                image.at(u, v, c) *= static_cast<float>(1.0 - darken);
            }
        }
    }
}

} // namespace

FiducialSet landmarks(int width, int height, const Identity& identity, const Expression& e)
{
    const Frame frame(width, height);
    std::array<Eigen::Vector2d, FiducialSet::count> n; // normalised coordinates
    // Brows.
    for (int k = 0; k < 5; ++k)
    {
        const double t = k / 4.0;
        const double arch = 0.06 * std::sin(pi * t);
        const double y = -0.42 - arch - 0.06 * e.brow_raise;
        n[k] = {-0.58 + 0.42 * t - identity.eye_spacing, y};
        n[5 + k] = {0.16 + 0.42 * t + identity.eye_spacing, -0.42 - 0.06 * std::sin(pi * t) - 0.06 * e.brow_raise};
    }
    // Nose bridge and lower nose.
    for (int k = 0; k < 4; ++k)
    {
        n[10 + k] = {0.0, -0.28 + 0.11 * k};
    }
    const double nose_x[5] = {-0.14, -0.07, 0.0, 0.07, 0.14};
    const double nose_y[5] = {0.12, 0.15, 0.17, 0.15, 0.12};
    for (int k = 0; k < 5; ++k)
    {
        n[14 + k] = {nose_x[k], nose_y[k]};
    }
    // Eyes: corner, two upper lid points, corner, two lower lid points.
    for (int side = 0; side < 2; ++side)
    {
        const double cx = (side == 0 ? -0.33 - identity.eye_spacing : 0.33 + identity.eye_spacing);
        const double cy = -0.25;
        const double rx = 0.12;
        const double ry = 0.055;
        const double lid = ry * (1.0 - 0.9 * e.eye_close);
        const int base = side == 0 ? landmarks::right_eye_begin : landmarks::left_eye_begin;
        n[base + 0] = {cx - rx, cy};
        n[base + 1] = {cx - rx / 2, cy - lid};
        n[base + 2] = {cx + rx / 2, cy - lid};
        n[base + 3] = {cx + rx, cy};
        n[base + 4] = {cx + rx / 2, cy + ry * 0.9};
        n[base + 5] = {cx - rx / 2, cy + ry * 0.9};
    }
    // Outer lip: right corner, upper lip, left corner, lower lip.
    const double mcx = 0.0;
    const double mcy = 0.45;
    const double mrx = 0.27 + identity.mouth_width + 0.05 * e.smile;
    for (int k = 0; k < 12; ++k)
    {
        const double a = pi * k / 6.0;
        const double ry = k <= 6 ? 0.08 : 0.1 + 0.14 * e.mouth_open;
        double x = mcx - mrx * std::cos(a);
        double y = mcy - (k <= 6 ? 1.0 : 1.0) * ry * std::sin(a);
        // Smiles lift the corners more than the middle.
        y -= 0.09 * e.smile * std::pow(std::cos(a), 2);
        n[landmarks::mouth_outer_begin + k] = {x, y};
    }
    // Inner lip: right corner, upper middle, left corner, lower left, lower middle, lower right.
    const double irx = 0.8 * mrx;
    const double open = 0.01 + 0.12 * e.mouth_open;
    const double lift = 0.09 * e.smile;
    n[43] = {mcx - irx, mcy - lift};
    n[44] = {mcx, mcy - 0.02};
    n[45] = {mcx + irx, mcy - lift};
    n[46] = {mcx + 0.5 * irx, mcy + open - 0.25 * lift};
    n[47] = {mcx, mcy + open + 0.01};
    n[48] = {mcx - 0.5 * irx, mcy + open - 0.25 * lift};

    std::array<Eigen::Vector2d, FiducialSet::count> grid;
    for (int i = 0; i < FiducialSet::count; ++i)
    {
        grid[i] = frame.to_grid(n[i].x(), n[i].y());
    }
    return FiducialSet(grid);
}

double face_depth(int width, int height, double u, double v)
{
    const Frame frame(width, height);
    const Eigen::Vector2d n = frame.to_normalised(u, v);
    const double r2 = std::pow(n.x() / 0.95, 2) + std::pow(n.y() / 1.1, 2);
    if (r2 >= 1.0)
    {
        return std::numeric_limits<double>::quiet_NaN();
    }
    double z = 0.55 * std::sqrt(1.0 - r2);
    // Nose ridge and tip.
    z += 0.22 * std::exp(-std::pow(n.x() / 0.1, 2) - std::pow((n.y() - 0.02) / 0.2, 2));
    // Eye sockets.
    for (double side : {-0.33, 0.33})
    {
        z -= 0.05 * std::exp(-std::pow((n.x() - side) / 0.13, 2) - std::pow((n.y() + 0.25) / 0.08, 2));
    }
    // Brow ridge.
    z += 0.04 * std::exp(-std::pow(n.y() + 0.42, 2) / 0.004) * (std::abs(n.x()) < 0.6 ? 1.0 : 0.0);
    return z * frame.sx;
}

geometry::FaceTemplate make_template(int width, int height)
{
    std::vector<double> depth(static_cast<std::size_t>(width) * height);
    for (int v = 0; v < height; ++v)
    {
        for (int u = 0; u < width; ++u)
        {
            depth[static_cast<std::size_t>(v) * width + u] = face_depth(width, height, u, v);
        }
    }
    DepthMesh mesh = DepthMesh::from_depth_map(width, height, depth);
    const FiducialSet neutral = landmarks(width, height, Identity{});
    geometry::TemplatePoints points;
    for (int i = 0; i < FiducialSet::count; ++i)
    {
        const auto surface = mesh.sample(neutral[i].x(), neutral[i].y());
        if (!surface)
        {
            throw ComputationError("make_template: landmark outside the face surface");
        }
        points[i] = *surface;
    }
    return geometry::FaceTemplate{std::move(mesh), points};
}

DepthMesh expression_mesh(const DepthMesh& neutral, const FiducialSet& neutral_landmarks,
                          const FiducialSet& expression_landmarks)
{
    const auto forward = geometry::fit_tps(expression_landmarks, neutral_landmarks, 0.0);
    std::vector<Eigen::Vector3d> vertices = neutral.values();
    for (int v = 0; v < neutral.height(); ++v)
    {
        for (int u = 0; u < neutral.width(); ++u)
        {
            if (!neutral.valid(u, v))
            {
                continue;
            }
            const Eigen::Vector2d q = forward(Eigen::Vector2d(u, v));
            if (const auto moved = neutral.sample(q.x(), q.y()))
            {
                vertices[neutral.index(u, v)] = *moved;
            }
        }
    }
    return DepthMesh(neutral.width(), neutral.height(), std::move(vertices), neutral.mask());
}

Image face_texture(int width, int height, const Identity& identity, const Expression& expression)
{
    const FiducialSet neutral = landmarks(width, height, identity, Expression{});
    Image texture = neutral_texture(width, height, identity, neutral);
    const FiducialSet target = landmarks(width, height, identity, expression);
    if (!(target == neutral))
    {
        const auto mapping = geometry::fit_tps(neutral, target, 0.0);
        texture = geometry::warp(texture, geometry::rasterize_tps(mapping, width, height));
    }
    add_creases(texture, target, expression, width, height);
    return texture;
}

Image apply_lighting(const Image& texture, const Lighting& lighting)
{
    const Frame frame(texture.width(), texture.height());
    Image out(texture.width(), texture.height(), texture.channels());
    for (int v = 0; v < texture.height(); ++v)
    {
        for (int u = 0; u < texture.width(); ++u)
        {
            const Eigen::Vector2d n = frame.to_normalised(u, v);
            const double shade = std::max(0.0, lighting.ambient + lighting.gradient_x * n.x() +
                                                   lighting.gradient_y * n.y() + lighting.curvature * n.squaredNorm());
            for (int c = 0; c < texture.channels(); ++c)
            {
                const double tint = c < 3 ? lighting.tint[c] : 1.0;
                out.at(u, v, c) = static_cast<float>(std::clamp(texture.at(u, v, c) * shade * tint, 0.0, 1.0));
            }
        }
    }
    return out;
}

Pose view_pose(double yaw_degrees, double pitch_degrees, double distance, const Intrinsics& intrinsics)
{
    const Eigen::Matrix3d R = (Eigen::AngleAxisd(yaw_degrees * pi / 180.0, Eigen::Vector3d::UnitY()) *
                               Eigen::AngleAxisd(pitch_degrees * pi / 180.0, Eigen::Vector3d::UnitX()))
                                  .toRotationMatrix();
    return Pose(R, Eigen::Vector3d(0.0, 0.0, -distance), intrinsics);
}

RenderedPhoto render_photo(const Image& canonical, const FiducialSet& canonical_landmarks,
                           const geometry::FaceTemplate& face_template, const Pose& pose, int photo_width,
                           int photo_height, const std::string& id)
{
    const DepthMesh& mesh = face_template.mesh;
    if (canonical.width() != mesh.width() || canonical.height() != mesh.height())
    {
        throw InputError("render_photo: texture and template grids differ");
    }
    std::vector<geometry::ScreenVertex> projected(mesh.size());
    for (std::size_t i = 0; i < mesh.size(); ++i)
    {
        if (mesh.mask()[i])
        {
            projected[i] = {pose.project(mesh.values()[i]), pose.depth(mesh.values()[i])};
        }
    }
    geometry::DepthBuffer zbuffer(photo_width, photo_height);
    Image photo(photo_width, photo_height, 3, 0.35f);
    geometry::for_each_mesh_triangle(mesh, [&](std::size_t a, std::size_t b, std::size_t c) {
        const Eigen::Vector2d uv_a(static_cast<double>(a % mesh.width()), static_cast<double>(a / mesh.width()));
        const Eigen::Vector2d uv_b(static_cast<double>(b % mesh.width()), static_cast<double>(b / mesh.width()));
        const Eigen::Vector2d uv_c(static_cast<double>(c % mesh.width()), static_cast<double>(c / mesh.width()));
        geometry::rasterize_triangle(projected[a], projected[b], projected[c], photo_width, photo_height, true,
                                     [&](int x, int y, double depth, const Eigen::Vector3d& w) {
                                         if (!zbuffer.test_and_set(x, y, depth))
                                         {
                                             return;
                                         }
                                         const Eigen::Vector2d uv = w[0] * uv_a + w[1] * uv_b + w[2] * uv_c;
                                         for (int k = 0; k < 3; ++k)
                                         {
                                             photo.at(x, y, k) = canonical.sample(uv.x(), uv.y(), k);
                                         }
                                     });
    });

    std::array<Eigen::Vector2d, FiducialSet::count> observed;
    for (int i = 0; i < FiducialSet::count; ++i)
    {
        const auto surface = mesh.sample(canonical_landmarks[i].x(), canonical_landmarks[i].y());
        if (!surface)
        {
            throw ComputationError("render_photo: landmark outside the face surface");
        }
        observed[i] = pose.project(*surface);
    }
    PhotoRecord record{id, FaceImage(std::move(photo)), FiducialSet(observed), std::nullopt};
    return RenderedPhoto{std::move(record), canonical, canonical_landmarks};
}

Image noise_texture(int width, int height, std::uint32_t seed, double feature_size, int channels,
                    const Eigen::Vector2d& offset)
{
    Image out(width, height, channels);
    for (int c = 0; c < channels; ++c)
    {
        const WaveNoise coarse(seed * 31u + static_cast<std::uint32_t>(c) * 7u + 11u, 2.5 * feature_size);
        const WaveNoise fine(seed * 131u + static_cast<std::uint32_t>(c) * 17u + 5u, feature_size);
        for (int y = 0; y < height; ++y)
        {
            for (int x = 0; x < width; ++x)
            {
                out.at(x, y, c) = static_cast<float>(0.5 * coarse(x + offset.x(), y + offset.y()) +
                                                    0.5 * fine(x + offset.x(), y + offset.y()));
            }
        }
    }
    return out;
}

} /* namespace synth */
} /* namespace facepuppet */
