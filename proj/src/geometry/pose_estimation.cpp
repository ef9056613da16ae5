/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: src/geometry/pose_estimation.cpp
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
#include "facepuppet/geometry/pose_estimation.hpp"
#include "facepuppet/core/error.hpp"

#include "Eigen/Cholesky"
#include "Eigen/Geometry"
#include "Eigen/LU"
#include "Eigen/SVD"

#include <cmath>
#include <optional>
#include <sstream>

namespace facepuppet {
namespace geometry {

namespace {

constexpr int max_iterations = 100;
constexpr double step_tolerance = 1e-10;

Eigen::Matrix3d skew(const Eigen::Vector3d& v)
{
    Eigen::Matrix3d m;
    m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
    return m;
}

Eigen::Matrix3d nearest_rotation(const Eigen::Matrix3d& m)
{
    const Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d fix = Eigen::Matrix3d::Identity();
    fix(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
    return svd.matrixU() * fix * svd.matrixV().transpose();
}

double sum_squared_residual(const Eigen::Matrix3d& R, const Eigen::Vector3d& t, const Intrinsics& K,
                            const TemplatePoints& X, const FiducialSet& observed)
{
    double sum = 0.0;
    for (int i = 0; i < FiducialSet::count; ++i)
    {
        const Eigen::Vector3d c = R * X[i] + t;
        const double d = -c.z();
        if (!(d > 0.0))
        {
            return std::numeric_limits<double>::infinity();
        }
        const Eigen::Vector2d p(K.cx + K.focal * c.x() / d, K.cy - K.focal * c.y() / d);
        sum += (p - observed[i]).squaredNorm();
    }
    return sum;
}

double mean_error(const Eigen::Matrix3d& R, const Eigen::Vector3d& t, const Intrinsics& K, const TemplatePoints& X,
                  const FiducialSet& observed)
{
    double sum = 0.0;
    for (int i = 0; i < FiducialSet::count; ++i)
    {
        const Eigen::Vector3d c = R * X[i] + t;
        const double d = -c.z();
        const Eigen::Vector2d p(K.cx + K.focal * c.x() / d, K.cy - K.focal * c.y() / d);
        sum += (p - observed[i]).norm();
    }
    return sum / FiducialSet::count;
}

// Direct linear transform on normalised coordinates m = (X_c.x, X_c.y) / d.
void linear_pose(const FiducialSet& fiducials, const TemplatePoints& X, const Intrinsics& K, Eigen::Matrix3d& R,
                 Eigen::Vector3d& t)
{
    constexpr int n = FiducialSet::count;
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (const auto& p : X)
    {
        centroid += p;
    }
    centroid /= n;
    double mean_dist = 0.0;
    for (const auto& p : X)
    {
        mean_dist += (p - centroid).norm();
    }
    mean_dist /= n;
    const double s = std::sqrt(3.0) / mean_dist;

    Eigen::Matrix<double, 2 * n, 12> A = Eigen::Matrix<double, 2 * n, 12>::Zero();
    for (int i = 0; i < n; ++i)
    {
        const Eigen::Vector4d Xh((X[i] - centroid).x() * s, (X[i] - centroid).y() * s, (X[i] - centroid).z() * s, 1.0);
        const double mx = (fiducials[i].x() - K.cx) / K.focal;
        const double my = -(fiducials[i].y() - K.cy) / K.focal;
        A.block<1, 4>(2 * i, 0) = Xh.transpose();
        A.block<1, 4>(2 * i, 8) = mx * Xh.transpose();
        A.block<1, 4>(2 * i + 1, 4) = Xh.transpose();
        A.block<1, 4>(2 * i + 1, 8) = my * Xh.transpose();
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    const Eigen::VectorXd sv = svd.singularValues();
    if (!(sv(10) > 1e-9 * sv(0)))
    {
        throw InputError("estimate_pose: template points are degenerate (coplanar configuration)");
    }
    const Eigen::VectorXd p = svd.matrixV().col(11);
    Eigen::Matrix<double, 3, 4> P_normalised;
    P_normalised << p.segment<4>(0).transpose(), p.segment<4>(4).transpose(), p.segment<4>(8).transpose();

    // Undo the 3D normalisation: X_n = s (X - centroid).
    Eigen::Matrix4d T = Eigen::Matrix4d::Identity();
    T.topLeftCorner<3, 3>() *= s;
    T.topRightCorner<3, 1>() = -s * centroid;
    const Eigen::Matrix<double, 3, 4> P = P_normalised * T;

    const Eigen::Matrix3d M = P.leftCols<3>();
    const double det = M.determinant();
    if (!(std::abs(det) > 0.0))
    {
        throw ComputationError("estimate_pose: degenerate linear solution");
    }
    const double scale = std::cbrt(det);
    R = nearest_rotation(M / scale);
    t = P.col(3) / scale;
}

// Scaled orthographic fit m ~ (R X + t).xy / d0. Empty optional if degenerate.
std::optional<std::pair<Eigen::Matrix3d, Eigen::Vector3d>> weak_perspective_pose(const FiducialSet& fiducials,
                                                                                const TemplatePoints& X,
                                                                                const Intrinsics& K)
{
    constexpr int n = FiducialSet::count;
    Eigen::Matrix<double, n, 4> A;
    Eigen::Matrix<double, n, 2> b;
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (int i = 0; i < n; ++i)
    {
        A.row(i) << X[i].x(), X[i].y(), X[i].z(), 1.0;
        b(i, 0) = (fiducials[i].x() - K.cx) / K.focal;
        b(i, 1) = -(fiducials[i].y() - K.cy) / K.focal;
        centroid += X[i] / n;
    }
    const Eigen::Matrix<double, 4, 2> M = A.colPivHouseholderQr().solve(b);
    const Eigen::Vector3d r1 = M.col(0).head<3>();
    const Eigen::Vector3d r2 = M.col(1).head<3>();
    const double s = 0.5 * (r1.norm() + r2.norm());
    if (!(s > 0.0) || !M.allFinite())
    {
        return std::nullopt;
    }
    Eigen::Matrix3d R;
    R.row(0) = r1.transpose() / s;
    R.row(1) = r2.transpose() / s;
    R.row(2) = R.row(0).cross(R.row(1));
    R = nearest_rotation(R);
    const double d0 = 1.0 / s;
    const Eigen::Vector3d t(M(3, 0) * d0, M(3, 1) * d0, -d0 - (R * centroid).z());
    return std::pair{R, t};
}

} // namespace

Eigen::Matrix3d axis_angle(const Eigen::Vector3d& axis, double angle)
{
    return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

double rotation_angle_between(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b)
{
    const double c = std::clamp(((a.transpose() * b).trace() - 1.0) / 2.0, -1.0, 1.0);
    return std::acos(c);
}

double mean_reprojection_error(const Pose& pose, const TemplatePoints& template_points, const FiducialSet& fiducials)
{
    return mean_error(pose.rotation(), pose.translation(), pose.intrinsics(), template_points, fiducials);
}

PoseEstimate estimate_pose(const FiducialSet& fiducials, const TemplatePoints& template_points,
                           const Intrinsics& intrinsics)
{
    if (!(intrinsics.focal > 0.0) || !std::isfinite(intrinsics.cx) || !std::isfinite(intrinsics.cy))
    {
        throw InputError("estimate_pose: invalid intrinsics");
    }
    for (const auto& p : template_points)
    {
        if (!p.allFinite())
        {
            throw InputError("estimate_pose: non-finite template point");
        }
    }

    const Intrinsics& K = intrinsics;
    // Start from the best of the projective and the scaled orthographic
    // initialisations; the latter is better conditioned for distant faces.
    Eigen::Matrix3d R;
    Eigen::Vector3d t;
    linear_pose(fiducials, template_points, intrinsics, R, t);
    double cost = sum_squared_residual(R, t, K, template_points, fiducials);
    if (const auto weak = weak_perspective_pose(fiducials, template_points, K))
    {
        const auto& [R0, t0] = *weak;
        const double c = sum_squared_residual(R0, t0, K, template_points, fiducials);
        if (c < cost)
        {
            R = R0;
            t = t0;
            cost = c;
        }
    }
    if (!std::isfinite(cost))
    {
        throw ComputationError("estimate_pose: no initialisation places the landmarks in front of the camera");
    }
    std::vector<double> trace{mean_error(R, t, K, template_points, fiducials)};

    bool converged = false;
    int iteration = 0;
    for (; iteration < max_iterations && !converged; ++iteration)
    {
        Eigen::Matrix<double, 6, 6> JtJ = Eigen::Matrix<double, 6, 6>::Zero();
        Eigen::Matrix<double, 6, 1> Jtr = Eigen::Matrix<double, 6, 1>::Zero();
        for (int i = 0; i < FiducialSet::count; ++i)
        {
            const Eigen::Vector3d rotated = R * template_points[i];
            const Eigen::Vector3d c = rotated + t;
            const double d = -c.z();
            const Eigen::Vector2d r(K.cx + K.focal * c.x() / d - fiducials[i].x(),
                                    K.cy - K.focal * c.y() / d - fiducials[i].y());
            Eigen::Matrix<double, 2, 3> dp_dc;
            dp_dc << K.focal / d, 0.0, K.focal * c.x() / (d * d), 0.0, -K.focal / d, -K.focal * c.y() / (d * d);
            Eigen::Matrix<double, 2, 6> J;
            J.leftCols<3>() = -dp_dc * skew(rotated); // R <- exp([w]x) R
            J.rightCols<3>() = dp_dc;
            JtJ += J.transpose() * J;
            Jtr += J.transpose() * r;
        }
        const Eigen::Matrix<double, 6, 1> step = -JtJ.ldlt().solve(Jtr);
        if (!step.allFinite())
        {
            break;
        }

        double scale = 1.0;
        bool accepted = false;
        for (int halving = 0; halving < 20; ++halving, scale *= 0.5)
        {
            const Eigen::Vector3d w = scale * step.head<3>();
            const Eigen::Matrix3d R_new =
                (w.norm() > 0.0 ? axis_angle(w, w.norm()) : Eigen::Matrix3d::Identity()) * R;
            const Eigen::Vector3d t_new = t + scale * step.tail<3>();
            const double new_cost = sum_squared_residual(R_new, t_new, K, template_points, fiducials);
            if (new_cost <= cost)
            {
                R = nearest_rotation(R_new);
                t = t_new;
                cost = new_cost;
                accepted = true;
                break;
            }
        }
        trace.push_back(mean_error(R, t, K, template_points, fiducials));
        // A step below tolerance, or no descent left at machine precision.
        converged = !accepted || scale * step.norm() < step_tolerance;
    }

    if (!converged)
    {
        std::ostringstream message;
        message << "estimate_pose: Gauss-Newton did not converge in " << max_iterations
                << " iterations; mean reprojection error trace:";
        for (double e : trace)
        {
            message << ' ' << e;
        }
        throw ComputationError(message.str());
    }
    Pose pose(R, t, K);
    return PoseEstimate{pose, trace.back(), std::move(trace), iteration};
}

} /* namespace geometry */
} /* namespace facepuppet */
