/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: src/geometry/tps.cpp
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
#include "facepuppet/geometry/tps.hpp"
#include "facepuppet/core/error.hpp"
#include "facepuppet/core/parallel.hpp"

#include "Eigen/LU"
#include "Eigen/SVD"

#include <cmath>

namespace facepuppet {
namespace geometry {

double tps_kernel(double r) noexcept
{
    return r > 0.0 ? r * r * std::log(r) : 0.0;
}

namespace {

constexpr int n = FiducialSet::count;

Eigen::MatrixXd kernel_matrix(const FiducialSet& points)
{
    Eigen::MatrixXd K(n, n);
    for (int i = 0; i < n; ++i)
    {
        for (int j = 0; j < n; ++j)
        {
            K(i, j) = tps_kernel((points[i] - points[j]).norm());
        }
    }
    return K;
}

Eigen::MatrixXd affine_basis(const FiducialSet& points)
{
    Eigen::MatrixXd P(n, 3);
    for (int i = 0; i < n; ++i)
    {
        P(i, 0) = 1.0;
        P(i, 1) = points[i].x();
        P(i, 2) = points[i].y();
    }
    return P;
}

Eigen::MatrixX2d as_matrix(const FiducialSet& points)
{
    Eigen::MatrixX2d M(n, 2);
    for (int i = 0; i < n; ++i)
    {
        M.row(i) = points[i].transpose();
    }
    return M;
}

double objective(const Eigen::MatrixXd& K, const Eigen::MatrixXd& P, const Eigen::MatrixX2d& source,
                 const Eigen::MatrixX2d& w, const Eigen::Matrix<double, 2, 3>& affine, double lambda)
{
    const Eigen::MatrixX2d fitted = K * w + P * affine.transpose();
    return (source - fitted).squaredNorm() + lambda * (w.transpose() * K * w).trace();
}

} // namespace

TpsMapping::TpsMapping(std::vector<Eigen::Vector2d> control_points, Eigen::MatrixX2d weights,
                       Eigen::Matrix<double, 2, 3> affine, double lambda, std::vector<double> objective_trace)
    : control_points_(std::move(control_points)), weights_(std::move(weights)), affine_(affine), lambda_(lambda),
      objective_trace_(std::move(objective_trace))
{
    if (static_cast<Eigen::Index>(control_points_.size()) != weights_.rows())
    {
        throw InputError("TpsMapping: coefficient count differs from control point count");
    }
}

Eigen::Vector2d TpsMapping::operator()(const Eigen::Vector2d& p) const noexcept
{
    Eigen::Vector2d out = affine_.col(0) + affine_.rightCols<2>() * p;
    for (std::size_t j = 0; j < control_points_.size(); ++j)
    {
        out += weights_.row(static_cast<Eigen::Index>(j)).transpose() * tps_kernel((p - control_points_[j]).norm());
    }
    return out;
}

double TpsMapping::bending_energy() const
{
    const auto m = static_cast<Eigen::Index>(control_points_.size());
    Eigen::MatrixXd K(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
    {
        for (Eigen::Index j = 0; j < m; ++j)
        {
            K(i, j) = tps_kernel((control_points_[i] - control_points_[j]).norm());
        }
    }
    return (weights_.transpose() * K * weights_).trace();
}

double tps_objective(const FiducialSet& source, const FiducialSet& target, const Eigen::MatrixX2d& weights,
                     const Eigen::Matrix<double, 2, 3>& affine, double lambda)
{
    return objective(kernel_matrix(target), affine_basis(target), as_matrix(source), weights, affine, lambda);
}

TpsMapping fit_tps(const FiducialSet& source, const FiducialSet& target, double lambda)
{
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
    {
        throw InputError("fit_tps: lambda must be a finite non-negative number");
    }

    // Collinear targets leave the affine block rank deficient.
    Eigen::MatrixX2d centered = as_matrix(target);
    centered.rowwise() -= centered.colwise().mean();
    const Eigen::Vector2d spread = Eigen::JacobiSVD<Eigen::MatrixX2d>(centered).singularValues();
    if (!(spread(1) > 1e-9 * std::max(1.0, spread(0))))
    {
        throw ComputationError("fit_tps: target fiducials are collinear or coincident");
    }

    const Eigen::MatrixXd K = kernel_matrix(target);
    const Eigen::MatrixXd P = affine_basis(target);
    const Eigen::MatrixX2d src = as_matrix(source);

    // The kernel rows are scaled by s = 1 / (1 + lambda) and the affine unknowns
    // by 1 / s, which keeps the system balanced for large lambda:
    //   [s (K + lambda I), P; P^T, 0] [w; a / s] = [s source; 0].
    const double s = 1.0 / (1.0 + lambda);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + 3, n + 3);
    A.topLeftCorner(n, n) = s * (K + lambda * Eigen::MatrixXd::Identity(n, n));
    A.topRightCorner(n, 3) = P;
    A.bottomLeftCorner(3, n) = P.transpose();
    Eigen::MatrixX2d b = Eigen::MatrixX2d::Zero(n + 3, 2);
    b.topRows(n) = s * src;

    const Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible())
    {
        throw ComputationError("fit_tps: singular spline system (coincident fiducials?)");
    }

    auto unpack = [&](const Eigen::MatrixX2d& x, Eigen::MatrixX2d& w, Eigen::Matrix<double, 2, 3>& affine) {
        w = x.topRows(n);
        affine = x.bottomRows(3).transpose() / s;
    };

    Eigen::MatrixX2d x = lu.solve(b);
    Eigen::MatrixX2d w;
    Eigen::Matrix<double, 2, 3> affine;
    unpack(x, w, affine);
    std::vector<double> trace{objective(K, P, src, w, affine, lambda)};

    // Iterative refinement; a step is kept only if it does not raise the objective.
    for (int step = 0; step < 3; ++step)
    {
        const Eigen::MatrixX2d residual = b - A * x;
        if (residual.norm() <= 1e-15 * std::max(1.0, b.norm()))
        {
            break;
        }
        const Eigen::MatrixX2d candidate = x + lu.solve(residual);
        Eigen::MatrixX2d cw;
        Eigen::Matrix<double, 2, 3> ca;
        unpack(candidate, cw, ca);
        const double value = objective(K, P, src, cw, ca, lambda);
        if (!(value <= trace.back()))
        {
            break;
        }
        x = candidate;
        w = cw;
        affine = ca;
        trace.push_back(value);
    }

    std::vector<Eigen::Vector2d> controls(target.points().begin(), target.points().end());
    return TpsMapping(std::move(controls), std::move(w), affine, lambda, std::move(trace));
}

WarpField rasterize_tps(const TpsMapping& mapping, int width, int height)
{
    if (width <= 0 || height <= 0 || static_cast<long long>(width) * height > (1LL << 28))
    {
        throw InputError("rasterize_tps: invalid field size");
    }
    std::vector<float> data(2 * static_cast<std::size_t>(width) * height);
    const auto& controls = mapping.control_points();
    const auto& w = mapping.weights();
    const auto& affine = mapping.affine();
    parallel_for(0, height, [&](int y) {
        for (int x = 0; x < width; ++x)
        {
            double rx = affine(0, 0) + affine(0, 1) * x + affine(0, 2) * y;
            double ry = affine(1, 0) + affine(1, 1) * x + affine(1, 2) * y;
            for (std::size_t j = 0; j < controls.size(); ++j)
            {
                const double dx = x - controls[j].x();
                const double dy = y - controls[j].y();
                const double r2 = dx * dx + dy * dy;
                // r^2 log r = 0.5 r^2 log r^2
                const double k = r2 > 0.0 ? 0.5 * r2 * std::log(r2) : 0.0;
                rx += w(static_cast<Eigen::Index>(j), 0) * k;
                ry += w(static_cast<Eigen::Index>(j), 1) * k;
            }
            const std::size_t i = 2 * (static_cast<std::size_t>(y) * width + x);
            data[i] = static_cast<float>(rx - x);
            data[i + 1] = static_cast<float>(ry - y);
        }
    });
    return WarpField(width, height, std::move(data));
}

} /* namespace geometry */
} /* namespace facepuppet */
