/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: src/flow/subspace.cpp
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
#include "facepuppet/flow/subspace.hpp"
#include "facepuppet/core/error.hpp"

#include "Eigen/Core"
#include "Eigen/Eigenvalues"

#include <cmath>
#include <functional>

namespace facepuppet {
namespace flow {

namespace {

constexpr std::size_t block_size = 8192;

double dot(std::span<const float> a, std::span<const float> b)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        sum += static_cast<double>(a[i]) * b[i];
    }
    return sum;
}

void check_shape(const Image& a, const Image& b, const char* what)
{
    if (a.width() != b.width() || a.height() != b.height() || a.channels() != b.channels())
    {
        throw InputError(std::string(what) + ": image dimensions differ");
    }
}

AppearanceSubspace build(std::size_t n, const std::function<const Image&(std::size_t)>& image_at, int rank)
{
    if (rank < 1)
    {
        throw InputError("build_subspace: rank must be positive");
    }
    if (n < static_cast<std::size_t>(rank) + 1)
    {
        throw InputError("build_subspace: need at least " + std::to_string(rank + 1) + " images, got " +
                         std::to_string(n));
    }
    const Image& first = image_at(0);
    for (std::size_t i = 1; i < n; ++i)
    {
        check_shape(first, image_at(i), "build_subspace");
    }
    const std::size_t length = first.data().size();

    std::vector<double> mean(length, 0.0);
    for (std::size_t i = 0; i < n; ++i)
    {
        const auto data = image_at(i).data();
        for (std::size_t k = 0; k < length; ++k)
        {
            mean[k] += data[k];
        }
    }
    for (double& m : mean)
    {
        m /= static_cast<double>(n);
    }

    // Gram matrix of the centred images, accumulated block by block.
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    Eigen::MatrixXd block(static_cast<Eigen::Index>(block_size), static_cast<Eigen::Index>(n));
    auto fill_block = [&](std::size_t begin, std::size_t rows) {
        for (std::size_t i = 0; i < n; ++i)
        {
            const auto data = image_at(i).data();
            for (std::size_t r = 0; r < rows; ++r)
            {
                block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = data[begin + r] - mean[begin + r];
            }
        }
    };
    for (std::size_t begin = 0; begin < length; begin += block_size)
    {
        const std::size_t rows = std::min(block_size, length - begin);
        fill_block(begin, rows);
        const auto b = block.topRows(static_cast<Eigen::Index>(rows));
        gram.noalias() += b.transpose() * b;
    }

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    const Eigen::VectorXd values = solver.eigenvalues(); // ascending
    const Eigen::MatrixXd vectors = solver.eigenvectors();
    const double floor = std::max(1e-10 * gram.trace(), 1e-14 * static_cast<double>(length));

    std::vector<double> energies;
    std::vector<Eigen::Index> kept;
    for (int k = 0; k < rank; ++k)
    {
        const Eigen::Index column = static_cast<Eigen::Index>(n) - 1 - k;
        const double lambda = std::max(values(column), 0.0);
        energies.push_back(lambda);
        if (lambda > floor)
        {
            kept.push_back(column);
        }
    }

    // Basis images X v / sqrt(lambda), re-orthonormalised in double.
    std::vector<std::vector<double>> basis(kept.size(), std::vector<double>(length, 0.0));
    for (std::size_t begin = 0; begin < length; begin += block_size)
    {
        const std::size_t rows = std::min(block_size, length - begin);
        fill_block(begin, rows);
        for (std::size_t k = 0; k < kept.size(); ++k)
        {
            const Eigen::VectorXd column = block.topRows(static_cast<Eigen::Index>(rows)) * vectors.col(kept[k]) /
                                           std::sqrt(values(kept[k]));
            std::copy(column.data(), column.data() + rows, basis[k].begin() + static_cast<std::ptrdiff_t>(begin));
        }
    }
    for (std::size_t k = 0; k < basis.size(); ++k)
    {
        for (std::size_t j = 0; j < k; ++j)
        {
            double projection = 0.0;
            for (std::size_t i = 0; i < length; ++i)
            {
                projection += basis[k][i] * basis[j][i];
            }
            for (std::size_t i = 0; i < length; ++i)
            {
                basis[k][i] -= projection * basis[j][i];
            }
        }
        double norm = 0.0;
        for (double x : basis[k])
        {
            norm += x * x;
        }
        norm = std::sqrt(norm);
        std::size_t peak = 0;
        for (std::size_t i = 1; i < length; ++i)
        {
            if (std::abs(basis[k][i]) > std::abs(basis[k][peak]))
            {
                peak = i;
            }
        }
        const double scale = (basis[k][peak] < 0.0 ? -1.0 : 1.0) / norm;
        for (double& x : basis[k])
        {
            x *= scale;
        }
    }

    auto to_image = [&](const std::vector<double>& values_in) {
        std::vector<float> data(values_in.begin(), values_in.end());
        return Image(first.width(), first.height(), first.channels(), std::move(data));
    };
    std::vector<Image> basis_images;
    for (const auto& b : basis)
    {
        basis_images.push_back(to_image(b));
    }
    return AppearanceSubspace(to_image(mean), std::move(basis_images), std::move(energies), rank);
}

} // namespace

AppearanceSubspace::AppearanceSubspace(Image mean, std::vector<Image> basis, std::vector<double> energies, int rank)
    : mean_(std::move(mean)), basis_(std::move(basis)), energies_(std::move(energies)), rank_(rank)
{
    if (basis_.size() > static_cast<std::size_t>(rank_))
    {
        throw InputError("AppearanceSubspace: more basis images than the rank");
    }
    for (std::size_t i = 0; i < basis_.size(); ++i)
    {
        check_shape(mean_, basis_[i], "AppearanceSubspace");
        for (std::size_t j = 0; j <= i; ++j)
        {
            const double expected = i == j ? 1.0 : 0.0;
            if (!(std::abs(dot(basis_[i].data(), basis_[j].data()) - expected) <= 1e-6))
            {
                throw InputError("AppearanceSubspace: basis is not orthonormal");
            }
        }
    }
}

AppearanceSubspace build_subspace(std::span<const Image> images, int rank)
{
    return build(images.size(), [&](std::size_t i) -> const Image& { return images[i]; }, rank);
}

AppearanceSubspace build_subspace(std::span<const FaceImage> images, int rank)
{
    return build(images.size(), [&](std::size_t i) -> const Image& { return images[i].image(); }, rank);
}

std::vector<double> subspace_coefficients(const Image& image, const AppearanceSubspace& subspace)
{
    check_shape(image, subspace.mean(), "project");
    const auto x = image.data();
    const auto m = subspace.mean().data();
    std::vector<double> coefficients;
    for (const Image& b : subspace.basis())
    {
        const auto bd = b.data();
        double sum = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            sum += (static_cast<double>(x[i]) - m[i]) * bd[i];
        }
        coefficients.push_back(sum);
    }
    return coefficients;
}

Image project(const Image& image, const AppearanceSubspace& subspace)
{
    const std::vector<double> coefficients = subspace_coefficients(image, subspace);
    const auto m = subspace.mean().data();
    std::vector<float> out(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
    {
        double value = m[i];
        for (std::size_t k = 0; k < coefficients.size(); ++k)
        {
            value += coefficients[k] * subspace.basis()[k].data()[i];
        }
        out[i] = static_cast<float>(value);
    }
    return Image(image.width(), image.height(), image.channels(), std::move(out));
}

} /* namespace flow */
} /* namespace facepuppet */
