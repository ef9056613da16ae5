/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: include/facepuppet/denoise/rof_huber.hpp
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
#pragma once

#ifndef FACEPUPPET_DENOISE_ROF_HUBER_HPP
#define FACEPUPPET_DENOISE_ROF_HUBER_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace facepuppet {
namespace denoise {

/// Scalar per-vertex values on a mesh grid with a validity mask.
struct ScalarField
{
    int width = 0;
    int height = 0;
    std::vector<double> values;
    std::vector<std::uint8_t> valid;

    ScalarField() = default;
    /// Throws InputError if the buffer sizes do not match the dimensions.
    ScalarField(int width, int height, std::vector<double> values, std::vector<std::uint8_t> valid);

    std::size_t index(int u, int v) const noexcept { return static_cast<std::size_t>(v) * width + u; }
    double at(int u, int v) const noexcept { return values[index(u, v)]; }
    bool is_valid(int u, int v) const noexcept { return valid[index(u, v)] != 0; }
};

/// Float-grid container with (value, 0, 0, valid) per vertex.
void save_scalar_field(const ScalarField& field, const std::string& path);
ScalarField load_scalar_field(const std::string& path);

struct DenoiseParams
{
    double tv_weight = 1.0;
    double huber_eps = 0.05;
    int max_iterations = 300;
    double tolerance = 1e-7; ///< relative energy change that stops the iteration
};

/// Huber penalty of a gradient length: r^2 / (2 eps) below eps, r - eps / 2 above.
double huber(double r, double eps) noexcept;

/**
 * (1/2) sum (x - f)^2 + tv_weight * sum H_eps(|grad x|) over valid vertices.
 * Gradients are forward differences; a difference is dropped when either end
 * is invalid or outside the grid.
 */
double rof_huber_energy(const ScalarField& x, const ScalarField& f, double tv_weight, double huber_eps);

struct DenoiseReport
{
    double initial_energy = 0.0;
    double final_energy = 0.0;
    double gap = 0.0; ///< primal-dual gap at the last iterate
    int iterations = 0;
};

/**
 * Huber-TV regularised ROF denoising, solved with the accelerated
 * primal-dual (Chambolle-Pock) iteration for a strongly convex primal and
 * dual. Invalid vertices keep their input value and do not couple to their
 * neighbours. The result is clamped to the input's valid value range.
 *
 * Throws InputError for tv_weight < 0, huber_eps <= 0, an empty valid set,
 * or a non-finite valid value.
 */
ScalarField rof_huber_denoise(const ScalarField& field, const DenoiseParams& params = {},
                              DenoiseReport* report = nullptr);

} /* namespace denoise */
} /* namespace facepuppet */

#endif /* FACEPUPPET_DENOISE_ROF_HUBER_HPP */
