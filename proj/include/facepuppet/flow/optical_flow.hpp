/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: include/facepuppet/flow/optical_flow.hpp
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

#ifndef FACEPUPPET_FLOW_OPTICAL_FLOW_HPP
#define FACEPUPPET_FLOW_OPTICAL_FLOW_HPP

#include "facepuppet/core/image.hpp"
#include "facepuppet/core/warp_field.hpp"

#include <span>
#include <vector>

namespace facepuppet {
namespace flow {

struct FlowParams
{
    double alpha = 0.02;      ///< smoothness weight
    double ratio = 0.85;      ///< pyramid downsampling ratio
    int min_width = 20;       ///< coarsest level size (smaller image side)
    int outer_iterations = 4; ///< warping iterations per level
    int inner_iterations = 1; ///< lagged-diffusivity updates per warp
    int sor_iterations = 40;  ///< relaxation sweeps per linear solve

    /// Throws InputError unless 0 < ratio < 1, min_width >= 8, alpha >= 0 and all counts >= 1.
    void validate() const;
};

struct FlowResult
{
    WarpField field;
    /// Energy before the first and after every outer iteration, one list per level (coarsest first).
    std::vector<std::vector<double>> energy_trace;
};

/**
 * Coarse-to-fine variational optical flow on the luminance of two images.
 *
 * Minimises sum Psi(|I_s(p + w) - I_t(p)|^2) + Psi(|grad I_s(p + w) - grad I_t(p)|^2)
 * + alpha * Psi(|grad u|^2 + |grad v|^2) with Psi(s) = sqrt(s + 1e-6), so that
 * warp(source, w) approximates target. Each outer iteration linearises the
 * data term, solves with lagged diffusivities and SOR, and backtracks on the
 * increment so the energy never increases.
 *
 * Throws InputError on size mismatch, invalid params, or an image side below min_width.
 */
FlowResult compute_flow_with_trace(const Image& source, const Image& target, const FlowParams& params = {});

inline WarpField compute_flow(const Image& source, const Image& target, const FlowParams& params = {})
{
    return compute_flow_with_trace(source, target, params).field;
}

/// The flow energy of a field at full resolution (the functional minimised above).
double flow_energy(const Image& source, const Image& target, const WarpField& field, double alpha);

/**
 * Per image, the flow from the image to its projection onto the rank-4
 * subspace of the whole set. Throws InputError for fewer than 5 images.
 */
std::vector<WarpField> align_via_subspace(std::span<const Image> images, const FlowParams& params = {});

} /* namespace flow */
} /* namespace facepuppet */

#endif /* FACEPUPPET_FLOW_OPTICAL_FLOW_HPP */
