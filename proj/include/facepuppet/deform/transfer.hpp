/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: include/facepuppet/deform/transfer.hpp
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

#ifndef FACEPUPPET_DEFORM_TRANSFER_HPP
#define FACEPUPPET_DEFORM_TRANSFER_HPP

#include "facepuppet/core/depth_mesh.hpp"
#include "facepuppet/core/fiducials.hpp"
#include "facepuppet/core/image.hpp"
#include "facepuppet/core/warp_field.hpp"
#include "facepuppet/denoise/rof_huber.hpp"
#include "facepuppet/flow/optical_flow.hpp"
#include "facepuppet/flow/subspace.hpp"

#include <string>

namespace facepuppet {
namespace deform {

/**
 * Dense correspondence between the driver and puppet canonical grids.
 *
 * `forward` lives on the driver grid: driver vertex p corresponds to puppet
 * location p + forward(p). `inverse` lives on the puppet grid: puppet vertex
 * q corresponds to driver location q + inverse(q).
 */
struct Correspondence
{
    WarpField forward;
    WarpField inverse;
    std::string provenance;

    static Correspondence identity(int width, int height);
};

/**
 * Flow between illumination-matched projections of the two averages, in both
 * directions: forward compares the puppet average projected onto the driver
 * subspace against the driver average projected onto the same subspace, and
 * inverse does the same in the puppet subspace.
 */
Correspondence cross_identity_correspondence(const Image& driver_average, const Image& puppet_average,
                                             const flow::AppearanceSubspace& driver_space,
                                             const flow::AppearanceSubspace& puppet_space,
                                             const flow::FlowParams& params = {});

/// Puppet-grid residual inverse(q) + forward(q + inverse(q)) of a driver-puppet-driver round trip.
WarpField round_trip_residual(const Correspondence& correspondence);

/// RMS length of the round-trip residual over puppet pixels with mask != 0 (all if empty).
double round_trip_rms(const Correspondence& correspondence, const std::vector<std::uint8_t>& mask = {});

/// Below this length a driver displacement is treated as zero.
inline constexpr double pass_through_threshold = 1e-4;

struct TransferReport
{
    double transfer_ms = 0.0; ///< everything except denoising
    double denoise_ms = 0.0;
    std::size_t moved = 0;        ///< vertices with a transferred displacement
    std::size_t pass_through = 0; ///< vertices whose driver displacement is below threshold
    std::size_t unmatched = 0;    ///< puppet vertices without a valid driver correspondence
    denoise::DenoiseReport denoise;
};

/**
 * Transfers a driver frame's deformation onto the puppet average mesh.
 *
 * For every valid puppet vertex q, the driver vertex (u, v) nearest to
 * q + inverse(q) provides the driver displacement D = frame - average.
 * (s, t) is the driver-average vertex nearest (Euclidean) to M_D(u, v) + D;
 * it maps through forward to the nearest valid puppet vertex (s', t').
 * With D' = M_P(s', t') - M_P(q) the magnitude f = D^ . D' is denoised on the
 * puppet grid and the output vertex is M_P(q) + D^ f*.
 *
 * Vertices with |D| < pass_through_threshold keep M_P(q) exactly (they join
 * the denoising domain with f = 0). Puppet vertices whose correspondence
 * leaves the driver grid or lands on invalid driver vertices are marked
 * invalid in the output. Throws InputError on grid mismatches.
 */
DepthMesh transfer_deformation(const DepthMesh& driver_frame, const DepthMesh& driver_average,
                               const DepthMesh& puppet_average, const Correspondence& correspondence,
                               const denoise::DenoiseParams& denoise_params = {}, TransferReport* report = nullptr);

/**
 * 2.5D approximation of a driver frame: every average vertex slides along
 * the average surface by the 2D motion, frame(p) = M_D(p - motion(p)), where
 * warp(average image, motion) matches the frame image. Vertices whose new
 * position falls off the surface keep their average position.
 */
DepthMesh frame_from_flow(const DepthMesh& driver_average, const WarpField& motion);

/**
 * Landmarks of a frame on the canonical grid: each average landmark moves by
 * the in-plane part of the frame's translation at that point (grid v points
 * down, canonical y up).
 */
FiducialSet frame_fiducials(const DepthMesh& frame, const DepthMesh& average, const FiducialSet& average_fiducials);

/// Carries driver-grid landmarks onto the puppet grid: q -> q + forward(q).
FiducialSet driver_to_puppet(const FiducialSet& fiducials, const Correspondence& correspondence);

} /* namespace deform */
} /* namespace facepuppet */

#endif /* FACEPUPPET_DEFORM_TRANSFER_HPP */
