/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: include/facepuppet/pipeline/config.hpp
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

#ifndef FACEPUPPET_PIPELINE_CONFIG_HPP
#define FACEPUPPET_PIPELINE_CONFIG_HPP

#include "facepuppet/denoise/rof_huber.hpp"
#include "facepuppet/flow/optical_flow.hpp"
#include "facepuppet/texture/align.hpp"
#include "facepuppet/texture/blend.hpp"

#include <string>
#include <utility>
#include <vector>

namespace facepuppet {
namespace pipeline {

enum class TextureMode { neutral, per_frame };

/**
 * Every knob of the batch pipeline. Defaults are the published settings.
 *
 * Values are set by key (the names printed by config_entries) from a
 * key=value file and then from command-line flags, so flags win over the
 * file and the file wins over the defaults.
 */
struct PipelineConfig
{
    // Paths.
    std::string puppet_photos;      ///< directory of PNG + landmark CSV pairs
    std::string driver_photos;
    std::string driver_frames;      ///< directory of frame_NNNN.pfmesh files
    std::string puppet_mesh;        ///< average depth mesh of the puppet
    std::string driver_mesh;
    std::string template_mesh;
    std::string template_landmarks; ///< 49 rows of x,y,z
    std::string target;             ///< landmark CSV (canonical grid) or reference PNG
    std::string out;

    // Texture alignment and blending.
    double tps_lambda = 10.0;
    double sigma = 10.0;
    double alpha = 1.0;
    double beta = 20.0;
    double tau = 1.0;
    int pyramid_depth = 0; ///< 0 = automatic
    int subspace_rank = 4;
    double dense_flow_alpha = 0.3;

    // Optical flow (correspondence and the `flow` command).
    flow::FlowParams flow;

    // Denoising of the transferred magnitudes.
    double tv_weight = 1.0;
    double huber_eps = 0.05;
    int denoise_iterations = 300;

    // Modes.
    bool reference_mode = false; ///< set when the texture target is a photo
    bool hold_out = false;       ///< drop the reference photo from the collection
    bool baselines = false;
    bool weight_maps = false;
    bool preview = true;
    TextureMode texture_mode = TextureMode::neutral;
    int threads = 1;

    texture::AlignParams align_params() const;
    texture::BlendParams blend_params() const;
    denoise::DenoiseParams denoise_params() const;

    /// Throws InputError for values outside their documented ranges.
    void validate() const;
};

/// Sets one knob from its textual value. Throws InputError for unknown keys or malformed values.
void set_config_value(PipelineConfig& config, const std::string& key, const std::string& value);

/// All knobs as (key, value) in a fixed order; doubles print in shortest round-trip form.
std::vector<std::pair<std::string, std::string>> config_entries(const PipelineConfig& config);

/// Keys holding filesystem paths.
bool is_path_key(const std::string& key);

/**
 * Applies a flat key=value file on top of `config`. Blank lines and lines
 * starting with '#' are ignored; whitespace around keys and values is trimmed.
 */
void apply_config_file(PipelineConfig& config, const std::string& path);

} /* namespace pipeline */
} /* namespace facepuppet */

#endif /* FACEPUPPET_PIPELINE_CONFIG_HPP */
