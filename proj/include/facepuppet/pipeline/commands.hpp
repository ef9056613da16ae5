/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: include/facepuppet/pipeline/commands.hpp
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

#ifndef FACEPUPPET_PIPELINE_COMMANDS_HPP
#define FACEPUPPET_PIPELINE_COMMANDS_HPP

#include "facepuppet/pipeline/config.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace facepuppet {
namespace pipeline {

/// Per-frame timing file written by `transfer` and `puppet`.
inline constexpr const char* frame_timing_file = "frame_timing.csv";

/**
 * The batch subcommands. Each validates the config, writes its artifacts
 * under config.out together with manifest.json and timings.csv, and throws
 * InputError (bad usage or input) or ComputationError (a numerical stage
 * failed). On failure the manifest is still written, marking the stage.
 */
void cmd_average(const PipelineConfig& config);
void cmd_texture(const PipelineConfig& config);
void cmd_transfer(const PipelineConfig& config);
void cmd_puppet(const PipelineConfig& config);
void cmd_flow(const PipelineConfig& config, const std::string& source_png, const std::string& target_png);

/// A driver frame file and its sequence number (from frame_NNNN.pfmesh).
struct FrameFile
{
    int index;
    std::filesystem::path path;
};

/// Lists frame meshes in order. Throws InputError for an empty directory or gaps in the numbering.
std::vector<FrameFile> list_frames(const std::string& directory);

} /* namespace pipeline */
} /* namespace facepuppet */

#endif /* FACEPUPPET_PIPELINE_COMMANDS_HPP */
