/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: include/facepuppet/pipeline/manifest.hpp
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

#ifndef FACEPUPPET_PIPELINE_MANIFEST_HPP
#define FACEPUPPET_PIPELINE_MANIFEST_HPP

#include "facepuppet/pipeline/config.hpp"

#include <chrono>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace facepuppet {
namespace pipeline {

inline constexpr const char* version = "0.1.0";

/// Names of the run records written next to the artifacts.
inline constexpr const char* manifest_file = "manifest.json";
inline constexpr const char* timings_file = "timings.csv";

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(const std::string& bytes);

/**
 * Records one command run: the config echo, content hashes of inputs and
 * outputs, library versions and per-stage wall-clock timings.
 *
 * The manifest holds only reproducible content, so identical inputs give a
 * byte-identical manifest: input paths appear as role/file-name, path-valued
 * config keys and the thread count are omitted from the echo, and timings
 * go to timings.csv (per-frame timings to frame_timing.csv, also unhashed).
 */
class RunRecorder
{
public:
    RunRecorder(std::string command, const PipelineConfig& config);

    const std::filesystem::path& out() const noexcept { return out_; }

    /// Hashes a file under a role, e.g. ("puppet_photos", ".../p001.png").
    void add_input(const std::string& role, const std::filesystem::path& path);
    /// Hashes every regular file in a directory (sorted by name).
    void add_input_directory(const std::string& role, const std::filesystem::path& directory);

    /// Runs fn as a named stage, recording its duration. The stage name is kept for failure reports.
    template <class Fn>
    auto stage(const std::string& name, Fn&& fn)
    {
        current_stage_ = name;
        const auto start = std::chrono::steady_clock::now();
        struct Record
        {
            RunRecorder& self;
            const std::string& name;
            std::chrono::steady_clock::time_point start;
            ~Record()
            {
                self.timings_.emplace_back(
                    name, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
            }
        } record{*this, name, start};
        return fn();
    }

    const std::string& current_stage() const noexcept { return current_stage_; }

    /// Writes manifest.json (status "ok") and timings.csv.
    void finish();
    /// Writes manifest.json with status "failed", the failing stage and the message.
    void fail(const std::string& message);

    /// The manifest text that finish() would write.
    std::string manifest_text(const std::string& status, const std::string& message = {}) const;

private:
    void write(const std::string& status, const std::string& message);

    std::string command_;
    std::vector<std::pair<std::string, std::string>> config_;
    std::filesystem::path out_;
    std::vector<std::pair<std::string, std::string>> inputs_; // name, sha256
    std::vector<std::pair<std::string, double>> timings_;
    std::string current_stage_ = "load"; // input loading happens outside named stages
};

} /* namespace pipeline */
} /* namespace facepuppet */

#endif /* FACEPUPPET_PIPELINE_MANIFEST_HPP */
