/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: src/pipeline/manifest.cpp
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
#include "facepuppet/pipeline/manifest.hpp"
#include "facepuppet/core/error.hpp"

#include "Eigen/Core"
#include "json.hpp"
#include "opencv2/core/version.hpp"
#include "openssl/evp.h"
#include "openssl/opensslv.h"

#include <algorithm>
#include <array>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

namespace facepuppet {
namespace pipeline {

namespace {

namespace fs = std::filesystem;

std::string to_hex(const unsigned char* digest, unsigned int length)
{
    std::ostringstream out;
    for (unsigned int i = 0; i < length; ++i)
    {
        out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return out.str();
}

class Sha256
{
public:
    Sha256() : ctx_(EVP_MD_CTX_new(), EVP_MD_CTX_free)
    {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1)
        {
            throw ComputationError("sha256: cannot initialise digest");
        }
    }
    void update(const char* data, std::size_t size)
    {
        if (EVP_DigestUpdate(ctx_.get(), data, size) != 1)
        {
            throw ComputationError("sha256: digest update failed");
        }
    }
    std::string hex()
    {
        std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
        unsigned int length = 0;
        if (EVP_DigestFinal_ex(ctx_.get(), digest.data(), &length) != 1)
        {
            throw ComputationError("sha256: digest finalisation failed");
        }
        return to_hex(digest.data(), length);
    }

private:
    std::unique_ptr<EVP_MD_CTX, void (*)(EVP_MD_CTX*)> ctx_;
};

bool is_run_record(const fs::path& relative)
{
    const std::string name = relative.generic_string();
    return name == manifest_file || name == timings_file || name == "frame_timing.csv";
}

} // namespace

std::string sha256_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw InputError("cannot read " + path.string());
    }
    Sha256 sha;
    std::array<char, 1 << 16> buffer{};
    while (in)
    {
        in.read(buffer.data(), buffer.size());
        sha.update(buffer.data(), static_cast<std::size_t>(in.gcount()));
    }
    return sha.hex();
}

std::string sha256_hex(const std::string& bytes)
{
    Sha256 sha;
    sha.update(bytes.data(), bytes.size());
    return sha.hex();
}

RunRecorder::RunRecorder(std::string command, const PipelineConfig& config)
    : command_(std::move(command)), out_(config.out)
{
    if (config.out.empty())
    {
        throw InputError("--out is required");
    }
    for (auto& [key, value] : config_entries(config))
    {
        // Thread count does not change any output, so it stays out of the echo.
        if (!is_path_key(key) && key != "threads")
        {
            config_.emplace_back(key, value);
        }
    }
    fs::create_directories(out_);
}

void RunRecorder::add_input(const std::string& role, const fs::path& path)
{
    inputs_.emplace_back(role + "/" + path.filename().string(), sha256_file(path));
}

void RunRecorder::add_input_directory(const std::string& role, const fs::path& directory)
{
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(directory))
    {
        if (entry.is_regular_file())
        {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files)
    {
        add_input(role, f);
    }
}

std::string RunRecorder::manifest_text(const std::string& status, const std::string& message) const
{
    nlohmann::ordered_json doc;
    doc["tool"] = "facepuppet";
    doc["command"] = command_;
    doc["status"] = status;
    if (status != "ok")
    {
        doc["failed_stage"] = current_stage_;
        doc["error"] = message;
    }
    doc["versions"] = {{"facepuppet", version},
                       {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                     "." + std::to_string(EIGEN_MINOR_VERSION)},
                       {"opencv", CV_VERSION},
                       {"openssl", OPENSSL_VERSION_TEXT}};
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    for (const auto& [key, value] : config_)
    {
        config[key] = value;
    }
    doc["config"] = config;
    nlohmann::ordered_json inputs = nlohmann::ordered_json::array();
    for (const auto& [name, hash] : inputs_)
    {
        inputs.push_back({{"path", name}, {"sha256", hash}});
    }
    doc["inputs"] = inputs;

    std::vector<fs::path> files;
    if (fs::exists(out_))
    {
        for (const auto& entry : fs::recursive_directory_iterator(out_))
        {
            const fs::path relative = fs::relative(entry.path(), out_);
            if (entry.is_regular_file() && !is_run_record(relative))
            {
                files.push_back(relative);
            }
        }
    }
    std::sort(files.begin(), files.end());
    nlohmann::ordered_json outputs = nlohmann::ordered_json::array();
    for (const auto& f : files)
    {
        outputs.push_back({{"path", f.generic_string()}, {"sha256", sha256_file(out_ / f)}});
    }
    doc["outputs"] = outputs;
    return doc.dump(2) + "\n";
}

void RunRecorder::write(const std::string& status, const std::string& message)
{
    fs::create_directories(out_);
    const std::string text = manifest_text(status, message);
    std::ofstream manifest(out_ / manifest_file, std::ios::binary);
    manifest << text;
    std::ofstream timings(out_ / timings_file);
    timings << "stage,milliseconds\n";
    for (const auto& [name, ms] : timings_)
    {
        timings << name << ',' << std::fixed << std::setprecision(3) << ms << '\n';
    }
    if (!manifest || !timings)
    {
        throw InputError("cannot write run records to " + out_.string());
    }
}

void RunRecorder::finish()
{
    write("ok", {});
}

void RunRecorder::fail(const std::string& message)
{
    write("failed", message);
}

} /* namespace pipeline */
} /* namespace facepuppet */
