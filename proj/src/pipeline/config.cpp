/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: src/pipeline/config.cpp
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
#include "facepuppet/pipeline/config.hpp"
#include "facepuppet/core/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>

namespace facepuppet {
namespace pipeline {

namespace {

std::string format(double v)
{
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), v);
    return std::string(buffer, result.ptr);
}

std::string format(int v)
{
    return std::to_string(v);
}

std::string format(bool v)
{
    return v ? "true" : "false";
}

void parse(const std::string& key, const std::string& text, double& out)
{
    double v = 0.0;
    const auto result = std::from_chars(text.data(), text.data() + text.size(), v);
    if (result.ec != std::errc() || result.ptr != text.data() + text.size() || !std::isfinite(v))
    {
        throw InputError("config: '" + key + "' expects a number, got '" + text + "'");
    }
    out = v;
}

void parse(const std::string& key, const std::string& text, int& out)
{
    int v = 0;
    const auto result = std::from_chars(text.data(), text.data() + text.size(), v);
    if (result.ec != std::errc() || result.ptr != text.data() + text.size())
    {
        throw InputError("config: '" + key + "' expects an integer, got '" + text + "'");
    }
    out = v;
}

void parse(const std::string& key, const std::string& text, bool& out)
{
    if (text == "true" || text == "1" || text == "yes" || text == "on")
    {
        out = true;
    }
    else if (text == "false" || text == "0" || text == "no" || text == "off")
    {
        out = false;
    }
    else
    {
        throw InputError("config: '" + key + "' expects true or false, got '" + text + "'");
    }
}

void parse(const std::string&, const std::string& text, std::string& out)
{
    out = text;
}

struct Knob
{
    std::string key;
    bool path;
    std::function<std::string(const PipelineConfig&)> get;
    std::function<void(PipelineConfig&, const std::string&)> set;
};

template <class T>
Knob knob(std::string key, T PipelineConfig::*member, bool path = false)
{
    return Knob{key, path, [member](const PipelineConfig& c) {
                    if constexpr (std::is_same_v<T, std::string>)
                    {
                        return c.*member;
                    }
                    else
                    {
                        return format(c.*member);
                    }
                },
                [member, key](PipelineConfig& c, const std::string& text) { parse(key, text, c.*member); }};
}

template <class T>
Knob flow_knob(std::string key, T flow::FlowParams::*member)
{
    return Knob{key, false, [member](const PipelineConfig& c) { return format(c.flow.*member); },
                [member, key](PipelineConfig& c, const std::string& text) { parse(key, text, c.flow.*member); }};
}

const std::vector<Knob>& knobs()
{
    static const std::vector<Knob> table = [] {
        std::vector<Knob> k;
        k.push_back(knob("puppet_photos", &PipelineConfig::puppet_photos, true));
        k.push_back(knob("driver_photos", &PipelineConfig::driver_photos, true));
        k.push_back(knob("driver_frames", &PipelineConfig::driver_frames, true));
        k.push_back(knob("puppet_mesh", &PipelineConfig::puppet_mesh, true));
        k.push_back(knob("driver_mesh", &PipelineConfig::driver_mesh, true));
        k.push_back(knob("template_mesh", &PipelineConfig::template_mesh, true));
        k.push_back(knob("template_landmarks", &PipelineConfig::template_landmarks, true));
        k.push_back(knob("target", &PipelineConfig::target, true));
        k.push_back(knob("out", &PipelineConfig::out, true));
        k.push_back(knob("tps_lambda", &PipelineConfig::tps_lambda));
        k.push_back(knob("sigma", &PipelineConfig::sigma));
        k.push_back(knob("alpha", &PipelineConfig::alpha));
        k.push_back(knob("beta", &PipelineConfig::beta));
        k.push_back(knob("tau", &PipelineConfig::tau));
        k.push_back(knob("pyramid_depth", &PipelineConfig::pyramid_depth));
        k.push_back(knob("subspace_rank", &PipelineConfig::subspace_rank));
        k.push_back(knob("dense_flow_alpha", &PipelineConfig::dense_flow_alpha));
        k.push_back(flow_knob("flow_alpha", &flow::FlowParams::alpha));
        k.push_back(flow_knob("flow_ratio", &flow::FlowParams::ratio));
        k.push_back(flow_knob("flow_min_width", &flow::FlowParams::min_width));
        k.push_back(flow_knob("flow_outer_iterations", &flow::FlowParams::outer_iterations));
        k.push_back(flow_knob("flow_inner_iterations", &flow::FlowParams::inner_iterations));
        k.push_back(flow_knob("flow_sor_iterations", &flow::FlowParams::sor_iterations));
        k.push_back(knob("tv_weight", &PipelineConfig::tv_weight));
        k.push_back(knob("huber_eps", &PipelineConfig::huber_eps));
        k.push_back(knob("denoise_iterations", &PipelineConfig::denoise_iterations));
        k.push_back(knob("reference_mode", &PipelineConfig::reference_mode));
        k.push_back(knob("hold_out", &PipelineConfig::hold_out));
        k.push_back(knob("baselines", &PipelineConfig::baselines));
        k.push_back(knob("weight_maps", &PipelineConfig::weight_maps));
        k.push_back(knob("preview", &PipelineConfig::preview));
        k.push_back(Knob{"texture_mode", false,
                         [](const PipelineConfig& c) {
                             return std::string(c.texture_mode == TextureMode::neutral ? "neutral" : "per-frame");
                         },
                         [](PipelineConfig& c, const std::string& text) {
                             if (text == "neutral")
                             {
                                 c.texture_mode = TextureMode::neutral;
                             }
                             else if (text == "per-frame")
                             {
                                 c.texture_mode = TextureMode::per_frame;
                             }
                             else
                             {
                                 throw InputError("config: 'texture_mode' expects neutral or per-frame, got '" + text +
                                                  "'");
                             }
                         }});
        k.push_back(knob("threads", &PipelineConfig::threads));
        return k;
    }();
    return table;
}

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos)
    {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

} // namespace

texture::AlignParams PipelineConfig::align_params() const
{
    texture::AlignParams p;
    p.tps_lambda = tps_lambda;
    p.flow = flow;
    p.flow.alpha = dense_flow_alpha;
    p.subspace_rank = subspace_rank;
    return p;
}

texture::BlendParams PipelineConfig::blend_params() const
{
    return texture::BlendParams{sigma, alpha, beta, tau, pyramid_depth};
}

denoise::DenoiseParams PipelineConfig::denoise_params() const
{
    denoise::DenoiseParams p;
    p.tv_weight = tv_weight;
    p.huber_eps = huber_eps;
    p.max_iterations = denoise_iterations;
    return p;
}

void PipelineConfig::validate() const
{
    if (!(tps_lambda >= 0.0))
    {
        throw InputError("config: tps_lambda must be non-negative");
    }
    blend_params().validate();
    if (pyramid_depth == 1)
    {
        throw InputError("config: pyramid_depth must be 0 (automatic) or at least 2");
    }
    if (subspace_rank < 1)
    {
        throw InputError("config: subspace_rank must be at least 1");
    }
    if (!(dense_flow_alpha >= 0.0))
    {
        throw InputError("config: dense_flow_alpha must be non-negative");
    }
    flow.validate();
    if (!(tv_weight >= 0.0) || !(huber_eps > 0.0) || denoise_iterations < 1)
    {
        throw InputError("config: tv_weight >= 0, huber_eps > 0 and denoise_iterations >= 1 required");
    }
    if (threads < 1)
    {
        throw InputError("config: threads must be at least 1");
    }
}

void set_config_value(PipelineConfig& config, const std::string& key, const std::string& value)
{
    for (const auto& k : knobs())
    {
        if (k.key == key)
        {
            k.set(config, value);
            return;
        }
    }
    throw InputError("config: unknown key '" + key + "'");
}

std::vector<std::pair<std::string, std::string>> config_entries(const PipelineConfig& config)
{
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& k : knobs())
    {
        out.emplace_back(k.key, k.get(config));
    }
    return out;
}

bool is_path_key(const std::string& key)
{
    for (const auto& k : knobs())
    {
        if (k.key == key)
        {
            return k.path;
        }
    }
    return false;
}

void apply_config_file(PipelineConfig& config, const std::string& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw InputError("config: cannot read " + path);
    }
    std::string line;
    int number = 0;
    while (std::getline(in, line))
    {
        ++number;
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#')
        {
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos)
        {
            throw InputError("config: " + path + ":" + std::to_string(number) + ": expected key=value");
        }
        set_config_value(config, trim(text.substr(0, eq)), trim(text.substr(eq + 1)));
    }
}

} /* namespace pipeline */
} /* namespace facepuppet */
