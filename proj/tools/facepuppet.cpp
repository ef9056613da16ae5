/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: tools/facepuppet.cpp
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
#include "facepuppet/core/error.hpp"
#include "facepuppet/pipeline/commands.hpp"
#include "facepuppet/pipeline/config.hpp"
#include "facepuppet/pipeline/manifest.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <map>
#include <string>

using namespace facepuppet;
using namespace facepuppet::pipeline;

namespace {

const std::set<std::string> bool_keys = {"reference_mode", "hold_out", "baselines", "weight_maps", "preview"};

std::string flag_name(std::string key)
{
    std::replace(key.begin(), key.end(), '_', '-');
    return "--" + key;
}

/**
 * Every config key becomes --key-name on the subcommand. Values are kept as
 * text so that they can be applied after the config file: command line wins
 * over the file, which wins over the built-in defaults.
 */
struct Overrides
{
    std::string config_file;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;

    void attach(CLI::App* app)
    {
        app->add_option("--config", config_file, "key=value settings file (command-line flags take precedence)");
        const PipelineConfig defaults;
        for (const auto& [key, value] : config_entries(defaults))
        {
            std::string& slot = values[key];
            if (bool_keys.count(key))
            {
                options[key] = app->add_flag(flag_name(key), slot, "(default " + value + ")");
            }
            else
            {
                options[key] = app->add_option(flag_name(key), slot, value.empty() ? "" : "(default " + value + ")");
            }
        }
        app->add_flag("--no-preview", no_preview, "skip the preview renders");
    }

    PipelineConfig resolve() const
    {
        PipelineConfig config;
        if (!config_file.empty())
        {
            apply_config_file(config, config_file);
        }
        for (const auto& [key, option] : options)
        {
            if (option->count() > 0)
            {
                set_config_value(config, key, values.at(key));
            }
        }
        if (no_preview)
        {
            config.preview = false;
        }
        return config;
    }

    bool no_preview = false;
};

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"facepuppet: face reenactment from unstructured photo collections"};
    app.set_version_flag("--version", std::string(version));
    app.require_subcommand(1);

    Overrides average_args, texture_args, transfer_args, puppet_args, flow_args;
    CLI::App* average = app.add_subcommand("average", "Average texture of a collection, with the stage images");
    average_args.attach(average);
    CLI::App* texture = app.add_subcommand("texture", "Expression-specific texture for a target expression");
    texture_args.attach(texture);
    CLI::App* transfer = app.add_subcommand("transfer", "Transfer driver frame deformations onto the puppet mesh");
    transfer_args.attach(transfer);
    CLI::App* puppet = app.add_subcommand("puppet", "Full reenactment: deformed puppet meshes, textures and previews");
    puppet_args.attach(puppet);
    CLI::App* flow = app.add_subcommand("flow", "Dense optical flow between two images");
    std::string flow_source, flow_target;
    flow->add_option("source", flow_source, "source PNG")->required();
    flow->add_option("target_png", flow_target, "target PNG")->required();
    flow_args.attach(flow);

    try
    {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try
    {
        if (average->parsed())
        {
            cmd_average(average_args.resolve());
        }
        else if (texture->parsed())
        {
            cmd_texture(texture_args.resolve());
        }
        else if (transfer->parsed())
        {
            cmd_transfer(transfer_args.resolve());
        }
        else if (puppet->parsed())
        {
            cmd_puppet(puppet_args.resolve());
        }
        else if (flow->parsed())
        {
            cmd_flow(flow_args.resolve(), flow_source, flow_target);
        }
    } catch (const InputError& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e)
    {
        std::cerr << "failed: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
