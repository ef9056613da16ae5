/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: src/core/fiducials.cpp
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
#include "facepuppet/core/fiducials.hpp"
#include "facepuppet/core/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace facepuppet {

FiducialSet::FiducialSet(std::span<const Eigen::Vector2d> points)
{
    if (points.size() != count)
    {
        throw InputError("FiducialSet: expected 49 points, got " + std::to_string(points.size()));
    }
    for (int i = 0; i < count; ++i)
    {
        if (!points[i].allFinite())
        {
            throw InputError("FiducialSet: point " + std::to_string(i) + " is not finite");
        }
        points_[i] = points[i];
    }
}

double FiducialSet::distance(const FiducialSet& other) const noexcept
{
    double sum = 0.0;
    for (int i = 0; i < count; ++i)
    {
        sum += (points_[i] - other.points_[i]).squaredNorm();
    }
    return std::sqrt(sum);
}

double FiducialSet::rms_distance(const FiducialSet& other) const noexcept
{
    return distance(other) / std::sqrt(static_cast<double>(count));
}

FiducialSet FiducialSet::translated(const Eigen::Vector2d& offset) const
{
    std::array<Eigen::Vector2d, count> moved = points_;
    for (auto& p : moved)
    {
        p += offset;
    }
    return FiducialSet(moved);
}

FiducialSet mean_fiducials(std::span<const FiducialSet> sets)
{
    if (sets.empty())
    {
        throw InputError("mean_fiducials: no fiducial sets");
    }
    std::array<Eigen::Vector2d, FiducialSet::count> mean;
    mean.fill(Eigen::Vector2d::Zero());
    for (const auto& set : sets)
    {
        for (int i = 0; i < FiducialSet::count; ++i)
        {
            mean[i] += set[i];
        }
    }
    for (auto& p : mean)
    {
        p /= static_cast<double>(sets.size());
    }
    return FiducialSet(mean);
}

namespace {

bool parse_double(std::string_view text, double& value)
{
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t'))
    {
        text.remove_prefix(1);
    }
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
    {
        text.remove_suffix(1);
    }
    if (text.empty())
    {
        return false;
    }
    const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
    return result.ec == std::errc() && result.ptr == text.data() + text.size();
}

} // namespace

FiducialSet load_fiducials_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw InputError("cannot open landmark file: " + path);
    }
    std::vector<Eigen::Vector2d> points;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line))
    {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
        {
            continue;
        }
        const auto comma = line.find(',');
        double x = 0.0;
        double y = 0.0;
        const bool ok = comma != std::string::npos &&
                        parse_double(std::string_view(line).substr(0, comma), x) &&
                        parse_double(std::string_view(line).substr(comma + 1), y);
        if (!ok)
        {
            if (line_number == 1 && points.empty())
            {
                continue; // header
            }
            throw InputError(path + ":" + std::to_string(line_number) + ": malformed landmark row");
        }
        points.emplace_back(x, y);
    }
    if (points.size() != FiducialSet::count)
    {
        throw InputError(path + ": expected 49 landmark rows, found " + std::to_string(points.size()));
    }
    return FiducialSet(points);
}

void save_fiducials_csv(const FiducialSet& fiducials, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
    {
        throw InputError("cannot write landmark file: " + path);
    }
    out << "x,y\n" << std::setprecision(17);
    for (const auto& p : fiducials.points())
    {
        out << p.x() << ',' << p.y() << '\n';
    }
}

} /* namespace facepuppet */
