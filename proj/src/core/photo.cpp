/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: src/core/photo.cpp
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
#include "facepuppet/core/photo.hpp"
#include "facepuppet/core/error.hpp"

#include "Eigen/LU"

#include <algorithm>
#include <filesystem>

namespace fs = std::filesystem;

namespace facepuppet {

Pose::Pose(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation, const Intrinsics& intrinsics)
    : rotation_(rotation), translation_(translation), intrinsics_(intrinsics)
{
    if (!rotation.allFinite() || !translation.allFinite())
    {
        throw InputError("Pose: non-finite parameters");
    }
    if ((rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-6)
    {
        throw InputError("Pose: rotation is not orthonormal");
    }
    if (std::abs(rotation.determinant() - 1.0) > 1e-6)
    {
        throw InputError("Pose: rotation determinant is not +1");
    }
}

Eigen::Vector2d Pose::project(const Eigen::Vector3d& point) const noexcept
{
    const Eigen::Vector3d c = to_camera(point);
    const double d = -c.z();
    return {intrinsics_.cx + intrinsics_.focal * c.x() / d, intrinsics_.cy - intrinsics_.focal * c.y() / d};
}

PhotoCollection::PhotoCollection(std::vector<PhotoRecord> records) : records_(std::move(records))
{
    if (records_.empty())
    {
        throw InputError("photo collection: no records");
    }
}

PhotoCollection PhotoCollection::without(const std::string& id) const
{
    std::vector<PhotoRecord> kept;
    std::copy_if(records_.begin(), records_.end(), std::back_inserter(kept),
                 [&](const PhotoRecord& r) { return r.id != id; });
    return PhotoCollection(std::move(kept));
}

PhotoRecord load_photo_record(const std::string& png_path)
{
    const fs::path image_path(png_path);
    const fs::path landmark_path = fs::path(image_path).replace_extension(".csv");
    if (!fs::exists(landmark_path))
    {
        throw InputError("missing landmark file " + landmark_path.string());
    }
    FaceImage image = load_png(image_path.string());
    FiducialSet fiducials = load_fiducials_csv(landmark_path.string());
    return PhotoRecord{image_path.stem().string(), std::move(image), std::move(fiducials), std::nullopt};
}

CollectionLoad load_photo_collection(const std::string& directory)
{
    if (!fs::is_directory(directory))
    {
        throw InputError("not a directory: " + directory);
    }
    std::vector<fs::path> images;
    for (const auto& entry : fs::directory_iterator(directory))
    {
        if (entry.is_regular_file() && entry.path().extension() == ".png")
        {
            images.push_back(entry.path());
        }
    }
    std::sort(images.begin(), images.end());

    std::vector<PhotoRecord> records;
    std::vector<IngestDiagnostic> skipped;
    for (const auto& path : images)
    {
        try
        {
            records.push_back(load_photo_record(path.string()));
        } catch (const InputError& e)
        {
            skipped.push_back({path.stem().string(), e.what()});
        }
    }
    if (records.empty())
    {
        throw InputError("no records in " + directory);
    }
    return CollectionLoad{PhotoCollection(std::move(records)), std::move(skipped)};
}

} /* namespace facepuppet */
