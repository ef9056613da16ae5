/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: include/facepuppet/core/photo.hpp
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

#ifndef FACEPUPPET_CORE_PHOTO_HPP
#define FACEPUPPET_CORE_PHOTO_HPP

#include "facepuppet/core/fiducials.hpp"
#include "facepuppet/core/image.hpp"

#include "Eigen/Core"

#include <optional>
#include <string>
#include <vector>

namespace facepuppet {

/// Pinhole intrinsics. Pixel coordinates have y pointing down.
struct Intrinsics
{
    double focal = 0.0;
    double cx = 0.0;
    double cy = 0.0;

    /// Focal length equal to the image width, principal point at the image centre.
    static Intrinsics default_for(int width, int height) noexcept
    {
        return {static_cast<double>(width), (width - 1) / 2.0, (height - 1) / 2.0};
    }
};

/**
 * Rigid pose of the canonical face frame relative to the camera.
 *
 * Camera coordinates share the canonical convention (x right, y up, z toward
 * the viewer); the camera looks down -z, so a point X_c = R X + t is in
 * front of it when X_c.z < 0, and projects to
 *   (cx + f X_c.x / d, cy - f X_c.y / d) with d = -X_c.z.
 */
class Pose
{
public:
    /// Throws InputError unless rotation is orthonormal (1e-6) with det +1.
    Pose(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation, const Intrinsics& intrinsics);

    const Eigen::Matrix3d& rotation() const noexcept { return rotation_; }
    const Eigen::Vector3d& translation() const noexcept { return translation_; }
    const Intrinsics& intrinsics() const noexcept { return intrinsics_; }

    Eigen::Vector3d to_camera(const Eigen::Vector3d& point) const noexcept { return rotation_ * point + translation_; }
    /// Positive distance along the viewing direction.
    double depth(const Eigen::Vector3d& point) const noexcept { return -to_camera(point).z(); }
    Eigen::Vector2d project(const Eigen::Vector3d& point) const noexcept;

private:
    Eigen::Matrix3d rotation_;
    Eigen::Vector3d translation_;
    Intrinsics intrinsics_;
};

/// One photo of a collection: the image, its 49 landmarks and optionally a known pose.
struct PhotoRecord
{
    std::string id;
    FaceImage image;
    FiducialSet fiducials;
    std::optional<Pose> pose;
};

/// A non-empty list of photo records.
class PhotoCollection
{
public:
    /// Throws InputError when records is empty.
    explicit PhotoCollection(std::vector<PhotoRecord> records);

    std::size_t size() const noexcept { return records_.size(); }
    const PhotoRecord& operator[](std::size_t i) const noexcept { return records_[i]; }
    const std::vector<PhotoRecord>& records() const noexcept { return records_; }
    auto begin() const noexcept { return records_.begin(); }
    auto end() const noexcept { return records_.end(); }

    /// Copy without the record whose id matches; throws InputError if nothing would remain.
    PhotoCollection without(const std::string& id) const;

private:
    std::vector<PhotoRecord> records_;
};

/// A record that could not be ingested.
struct IngestDiagnostic
{
    std::string id;
    std::string message;
};

struct CollectionLoad
{
    PhotoCollection collection;
    std::vector<IngestDiagnostic> skipped;
};

/**
 * Loads every `<name>.png` in a directory together with its sibling
 * `<name>.csv` landmark file, in lexicographic file-name order. Records whose
 * landmarks are missing or malformed are skipped and reported. Throws
 * InputError ("no records") when nothing could be loaded.
 */
CollectionLoad load_photo_collection(const std::string& directory);

/// Loads a single photo and its sibling landmark CSV.
PhotoRecord load_photo_record(const std::string& png_path);

} /* namespace facepuppet */

#endif /* FACEPUPPET_CORE_PHOTO_HPP */
