// MIT License
//
// Copyright (c) 2026 The mireg authors.
//
// Permission is hereby granted, free of charge, to any person obtaining a copy
// of this software and associated documentation files (the "Software"), to deal
// in the Software without restriction, including without limitation the rights
// to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
// copies of the Software, and to permit persons to whom the Software is
// furnished to do so, subject to the following conditions:
//
// The above copyright notice and this permission notice shall be included in all
// copies or substantial portions of the Software.
//
// THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
// IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
// FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
// AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
// LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
// OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
// SOFTWARE.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mireg/geometry.hpp"

namespace mireg {

// World-from-sensor pose per scan index.
using PoseTrack = std::vector<RigidTransform>;

// Packed little-endian float32 (x, y, z, intensity) records. An empty file
// yields an empty cloud; check `empty()` and warn at the call site.
PointCloud load_kitti_bin(const std::filesystem::path &path);
void save_kitti_bin(const std::filesystem::path &path, const PointCloud &cloud);

// "x y z [i]" per line, '#' starts a comment.
PointCloud load_xyz_text(const std::filesystem::path &path);
void save_xyz_text(const std::filesystem::path &path, const PointCloud &cloud);

// ASCII 1.0 PLY with float x/y/z vertex properties (other properties ignored,
// an "intensity" property is kept).
PointCloud load_ply_ascii(const std::filesystem::path &path);
void save_ply_ascii(const std::filesystem::path &path, const PointCloud &cloud);

enum class CloudFormat { KittiBin, XyzText, PlyAscii };

// Dispatches on extension: .bin, .xyz/.txt, .ply.
CloudFormat format_from_extension(const std::filesystem::path &path);
CloudFormat parse_cloud_format(const std::string &name);
PointCloud load_cloud(const std::filesystem::path &path);
PointCloud load_cloud(const std::filesystem::path &path, CloudFormat format);
void save_cloud(const std::filesystem::path &path, const PointCloud &cloud, CloudFormat format);

// 12 floats per line, row-major 3x4. Rotations within 1e-6 of orthonormal are
// re-orthonormalized; anything further off is a FormatError.
PoseTrack load_kitti_poses(const std::filesystem::path &path);
void save_kitti_poses(const std::filesystem::path &path, const PoseTrack &track);
std::string to_kitti_pose_line(const RigidTransform &transform);

// inverse(pose_i) * pose_j: maps scan j's points into scan i's frame.
RigidTransform relative_ground_truth(const PoseTrack &track, std::size_t i, std::size_t j);

}  // namespace mireg
