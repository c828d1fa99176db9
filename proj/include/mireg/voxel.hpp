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

#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "mireg/geometry.hpp"
#include "mireg/parallel.hpp"

namespace mireg {

// Regular cubic grid. Point p falls in voxel floor((p - origin) / resolution),
// so a point exactly on a face belongs to the higher-index voxel.
struct GridSpec {
    Point3 origin = Point3::Zero();
    double resolution = 1.0;

    void validate() const;
};

// Indices must lie in [-2^20, 2^20) so that three of them pack into a single
// 64-bit word without collisions.
constexpr std::int64_t kVoxelIndexLimit = std::int64_t{1} << 20;

struct VoxelKey {
    std::int32_t ix = 0, iy = 0, iz = 0;

    auto operator<=>(const VoxelKey &) const = default;
};

// Order-preserving packing: pack(a) < pack(b) iff a < b lexicographically.
std::uint64_t pack(const VoxelKey &key);
VoxelKey unpack(std::uint64_t packed);

// Inclusive integer box of voxel indices. Also used for overlap regions.
struct VoxelBox {
    VoxelKey lo{}, hi{};
    bool empty = true;

    static VoxelBox empty_box() { return {}; }
    bool contains(const VoxelKey &key) const;
    // Grows the box to include key.
    void extend(const VoxelKey &key);
    bool operator==(const VoxelBox &) const = default;
};

using OverlapRegion = VoxelBox;

// Points grouped by voxel. Voxels are sorted by packed key and each voxel's
// point indices are ascending, so the layout is fully determined by the input.
struct VoxelMap {
    std::vector<std::uint64_t> keys;
    std::vector<std::uint32_t> offsets;  // keys.size() + 1 entries
    std::vector<std::uint32_t> point_indices;
    VoxelBox bounds;

    std::size_t voxel_count() const { return keys.size(); }
    std::span<const std::uint32_t> points_in(std::size_t voxel) const {
        return {point_indices.data() + offsets[voxel], point_indices.data() + offsets[voxel + 1]};
    }
};

VoxelKey voxel_key(const Point3 &p, const GridSpec &grid);

// Throws OutOfBounds naming the first point whose index leaves the packable
// range, InvalidArgument for an empty or non-finite cloud.
VoxelMap voxelize(const PointCloud &cloud, const GridSpec &grid,
                  Execution exec = Execution::Parallel);

enum class FeatureKind { VarZ, Count };

std::string to_string(FeatureKind kind);
FeatureKind parse_feature_kind(const std::string &name);

// Sparse per-voxel features. Keys absent from the map carry the no-feature
// value phi. Sorted by packed key with parallel value storage.
struct FeatureMap {
    FeatureKind kind = FeatureKind::VarZ;
    std::vector<std::uint64_t> keys;
    std::vector<double> values;
    VoxelBox bounds;

    std::size_t size() const { return keys.size(); }
    std::optional<double> find(const VoxelKey &key) const;
};

// VarZ is the population variance of member z values (divisor n), evaluated
// mean-first in ascending point order. Count is the member count.
FeatureMap compute_feature_map(const VoxelMap &voxels, const PointCloud &cloud, FeatureKind kind,
                               Execution exec = Execution::Parallel);

inline FeatureMap build_feature_map(const PointCloud &cloud, const GridSpec &grid, FeatureKind kind,
                                    Execution exec = Execution::Parallel) {
    return compute_feature_map(voxelize(cloud, grid, exec), cloud, kind, exec);
}

// Per-axis max of the minima and min of the maxima.
OverlapRegion compute_overlap(const VoxelBox &a, const VoxelBox &b);
std::uint64_t overlap_voxel_count(const OverlapRegion &region);

// "ix,iy,iz,feature" per occupied voxel, with a header line.
void write_feature_csv(std::ostream &out, const FeatureMap &features);

}  // namespace mireg
