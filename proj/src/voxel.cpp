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

#include "mireg/voxel.hpp"

#include <tbb/parallel_sort.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include "mireg/errors.hpp"

namespace mireg {

namespace {

constexpr int kBitsPerAxis = 21;
constexpr std::uint64_t kAxisMask = (std::uint64_t{1} << kBitsPerAxis) - 1;
constexpr std::size_t kPointChunk = 8192;
constexpr std::size_t kVoxelChunk = 4096;

struct KeyedPoint {
    std::uint64_t key;
    std::uint32_t index;
    bool operator<(const KeyedPoint &o) const { return key != o.key ? key < o.key : index < o.index; }
};

bool index_in_range(double q) {
    return q >= -static_cast<double>(kVoxelIndexLimit) && q < static_cast<double>(kVoxelIndexLimit);
}

}  // namespace

Execution parse_execution(const std::string &name) {
    if (name == "serial") return Execution::Serial;
    if (name == "parallel") return Execution::Parallel;
    throw InvalidArgument("unknown execution mode '" + name + "'");
}

void GridSpec::validate() const {
    if (!(resolution > 0.0) || !std::isfinite(resolution)) {
        throw ConfigError("grid resolution must be positive and finite");
    }
    if (!origin.allFinite()) throw ConfigError("grid origin must be finite");
}

std::uint64_t pack(const VoxelKey &key) {
    const auto field = [](std::int32_t v) {
        return static_cast<std::uint64_t>(static_cast<std::int64_t>(v) + kVoxelIndexLimit) & kAxisMask;
    };
    return field(key.ix) << (2 * kBitsPerAxis) | field(key.iy) << kBitsPerAxis | field(key.iz);
}

VoxelKey unpack(std::uint64_t packed) {
    const auto field = [](std::uint64_t v) {
        return static_cast<std::int32_t>(static_cast<std::int64_t>(v & kAxisMask) - kVoxelIndexLimit);
    };
    return {field(packed >> (2 * kBitsPerAxis)), field(packed >> kBitsPerAxis), field(packed)};
}

bool VoxelBox::contains(const VoxelKey &key) const {
    return !empty && key.ix >= lo.ix && key.ix <= hi.ix && key.iy >= lo.iy && key.iy <= hi.iy &&
           key.iz >= lo.iz && key.iz <= hi.iz;
}

void VoxelBox::extend(const VoxelKey &key) {
    if (empty) {
        lo = hi = key;
        empty = false;
        return;
    }
    lo = {std::min(lo.ix, key.ix), std::min(lo.iy, key.iy), std::min(lo.iz, key.iz)};
    hi = {std::max(hi.ix, key.ix), std::max(hi.iy, key.iy), std::max(hi.iz, key.iz)};
}

VoxelKey voxel_key(const Point3 &p, const GridSpec &grid) {
    const Eigen::Vector3d q = ((p - grid.origin) / grid.resolution).array().floor();
    if (!index_in_range(q.x()) || !index_in_range(q.y()) || !index_in_range(q.z())) {
        throw OutOfBounds("voxel index out of range");
    }
    return {static_cast<std::int32_t>(q.x()), static_cast<std::int32_t>(q.y()),
            static_cast<std::int32_t>(q.z())};
}

VoxelMap voxelize(const PointCloud &cloud, const GridSpec &grid, Execution exec) {
    grid.validate();
    if (cloud.empty()) throw InvalidArgument("cannot voxelize an empty cloud");
    if (cloud.size() >= std::numeric_limits<std::uint32_t>::max()) {
        throw InvalidArgument("cloud too large to voxelize");
    }
    const std::size_t n = cloud.size();
    std::vector<KeyedPoint> keyed(n);
    std::atomic<std::size_t> first_bad{n};
    const double inv_res = 1.0 / grid.resolution;

    // Map: point -> voxel key.
    for_each_chunk(n, kPointChunk, exec, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const Eigen::Vector3d q = ((cloud.points[i] - grid.origin) * inv_res).array().floor();
            if (!q.allFinite() || !index_in_range(q.x()) || !index_in_range(q.y()) ||
                !index_in_range(q.z())) {
                std::size_t seen = first_bad.load();
                while (i < seen && !first_bad.compare_exchange_weak(seen, i)) {
                }
                continue;
            }
            keyed[i] = {pack({static_cast<std::int32_t>(q.x()), static_cast<std::int32_t>(q.y()),
                              static_cast<std::int32_t>(q.z())}),
                        static_cast<std::uint32_t>(i)};
        }
    });
    if (const std::size_t bad = first_bad.load(); bad < n) {
        throw OutOfBounds("point " + std::to_string(bad) + " lies outside the representable voxel range");
    }

    if (exec == Execution::Parallel) {
        tbb::parallel_sort(keyed.begin(), keyed.end());
    } else {
        std::sort(keyed.begin(), keyed.end());
    }

    VoxelMap out;
    out.point_indices.resize(n);
    out.offsets.push_back(0);
    for (std::size_t i = 0; i < n; ++i) {
        out.point_indices[i] = keyed[i].index;
        if (i > 0 && keyed[i].key != keyed[i - 1].key) out.offsets.push_back(static_cast<std::uint32_t>(i));
        if (i == 0 || keyed[i].key != keyed[i - 1].key) {
            out.keys.push_back(keyed[i].key);
            out.bounds.extend(unpack(keyed[i].key));
        }
    }
    out.offsets.push_back(static_cast<std::uint32_t>(n));
    return out;
}

std::string to_string(FeatureKind kind) { return kind == FeatureKind::VarZ ? "varz" : "count"; }

FeatureKind parse_feature_kind(const std::string &name) {
    if (name == "varz" || name == "VarZ") return FeatureKind::VarZ;
    if (name == "count" || name == "n" || name == "Count") return FeatureKind::Count;
    throw InvalidArgument("unknown feature kind '" + name + "' (expected varz or count)");
}

std::optional<double> FeatureMap::find(const VoxelKey &key) const {
    const std::uint64_t packed = pack(key);
    const auto it = std::lower_bound(keys.begin(), keys.end(), packed);
    if (it == keys.end() || *it != packed) return std::nullopt;
    return values[static_cast<std::size_t>(it - keys.begin())];
}

FeatureMap compute_feature_map(const VoxelMap &voxels, const PointCloud &cloud, FeatureKind kind,
                               Execution exec) {
    FeatureMap out;
    out.kind = kind;
    out.keys = voxels.keys;
    out.bounds = voxels.bounds;
    out.values.resize(voxels.voxel_count());
    for_each_chunk(voxels.voxel_count(), kVoxelChunk, exec,
                   [&](std::size_t, std::size_t begin, std::size_t end) {
                       for (std::size_t v = begin; v < end; ++v) {
                           const auto members = voxels.points_in(v);
                           if (kind == FeatureKind::Count) {
                               out.values[v] = static_cast<double>(members.size());
                               continue;
                           }
                           double mean = 0.0;
                           for (const auto idx : members) mean += cloud.points[idx].z();
                           mean /= static_cast<double>(members.size());
                           double sq = 0.0;
                           for (const auto idx : members) {
                               const double d = cloud.points[idx].z() - mean;
                               sq += d * d;
                           }
                           out.values[v] = sq / static_cast<double>(members.size());
                       }
                   });
    return out;
}

OverlapRegion compute_overlap(const VoxelBox &a, const VoxelBox &b) {
    if (a.empty || b.empty) return VoxelBox::empty_box();
    OverlapRegion region;
    region.lo = {std::max(a.lo.ix, b.lo.ix), std::max(a.lo.iy, b.lo.iy), std::max(a.lo.iz, b.lo.iz)};
    region.hi = {std::min(a.hi.ix, b.hi.ix), std::min(a.hi.iy, b.hi.iy), std::min(a.hi.iz, b.hi.iz)};
    region.empty = region.lo.ix > region.hi.ix || region.lo.iy > region.hi.iy || region.lo.iz > region.hi.iz;
    if (region.empty) return VoxelBox::empty_box();
    return region;
}

std::uint64_t overlap_voxel_count(const OverlapRegion &region) {
    if (region.empty) return 0;
    const auto extent = [](std::int32_t lo, std::int32_t hi) {
        return static_cast<std::uint64_t>(static_cast<std::int64_t>(hi) - lo + 1);
    };
    return extent(region.lo.ix, region.hi.ix) * extent(region.lo.iy, region.hi.iy) *
           extent(region.lo.iz, region.hi.iz);
}

void write_feature_csv(std::ostream &out, const FeatureMap &features) {
    out << "ix,iy,iz,feature\n";
    for (std::size_t i = 0; i < features.size(); ++i) {
        const VoxelKey k = unpack(features.keys[i]);
        out << k.ix << ',' << k.iy << ',' << k.iz << ',' << features.values[i] << '\n';
    }
}

}  // namespace mireg
